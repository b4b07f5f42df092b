//! Partial transformations of the chain `[n] = {1, ..., n}`.
//!
//! A [`PartialMap`] stores its domain as a bitmask and its values in a dense
//! array, so it is `Copy` and composes in a handful of word operations.
//! Equality, hashing and ordering only ever see `(n, pairs)`: unused slots of
//! the value array are kept at zero.
//!
//! Composition is right-handed: `x (a ∘ b) = ((x) a) b`, written `a.then(&b)`
//! or [`compose`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported chain size.
pub const MAX_N: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartialMap {
    n: u8,
    dom: u16,
    val: [u8; MAX_N],
}

/// One kernel class `A_i` together with its common image point `a_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    pub points: Vec<usize>,
    pub value: usize,
}

/// The tabular form of a map: kernel classes ordered by their image point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KernelView {
    pub blocks: Vec<Block>,
}

impl KernelView {
    pub fn height(&self) -> usize {
        self.blocks.len()
    }

    /// `a_i <= min A_i` for every block and the blocks are linearly ordered.
    pub fn is_decreasing_linear(&self) -> bool {
        self.blocks.iter().all(|b| b.value <= b.points[0])
            && self
                .blocks
                .windows(2)
                .all(|w| w[0].points.last() < w[1].points.first())
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        Err(Error::ChainSize(n))
    } else {
        Ok(())
    }
}

#[inline]
fn bit(x: usize) -> u16 {
    1 << (x - 1)
}

fn mask_points(mask: u16) -> impl Iterator<Item = usize> {
    (1..=MAX_N).filter(move |&x| mask & bit(x) != 0)
}

impl PartialMap {
    /// The empty map on `[n]`.
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(PartialMap {
            n: n as u8,
            dom: 0,
            val: [0; MAX_N],
        })
    }

    /// Builds a map from `(d, v)` pairs with `d` strictly ascending.
    pub fn new<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = Self::empty(n)?;
        let mut last = 0;
        for (index, (d, v)) in pairs.into_iter().enumerate() {
            for point in [d, v] {
                if point == 0 || point > n {
                    return Err(Error::PointOutOfRange { point, n });
                }
            }
            if d <= last {
                return Err(Error::NotAscending { index });
            }
            last = d;
            m.dom |= bit(d);
            m.val[d - 1] = v as u8;
        }
        Ok(m)
    }

    /// The partial identity on `points` (any order, duplicates ignored).
    pub fn partial_identity<I>(n: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut m = Self::empty(n)?;
        for x in points {
            if x == 0 || x > n {
                return Err(Error::PointOutOfRange { point: x, n });
            }
            m.dom |= bit(x);
            m.val[x - 1] = x as u8;
        }
        Ok(m)
    }

    /// Internal constructor for callers that already guarantee validity.
    pub(crate) fn from_raw(n: usize, dom: u16, val: [u8; MAX_N]) -> Self {
        debug_assert!((1..=MAX_N).contains(&n));
        PartialMap {
            n: n as u8,
            dom,
            val,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.dom == 0
    }

    #[inline]
    pub fn get(&self, x: usize) -> Option<usize> {
        if (1..=MAX_N).contains(&x) && self.dom & bit(x) != 0 {
            Some(self.val[x - 1] as usize)
        } else {
            None
        }
    }

    /// `(d, v)` pairs in ascending `d`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        mask_points(self.dom).map(move |d| (d, self.val[d - 1] as usize))
    }

    pub fn domain_mask(&self) -> u16 {
        self.dom
    }

    pub fn image_mask(&self) -> u16 {
        self.pairs().fold(0, |acc, (_, v)| acc | bit(v))
    }

    pub fn fixed_mask(&self) -> u16 {
        self.pairs()
            .filter(|&(d, v)| d == v)
            .fold(0, |acc, (d, _)| acc | bit(d))
    }

    pub fn domain(&self) -> Vec<usize> {
        mask_points(self.dom).collect()
    }

    pub fn image(&self) -> Vec<usize> {
        mask_points(self.image_mask()).collect()
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        mask_points(self.fixed_mask()).collect()
    }

    /// `h(a) = |Im a|`.
    pub fn height(&self) -> usize {
        self.image_mask().count_ones() as usize
    }

    pub fn kernel_view(&self) -> KernelView {
        let mut blocks: Vec<Block> = Vec::new();
        for v in mask_points(self.image_mask()) {
            let points = self.pairs().filter(|&(_, w)| w == v).map(|(d, _)| d).collect();
            blocks.push(Block { points, value: v });
        }
        KernelView { blocks }
    }

    /// Kernel classes as bitmasks, ordered by image point. Images are dropped,
    /// so two maps share this key exactly when `ker a = ker b` (domains
    /// included).
    pub fn kernel_key(&self) -> Vec<u16> {
        mask_points(self.image_mask())
            .map(|v| {
                self.pairs()
                    .filter(|&(_, w)| w == v)
                    .fold(0u16, |acc, (d, _)| acc | bit(d))
            })
            .collect()
    }

    /// Compact kernel key for isotone maps: domain mask in the low half, the
    /// first point of every block in the high half.
    pub fn isotone_kernel_code(&self) -> u32 {
        let mut starts = 0u16;
        let mut last = 0;
        for (d, v) in self.pairs() {
            if v != last {
                starts |= bit(d);
                last = v;
            }
        }
        self.dom as u32 | (starts as u32) << 16
    }

    /// `x (self ∘ other) = ((x) self) other`.
    pub fn then(&self, other: &PartialMap) -> Result<PartialMap> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(self.then_unchecked(other))
    }

    #[inline]
    pub(crate) fn then_unchecked(&self, other: &PartialMap) -> PartialMap {
        let mut dom = 0u16;
        let mut val = [0u8; MAX_N];
        let mut rest = self.dom;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let y = self.val[i] as usize;
            if other.dom & bit(y) != 0 {
                dom |= 1 << i;
                val[i] = other.val[y - 1];
            }
        }
        PartialMap { n: self.n, dom, val }
    }

    pub fn is_isotone(&self) -> bool {
        let mut last = 0;
        for (_, v) in self.pairs() {
            if v < last {
                return false;
            }
            last = v;
        }
        true
    }

    pub fn is_decreasing(&self) -> bool {
        self.pairs().all(|(d, v)| v <= d)
    }

    pub fn is_idempotent(&self) -> bool {
        self.then_unchecked(self) == *self
    }

    pub fn is_injective(&self) -> bool {
        self.height() == self.dom.count_ones() as usize
    }

    pub fn is_partial_identity(&self) -> bool {
        self.pairs().all(|(d, v)| d == v)
    }

    /// Isotone, order-decreasing and `1 ∉ Dom`.
    pub fn is_ss_prime(&self) -> bool {
        self.dom & 1 == 0 && self.is_isotone() && self.is_decreasing()
    }

    /// The map `a'` sending each `a_i` to `min A_i`. Satisfies `a a' a = a`
    /// and `a a'` is an idempotent of SS'_n.
    pub fn pseudo_inverse(&self) -> Result<PartialMap> {
        if !self.is_ss_prime() {
            return Err(Error::NotMember(self.to_string()));
        }
        if self.is_empty() {
            return Err(Error::EmptyPseudoInverse);
        }
        let pairs = self
            .kernel_view()
            .blocks
            .into_iter()
            .map(|b| (b.value, b.points[0]));
        PartialMap::new(self.n(), pairs)
    }

    /// Relabels `x -> x + 1` everywhere, carrying a map on `[n]` to one on
    /// `[n + 1]` whose domain and image avoid 1.
    pub fn shift_embed(&self) -> Result<PartialMap> {
        PartialMap::new(self.n() + 1, self.pairs().map(|(d, v)| (d + 1, v + 1)))
    }

    /// Canonical text form: `-` for the empty map, otherwise `d:v` pairs.
    pub fn encode(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str, n: usize) -> Result<PartialMap> {
        check_n(n)?;
        let err = |pos: usize, msg: &str| Error::Parse {
            pos,
            msg: msg.to_string(),
        };
        if text == "-" {
            return PartialMap::empty(n);
        }
        if text.is_empty() {
            return Err(err(0, "empty input; the empty map is written '-'"));
        }
        let bytes = text.as_bytes();
        let mut pos = 0;
        let mut pairs = Vec::new();
        let number = |pos: &mut usize| -> Result<usize> {
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if start == *pos {
                return Err(err(start, "expected a decimal integer"));
            }
            text[start..*pos]
                .parse::<usize>()
                .map_err(|_| err(start, "integer too large"))
        };
        loop {
            let at = pos;
            let d = number(&mut pos)?;
            if pos >= bytes.len() || bytes[pos] != b':' {
                return Err(err(pos, "expected ':'"));
            }
            pos += 1;
            let v = number(&mut pos)?;
            for point in [d, v] {
                if point == 0 || point > n {
                    return Err(err(at, &format!("point {point} outside 1..={n}")));
                }
            }
            if let Some(&(last, _)) = pairs.last() {
                if d <= last {
                    return Err(err(at, "domain points must be strictly ascending"));
                }
            }
            pairs.push((d, v));
            if pos == bytes.len() {
                break;
            }
            if bytes[pos] != b',' {
                return Err(err(pos, "expected ','"));
            }
            pos += 1;
        }
        PartialMap::new(n, pairs)
    }
}

/// `a ∘ b`, failing on mismatched ambient sizes.
pub fn compose(a: &PartialMap, b: &PartialMap) -> Result<PartialMap> {
    a.then(b)
}

impl Ord for PartialMap {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.pairs().cmp(other.pairs()))
    }
}

impl PartialOrd for PartialMap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        for (i, (d, v)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}:{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]{{{}}}", self.n, self)
    }
}

/// Parses `n/pairs`, e.g. `4/2:1,4:4`. Handy in tests and the demo.
impl FromStr for PartialMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, body) = s.split_once('/').ok_or(Error::Parse {
            pos: 0,
            msg: "expected 'n/pairs'".into(),
        })?;
        let n = n.parse().map_err(|_| Error::Parse {
            pos: 0,
            msg: "bad chain size".into(),
        })?;
        PartialMap::parse(body, n).map_err(|e| match e {
            Error::Parse { pos, msg } => Error::Parse {
                pos: pos + s.len() - body.len(),
                msg,
            },
            other => other,
        })
    }
}

/// The requisite element shifting `{2..i}` down by one and fixing `tail`.
pub fn requisite(n: usize, i: usize, tail: &[usize]) -> Result<PartialMap> {
    check_n(n)?;
    if i < 2 || i > n {
        return Err(Error::RequisiteShape(format!("i = {i} outside 2..={n}")));
    }
    let mut last = i;
    for &t in tail {
        if t <= last || t > n {
            return Err(Error::RequisiteShape(format!(
                "tail {tail:?} must be ascending within ({i}, {n}]"
            )));
        }
        last = t;
    }
    PartialMap::new(n, (2..=i).map(|j| (j, j - 1)).chain(tail.iter().map(|&t| (t, t))))
}

/// Returns `(i, tail)` when `a` is a requisite element.
pub fn requisite_shape(a: &PartialMap) -> Option<(usize, Vec<usize>)> {
    if a.get(2) != Some(1) {
        return None;
    }
    let mut i = 2;
    while a.get(i + 1) == Some(i) {
        i += 1;
    }
    let tail: Vec<usize> = a.pairs().map(|(d, _)| d).filter(|&d| d > i).collect();
    if (3..=i).all(|j| a.get(j) == Some(j - 1)) && tail.iter().all(|&t| a.get(t) == Some(t)) {
        Some((i, tail))
    } else {
        None
    }
}

pub fn is_requisite(a: &PartialMap) -> bool {
    a.dom & 1 == 0 && requisite_shape(a).is_some()
}

/// The height-`(n-1)` requisite element on `{2..n}` shifting `{2..i}`.
pub fn alpha_i(n: usize, i: usize) -> Result<PartialMap> {
    if i < 2 || i > n {
        return Err(Error::IndexRange(format!("alpha_i needs 2 <= i <= n, got i = {i}, n = {n}")));
    }
    let tail: Vec<usize> = (i + 1..=n).collect();
    requisite(n, i, &tail)
}

/// The height-`(n-2)` requisite element with `k` missing from its domain.
pub fn alpha_ik(n: usize, i: usize, k: usize) -> Result<PartialMap> {
    if !(2 <= i && i < k && k <= n) {
        return Err(Error::IndexRange(format!(
            "alpha_ik needs 2 <= i < k <= n, got i = {i}, k = {k}, n = {n}"
        )));
    }
    let tail: Vec<usize> = (i + 1..=n).filter(|&x| x != k).collect();
    requisite(n, i, &tail)
}

/// The partial identity on `{2..n} \ {k}`.
pub fn eps_1k(n: usize, k: usize) -> Result<PartialMap> {
    if k < 2 || k > n {
        return Err(Error::IndexRange(format!("eps_1k needs 2 <= k <= n, got k = {k}, n = {n}")));
    }
    PartialMap::partial_identity(n, (2..=n).filter(|&x| x != k))
}

/// The identity on `{2..n}`, the unique left identity of SS'_n.
pub fn left_identity(n: usize) -> Result<PartialMap> {
    PartialMap::partial_identity(n, 2..=n)
}
