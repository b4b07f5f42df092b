//! Element families of SS'_n and the closed-form counts attached to them.
//!
//! Enumeration builds maps directly rather than filtering all partial maps:
//! a depth-first walk appends `(d, v)` pairs with `d` increasing and
//! `v` non-decreasing and `v <= d`, which is exactly the isotone
//! order-decreasing condition. Visiting a node before its children, with
//! children ordered by their new pair, emits maps in ascending pair-list
//! order, which is the canonical encode order.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmap::{is_requisite, PartialMap, MAX_N};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// SS'_n: `1 ∉ Dom`.
    SsPrime,
    /// SS_n: `1 ∈ Dom`.
    Ss,
    /// LS_n: all isotone order-decreasing partial maps.
    Ls,
    /// K(n, p): members of SS'_n of height at most p.
    IdealK,
    /// J*_p: members of SS'_n of height exactly p.
    JstarSlice,
    /// Idempotents of SS'_n, optionally of height p.
    Idempotents,
    /// Requisite elements of height p.
    Requisite,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::SsPrime,
        FamilyKind::Ss,
        FamilyKind::Ls,
        FamilyKind::IdealK,
        FamilyKind::JstarSlice,
        FamilyKind::Idempotents,
        FamilyKind::Requisite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::SsPrime => "ss-prime",
            FamilyKind::Ss => "ss",
            FamilyKind::Ls => "ls",
            FamilyKind::IdealK => "ideal-k",
            FamilyKind::JstarSlice => "jstar-slice",
            FamilyKind::Idempotents => "idempotents",
            FamilyKind::Requisite => "requisite",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Family(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
    pub p: Option<usize>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: usize, p: Option<usize>) -> Result<Self> {
        let spec = FamilySpec { kind, n, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ss_prime(n: usize) -> Self {
        FamilySpec {
            kind: FamilyKind::SsPrime,
            n,
            p: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let FamilySpec { kind, n, p } = *self;
        if !(2..=MAX_N).contains(&n) {
            return Err(Error::Family(format!("n = {n} outside 2..={MAX_N}")));
        }
        let needs_p = matches!(
            kind,
            FamilyKind::IdealK | FamilyKind::JstarSlice | FamilyKind::Requisite
        );
        let allows_p = needs_p || kind == FamilyKind::Idempotents;
        match p {
            None if needs_p => Err(Error::Family(format!("{kind} requires p"))),
            Some(_) if !allows_p => Err(Error::Family(format!("{kind} takes no p"))),
            Some(p) if p > n - 1 => Err(Error::Family(format!("p = {p} outside 0..={}", n - 1))),
            Some(0) if kind == FamilyKind::Requisite => {
                Err(Error::Family("requisite elements have height >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, a: &PartialMap) -> bool {
        if a.n() != self.n || !a.is_isotone() || !a.is_decreasing() {
            return false;
        }
        let one_in_dom = a.get(1).is_some();
        let h = a.height();
        match self.kind {
            FamilyKind::Ls => true,
            FamilyKind::Ss => one_in_dom,
            FamilyKind::SsPrime => !one_in_dom,
            FamilyKind::IdealK => !one_in_dom && Some(h) <= self.p,
            FamilyKind::JstarSlice => !one_in_dom && Some(h) == self.p,
            FamilyKind::Idempotents => {
                !one_in_dom && a.is_idempotent() && self.p.is_none_or(|p| p == h)
            }
            FamilyKind::Requisite => is_requisite(a) && Some(h) == self.p,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.p {
            Some(p) => write!(f, "{}(n={}, p={})", self.kind, self.n, p),
            None => write!(f, "{}(n={})", self.kind, self.n),
        }
    }
}

struct Frame {
    map: PartialMap,
    last_d: usize,
    last_v: usize,
    height: usize,
    next_d: usize,
    next_v: usize,
}

/// Depth-first generator of isotone order-decreasing partial maps in
/// ascending pair-list order.
pub struct LsWalk {
    n: usize,
    first_point: FirstPoint,
    max_height: usize,
    stack: Vec<Frame>,
    root_pending: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FirstPoint {
    Any,
    One,
    NotOne,
}

impl LsWalk {
    fn new(n: usize, first_point: FirstPoint, max_height: usize) -> Self {
        let root = PartialMap::empty(n).expect("n validated by caller");
        LsWalk {
            n,
            first_point,
            max_height,
            stack: vec![Frame {
                map: root,
                last_d: 0,
                last_v: 1,
                height: 0,
                next_d: if first_point == FirstPoint::NotOne { 2 } else { 1 },
                next_v: 1,
            }],
            root_pending: true,
        }
    }
}

impl Iterator for LsWalk {
    type Item = PartialMap;

    fn next(&mut self) -> Option<PartialMap> {
        if self.root_pending {
            self.root_pending = false;
            let root = self.stack[0].map;
            if self.first_point != FirstPoint::One {
                return Some(root);
            }
        }
        loop {
            let n = self.n;
            let top = self.stack.last_mut()?;
            let is_root = top.last_d == 0;
            if top.next_d > n || (is_root && self.first_point == FirstPoint::One && top.next_d > 1) {
                self.stack.pop();
                continue;
            }
            let (d, v) = (top.next_d, top.next_v);
            if v >= d {
                top.next_d += 1;
                top.next_v = top.last_v;
            } else {
                top.next_v += 1;
            }
            let height = top.height + usize::from(v != top.last_v || top.last_d == 0);
            if height > self.max_height {
                continue;
            }
            let mut map = top.map;
            map = map_with(map, d, v);
            self.stack.push(Frame {
                map,
                last_d: d,
                last_v: v,
                height,
                next_d: d + 1,
                next_v: v,
            });
            return Some(map);
        }
    }
}

fn map_with(map: PartialMap, d: usize, v: usize) -> PartialMap {
    let mut val = [0u8; MAX_N];
    for (x, y) in map.pairs() {
        val[x - 1] = y as u8;
    }
    val[d - 1] = v as u8;
    PartialMap::from_raw(map.n(), map.domain_mask() | 1 << (d - 1), val)
}

/// Every member of the family exactly once, in canonical order.
pub fn enumerate(spec: &FamilySpec) -> Result<Box<dyn Iterator<Item = PartialMap> + Send>> {
    spec.validate()?;
    let spec = *spec;
    let n = spec.n;
    let all = n;
    Ok(match spec.kind {
        FamilyKind::Ls => Box::new(LsWalk::new(n, FirstPoint::Any, all)),
        FamilyKind::Ss => Box::new(LsWalk::new(n, FirstPoint::One, all)),
        FamilyKind::SsPrime => Box::new(LsWalk::new(n, FirstPoint::NotOne, all)),
        FamilyKind::IdealK => Box::new(LsWalk::new(n, FirstPoint::NotOne, spec.p.unwrap())),
        FamilyKind::JstarSlice | FamilyKind::Requisite | FamilyKind::Idempotents => {
            let cap = spec.p.unwrap_or(all);
            Box::new(LsWalk::new(n, FirstPoint::NotOne, cap).filter(move |a| spec.contains(a)))
        }
    })
}

/// Collects SS'_n.
pub fn ss_prime(n: usize) -> Result<Vec<PartialMap>> {
    Ok(enumerate(&FamilySpec::new(FamilyKind::SsPrime, n, None)?)?.collect())
}

pub fn ideal(n: usize, p: usize) -> Result<Vec<PartialMap>> {
    Ok(enumerate(&FamilySpec::new(FamilyKind::IdealK, n, Some(p))?)?.collect())
}

pub fn jstar_slice(n: usize, p: usize) -> Result<Vec<PartialMap>> {
    Ok(enumerate(&FamilySpec::new(FamilyKind::JstarSlice, n, Some(p))?)?.collect())
}

pub fn requisites(n: usize, p: usize) -> Result<Vec<PartialMap>> {
    Ok(enumerate(&FamilySpec::new(FamilyKind::Requisite, n, Some(p))?)?.collect())
}

pub fn idempotents(n: usize, p: Option<usize>) -> Result<Vec<PartialMap>> {
    Ok(enumerate(&FamilySpec::new(FamilyKind::Idempotents, n, p)?)?.collect())
}

/// Binomial coefficient with the conventions `C(-1, -1) = 1` and
/// `C(m, k) = 0` whenever `k < 0` otherwise (or `k > m`, or `m < 0`).
pub fn binom(m: i64, k: i64) -> BigUint {
    if m == -1 && k == -1 {
        return BigUint::one();
    }
    if k < 0 || m < 0 || k > m {
        return BigUint::zero();
    }
    let k = k.min(m - k) as u64;
    let m = m as u64;
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= m - j;
        acc /= j + 1;
    }
    acc
}

/// The small Schröder number `s_n`, exact.
pub fn schroeder_small(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let n = n as i64;
    let sum: BigUint = (0..=n).map(|r| binom(n + 1, n - r) * binom(n + r, r)).sum();
    let denom = BigUint::from(2 * (n as u64 + 1));
    assert!(
        (&sum % &denom).is_zero(),
        "Schröder sum not divisible by 2(n+1) at n = {n}"
    );
    sum / denom
}

/// `(3^(n-1) + 1) / 2`.
pub fn formula_idempotents(n: usize) -> BigUint {
    assert!(n >= 1);
    (BigUint::from(3u32).pow(n as u32 - 1) + 1u32) / 2u32
}

pub fn count_idempotents(n: usize) -> Result<usize> {
    Ok(enumerate(&FamilySpec::new(FamilyKind::SsPrime, n, None)?)?
        .filter(|a| a.is_idempotent())
        .count())
}

/// `Σ_{r=p}^{n-1} C(n-1, r) C(r-1, p-1)`.
pub fn formula_rstar_classes(n: usize, p: usize) -> BigUint {
    let (n, p) = (n as i64, p as i64);
    (p..n).map(|r| binom(n - 1, r) * binom(r - 1, p - 1)).sum()
}

/// Distinct kernels among height-`p` members of SS'_n.
pub fn count_rstar_classes(n: usize, p: usize) -> Result<usize> {
    let slice = FamilySpec::new(FamilyKind::JstarSlice, n, Some(p))?;
    let kernels: HashSet<Vec<u16>> = enumerate(&slice)?.map(|a| a.kernel_key()).collect();
    Ok(kernels.len())
}

/// Distinct images among height-`p` members of SS'_n.
pub fn count_lstar_classes(n: usize, p: usize) -> Result<usize> {
    let slice = FamilySpec::new(FamilyKind::JstarSlice, n, Some(p))?;
    let images: HashSet<u16> = enumerate(&slice)?.map(|a| a.image_mask()).collect();
    Ok(images.len())
}

pub fn formula_lstar_classes(n: usize, p: usize) -> BigUint {
    binom(n as i64, p as i64)
}

/// Per-height statistics of SS'_n gathered in one enumeration pass.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LayerStats {
    pub height: usize,
    pub size: usize,
    pub idempotents: usize,
    pub rstar_classes: usize,
    pub lstar_classes: usize,
    pub requisites: usize,
}

pub fn layer_stats(n: usize) -> Result<Vec<LayerStats>> {
    let mut layers: Vec<LayerStats> = (0..n)
        .map(|height| LayerStats {
            height,
            ..Default::default()
        })
        .collect();
    let mut kernels: Vec<HashSet<u32>> = vec![HashSet::new(); n];
    let mut images: Vec<HashSet<u16>> = vec![HashSet::new(); n];
    for a in enumerate(&FamilySpec::new(FamilyKind::SsPrime, n, None)?)? {
        let h = a.height();
        let layer = &mut layers[h];
        layer.size += 1;
        layer.idempotents += usize::from(a.is_idempotent());
        layer.requisites += usize::from(is_requisite(&a));
        kernels[h].insert(a.isotone_kernel_code());
        images[h].insert(a.image_mask());
    }
    for (h, layer) in layers.iter_mut().enumerate() {
        layer.rstar_classes = kernels[h].len();
        layer.lstar_classes = images[h].len();
    }
    Ok(layers)
}

/// Outcome of checking `Σ_p Σ_{r=p}^{n-1} C(n-1,r) C(r-1,p-1) = (3^(n-1)+1)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorollaryCheck {
    pub n: usize,
    pub double_sum: BigUint,
    pub closed_form: BigUint,
    /// Total number of distinct kernels found by enumeration.
    pub enumerated: Option<BigUint>,
}

impl CorollaryCheck {
    pub fn holds(&self) -> bool {
        self.double_sum == self.closed_form
            && self.enumerated.as_ref().is_none_or(|e| *e == self.double_sum)
    }
}

/// Largest `n` at which the corollary is cross-checked by enumeration.
pub const COROLLARY_ENUMERATION_MAX: usize = 12;

pub fn corollary_check(n: usize) -> Result<CorollaryCheck> {
    if n < 2 {
        return Err(Error::Family(format!("n = {n} < 2")));
    }
    let double_sum = (0..n).map(|p| formula_rstar_classes(n, p)).sum();
    let enumerated = if n <= COROLLARY_ENUMERATION_MAX {
        let kernels: HashSet<u32> = enumerate(&FamilySpec::ss_prime(n))?
            .map(|a| a.isotone_kernel_code())
            .collect();
        Some(BigUint::from(kernels.len()))
    } else {
        None
    };
    Ok(CorollaryCheck {
        n,
        double_sum,
        closed_form: formula_idempotents(n),
        enumerated,
    })
}

pub fn verify_identity_corollary(n: usize) -> Result<bool> {
    Ok(corollary_check(n)?.holds())
}
