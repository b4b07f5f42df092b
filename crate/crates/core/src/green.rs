//! Finite semigroups given by their elements and a Cayley table, with Green's
//! relations, the starred relations, relation composition and abundance.
//!
//! Everything here works on element indices. A table either comes from
//! [`build_table`], which checks closure while filling the Cayley table, or
//! from one of the family constructors ([`SemigroupTable::ss_prime`] and
//! friends), which trust closure and fill the Cayley table on first use.
//!
//! `S¹` never materialises an identity element: quantifiers over `S¹` treat
//! the adjoined identity as a separate case.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families;
use crate::pmap::PartialMap;

/// An element of a table: a partial map, or the zero of a Rees quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Zero,
    Map(PartialMap),
}

impl Element {
    pub fn as_map(&self) -> Option<&PartialMap> {
        match self {
            Element::Zero => None,
            Element::Map(m) => Some(m),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        match self {
            Element::Zero => true,
            Element::Map(m) => m.is_idempotent(),
        }
    }

    pub fn height(&self) -> Option<usize> {
        self.as_map().map(PartialMap::height)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Zero => f.write_str("0"),
            Element::Map(m) => m.fmt(f),
        }
    }
}

pub struct SemigroupTable {
    n: usize,
    elements: Vec<Element>,
    index: HashMap<Element, u32>,
    collapse_below: Option<usize>,
    cayley: OnceLock<Vec<u32>>,
}

impl fmt::Debug for SemigroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemigroupTable")
            .field("n", &self.n)
            .field("len", &self.elements.len())
            .field("collapse_below", &self.collapse_below)
            .finish()
    }
}

/// Builds a table, verifying closure. With `collapse_below = Some(p)` every
/// product of height `< p` is sent to a zero, which is adjoined regardless of
/// `adjoin_zero`.
pub fn build_table<I>(
    n: usize,
    elements: I,
    adjoin_zero: bool,
    collapse_below: Option<usize>,
) -> Result<SemigroupTable>
where
    I: IntoIterator<Item = PartialMap>,
{
    let table = SemigroupTable::assemble(n, elements, adjoin_zero, collapse_below)?;
    let size = table.len();
    let rows: Vec<Result<Vec<u32>>> = (0..size)
        .into_par_iter()
        .map(|i| {
            (0..size)
                .map(|j| {
                    let prod = table.multiply(&table.elements[i], &table.elements[j]);
                    table.index.get(&prod).copied().ok_or_else(|| Error::NotClosed {
                        left: table.elements[i].to_string(),
                        right: table.elements[j].to_string(),
                        product: prod.to_string(),
                    })
                })
                .collect()
        })
        .collect();
    let mut cayley = Vec::with_capacity(size * size);
    for row in rows {
        cayley.extend(row?);
    }
    table.cayley.set(cayley).expect("fresh table");
    Ok(table)
}

impl SemigroupTable {
    fn assemble<I>(
        n: usize,
        elements: I,
        adjoin_zero: bool,
        collapse_below: Option<usize>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = PartialMap>,
    {
        let mut elems: Vec<Element> = Vec::new();
        for m in elements {
            if m.n() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: m.n(),
                });
            }
            elems.push(Element::Map(m));
        }
        if adjoin_zero || collapse_below.is_some() {
            elems.push(Element::Zero);
        }
        elems.sort();
        elems.dedup();
        let index = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, i as u32))
            .collect();
        Ok(SemigroupTable {
            n,
            elements: elems,
            index,
            collapse_below,
            cayley: OnceLock::new(),
        })
    }

    /// SS'_n. Closure is taken on trust; tests check it through [`build_table`].
    pub fn ss_prime(n: usize) -> Result<Self> {
        Self::assemble(n, families::ss_prime(n)?, false, None)
    }

    /// K(n, p).
    pub fn ideal(n: usize, p: usize) -> Result<Self> {
        Self::assemble(n, families::ideal(n, p)?, false, None)
    }

    /// RSS'_n(p) = K(n, p) / K(n, p-1): J*_p plus a zero.
    pub fn rees_quotient(n: usize, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Family("Rees quotient needs p >= 1".into()));
        }
        Self::assemble(n, families::jstar_slice(n, p)?, true, Some(p))
    }

    fn multiply(&self, a: &Element, b: &Element) -> Element {
        match (a, b) {
            (Element::Map(x), Element::Map(y)) => {
                let c = x.then_unchecked(y);
                match self.collapse_below {
                    Some(p) if c.height() < p => Element::Zero,
                    _ => Element::Map(c),
                }
            }
            _ => Element::Zero,
        }
    }

    fn cayley(&self) -> &[u32] {
        self.cayley.get_or_init(|| {
            let size = self.len();
            let mut table = vec![0u32; size * size];
            table.par_chunks_mut(size.max(1)).enumerate().for_each(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate() {
                    let prod = self.multiply(&self.elements[i], &self.elements[j]);
                    *slot = *self
                        .index
                        .get(&prod)
                        .unwrap_or_else(|| panic!("family table not closed at {prod}"));
                }
            });
            table
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> &Element {
        &self.elements[i as usize]
    }

    pub fn index_of(&self, e: &Element) -> Option<u32> {
        self.index.get(e).copied()
    }

    pub fn index_of_map(&self, m: &PartialMap) -> Option<u32> {
        self.index_of(&Element::Map(*m))
    }

    pub fn zero(&self) -> Option<u32> {
        self.index_of(&Element::Zero)
    }

    pub fn collapse_below(&self) -> Option<usize> {
        self.collapse_below
    }

    #[inline]
    pub fn product(&self, i: u32, j: u32) -> u32 {
        self.cayley()[i as usize * self.len() + j as usize]
    }

    pub fn is_idempotent(&self, i: u32) -> bool {
        self.elements[i as usize].is_idempotent()
    }

    pub fn idempotents(&self) -> Vec<u32> {
        (0..self.len() as u32).filter(|&i| self.is_idempotent(i)).collect()
    }
}

/// A partition of element indices. Classes are numbered by first
/// occurrence, so two partitions are equal iff their `class_id`s are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqPartition {
    class_id: Vec<u32>,
    classes: Vec<Vec<u32>>,
}

impl EqPartition {
    pub fn from_keys<K, I>(keys: I) -> Self
    where
        K: Hash + Eq,
        I: IntoIterator<Item = K>,
    {
        let mut seen: HashMap<K, u32> = HashMap::new();
        let mut class_id = Vec::new();
        let mut classes: Vec<Vec<u32>> = Vec::new();
        for (i, key) in keys.into_iter().enumerate() {
            let next = classes.len() as u32;
            let c = *seen.entry(key).or_insert(next);
            if c == next {
                classes.push(Vec::new());
            }
            classes[c as usize].push(i as u32);
            class_id.push(c);
        }
        EqPartition { class_id, classes }
    }

    pub fn identity(size: usize) -> Self {
        Self::from_keys(0..size)
    }

    pub fn universe(&self) -> usize {
        self.class_id.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn class_id(&self, i: u32) -> u32 {
        self.class_id[i as usize]
    }

    pub fn class_of(&self, i: u32) -> &[u32] {
        &self.classes[self.class_id(i) as usize]
    }

    pub fn related(&self, i: u32, j: u32) -> bool {
        self.class_id(i) == self.class_id(j)
    }

    pub fn is_identity(&self) -> bool {
        self.classes.len() == self.class_id.len()
    }

    /// Intersection of two partitions.
    pub fn meet(&self, other: &EqPartition) -> EqPartition {
        EqPartition::from_keys(self.class_id.iter().zip(&other.class_id))
    }

    /// Finest partition coarser than both (the equivalence generated by the union).
    pub fn join(&self, other: &EqPartition) -> EqPartition {
        let mut uf = UnionFind::new(self.universe());
        for class in self.classes.iter().chain(other.classes.iter()) {
            for w in class.windows(2) {
                uf.union(w[0] as usize, w[1] as usize);
            }
        }
        EqPartition::from_keys((0..self.universe()).map(|i| uf.find(i)))
    }

    pub fn to_relation(&self) -> BinRelation {
        let size = self.universe();
        let mut rel = BinRelation::empty(size);
        for class in &self.classes {
            let mut row = FixedBitSet::with_capacity(size);
            for &j in class {
                row.insert(j as usize);
            }
            for &i in class {
                rel.rows[i as usize] = row.clone();
            }
        }
        rel
    }

    pub fn to_json(&self, table: &SemigroupTable, relation: &str) -> PartitionJson {
        PartitionJson {
            relation: relation.to_string(),
            classes: self
                .classes
                .iter()
                .map(|c| c.iter().map(|&i| table.element(i).to_string()).collect())
                .collect(),
        }
    }
}

/// `{"relation": ..., "classes": [[encoded elements...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionJson {
    pub relation: String,
    pub classes: Vec<Vec<String>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(size: usize) -> Self {
        UnionFind {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// A binary relation on `0..size`, one bit row per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinRelation {
    size: usize,
    rows: Vec<FixedBitSet>,
}

impl BinRelation {
    pub fn empty(size: usize) -> Self {
        BinRelation {
            size,
            rows: vec![FixedBitSet::with_capacity(size); size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut rel = Self::empty(size);
        for i in 0..size {
            rel.rows[i].insert(i);
        }
        rel
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(size: usize, pairs: I) -> Result<Self> {
        let mut rel = Self::empty(size);
        for (a, b) in pairs {
            if a as usize >= size || b as usize >= size {
                return Err(Error::IndexRange(format!("pair ({a}, {b}) outside 0..{size}")));
            }
            rel.rows[a as usize].insert(b as usize);
        }
        Ok(rel)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.rows[a as usize].contains(b as usize)
    }

    pub fn num_pairs(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    /// `(a, c) ∈ self ∘ other` iff `(a, b) ∈ self` and `(b, c) ∈ other` for some `b`.
    pub fn compose(&self, other: &BinRelation) -> Result<BinRelation> {
        if self.size != other.size {
            return Err(Error::UniverseMismatch {
                left: self.size,
                right: other.size,
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = FixedBitSet::with_capacity(self.size);
                for b in row.ones() {
                    out.union_with(&other.rows[b]);
                }
                out
            })
            .collect();
        Ok(BinRelation {
            size: self.size,
            rows,
        })
    }
}

pub fn compose_relations(r1: &BinRelation, r2: &BinRelation) -> Result<BinRelation> {
    r1.compose(r2)
}

pub fn relations_equal(r1: &BinRelation, r2: &BinRelation) -> Result<bool> {
    if r1.size != r2.size {
        return Err(Error::UniverseMismatch {
            left: r1.size,
            right: r2.size,
        });
    }
    Ok(r1 == r2)
}

pub fn partition_as_relation(p: &EqPartition) -> BinRelation {
    p.to_relation()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Green {
    L,
    R,
    H,
    D,
    J,
}

pub(crate) fn left_ideals(s: &SemigroupTable) -> Vec<FixedBitSet> {
    let size = s.len();
    (0..size as u32)
        .into_par_iter()
        .map(|a| {
            let mut set = FixedBitSet::with_capacity(size);
            set.insert(a as usize);
            for x in 0..size as u32 {
                set.insert(s.product(x, a) as usize);
            }
            set
        })
        .collect()
}

pub(crate) fn right_ideals(s: &SemigroupTable) -> Vec<FixedBitSet> {
    let size = s.len();
    (0..size as u32)
        .into_par_iter()
        .map(|a| {
            let mut set = FixedBitSet::with_capacity(size);
            set.insert(a as usize);
            for x in 0..size as u32 {
                set.insert(s.product(a, x) as usize);
            }
            set
        })
        .collect()
}

/// Green's relations from principal ideals: `S¹a` for L, `aS¹` for R,
/// `S¹aS¹` for J, `L ∩ R` for H and the join of L and R for D.
pub fn green(s: &SemigroupTable, which: Green) -> EqPartition {
    match which {
        Green::L => EqPartition::from_keys(left_ideals(s)),
        Green::R => EqPartition::from_keys(right_ideals(s)),
        Green::H => green(s, Green::L).meet(&green(s, Green::R)),
        Green::D => green(s, Green::L).join(&green(s, Green::R)),
        Green::J => {
            let left = left_ideals(s);
            let right = right_ideals(s);
            let two_sided: Vec<FixedBitSet> = left
                .par_iter()
                .map(|l| {
                    let mut set = l.clone();
                    for x in l.ones() {
                        set.union_with(&right[x]);
                    }
                    set
                })
                .collect();
            EqPartition::from_keys(two_sided)
        }
    }
}

/// The L-classes predicted by image plus the minimum of every kernel class.
pub fn green_l_characterized(s: &SemigroupTable) -> EqPartition {
    EqPartition::from_keys(s.elements().iter().map(|e| {
        e.as_map().map(|m| {
            let kv = m.kernel_view();
            let mins: Vec<usize> = kv.blocks.iter().map(|b| b.points[0]).collect();
            (m.image_mask(), mins)
        })
    }))
}

/// `a` is regular iff `a b a = a` for some `b ∈ S`.
pub fn regular_elements(s: &SemigroupTable) -> Vec<bool> {
    let size = s.len() as u32;
    (0..size)
        .into_par_iter()
        .map(|a| (0..size).any(|b| s.product(s.product(a, b), a) == a))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Starred {
    Lstar,
    Rstar,
    Hstar,
    Dstar,
}

impl Starred {
    pub fn name(self) -> &'static str {
        match self {
            Starred::Lstar => "Lstar",
            Starred::Rstar => "Rstar",
            Starred::Hstar => "Hstar",
            Starred::Dstar => "Dstar",
        }
    }
}

/// Default size limit for [`starred_definitional`].
pub const DEFINITIONAL_LIMIT: usize = 250;

/// Kernel of `x ↦ f(x)` over `S¹`, relabelled by first occurrence.
fn kernel_signature(values: impl Iterator<Item = u32>, scratch: &mut HashMap<u32, u32>) -> Vec<u32> {
    scratch.clear();
    values
        .map(|v| {
            let next = scratch.len() as u32;
            *scratch.entry(v).or_insert(next)
        })
        .collect()
}

/// L* and R* straight from the cancellation definition: `a L* b` iff
/// `ax = ay ⇔ bx = by` for all `x, y ∈ S¹`, i.e. iff the maps `x ↦ ax` and
/// `x ↦ bx` on `S¹` have the same kernel. H* and D* are derived as meet and
/// join of those two.
pub fn starred_definitional(s: &SemigroupTable, which: Starred, limit: usize) -> Result<EqPartition> {
    if s.len() > limit {
        return Err(Error::SizeGuard {
            size: s.len(),
            limit,
        });
    }
    let size = s.len() as u32;
    let signatures = |left: bool| -> Vec<Vec<u32>> {
        (0..size)
            .into_par_iter()
            .map_init(HashMap::new, |scratch, a| {
                // the adjoined identity comes first: a·1 = 1·a = a
                let values = std::iter::once(a).chain((0..size).map(|x| {
                    if left {
                        s.product(a, x)
                    } else {
                        s.product(x, a)
                    }
                }));
                kernel_signature(values, scratch)
            })
            .collect()
    };
    Ok(match which {
        Starred::Lstar => EqPartition::from_keys(signatures(true)),
        Starred::Rstar => EqPartition::from_keys(signatures(false)),
        Starred::Hstar => {
            EqPartition::from_keys(signatures(true)).meet(&EqPartition::from_keys(signatures(false)))
        }
        Starred::Dstar => {
            EqPartition::from_keys(signatures(true)).join(&EqPartition::from_keys(signatures(false)))
        }
    })
}

/// L* by image, R* by kernel, H* trivial, D* by height; the zero of a
/// quotient is a class of its own.
///
/// These are the relations of SS'_n restricted to the table. They coincide
/// with the intrinsic ones on SS'_n and on every K(n, p). On RSS'_n(p) with
/// `p >= 2` the intrinsic L* is coarser, since collapsing to zero loses
/// cancellation; use [`starred_definitional`] there.
pub fn starred_characterized(s: &SemigroupTable, which: Starred) -> EqPartition {
    let maps = s.elements().iter().map(Element::as_map);
    match which {
        Starred::Lstar => EqPartition::from_keys(maps.map(|m| m.map(PartialMap::image_mask))),
        Starred::Rstar => EqPartition::from_keys(maps.map(|m| m.map(PartialMap::kernel_key))),
        Starred::Hstar => EqPartition::identity(s.len()),
        Starred::Dstar => EqPartition::from_keys(maps.map(|m| m.map(PartialMap::height))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbundanceReport {
    pub right_abundant: bool,
    /// Every R*-class holds exactly one idempotent.
    pub rstar_unique_idempotent: bool,
    pub left_abundant: bool,
    pub rstar_idempotent_counts: Vec<usize>,
    pub lstar_idempotent_counts: Vec<usize>,
    /// An idempotent-free L*-class, if any (element indices).
    pub lstar_witness: Option<Vec<u32>>,
}

pub fn abundance_report(s: &SemigroupTable) -> AbundanceReport {
    abundance_report_with(
        s,
        &starred_characterized(s, Starred::Lstar),
        &starred_characterized(s, Starred::Rstar),
    )
}

pub fn abundance_report_with(
    s: &SemigroupTable,
    lstar: &EqPartition,
    rstar: &EqPartition,
) -> AbundanceReport {
    let count = |p: &EqPartition| -> Vec<usize> {
        p.classes()
            .iter()
            .map(|c| c.iter().filter(|&&i| s.is_idempotent(i)).count())
            .collect()
    };
    let r_counts = count(rstar);
    let l_counts = count(lstar);
    let lstar_witness = l_counts
        .iter()
        .position(|&c| c == 0)
        .map(|k| lstar.classes()[k].clone());
    AbundanceReport {
        right_abundant: r_counts.iter().all(|&c| c >= 1),
        rstar_unique_idempotent: r_counts.iter().all(|&c| c == 1),
        left_abundant: l_counts.iter().all(|&c| c >= 1),
        rstar_idempotent_counts: r_counts,
        lstar_idempotent_counts: l_counts,
        lstar_witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(s: &str) -> PartialMap {
        s.parse().unwrap()
    }

    #[test]
    fn ss_prime_2_table() {
        let s = build_table(2, families::ss_prime(2).unwrap(), false, None).unwrap();
        assert_eq!(s.len(), 3);
        let a = s.index_of_map(&pm("2/2:1")).unwrap();
        let e = s.index_of_map(&pm("2/2:2")).unwrap();
        let z = s.index_of_map(&pm("2/-")).unwrap();
        assert_eq!(s.product(a, a), z);
        assert_eq!(s.product(e, a), a);
        assert_eq!(s.product(a, e), z);
        assert_eq!(s.product(e, e), e);
        for i in 0..3 {
            assert_eq!(s.product(z, i), z);
            assert_eq!(s.product(i, z), z);
        }
    }

    #[test]
    fn quotient_table() {
        let s = build_table(3, families::jstar_slice(3, 2).unwrap(), false, Some(2)).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.zero(), Some(0));
        let a2 = s.index_of_map(&pm("3/2:1,3:3")).unwrap();
        assert_eq!(s.product(a2, a2), 0);
        let lazy = SemigroupTable::rees_quotient(3, 2).unwrap();
        assert_eq!(lazy.elements(), s.elements());
        assert_eq!(lazy.product(a2, a2), 0);
    }

    #[test]
    fn closure_violation_reported() {
        let err = build_table(2, [pm("2/1:2")], false, None).unwrap_err();
        match err {
            Error::NotClosed { left, right, product } => {
                assert_eq!((left.as_str(), right.as_str(), product.as_str()), ("1:2", "1:2", "-"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_table(3, [pm("2/2:2")], false, None).is_err());
    }

    #[test]
    fn green_on_ss_prime_3() {
        let s = SemigroupTable::ss_prime(3).unwrap();
        let r = green(&s, Green::R);
        assert!(r.is_identity());
        assert_eq!(r.num_classes(), 11);
        let l = green(&s, Green::L);
        assert_eq!(green(&s, Green::D), l);
        assert_eq!(green(&s, Green::J), l);
        assert_eq!(green(&s, Green::H), r);
        let x = s.index_of_map(&pm("3/2:1,3:2")).unwrap();
        let y = s.index_of_map(&pm("3/2:1")).unwrap();
        assert!(!l.related(x, y));
        assert_eq!(green_l_characterized(&s), l);
    }

    #[test]
    fn regular_iff_idempotent_small() {
        for n in 2..=4 {
            let s = SemigroupTable::ss_prime(n).unwrap();
            let reg = regular_elements(&s);
            for i in 0..s.len() as u32 {
                assert_eq!(reg[i as usize], s.is_idempotent(i), "{}", s.element(i));
            }
        }
    }

    #[test]
    fn starred_examples() {
        let s2 = SemigroupTable::ss_prime(2).unwrap();
        let l = starred_definitional(&s2, Starred::Lstar, DEFINITIONAL_LIMIT).unwrap();
        let a = s2.index_of_map(&pm("2/2:1")).unwrap();
        let e = s2.index_of_map(&pm("2/2:2")).unwrap();
        assert!(!l.related(a, e));
        assert!(l.related(a, a));

        let s3 = SemigroupTable::ss_prime(3).unwrap();
        let r = starred_definitional(&s3, Starred::Rstar, DEFINITIONAL_LIMIT).unwrap();
        let x = s3.index_of_map(&pm("3/2:1,3:2")).unwrap();
        let y = s3.index_of_map(&pm("3/2:2,3:3")).unwrap();
        assert!(r.related(x, y));
        assert_eq!(r, starred_characterized(&s3, Starred::Rstar));
    }

    #[test]
    fn characterized_on_ss_prime_4() {
        let s = SemigroupTable::ss_prime(4).unwrap();
        let d = starred_characterized(&s, Starred::Dstar);
        assert_eq!(d.num_classes(), 4);
        assert!(starred_characterized(&s, Starred::Hstar).is_identity());
        let l = starred_characterized(&s, Starred::Lstar);
        let a = s.index_of_map(&pm("4/2:1")).unwrap();
        let class: Vec<String> = l.class_of(a).iter().map(|&i| s.element(i).to_string()).collect();
        assert_eq!(
            class,
            ["2:1", "2:1,3:1", "2:1,3:1,4:1", "2:1,4:1", "3:1", "3:1,4:1", "4:1"]
        );
    }

    #[test]
    fn size_guard() {
        let s = SemigroupTable::ss_prime(5).unwrap();
        assert!(matches!(
            starred_definitional(&s, Starred::Lstar, 100),
            Err(Error::SizeGuard { size: 197, limit: 100 })
        ));
    }

    #[test]
    fn relation_composition() {
        let s = SemigroupTable::ss_prime(4).unwrap();
        let l = starred_characterized(&s, Starred::Lstar).to_relation();
        let r = starred_characterized(&s, Starred::Rstar).to_relation();
        let lr = compose_relations(&l, &r).unwrap();
        let rl = compose_relations(&r, &l).unwrap();
        let a = s.index_of_map(&pm("4/2:2,3:3")).unwrap();
        let b = s.index_of_map(&pm("4/2:2,4:4")).unwrap();
        assert!(lr.contains(a, b));
        assert!(!rl.contains(a, b));
        assert!(!relations_equal(&lr, &rl).unwrap());
        let id = BinRelation::identity(s.len());
        assert_eq!(compose_relations(&id, &l).unwrap(), l);
        assert!(compose_relations(&id, &BinRelation::identity(3)).is_err());
    }

    #[test]
    fn partition_json_shape() {
        let s = SemigroupTable::ss_prime(2).unwrap();
        let json = starred_characterized(&s, Starred::Dstar).to_json(&s, "Dstar");
        assert_eq!(json.classes, vec![vec!["-".to_string()], vec!["2:1".into(), "2:2".into()]]);
    }

    #[test]
    fn abundance_on_small_cases() {
        let s = SemigroupTable::ss_prime(4).unwrap();
        let rep = abundance_report(&s);
        assert!(rep.right_abundant && rep.rstar_unique_idempotent);
        assert!(!rep.left_abundant);
        let q = SemigroupTable::rees_quotient(4, 2).unwrap();
        let rep = abundance_report(&q);
        assert!(rep.right_abundant);
        assert_eq!(rep.rstar_idempotent_counts[0], 1);
    }
}
