//! Generating sets and ranks.
//!
//! The rank oracle works on any [`SemigroupTable`]. An element is
//! *essential* when it has no factorisation `g = ab` with `a ≠ g ≠ b`; every
//! generating set must contain it, since the last step of a shortest
//! factorisation of `g` would otherwise be forbidden. If the essential
//! elements already generate, their number is the rank. Otherwise a lower
//! bound comes from the top L- and R-classes, and a generating set meeting
//! it is searched for within a budget.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{self, binom, formula_rstar_classes};
use crate::green::SemigroupTable;
use crate::pmap::{alpha_i, alpha_ik, eps_1k, is_requisite, requisite, PartialMap};

/// Least composition-closed set containing `generators`, in canonical order.
///
/// With a `universe`, the search stops as soon as every universe element has
/// been reached.
pub fn closure(
    n: usize,
    generators: &[PartialMap],
    universe: Option<&HashSet<PartialMap>>,
) -> Result<Vec<PartialMap>> {
    for g in generators {
        if g.n() != n {
            return Err(Error::SizeMismatch {
                left: n,
                right: g.n(),
            });
        }
    }
    let gens: Vec<PartialMap> = generators.to_vec();
    let mut seen: HashSet<PartialMap> = HashSet::new();
    let mut queue: VecDeque<PartialMap> = VecDeque::new();
    let mut inside = 0;
    for g in &gens {
        if seen.insert(*g) {
            queue.push_back(*g);
            inside += usize::from(universe.is_some_and(|u| u.contains(g)));
        }
    }
    'bfs: while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = x.then_unchecked(g);
            if seen.insert(y) {
                queue.push_back(y);
                if let Some(u) = universe {
                    if u.contains(&y) {
                        inside += 1;
                        if inside == u.len() && seen.len() == inside {
                            break 'bfs;
                        }
                    }
                }
            }
        }
    }
    let mut out: Vec<PartialMap> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Closure inside a table, as a bitset over element indices.
pub fn table_closure(s: &SemigroupTable, generators: &[u32]) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(s.len());
    let mut queue: Vec<u32> = Vec::new();
    for &g in generators {
        if !seen.put(g as usize) {
            queue.push(g);
        }
    }
    while let Some(x) = queue.pop() {
        for &g in generators {
            let y = s.product(x, g);
            if !seen.put(y as usize) {
                queue.push(y);
            }
        }
    }
    seen
}

fn generates(s: &SemigroupTable, generators: &[u32]) -> bool {
    table_closure(s, generators).count_ones(..) == s.len()
}

/// Elements with no factorisation avoiding themselves.
pub fn essential_elements(s: &SemigroupTable) -> Vec<u32> {
    let size = s.len();
    let decomposable = (0..size as u32)
        .into_par_iter()
        .fold(
            || FixedBitSet::with_capacity(size),
            |mut acc, a| {
                for b in 0..size as u32 {
                    let g = s.product(a, b);
                    if g != a && g != b {
                        acc.insert(g as usize);
                    }
                }
                acc
            },
        )
        .reduce(
            || FixedBitSet::with_capacity(size),
            |mut x, y| {
                x.union_with(&y);
                x
            },
        );
    (0..size as u32).filter(|&g| !decomposable.contains(g as usize)).collect()
}

/// Default number of closure computations the searches may spend.
pub const DEFAULT_SEARCH_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOracle {
    pub rank: Option<usize>,
    pub essential: Vec<u32>,
    /// Proven lower bound on the rank.
    pub lower_bound: usize,
    /// A generating set of size `rank` when one was found.
    pub generators: Vec<u32>,
    pub certified: bool,
    pub closure_calls: usize,
    pub notes: String,
}

/// Classes of elements with equal principal ideal that sit at the top of the
/// ideal order, i.e. no other ideal strictly contains theirs.
fn maximal_classes(ideals: &[FixedBitSet]) -> Vec<Vec<u32>> {
    let part = crate::green::EqPartition::from_keys(ideals.iter());
    part.classes()
        .iter()
        .filter(|class| {
            let mine = &ideals[class[0] as usize];
            ideals.iter().all(|other| !mine.is_subset(other) || other == mine)
        })
        .cloned()
        .collect()
}

/// Every factorisation `g_1 ⋯ g_k` of `s` has `s ≤_L g_k` and `s ≤_R g_1`,
/// so each maximal L-class (and each maximal R-class) needs a generator of
/// its own. Returns the better of the two bounds with its uncovered classes.
fn top_class_bound(s: &SemigroupTable, essential: &[u32]) -> (usize, Vec<Vec<u32>>) {
    let is_essential: HashSet<u32> = essential.iter().copied().collect();
    [crate::green::left_ideals(s), crate::green::right_ideals(s)]
        .iter()
        .map(|ideals| {
            let open: Vec<Vec<u32>> = maximal_classes(ideals)
                .into_iter()
                .filter(|c| !c.iter().any(|g| is_essential.contains(g)))
                .collect();
            (essential.len() + open.len(), open)
        })
        .max_by_key(|(bound, open)| (*bound, std::cmp::Reverse(open.iter().map(Vec::len).product::<usize>())))
        .expect("two sides")
}

pub fn rank_oracle(s: &SemigroupTable) -> RankOracle {
    rank_oracle_with_budget(s, DEFAULT_SEARCH_BUDGET)
}

pub fn rank_oracle_with_budget(s: &SemigroupTable, budget: usize) -> RankOracle {
    let essential = essential_elements(s);
    let done = |rank: usize, gens: Vec<u32>, calls: usize, notes: String, essential: Vec<u32>, lb: usize| {
        let mut gens = gens;
        gens.sort();
        RankOracle {
            rank: Some(rank),
            essential,
            lower_bound: lb,
            generators: gens,
            certified: true,
            closure_calls: calls,
            notes,
        }
    };
    if generates(s, &essential) {
        let k = essential.len();
        return done(k, essential.clone(), 1, "essential elements generate".into(), essential, k);
    }
    let mut calls = 1;
    let (lower_bound, open) = top_class_bound(s, &essential);

    // one representative from each uncovered top class
    let mut pick = vec![0usize; open.len()];
    loop {
        if calls >= budget {
            break;
        }
        let mut gens = essential.clone();
        gens.extend(open.iter().zip(&pick).map(|(c, &i)| c[i]));
        calls += 1;
        if generates(s, &gens) {
            let note = format!("essential elements plus one element of each of {} top classes", open.len());
            return done(lower_bound, gens, calls, note, essential, lower_bound);
        }
        let mut k = 0;
        while k < pick.len() {
            pick[k] += 1;
            if pick[k] < open[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        if k == pick.len() {
            break;
        }
    }

    let is_essential: HashSet<u32> = essential.iter().copied().collect();
    let candidates: Vec<u32> = (0..s.len() as u32).filter(|i| !is_essential.contains(i)).collect();
    let first = (lower_bound - essential.len()).max(1);
    for k in first..=candidates.len() {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            if calls >= budget {
                return RankOracle {
                    rank: None,
                    essential,
                    lower_bound,
                    generators: Vec::new(),
                    certified: false,
                    closure_calls: calls,
                    notes: format!("search budget of {budget} closures exhausted at augmentation size {k}"),
                };
            }
            let mut gens = essential.clone();
            gens.extend(combo.iter().map(|&c| candidates[c]));
            calls += 1;
            if generates(s, &gens) {
                let note = format!("essential elements plus {k} searched element(s)");
                let rank = gens.len();
                return done(rank, gens, calls, note, essential, lower_bound);
            }
            if !next_combination(&mut combo, candidates.len()) {
                break;
            }
        }
    }
    unreachable!("the whole semigroup generates itself")
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn shared_rank_formula(n: usize, p: usize) -> BigUint {
    binom(n as i64 - 1, p as i64 - 1) + formula_rstar_classes(n, p)
}

/// `C(n-1, p-1) + Σ_{r=p}^{n-1} C(n-1, r) C(r-1, p-1)` for RSS'_n(p).
pub fn formula_rank_quotient(n: usize, p: usize) -> Result<BigUint> {
    if p < 1 || p + 1 > n {
        return Err(Error::IndexRange(format!(
            "quotient rank needs 1 <= p <= n-1, got n = {n}, p = {p}"
        )));
    }
    Ok(shared_rank_formula(n, p))
}

/// Same closed form for K(n, p), valid for `1 <= p <= n-2`.
pub fn formula_rank_ideal(n: usize, p: usize) -> Result<BigUint> {
    if p < 1 || p + 2 > n {
        return Err(Error::IdealFormulaRange { n, p });
    }
    Ok(shared_rank_formula(n, p))
}

pub fn formula_rank_ss_prime(n: usize) -> usize {
    3 * n - 4
}

/// `G(p)`: requisite elements and idempotents of height `p`.
pub fn generating_set_g(n: usize, p: usize) -> Result<Vec<PartialMap>> {
    if p < 1 || p + 1 > n {
        return Err(Error::IndexRange(format!("G(p) needs 1 <= p <= n-1, got n = {n}, p = {p}")));
    }
    let mut g = families::requisites(n, p)?;
    g.extend(families::idempotents(n, Some(p))?);
    g.sort();
    g.dedup();
    Ok(g)
}

/// `(G(n-2) \ (M(n-2) ∪ {ε_{1,2}})) ∪ G(n-1)`, or `G(1)` when `n = 2`.
pub fn ss_prime_minimal_generators(n: usize) -> Result<Vec<PartialMap>> {
    if n == 2 {
        return generating_set_g(2, 1);
    }
    if n < 2 {
        return Err(Error::IndexRange(format!("n = {n} < 2")));
    }
    let eps12 = eps_1k(n, 2)?;
    let mut out: Vec<PartialMap> = generating_set_g(n, n - 2)?
        .into_iter()
        .filter(|a| !is_requisite(a) && *a != eps12)
        .collect();
    out.extend(generating_set_g(n, n - 1)?);
    out.sort();
    Ok(out)
}

/// Writes `a = b · r` with `r` the requisite element sharing `a`'s image and
/// `b` sharing `a`'s kernel.
pub fn factor_via_requisite(a: &PartialMap) -> Result<(PartialMap, PartialMap)> {
    if !a.is_ss_prime() {
        return Err(Error::NotMember(a.to_string()));
    }
    let image = a.image();
    if image.first() != Some(&1) {
        return Err(Error::NoRequisite(a.to_string()));
    }
    let prefix = image.iter().enumerate().take_while(|&(j, &v)| v == j + 1).count();
    let i = prefix + 1;
    let tail = &image[prefix..];
    let req = requisite(a.n(), i, tail)?;
    let pairs = a
        .kernel_view()
        .blocks
        .into_iter()
        .enumerate()
        .flat_map(|(j, block)| {
            let target = if j < prefix { j + 2 } else { block.value };
            block.points.into_iter().map(move |x| (x, target))
        })
        .collect::<Vec<_>>();
    let mut pairs = pairs;
    pairs.sort();
    let b = PartialMap::new(a.n(), pairs)?;
    Ok((b, req))
}

/// Writes a requisite element of height `p <= n-3` as `β γ` with `β` an
/// idempotent and `γ` a requisite element, both of height `p + 1`.
pub fn lift_requisite(req: &PartialMap, n: usize) -> Result<(PartialMap, PartialMap)> {
    if req.n() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: req.n(),
        });
    }
    if !is_requisite(req) {
        return Err(Error::RequisiteShape(req.to_string()));
    }
    let height = req.height();
    if height + 3 > n {
        return Err(Error::LiftUndefined { height, n });
    }
    let used = req.domain_mask() | req.image_mask();
    let mut free = (1..=n).filter(|&x| used & (1 << (x - 1)) == 0);
    let d = free.next().expect("complement has two points");
    let c = free.next().expect("complement has two points");
    let beta = PartialMap::partial_identity(n, req.domain().into_iter().chain([d]))?;
    let mut pairs: Vec<(usize, usize)> = req.pairs().chain([(c, c)]).collect();
    pairs.sort();
    let gamma = PartialMap::new(n, pairs)?;
    Ok((beta, gamma))
}

/// `ε_{1,k} α_i = α_{i,k}` for all `2 <= i < k <= n`, and `α_2² = ε_{1,2}`.
pub fn verify_ss1_witnesses(n: usize) -> Result<bool> {
    if n < 4 {
        return Err(Error::IndexRange(format!("needs n >= 4, got {n}")));
    }
    for k in 3..=n {
        let e = eps_1k(n, k)?;
        for i in 2..k {
            if e.then(&alpha_i(n, i)?)? != alpha_ik(n, i, k)? {
                return Ok(false);
            }
        }
    }
    let a2 = alpha_i(n, 2)?;
    Ok(a2.then(&a2)? == eps_1k(n, 2)?)
}

/// The idempotents generate every map whose image avoids 1, and together
/// with the requisite elements they generate SS'_n.
pub fn verify_theorem_hq(n: usize) -> Result<bool> {
    let all = families::ss_prime(n)?;
    let idem: Vec<PartialMap> = all.iter().copied().filter(PartialMap::is_idempotent).collect();
    let from_idem: HashSet<PartialMap> = closure(n, &idem, None)?.into_iter().collect();
    let upper_ok = all
        .iter()
        .filter(|a| a.image_mask() & 1 == 0)
        .all(|a| from_idem.contains(a));
    let mut gens = idem;
    gens.extend(all.iter().copied().filter(is_requisite));
    Ok(upper_ok && closure(n, &gens, None)? == all)
}

/// Maps generated by J*_{n-1} are all injective, so J*_{n-2} is not
/// contained in `<J*_{n-1}>`. Returns whether both halves hold.
pub fn verify_injectivity_barrier(n: usize) -> Result<bool> {
    if n < 3 {
        return Err(Error::IndexRange(format!("needs n >= 3, got {n}")));
    }
    let top = families::jstar_slice(n, n - 1)?;
    let generated: HashSet<PartialMap> = closure(n, &top, None)?.into_iter().collect();
    let all_injective = generated.iter().all(PartialMap::is_injective);
    let below = families::jstar_slice(n, n - 2)?;
    let missing = below.iter().any(|a| !generated.contains(a));
    Ok(all_injective && missing)
}

fn nonzero_indices(s: &SemigroupTable) -> Vec<u32> {
    let zero = s.zero();
    (0..s.len() as u32).filter(|&i| Some(i) != zero).collect()
}

/// In RSS'_n(p), whenever a product `ab` of nonzero elements lies in `G(p)`:
/// `a` is idempotent, and either `ab = a` or `ab` is requisite with
/// `dom a = dom ab` and `im b = im ab`.
pub fn verify_g_products(n: usize, p: usize) -> Result<bool> {
    let s = SemigroupTable::rees_quotient(n, p)?;
    let g: HashSet<PartialMap> = generating_set_g(n, p)?.into_iter().collect();
    let nonzero = nonzero_indices(&s);
    let map = |i: u32| *s.element(i).as_map().expect("nonzero");
    Ok(nonzero.par_iter().all(|&a| {
        nonzero.iter().all(|&b| {
            let ab = s.product(a, b);
            let Some(&m) = s.element(ab).as_map() else {
                return true;
            };
            if !g.contains(&m) {
                return true;
            }
            let (ma, mb) = (map(a), map(b));
            ma.is_idempotent()
                && (ab == a
                    || (is_requisite(&m)
                        && ma.domain_mask() == m.domain_mask()
                        && mb.image_mask() == m.image_mask()))
        })
    }))
}

/// First pair `(a, b)` of nonzero elements of RSS'_n(p) with `ab ∈ G(p)` but
/// not both `a, b ∈ G(p)` with `ab ∈ {a, b}`. Such pairs exist for
/// `1 <= p <= n-2`, e.g. `{2->2} · {2->1,3->1} = {2->1}` at `n = 3`.
pub fn g_product_exception(n: usize, p: usize) -> Result<Option<(PartialMap, PartialMap)>> {
    let s = SemigroupTable::rees_quotient(n, p)?;
    let g: HashSet<u32> = generating_set_g(n, p)?
        .iter()
        .map(|m| s.index_of_map(m).expect("G(p) lies in J*_p"))
        .collect();
    let nonzero = nonzero_indices(&s);
    let map = |i: u32| *s.element(i).as_map().expect("nonzero");
    for &a in &nonzero {
        for &b in &nonzero {
            let ab = s.product(a, b);
            if g.contains(&ab) && !(g.contains(&a) && g.contains(&b) && (ab == a || ab == b)) {
                return Ok(Some((map(a), map(b))));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    SsPrime,
    Ideal,
    Quotient,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::SsPrime => "ss-prime",
            Target::Ideal => "ideal",
            Target::Quotient => "quotient",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyDescriptor {
    pub target: Target,
    pub n: usize,
    pub p: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub family: FamilyDescriptor,
    pub formula_value: u64,
    pub oracle_value: Option<u64>,
    pub generating_set: Vec<String>,
    pub minimality_certified: bool,
    pub notes: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RankStatus {
    Pass,
    Fail,
    Uncertified,
}

impl RankReport {
    pub fn status(&self) -> RankStatus {
        match (self.minimality_certified, self.oracle_value) {
            (true, Some(v)) if v == self.formula_value && v == self.generating_set.len() as u64 => {
                RankStatus::Pass
            }
            (true, _) => RankStatus::Fail,
            (false, _) => RankStatus::Uncertified,
        }
    }
}

pub fn table_for(target: Target, n: usize, p: Option<usize>) -> Result<SemigroupTable> {
    let need_p = || p.ok_or_else(|| Error::Family(format!("{target} needs p")));
    match target {
        Target::SsPrime => SemigroupTable::ss_prime(n),
        Target::Ideal => SemigroupTable::ideal(n, need_p()?),
        Target::Quotient => SemigroupTable::rees_quotient(n, need_p()?),
    }
}

pub fn rank_report(target: Target, n: usize, p: Option<usize>, budget: usize) -> Result<RankReport> {
    let formula = match target {
        Target::SsPrime => {
            if n < 2 {
                return Err(Error::IndexRange(format!("n = {n} < 2")));
            }
            BigUint::from(formula_rank_ss_prime(n))
        }
        Target::Ideal => formula_rank_ideal(n, p.unwrap_or(0))?,
        Target::Quotient => formula_rank_quotient(n, p.unwrap_or(0))?,
    };
    let s = table_for(target, n, p)?;
    let oracle = rank_oracle_with_budget(&s, budget);
    let generating_set = oracle
        .generators
        .iter()
        .map(|&i| s.element(i).to_string())
        .collect();
    let mut notes = oracle.notes.clone();
    if target == Target::SsPrime && n == 3 {
        let literal = ss_prime_minimal_generators(3)?.len();
        notes.push_str(&format!("; literal n = 3 generator formula gives {literal} elements"));
    }
    Ok(RankReport {
        family: FamilyDescriptor { target, n, p },
        formula_value: formula.to_u64().expect("rank fits in 64 bits"),
        oracle_value: oracle.rank.map(|r| r as u64),
        generating_set,
        minimality_certified: oracle.certified,
        notes,
    })
}
