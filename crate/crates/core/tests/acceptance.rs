//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. `SCHROEDER_LONG=1` widens a few ranges.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use schroeder::families::{self, formula_idempotents, formula_lstar_classes, formula_rstar_classes, schroeder_small};
use schroeder::green::{self, Green, SemigroupTable, Starred};
use schroeder::pmap::{is_requisite, PartialMap};
use schroeder::rank::{self, RankStatus, Target};

type Outcome = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn long() -> bool {
    std::env::var("SCHROEDER_LONG").is_ok_and(|v| v != "0" && !v.is_empty())
}

fn maps(s: &SemigroupTable) -> Vec<PartialMap> {
    s.elements().iter().map(|e| *e.as_map().expect("no zero")).collect()
}

fn c1_cardinality() -> Outcome {
    let expected = [3u64, 11, 45, 197, 903, 4279, 20793, 103049];
    for (n, &want) in (2..=9).zip(&expected) {
        let got = families::ss_prime(n).map_err(|e| e.to_string())?.len() as u64;
        ensure(got == want && schroeder_small(n) == BigUint::from(want), || {
            format!("n = {n}: enumerated {got}, s_n = {}", schroeder_small(n))
        })?;
    }
    Ok(())
}

fn c2_idempotents() -> Outcome {
    let expected = [2u64, 5, 14, 41, 122, 365, 1094, 3281];
    for (n, &want) in (2..=9).zip(&expected) {
        let got = families::ss_prime(n)
            .map_err(|e| e.to_string())?
            .iter()
            .filter(|a| a.then(a).unwrap() == **a)
            .count() as u64;
        ensure(got == want && formula_idempotents(n) == BigUint::from(want), || {
            format!("n = {n}: enumerated {got}")
        })?;
    }
    Ok(())
}

/// Partition of `0..len` by equal keys, as a set of sets.
fn blocks<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> BTreeSet<BTreeSet<u32>> {
    let mut by: HashMap<K, BTreeSet<u32>> = HashMap::new();
    for (i, k) in keys.enumerate() {
        by.entry(k).or_default().insert(i as u32);
    }
    by.into_values().collect()
}

fn as_blocks(p: &green::EqPartition) -> BTreeSet<BTreeSet<u32>> {
    p.classes().iter().map(|c| c.iter().copied().collect()).collect()
}

fn c3_green() -> Outcome {
    for n in 2..=6 {
        let s = SemigroupTable::ss_prime(n).map_err(|e| e.to_string())?;
        let ms = maps(&s);
        let at: HashMap<PartialMap, usize> = ms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        // principal ideals straight from composition
        let ideal = |f: &dyn Fn(&PartialMap) -> PartialMap, a: usize| {
            let mut set = FixedBitSet::with_capacity(ms.len());
            set.insert(a);
            for x in &ms {
                set.insert(at[&f(x)]);
            }
            set
        };
        let left: Vec<FixedBitSet> = (0..ms.len()).map(|a| ideal(&|x| x.then(&ms[a]).unwrap(), a)).collect();
        let right: Vec<FixedBitSet> = (0..ms.len()).map(|a| ideal(&|x| ms[a].then(x).unwrap(), a)).collect();
        let two: Vec<FixedBitSet> = left
            .iter()
            .map(|l| {
                let mut set = l.clone();
                for y in l.ones() {
                    set.union_with(&right[y]);
                }
                set
            })
            .collect();
        let l_oracle = blocks(left.iter());
        let r_oracle = blocks(right.iter());
        let j_oracle = blocks(two.iter());
        let singletons = blocks(0..ms.len());
        ensure(as_blocks(&green::green(&s, Green::L)) == l_oracle, || format!("n = {n}: L"))?;
        ensure(as_blocks(&green::green(&s, Green::R)) == singletons, || format!("n = {n}: R"))?;
        ensure(r_oracle == singletons, || format!("n = {n}: R oracle not trivial"))?;
        ensure(as_blocks(&green::green(&s, Green::H)) == singletons, || format!("n = {n}: H"))?;
        ensure(as_blocks(&green::green(&s, Green::D)) == l_oracle, || format!("n = {n}: D"))?;
        ensure(as_blocks(&green::green(&s, Green::J)) == l_oracle && j_oracle == l_oracle, || {
            format!("n = {n}: J")
        })?;
        let char_key = ms.iter().map(|a| {
            let kv = a.kernel_view();
            let mins: Vec<usize> = kv.blocks.iter().map(|b| b.points[0]).collect();
            (a.image(), mins)
        });
        ensure(blocks(char_key) == l_oracle, || format!("n = {n}: L characterization"))?;
        let reg = green::regular_elements(&s);
        for (i, a) in ms.iter().enumerate() {
            let regular = ms.iter().any(|x| a.then(x).unwrap().then(a).unwrap() == *a);
            ensure(regular == reg[i] && regular == a.is_idempotent(), || {
                format!("n = {n}: regularity of {a}")
            })?;
        }
    }
    Ok(())
}

/// `a L* b` iff `ax = ay ⇔ bx = by` for all `x, y ∈ S¹`, checked literally.
fn naive_starred(ms: &[PartialMap], left: bool) -> BTreeSet<BTreeSet<u32>> {
    let act = |a: &PartialMap, x: Option<&PartialMap>| match x {
        None => *a,
        Some(x) if left => a.then(x).unwrap(),
        Some(x) => x.then(a).unwrap(),
    };
    let s1: Vec<Option<&PartialMap>> = std::iter::once(None).chain(ms.iter().map(Some)).collect();
    let related = |a: &PartialMap, b: &PartialMap| {
        s1.iter().all(|x| {
            s1.iter()
                .all(|y| (act(a, *x) == act(a, *y)) == (act(b, *x) == act(b, *y)))
        })
    };
    let mut classes: Vec<BTreeSet<u32>> = Vec::new();
    'next: for (i, a) in ms.iter().enumerate() {
        for c in classes.iter_mut() {
            let first = *c.iter().next().unwrap();
            if related(&ms[first as usize], a) {
                c.insert(i as u32);
                continue 'next;
            }
        }
        classes.push(BTreeSet::from([i as u32]));
    }
    classes.into_iter().collect()
}

fn c4_starred() -> Outcome {
    let top = if long() { 6 } else { 5 };
    for n in 2..=top {
        let s = SemigroupTable::ss_prime(n).map_err(|e| e.to_string())?;
        let limit = green::DEFINITIONAL_LIMIT.max(s.len());
        for which in [Starred::Lstar, Starred::Rstar] {
            let def = green::starred_definitional(&s, which, limit).map_err(|e| e.to_string())?;
            let chr = green::starred_characterized(&s, which);
            ensure(def == chr, || format!("n = {n}: {}", which.name()))?;
            if n <= 4 {
                let naive = naive_starred(&maps(&s), which == Starred::Lstar);
                ensure(naive == as_blocks(&chr), || format!("n = {n}: naive {}", which.name()))?;
            }
        }
    }
    Ok(())
}

fn c5_abundance() -> Outcome {
    let mut sizes = Vec::new();
    for n in 2..=8 {
        let s = SemigroupTable::ss_prime(n).map_err(|e| e.to_string())?;
        let ms = maps(&s);
        let rep = green::abundance_report(&s);
        ensure(rep.right_abundant && !rep.left_abundant, || format!("n = {n}: abundance flags"))?;
        let mut per_kernel: HashMap<Vec<u16>, usize> = HashMap::new();
        for a in &ms {
            *per_kernel.entry(a.kernel_key()).or_default() += usize::from(a.is_idempotent());
        }
        ensure(per_kernel.values().all(|&c| c == 1) && rep.rstar_unique_idempotent, || {
            format!("n = {n}: R*-class without a unique idempotent")
        })?;
        let class: Vec<&PartialMap> = ms.iter().filter(|a| a.image() == [1]).collect();
        ensure(class.iter().all(|a| !a.is_idempotent()), || format!("n = {n}: idempotent in L*-class of 2:1"))?;
        if class.len() != n - 1 {
            sizes.push(format!("{n}: {}", class.len()));
        }
    }
    ensure(sizes.is_empty(), || {
        format!(
            "L*-class of 2:1 has 2^(n-1) - 1 elements, not n - 1 (n: size = {}); all other parts hold",
            sizes.join(", ")
        )
    })
}

fn c6_relation_algebra() -> Outcome {
    for n in [4, 5] {
        let s = SemigroupTable::ss_prime(n).map_err(|e| e.to_string())?;
        let rel = |w| green::starred_characterized(&s, w).to_relation();
        let (l, r) = (rel(Starred::Lstar), rel(Starred::Rstar));
        let height = green::EqPartition::from_keys(maps(&s).iter().map(PartialMap::height)).to_relation();
        let rlr = r.compose(&l).and_then(|x| x.compose(&r)).map_err(|e| e.to_string())?;
        let lrl = l.compose(&r).and_then(|x| x.compose(&l)).map_err(|e| e.to_string())?;
        ensure(rlr == height && lrl == height, || format!("n = {n}: triple composition"))?;
        let lr = l.compose(&r).map_err(|e| e.to_string())?;
        let rl = r.compose(&l).map_err(|e| e.to_string())?;
        let a = s.index_of_map(&PartialMap::new(n, [(2, 2), (3, 3)]).unwrap()).unwrap();
        let b = s.index_of_map(&PartialMap::new(n, [(2, 2), (4, 4)]).unwrap()).unwrap();
        ensure(lr.contains(a, b) && !rl.contains(a, b) && lr != rl, || {
            format!("n = {n}: witness pair does not separate L*R* and R*L*")
        })?;
    }
    Ok(())
}

fn c7_class_counts() -> Outcome {
    for n in 2..=8 {
        let ms = families::ss_prime(n).map_err(|e| e.to_string())?;
        for p in 0..n {
            let layer: Vec<&PartialMap> = ms.iter().filter(|a| a.height() == p).collect();
            let kernels: HashSet<Vec<Vec<usize>>> = layer
                .iter()
                .map(|a| a.kernel_view().blocks.into_iter().map(|b| b.points).collect())
                .collect();
            let images: HashSet<Vec<usize>> = layer.iter().map(|a| a.image()).collect();
            ensure(formula_rstar_classes(n, p) == kernels.len().into(), || {
                format!("n = {n}, p = {p}: {} R*-classes", kernels.len())
            })?;
            if p >= 1 {
                ensure(formula_lstar_classes(n, p) == images.len().into(), || {
                    format!("n = {n}, p = {p}: {} L*-classes", images.len())
                })?;
            }
        }
    }
    for n in 2..=12 {
        ensure(families::verify_identity_corollary(n).map_err(|e| e.to_string())?, || {
            format!("corollary identity at n = {n}")
        })?;
    }
    Ok(())
}

fn certified(target: Target, n: usize, p: Option<usize>) -> Result<u64, String> {
    let rep = rank::rank_report(target, n, p, rank::DEFAULT_SEARCH_BUDGET).map_err(|e| e.to_string())?;
    ensure(rep.status() == RankStatus::Pass, || {
        format!("{target} n = {n} p = {p:?}: {:?} ({})", rep.status(), rep.notes)
    })?;
    Ok(rep.formula_value)
}

fn c8_quotient_ranks() -> Outcome {
    for n in 2..=6 {
        for p in 1..n {
            let r = certified(Target::Quotient, n, Some(p))?;
            ensure(p + 1 != n || r == n as u64, || format!("n = {n}: rank of top slice {r}"))?;
        }
    }
    Ok(())
}

fn c9_ideal_ranks() -> Outcome {
    for n in 3..=6 {
        for p in 1..=n - 2 {
            let r = certified(Target::Ideal, n, Some(p))?;
            let spot = match (n, p) {
                (4, 2) => Some(8),
                (5, 2) => Some(21),
                _ => None,
            };
            ensure(spot.is_none_or(|v| v == r), || format!("K({n},{p}) rank {r}"))?;
        }
    }
    Ok(())
}

fn c10_ss_prime_rank() -> Outcome {
    for n in 2..=6 {
        let r = certified(Target::SsPrime, n, None)?;
        ensure(r == 3 * n as u64 - 4, || format!("n = {n}: rank {r}"))?;
    }
    for n in 2..=8 {
        let gens = rank::ss_prime_minimal_generators(n).map_err(|e| e.to_string())?;
        let all = families::ss_prime(n).map_err(|e| e.to_string())?;
        let closed = rank::closure(n, &gens, None).map_err(|e| e.to_string())?;
        ensure(gens.len() == 3 * n - 4 && closed == all, || {
            format!("n = {n}: {} generators, closure {} of {}", gens.len(), closed.len(), all.len())
        })?;
    }
    Ok(())
}

fn random_decreasing(rng: &mut StdRng, n: usize) -> PartialMap {
    let pairs: Vec<(usize, usize)> = (1..=n)
        .filter_map(|x| {
            let v = rng.gen_range(0..=x);
            (v > 0).then_some((x, v))
        })
        .collect();
    PartialMap::new(n, pairs).unwrap()
}

fn fixed_ok(a: &PartialMap, b: &PartialMap) -> bool {
    let both: BTreeSet<usize> = a.fixed_points().into_iter().filter(|x| b.get(*x) == Some(*x)).collect();
    let ab: BTreeSet<usize> = a.then(b).unwrap().fixed_points().into_iter().collect();
    let ba: BTreeSet<usize> = b.then(a).unwrap().fixed_points().into_iter().collect();
    ab == both && ba == both
}

fn c11_constructive() -> Outcome {
    for n in 1..=5 {
        let all = schroeder::verify::decreasing_maps(n).map_err(|e| e.to_string())?;
        for a in &all {
            for b in &all {
                ensure(fixed_ok(a, b), || format!("fixed points of {a}, {b}"))?;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5c4_0ede);
    for _ in 0..100_000 {
        let n = rng.gen_range(1..=8);
        let (a, b) = (random_decreasing(&mut rng, n), random_decreasing(&mut rng, n));
        ensure(fixed_ok(&a, &b), || format!("fixed points of {a}, {b} (n = {n})"))?;
    }
    for n in 2..=6 {
        for a in families::ss_prime(n).map_err(|e| e.to_string())? {
            if a.is_empty() {
                ensure(a.pseudo_inverse().is_err(), || "empty map has a pseudo-inverse".into())?;
                continue;
            }
            let ap = a.pseudo_inverse().map_err(|e| e.to_string())?;
            let aap = a.then(&ap).unwrap();
            ensure(aap.then(&a).unwrap() == a && aap.is_idempotent() && aap.is_ss_prime(), || {
                format!("pseudo-inverse of {a}")
            })?;
            let factored = rank::factor_via_requisite(&a);
            if a.image().first() == Some(&1) {
                let (b, req) = factored.map_err(|e| e.to_string())?;
                ensure(
                    b.then(&req).unwrap() == a
                        && b.is_ss_prime()
                        && b.kernel_view().blocks.iter().map(|k| &k.points).eq(a.kernel_view().blocks.iter().map(|k| &k.points))
                        && is_requisite(&req)
                        && req.image() == a.image(),
                    || format!("factorization of {a}"),
                )?;
            } else {
                ensure(factored.is_err(), || format!("{a} factored without a requisite image"))?;
            }
            if is_requisite(&a) {
                let lifted = rank::lift_requisite(&a, n);
                if a.height() + 3 <= n {
                    let (beta, gamma) = lifted.map_err(|e| e.to_string())?;
                    ensure(
                        beta.then(&gamma).unwrap() == a
                            && beta.is_idempotent()
                            && beta.is_ss_prime()
                            && is_requisite(&gamma)
                            && beta.height() == a.height() + 1
                            && gamma.height() == a.height() + 1,
                        || format!("lift of {a}"),
                    )?;
                } else {
                    ensure(lifted.is_err(), || format!("lift of {a} should be undefined"))?;
                }
            }
        }
    }
    for n in 4..=8 {
        ensure(rank::verify_ss1_witnesses(n).map_err(|e| e.to_string())?, || format!("witnesses at n = {n}"))?;
    }
    for n in 3..=7 {
        ensure(rank::verify_injectivity_barrier(n).map_err(|e| e.to_string())?, || {
            format!("injectivity barrier at n = {n}")
        })?;
    }
    Ok(())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("cardinality, n = 2..9", c1_cardinality),
        ("idempotent count, n = 2..9", c2_idempotents),
        ("Green's structure, n = 2..6", c3_green),
        ("starred agreement, n = 2..5", c4_starred),
        ("abundance, n = 2..8", c5_abundance),
        ("relation algebra, n = 4, 5", c6_relation_algebra),
        ("class counts and identity", c7_class_counts),
        ("quotient ranks, n = 2..6", c8_quotient_ranks),
        ("ideal ranks, n = 3..6", c9_ideal_ranks),
        ("rank 3n-4", c10_ss_prime_rank),
        ("constructive lemmas", c11_constructive),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let ms = clock.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({ms} ms)", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({ms} ms): {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
