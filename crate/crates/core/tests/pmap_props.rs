use std::collections::BTreeSet;

use proptest::prelude::*;

use schroeder::families;
use schroeder::pmap::PartialMap;

/// Any partial map of `[n]`: each point is undefined or sent anywhere.
fn any_map(n: usize) -> impl Strategy<Value = PartialMap> {
    prop::collection::vec(prop::option::of(1..=n), n).prop_map(move |vals| {
        let pairs = vals.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i + 1, v)));
        PartialMap::new(n, pairs.collect::<Vec<_>>()).unwrap()
    })
}

/// A member of SS'_n: domain inside `2..=n`, values non-decreasing and below
/// their point.
fn ss_prime_map(n: usize) -> impl Strategy<Value = PartialMap> {
    prop::collection::vec((any::<bool>(), any::<u8>()), n - 1).prop_map(move |picks| {
        let mut pairs = Vec::new();
        let mut floor = 1;
        for (k, (keep, r)) in picks.into_iter().enumerate() {
            let x = k + 2;
            if keep {
                let v = floor + (r as usize) % (x - floor + 1);
                pairs.push((x, v));
                floor = v;
            }
        }
        PartialMap::new(n, pairs).unwrap()
    })
}

fn decreasing_map(n: usize) -> impl Strategy<Value = PartialMap> {
    prop::collection::vec(any::<u8>(), n).prop_map(move |seeds| {
        let pairs: Vec<(usize, usize)> = seeds
            .iter()
            .enumerate()
            .filter_map(|(i, s)| {
                let v = (*s as usize) % (i + 2);
                (v > 0).then_some((i + 1, v))
            })
            .collect();
        PartialMap::new(n, pairs).unwrap()
    })
}

/// Composition from first principles, `x(ab) = (xa)b`.
fn naive_then(a: &PartialMap, b: &PartialMap) -> BTreeSet<(usize, usize)> {
    a.pairs().filter_map(|(x, y)| b.get(y).map(|z| (x, z))).collect()
}

proptest! {
    #[test]
    fn composition_matches_definition((a, b) in (1..=9usize).prop_flat_map(|n| (any_map(n), any_map(n)))) {
        let ab = a.then(&b).unwrap();
        prop_assert_eq!(ab.pairs().collect::<BTreeSet<_>>(), naive_then(&a, &b));
    }

    #[test]
    fn associative((a, b, c) in (1..=9usize).prop_flat_map(|n| (any_map(n), any_map(n), any_map(n)))) {
        prop_assert_eq!(a.then(&b).unwrap().then(&c).unwrap(), a.then(&b.then(&c).unwrap()).unwrap());
    }

    #[test]
    fn ss_prime_closed((a, b) in (2..=12usize).prop_flat_map(|n| (ss_prime_map(n), ss_prime_map(n)))) {
        prop_assert!(a.is_ss_prime() && b.is_ss_prime());
        prop_assert!(a.then(&b).unwrap().is_ss_prime());
    }

    #[test]
    fn height_monotone((a, b) in (1..=9usize).prop_flat_map(|n| (any_map(n), any_map(n)))) {
        let h = a.then(&b).unwrap().height();
        prop_assert!(h <= a.height().min(b.height()));
    }

    #[test]
    fn fixed_points_meet((a, b) in (1..=12usize).prop_flat_map(|n| (decreasing_map(n), decreasing_map(n)))) {
        let both: Vec<usize> = a.fixed_points().into_iter().filter(|&x| b.get(x) == Some(x)).collect();
        prop_assert_eq!(a.then(&b).unwrap().fixed_points(), both.clone());
        prop_assert_eq!(b.then(&a).unwrap().fixed_points(), both);
    }

    #[test]
    fn pseudo_inverse_contract(a in (2..=12usize).prop_flat_map(ss_prime_map)) {
        if a.is_empty() {
            prop_assert!(a.pseudo_inverse().is_err());
        } else {
            let ap = a.pseudo_inverse().unwrap();
            let aap = a.then(&ap).unwrap();
            prop_assert_eq!(aap.then(&a).unwrap(), a);
            prop_assert!(aap.is_idempotent() && aap.is_ss_prime());
            prop_assert_eq!(ap.domain(), a.image());
        }
    }

    #[test]
    fn encode_parse_round_trip(a in (1..=16usize).prop_flat_map(any_map)) {
        prop_assert_eq!(PartialMap::parse(&a.encode(), a.n()).unwrap(), a);
        let full = format!("{}/{}", a.n(), a.encode());
        prop_assert_eq!(full.parse::<PartialMap>().unwrap(), a);
    }

    #[test]
    fn shift_embed_homomorphic((a, b) in (1..=10usize).prop_flat_map(|n| (decreasing_map(n), decreasing_map(n)))) {
        let (sa, sb) = (a.shift_embed().unwrap(), b.shift_embed().unwrap());
        prop_assert_eq!(a.then(&b).unwrap().shift_embed().unwrap(), sa.then(&sb).unwrap());
        prop_assert_eq!(sa.n(), a.n() + 1);
        prop_assert!(sa.image().iter().all(|&v| v != 1));
    }

    #[test]
    fn order_agrees_with_pairs((a, b) in (1..=8usize).prop_flat_map(|n| (any_map(n), any_map(n)))) {
        let (pa, pb): (Vec<_>, Vec<_>) = (a.pairs().collect(), b.pairs().collect());
        prop_assert_eq!(a.cmp(&b), pa.cmp(&pb));
    }
}

#[test]
fn pseudo_inverse_exhaustive_and_not_left() {
    for n in 2..=6 {
        let mut left_fails = false;
        for a in families::ss_prime(n).unwrap().into_iter().filter(|a| !a.is_empty()) {
            let ap = a.pseudo_inverse().unwrap();
            let aap = a.then(&ap).unwrap();
            assert_eq!(aap.then(&a).unwrap(), a);
            assert!(aap.is_idempotent() && aap.is_ss_prime());
            left_fails |= !ap.then(&a).unwrap().is_ss_prime();
        }
        assert!(left_fails, "n = {n}");
    }
}

/// Every partial map of `[n]`.
fn all_maps(n: usize) -> Vec<PartialMap> {
    let mut out = vec![PartialMap::empty(n).unwrap()];
    for x in 1..=n {
        out = out
            .iter()
            .flat_map(|m| {
                let base: Vec<(usize, usize)> = m.pairs().collect();
                std::iter::once(*m).chain((1..=n).map(move |v| {
                    let mut pairs = base.clone();
                    pairs.push((x, v));
                    PartialMap::new(n, pairs).unwrap()
                }))
            })
            .collect();
    }
    out
}

#[test]
fn shift_embed_onto_upper_part() {
    for n in 2..=7 {
        let shifted: BTreeSet<PartialMap> = all_maps(n - 1)
            .into_iter()
            .filter(|a| a.is_isotone() && a.is_decreasing())
            .map(|a| a.shift_embed().unwrap())
            .collect();
        let upper: BTreeSet<PartialMap> = families::ss_prime(n)
            .unwrap()
            .into_iter()
            .filter(|a| !a.image().contains(&1))
            .collect();
        assert_eq!(shifted, upper, "n = {n}");
    }
}
