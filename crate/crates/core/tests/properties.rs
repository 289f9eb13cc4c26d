use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use zonosep::cubillage::{anti_standard_cubillage, standard_cubillage};
use zonosep::flips::{
    apply_flip, neighbors, neighbors_down, neighbors_up, Direction, FlipSite, Parity, WitnessMode,
};
use zonosep::geometry::{
    is_vertex_geometric, is_zonotope_vertex, sign_changes, CyclicConfiguration,
};
use zonosep::membranes::fragments;
use zonosep::separation::{is_double_r_comb, surrounds};
use zonosep::systems::{
    check_pairwise, extend_to_maximal, is_maximal, PairwisePredicate, SetSystem,
};
use zonosep::{
    interlacing_degree, interval_cortege, is_strongly_r_separated, is_weakly_r_separated,
    GroundSet, Subset,
};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 256,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn pair() -> impl Strategy<Value = (usize, Subset, Subset)> {
    (1usize..=12).prop_flat_map(|n| {
        (Just(n), 0..(1u64 << n), 0..(1u64 << n))
            .prop_map(|(n, a, b)| (n, Subset::from_bits(a), Subset::from_bits(b)))
    })
}

fn reverse(x: Subset, n: usize) -> Subset {
    Subset::from_elems(x.elements().map(|i| n + 1 - i)).unwrap()
}

/// Longest alternating subsequence of `A − B` / `B − A`, by brute force.
fn alternation(a: Subset, b: Subset) -> usize {
    let seq: Vec<bool> = (a ^ b).elements().map(|i| a.contains(i)).collect();
    1 + seq.windows(2).filter(|w| w[0] != w[1]).count() - usize::from(seq.is_empty())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn degree_is_the_alternation_count((_n, a, b) in pair()) {
        prop_assert_eq!(interlacing_degree(a, b), alternation(a, b));
        prop_assert_eq!(interval_cortege(a, b).len(), alternation(a, b));
    }

    #[test]
    fn predicates_are_symmetric((_n, a, b) in pair(), r in 0usize..8) {
        prop_assert_eq!(is_strongly_r_separated(a, b, r), is_strongly_r_separated(b, a, r));
        prop_assert_eq!(is_weakly_r_separated(a, b, r).ok(), is_weakly_r_separated(b, a, r).ok());
        prop_assert_eq!(is_double_r_comb(a, b, r), is_double_r_comb(b, a, r));
    }

    #[test]
    fn strong_separation_is_monotone((_n, a, b) in pair(), r in 0usize..8) {
        if is_strongly_r_separated(a, b, r) {
            prop_assert!(is_strongly_r_separated(a, b, r + 1));
            if r >= 1 {
                prop_assert_eq!(is_weakly_r_separated(a, b, r).ok(), Some(true));
            }
        }
    }

    #[test]
    fn complement_and_reversal_invariance((n, a, b) in pair(), r in 0usize..8) {
        let full = GroundSet::new(n).unwrap().full();
        let (ca, cb) = (full - a, full - b);
        prop_assert_eq!(is_strongly_r_separated(a, b, r), is_strongly_r_separated(ca, cb, r));
        prop_assert_eq!(
            is_strongly_r_separated(a, b, r),
            is_strongly_r_separated(reverse(a, n), reverse(b, n), r)
        );
        if r % 2 == 1 {
            prop_assert_eq!(is_weakly_r_separated(a, b, r).ok(), is_weakly_r_separated(ca, cb, r).ok());
            prop_assert_eq!(
                is_weakly_r_separated(a, b, r).ok(),
                is_weakly_r_separated(reverse(a, n), reverse(b, n), r).ok()
            );
        }
    }

    #[test]
    fn surrounding_is_antisymmetric((_n, a, b) in pair()) {
        prop_assert!(!(surrounds(a, b) && surrounds(b, a)));
    }

    #[test]
    fn subset_text_round_trip((_n, a, _b) in pair()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<Subset>().unwrap(), a);
    }

    #[test]
    fn vertex_rule_matches_geometry(n in 2usize..=7, d in 2usize..=7, x in 0u64..128) {
        prop_assume!(d <= n && x < (1u64 << n));
        let c = CyclicConfiguration::veronese(n, d).unwrap();
        let x = Subset::from_bits(x);
        prop_assert_eq!(is_zonotope_vertex(x, n, d), is_vertex_geometric(&c, x));
        prop_assert_eq!(is_zonotope_vertex(x, n, d), sign_changes(x, n) < d);
    }

    #[test]
    fn greedy_extension_is_maximal(n in 3usize..=6, seeds in proptest::collection::vec(0u64..64, 0..6), r in 1usize..=3) {
        let g = GroundSet::new(n).unwrap();
        let p = PairwisePredicate::weak(r).unwrap();
        let mut w = SetSystem::empty(g);
        for s in seeds {
            let x = Subset::from_bits(s & g.full().bits());
            let mut trial = w.clone();
            trial.insert(x).unwrap();
            if check_pairwise(&trial, p).ok {
                w = trial;
            }
        }
        let m = extend_to_maximal(&w, p).unwrap();
        prop_assert!(w.is_subset_of(&m));
        prop_assert!(is_maximal(&m, p));
        prop_assert!(check_pairwise(&m, p).ok);
        if r % 2 == 1 {
            prop_assert!(check_pairwise(&m.complements(), p).ok);
        }
    }

    #[test]
    fn flips_are_involutions(
        n in 5usize..=8,
        r in prop::sample::select(vec![1usize, 3]),
        support in proptest::sample::subsequence((1..=8).collect::<Vec<_>>(), 5),
        x in 0u64..256,
    ) {
        let support: Vec<usize> = support.into_iter().filter(|&i| i <= n).take(r + 2).collect();
        prop_assume!(support.len() == r + 2);
        let g = GroundSet::new(n).unwrap();
        let support = Subset::from_elems(support).unwrap();
        let x = Subset::from_bits(x & g.full().bits()) - support;
        let site = FlipSite::from_support(x, support, Parity::Odd).unwrap();
        let full = neighbors(&site).unwrap();
        prop_assert!(neighbors_up(&site).iter().chain(&neighbors_down(&site)).all(|s| full.contains(s)));

        let w = SetSystem::new(g, site.lift(&full).into_iter().chain([site.xp()])).unwrap();
        let up = apply_flip(&w, &site, Direction::Raise, WitnessMode::Full).unwrap();
        prop_assert_eq!(apply_flip(&up, &site, Direction::Lower, WitnessMode::Full).unwrap(), w.clone());
        let sharp = apply_flip(&w, &site, Direction::Raise, WitnessMode::Sharp).unwrap();
        prop_assert_eq!(sharp, up);
    }
}

#[test]
fn membrane_lattice_and_sizes_exhaustive() {
    for (n, d) in [(4, 3), (5, 3), (5, 4), (6, 3)] {
        for q in [
            standard_cubillage(n, d).unwrap(),
            anti_standard_cubillage(n, d).unwrap(),
        ] {
            let f = fragments(&q).unwrap();
            let mut ideals = Vec::new();
            f.for_each_membrane(usize::MAX, |m| {
                ideals.push(m.ideal());
                Ok(std::ops::ControlFlow::Continue(()))
            })
            .unwrap();
            let mut sorted = ideals.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), ideals.len(), "ideals repeat for ({n},{d})");
            let stride = 1 + ideals.len() / 60;
            for i in ideals.iter().step_by(stride) {
                for j in ideals.iter().step_by(stride) {
                    let meet: std::collections::BTreeSet<usize> =
                        i.iter().filter(|x| j.contains(x)).copied().collect();
                    let join: std::collections::BTreeSet<usize> =
                        i.iter().chain(j).copied().collect();
                    assert!(f.is_ideal(&meet).is_ok() && f.is_ideal(&join).is_ok());
                }
            }
        }
    }
}
