//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use zonosep::cubillage::{
    all_cubes, anti_standard_cubillage, bead_thread_graph, gamma_graph, is_acyclic,
    standard_cubillage, Cubillage,
};
use zonosep::error::Error;
use zonosep::flips::{
    apply_flip, neighbors, neighbors_down, verify_flip_theorem_odd, verify_local_neighb_even,
    verify_refined_lemma, Direction, FlipSite, Parity, WitnessMode,
};
use zonosep::geometry::{
    boundary_vertices, is_vertex_geometric, is_zonotope_vertex, CyclicConfiguration,
};
use zonosep::membranes::{
    enlarged_precedence, fragment_precedence, fragments, property_p_scan, DEFAULT_IDEAL_LIMIT,
};
use zonosep::systems::{
    check_pairwise, is_maximal, max_size, nonpurity_witness, PairwisePredicate, SetSystem,
};
use zonosep::{
    interlacing_degree, is_strongly_r_separated, is_weakly_r_separated, GroundSet, Subset,
};

type Outcome = Result<String, String>;

fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn at_most(n: usize, k: usize) -> usize {
    (0..=k.min(n)).map(|j| choose(n, j)).sum()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn criterion_1() -> Outcome {
    let mut runs = 0;
    for n in 2..=6 {
        for r in 1..n {
            let got = max_size(n, PairwisePredicate::Strong(r)).map_err(e)?;
            ensure(got.size == at_most(n, r + 1), || {
                format!(
                    "STRONG({r}) on [{n}]: {} != {}",
                    got.size,
                    at_most(n, r + 1)
                )
            })?;
            ensure(
                check_pairwise(&got.witness, PairwisePredicate::Strong(r)).ok,
                || format!("bad witness n={n} r={r}"),
            )?;
            runs += 1;
        }
    }
    Ok(format!("{runs} (n, r) pairs"))
}

fn criterion_2() -> Outcome {
    let mut runs = 0;
    for r in [1, 3] {
        for n in r + 1..=6 {
            let got = max_size(n, PairwisePredicate::WeakOdd(r)).map_err(e)?;
            ensure(got.size == at_most(n, r + 1), || {
                format!("WEAK_ODD({r}) on [{n}]: {}", got.size)
            })?;
            runs += 1;
        }
    }
    let four = max_size(4, PairwisePredicate::WeakOdd(1)).map_err(e)?.size;
    ensure(four == 11, || format!("n=4, r=1 gives {four}"))?;
    Ok(format!("{runs} (n, r) pairs, n=4 r=1 -> 11"))
}

fn criterion_3() -> Outcome {
    let v = boundary_vertices(6, 4).map_err(e)?;
    ensure(v.len() == 52, || format!("|V(Z(6,4))| = {}", v.len()))?;
    let excluded: BTreeSet<Subset> = [
        "24", "245", "25", "235", "35", "135", "1356", "136", "1346", "146", "1246", "246",
    ]
    .iter()
    .map(|t| t.parse().unwrap())
    .collect();
    let missing: BTreeSet<Subset> = GroundSet::new(6)
        .unwrap()
        .subsets()
        .into_iter()
        .filter(|x| !v.contains(*x))
        .collect();
    ensure(missing == excluded, || format!("complement is {missing:?}"))?;
    let a = nonpurity_witness();
    let p = PairwisePredicate::WeakOdd(3);
    ensure(a.len() == 55, || format!("witness has {} members", a.len()))?;
    ensure(v.is_subset_of(&a), || {
        "witness does not contain V(Z(6,4))".into()
    })?;
    ensure(check_pairwise(&a, p).ok, || {
        "witness is not weakly 3-separated".into()
    })?;
    ensure(is_maximal(&a, p), || "witness is not maximal".into())?;
    ensure(at_most(6, 4) == 57 && a.len() < 57, || {
        "55 < 57 fails".into()
    })?;
    Ok("52 vertices, 12 excluded sets, witness 55 < 57".into())
}

const CUBILLAGE_CASES: [(usize, usize); 5] = [(4, 2), (4, 3), (5, 3), (6, 4), (5, 5)];

fn criterion_4_cubillages() -> Result<Vec<Cubillage>, String> {
    let mut out = Vec::new();
    for (n, d) in CUBILLAGE_CASES {
        out.push(standard_cubillage(n, d).map_err(e)?);
        out.push(anti_standard_cubillage(n, d).map_err(e)?);
    }
    Ok(out)
}

fn criterion_4() -> Outcome {
    for q in criterion_4_cubillages()? {
        let (n, d) = (q.n, q.d);
        ensure(q.cubes.len() == choose(n, d), || {
            format!("({n},{d}): {} cubes", q.cubes.len())
        })?;
        let report = q.validate();
        ensure(report.ok(), || {
            format!("({n},{d}): {:?}", report.violations)
        })?;
        let v = q.vertices();
        ensure(v.len() == at_most(n, d), || {
            format!("({n},{d}): {} vertices", v.len())
        })?;
        ensure(
            check_pairwise(&v, PairwisePredicate::Strong(d - 1)).ok,
            || format!("({n},{d}) not {}-separated", d - 1),
        )?;
    }
    Ok(format!("{} cubillages", 2 * CUBILLAGE_CASES.len()))
}

fn criterion_5() -> Outcome {
    let mut graphs = 0;
    for n in 1..=5 {
        for d in 1..=3.min(n) {
            let cubes = all_cubes(n, d).map_err(e)?;
            ensure(is_acyclic(&gamma_graph(&cubes)), || {
                format!("Gamma over C({n},{d}) has a cycle")
            })?;
            graphs += 1;
        }
    }
    for q in criterion_4_cubillages()? {
        ensure(is_acyclic(&q.gamma_graph()), || {
            format!("Gamma of Q({},{})", q.n, q.d)
        })?;
        ensure(is_acyclic(&fragment_precedence(&q).map_err(e)?), || {
            format!("fragments of Q({},{})", q.n, q.d)
        })?;
        graphs += 2;
        if q.d % 2 == 0 {
            ensure(is_acyclic(&enlarged_precedence(&q).map_err(e)?), || {
                format!("enlarged Q({},{})", q.n, q.d)
            })?;
            graphs += 1;
        }
    }
    Ok(format!("{graphs} digraphs acyclic"))
}

fn criterion_6() -> Outcome {
    let mut threads = 0;
    for q in criterion_4_cubillages()? {
        let b = bead_thread_graph(&q).map_err(e)?;
        ensure(b.ok(), || format!("({},{}): {:?}", q.n, q.d, b.violations))?;
        let mut outdeg = std::collections::HashMap::new();
        let mut indeg = std::collections::HashMap::new();
        for (a, z) in &b.arcs {
            *outdeg.entry(*a).or_insert(0) += 1;
            *indeg.entry(*z).or_insert(0) += 1;
            let (ha, hz) = (a.len(), z.len());
            let good = if q.d % 2 == 1 { hz > ha } else { hz == ha };
            ensure(good, || {
                format!("({},{}): arc {a} -> {z} has heights {ha}, {hz}", q.n, q.d)
            })?;
        }
        ensure(
            outdeg.values().chain(indeg.values()).all(|&k| k <= 1),
            || "degree above 1".into(),
        )?;
        threads += b.threads.len();
    }
    Ok(format!("{threads} threads"))
}

fn criterion_7() -> Outcome {
    let mut cases = Vec::new();
    for n in 3..=6 {
        cases.push((n, 3));
    }
    cases.push((5, 5));
    let mut total = 0usize;
    let mut skipped = Vec::new();
    for (n, d) in cases {
        for q in [
            standard_cubillage(n, d).map_err(e)?,
            anti_standard_cubillage(n, d).map_err(e)?,
        ] {
            match fragments(&q).map_err(e)?.scan(DEFAULT_IDEAL_LIMIT) {
                Ok(scan) => {
                    ensure(scan.ok(), || format!("({n},{d}): {:?}", scan.violations))?;
                    ensure(scan.vertex_set_sizes == vec![at_most(n, d - 1)], || {
                        format!("({n},{d}): sizes {:?}", scan.vertex_set_sizes)
                    })?;
                    total += scan.membranes;
                }
                Err(Error::Limit(l)) => skipped.push(format!("({n},{d}) over {l} ideals")),
                Err(err) => return Err(format!("({n},{d}): {err}")),
            }
        }
    }
    ensure(skipped.is_empty(), || format!("skipped: {skipped:?}"))?;
    Ok(format!("{total} w-membranes"))
}

fn criterion_8() -> Outcome {
    let mut lines = Vec::new();
    for (n, r) in [(4, 1), (5, 1), (6, 3), (7, 3)] {
        let t = verify_flip_theorem_odd(n, r).map_err(e)?;
        ensure(t.ok(), || {
            format!("flip theorem ({n},{r}): {:?}", t.counterexamples.first())
        })?;
        ensure(t.triggered > 0, || {
            format!("flip theorem ({n},{r}) never triggered")
        })?;
        let l = verify_refined_lemma(n, r).map_err(e)?;
        ensure(l.ok(), || {
            format!("refined lemma ({n},{r}): {:?}", l.counterexamples.first())
        })?;
        lines.push(format!("({n},{r}): {} pairs", t.pairs));
    }
    Ok(lines.join(", "))
}

fn criterion_9() -> Outcome {
    let mut lines = Vec::new();
    for (n, r) in [(4, 2), (5, 2), (6, 2)] {
        let rep = verify_local_neighb_even(n, r).map_err(e)?;
        ensure(rep.ok(), || {
            format!("({n},{r}): {:?}", rep.counterexamples.first())
        })?;
        ensure(rep.triggered > 0 || n == 4, || {
            format!("({n},{r}) never triggered")
        })?;
        lines.push(format!("({n},{r}): {} triggered", rep.triggered));
    }
    Ok(lines.join(", "))
}

fn criterion_10() -> Outcome {
    let mut scanned = 0;
    for (n, d) in [(4, 4), (5, 4)] {
        for q in [
            standard_cubillage(n, d).map_err(e)?,
            anti_standard_cubillage(n, d).map_err(e)?,
        ] {
            let rep = property_p_scan(&q, DEFAULT_IDEAL_LIMIT).map_err(e)?;
            ensure(rep.ok(), || {
                format!("({n},{d}): combs {:?}, {:?}", rep.combs, rep.violations)
            })?;
            ensure(rep.expected_size as usize == at_most(n, d - 1), || {
                "size oracle".into()
            })?;
            scanned += rep.e_membranes;
        }
    }
    Ok(format!("{scanned} e-membranes"))
}

/// Brute force: the longest alternating run of `A − B` / `B − A` elements.
fn degree_oracle(a: Subset, b: Subset) -> usize {
    let mut last = None;
    let mut count = 0;
    for i in 1..=64 {
        let side = if a.contains(i) && !b.contains(i) {
            Some(0)
        } else if b.contains(i) && !a.contains(i) {
            Some(1)
        } else {
            None
        };
        if side.is_some() && side != last {
            count += 1;
            last = side;
        }
    }
    count
}

fn criterion_11() -> Outcome {
    let config = Config {
        cases: 512,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let pair =
        (1usize..=10).prop_flat_map(|n| (Just(n), 0..(1u64 << n), 0..(1u64 << n), 0usize..6));

    runner
        .run(&pair, |(n, a, b, r)| {
            let (a, b) = (Subset::from_bits(a), Subset::from_bits(b));
            let full = GroundSet::new(n).unwrap().full();
            prop_assert_eq!(interlacing_degree(a, b), degree_oracle(a, b));
            prop_assert_eq!(
                is_strongly_r_separated(a, b, r),
                is_strongly_r_separated(b, a, r)
            );
            prop_assert_eq!(
                is_weakly_r_separated(a, b, r).ok(),
                is_weakly_r_separated(b, a, r).ok()
            );
            prop_assert_eq!(
                is_strongly_r_separated(a, b, r),
                is_strongly_r_separated(full - a, full - b, r)
            );
            if r % 2 == 1 {
                prop_assert_eq!(
                    is_weakly_r_separated(a, b, r).ok(),
                    is_weakly_r_separated(full - a, full - b, r).ok()
                );
            }
            Ok(())
        })
        .map_err(|err| format!("separation properties: {err}"))?;

    let vertex = (2usize..=7).prop_flat_map(|n| (Just(n), 2..=n, 0..(1u64 << n)));
    runner
        .run(&vertex, |(n, d, x)| {
            let c = CyclicConfiguration::veronese(n, d).unwrap();
            let x = Subset::from_bits(x);
            prop_assert_eq!(is_zonotope_vertex(x, n, d), is_vertex_geometric(&c, x));
            Ok(())
        })
        .map_err(|err| format!("vertex oracle: {err}"))?;

    // flip involution on the witness system of random odd sites
    let site = (5usize..=7, prop::sample::select(vec![1usize, 3])).prop_flat_map(|(n, r)| {
        (
            Just(n),
            Just(r),
            proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), r + 2),
            0..(1u64 << n),
        )
    });
    runner
        .run(&site, |(n, r, support, x)| {
            let g = GroundSet::new(n).unwrap();
            let support = Subset::from_elems(support).unwrap();
            let x = Subset::from_bits(x) - support;
            let s = FlipSite::from_support(x, support, Parity::Odd).unwrap();
            prop_assert_eq!(s.r(), r);
            let mut members: Vec<Subset> = s.lift(&neighbors(&s).unwrap());
            members.push(s.xp());
            let w = SetSystem::new(g, members).unwrap();
            let up = apply_flip(&w, &s, Direction::Raise, WitnessMode::Full).unwrap();
            prop_assert_eq!(
                &apply_flip(&up, &s, Direction::Lower, WitnessMode::Full).unwrap(),
                &w
            );
            let sharp =
                SetSystem::new(g, s.lift(&neighbors_down(&s)).into_iter().chain([s.xp()])).unwrap();
            let up = apply_flip(&sharp, &s, Direction::Raise, WitnessMode::Sharp).unwrap();
            prop_assert!(up.contains(s.xq()) && !up.contains(s.xp()) && up.len() == sharp.len());
            Ok(())
        })
        .map_err(|err| format!("flip involution: {err}"))?;

    // lattice laws on membrane ideals, exhaustively
    for (n, d) in [(5, 3), (5, 4)] {
        let f = fragments(&standard_cubillage(n, d).map_err(e)?).map_err(e)?;
        let mut ideals: Vec<BTreeSet<usize>> = Vec::new();
        f.for_each_membrane(DEFAULT_IDEAL_LIMIT, |m| {
            ideals.push(m.ideal().into_iter().collect());
            Ok(std::ops::ControlFlow::Continue(()))
        })
        .map_err(e)?;
        for i in ideals.iter().step_by(7) {
            for j in &ideals {
                let meet: BTreeSet<usize> = i.intersection(j).copied().collect();
                let join: BTreeSet<usize> = i.union(j).copied().collect();
                ensure(
                    f.is_ideal(&meet).is_ok() && f.is_ideal(&join).is_ok(),
                    || format!("({n},{d}) lattice"),
                )?;
            }
        }
    }
    Ok("separation, vertex oracle, flip involution, lattice laws".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("strong bound", criterion_1),
        ("weak odd bound", criterion_2),
        ("non-purity of weak 3-separation on [6]", criterion_3),
        ("standard and anti-standard cubillages", criterion_4),
        ("acyclicity", criterion_5),
        ("bead threads", criterion_6),
        ("w-membranes", criterion_7),
        ("flip theorem and refined lemma", criterion_8),
        ("even local neighborhoods", criterion_9),
        ("property (P) on e-membranes", criterion_10),
        ("property suites", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
