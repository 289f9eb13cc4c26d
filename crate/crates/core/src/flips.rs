//! Flips of set systems: the sites `(X, P, Q)`, their neighbor sets, flip
//! application with post-checks, and exhaustive harnesses for the flip
//! theorems.
//!
//! A pair `{A, B}` is called bad when it is not weakly `r`-separated.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubillage::Cube;
use crate::error::{Error, Result};
use crate::ground::{
    interlacing_degree, interval_cortege, Cortege, GroundSet, Side as BrickSide, Subset,
};
use crate::separation::{is_bad, is_double_r_comb};
use crate::systems::{
    check_pairwise, PairwisePredicate, SetSystem, DEFAULT_EXHAUSTIVE_BOUND, MAX_EXHAUSTIVE_BOUND,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Parity {
    /// `q_0 < p_1 < q_1 < … < p_{r'} < q_{r'}`, `r' = (r+1)/2`.
    Odd,
    /// `p_1 < q_1 < … < p_{r'} < q_{r'}`, `r' = r/2 + 1`.
    Even,
}

impl Parity {
    pub fn of(r: usize) -> Parity {
        if r % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// `X` together with interleaved `P`, `Q` (disjoint from `X`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlipSite {
    pub x: Subset,
    pub p: Subset,
    pub q: Subset,
    pub parity: Parity,
}

impl fmt::Debug for FlipSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FlipSite(X={}, P={}, Q={}, {:?})",
            self.x, self.p, self.q, self.parity
        )
    }
}

impl fmt::Display for FlipSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FlipSite {
    pub fn new(x: Subset, p: Subset, q: Subset, parity: Parity) -> Result<Self> {
        let bad = |why: &str| Err(Error::Params(format!("X={x}, P={p}, Q={q}: {why}")));
        if !x.is_disjoint(p | q) || !p.is_disjoint(q) {
            return bad("X, P and Q must be pairwise disjoint");
        }
        if p.is_empty() {
            return bad("P must be non-empty");
        }
        let site = FlipSite::from_support(x, p | q, parity)?;
        if site.p != p || site.q != q {
            return bad("P and Q do not interleave as required");
        }
        Ok(site)
    }

    /// Splits the sorted support by position: for odd parity `Q` takes the
    /// 1st, 3rd, … elements, for even parity `P` does.
    pub fn from_support(x: Subset, support: Subset, parity: Parity) -> Result<Self> {
        let k = support.len();
        let ok = match parity {
            Parity::Odd => k >= 3 && k % 2 == 1,
            Parity::Even => k >= 4 && k % 2 == 0,
        };
        if !ok || !x.is_disjoint(support) {
            return Err(Error::Params(format!(
                "support {support} does not fit a {parity:?} site next to X={x}"
            )));
        }
        let (mut first, mut second) = (Subset::EMPTY, Subset::EMPTY);
        for (i, e) in support.elements().enumerate() {
            if i % 2 == 0 {
                first = first.with(e);
            } else {
                second = second.with(e);
            }
        }
        let (p, q) = match parity {
            Parity::Odd => (second, first),
            Parity::Even => (first, second),
        };
        Ok(FlipSite { x, p, q, parity })
    }

    /// The site a cube `(X | T)` carries: `t_C = XP`, `h_C = XQ`.
    pub fn from_cube(c: &Cube) -> Result<Self> {
        FlipSite::from_support(c.root, c.typ, Parity::of(c.typ.len()))
    }

    /// `r` with `|P ∪ Q| = r + 2`.
    pub fn r(&self) -> usize {
        (self.p | self.q).len() - 2
    }

    pub fn r_prime(&self) -> usize {
        self.p.len()
    }

    pub fn xp(&self) -> Subset {
        self.x | self.p
    }

    pub fn xq(&self) -> Subset {
        self.x | self.q
    }

    pub fn support(&self) -> Subset {
        self.p | self.q
    }

    /// `X ∪ S` for each `S` in `sets`.
    pub fn lift(&self, sets: &[Subset]) -> Vec<Subset> {
        sets.iter().map(|&s| self.x | s).collect()
    }
}

fn sorted(mut v: Vec<Subset>) -> Vec<Subset> {
    v.sort_unstable();
    v.dedup();
    v
}

/// `𝒩(P, Q)`: all `S ⊂ P ∪ Q` other than `P`, `Q` with
/// `r' ≤ |S| ≤ r' + 1`.
pub fn neighbors(site: &FlipSite) -> Result<Vec<Subset>> {
    if site.parity != Parity::Odd {
        return Err(Error::Parity {
            what: "neighbor set",
            expected: "odd",
            r: site.r(),
        });
    }
    let k = site.r_prime();
    Ok(sorted(
        site.support()
            .subsets()
            .filter(|s| (k..=k + 1).contains(&s.len()) && *s != site.p && *s != site.q)
            .collect(),
    ))
}

/// `N↑ = {Pq : q ∈ Q} ∪ {(P − p)q : p ∈ P, q ∈ Q}`.
pub fn neighbors_up(site: &FlipSite) -> Vec<Subset> {
    let mut out = Vec::new();
    for q in site.q.elements() {
        out.push(site.p.with(q));
        for p in site.p.elements() {
            out.push(site.p.without(p).with(q));
        }
    }
    sorted(out)
}

/// `N↓ = {Q − q : q ∈ Q} ∪ {(Q − q)p : p ∈ P, q ∈ Q}`.
pub fn neighbors_down(site: &FlipSite) -> Vec<Subset> {
    let mut out = Vec::new();
    for q in site.q.elements() {
        out.push(site.q.without(q));
        for p in site.p.elements() {
            out.push(site.q.without(q).with(p));
        }
    }
    sorted(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    /// `XP → XQ`.
    Raise,
    /// `XQ → XP`.
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WitnessMode {
    /// All of `𝒩(P, Q)` must be present (odd parity only).
    Full,
    /// Only `N↓` (raising) or `N↑` (lowering).
    Sharp,
}

/// Swaps `XP` and `XQ` in a weakly `r`-separated system once the
/// witnesses are present, then re-checks weak separation of the result.
pub fn apply_flip(
    w: &SetSystem,
    site: &FlipSite,
    dir: Direction,
    mode: WitnessMode,
) -> Result<SetSystem> {
    let r = site.r();
    let pred = PairwisePredicate::weak(r)?;
    w.ground().check(site.x | site.support())?;
    if let Some((a, b)) = check_pairwise(w, pred).violation {
        return Err(Error::FlipPrecondition(format!(
            "input is not weakly {r}-separated: {a}, {b}"
        )));
    }
    let (from, to) = match dir {
        Direction::Raise => (site.xp(), site.xq()),
        Direction::Lower => (site.xq(), site.xp()),
    };
    if !w.contains(from) {
        return Err(Error::FlipPrecondition(format!("{from} is not a member")));
    }
    if w.contains(to) {
        return Err(Error::FlipPrecondition(format!("{to} is already a member")));
    }
    let witnesses = match (mode, dir) {
        (WitnessMode::Full, _) => neighbors(site)?,
        (WitnessMode::Sharp, Direction::Raise) => neighbors_down(site),
        (WitnessMode::Sharp, Direction::Lower) => neighbors_up(site),
    };
    if let Some(missing) = site.lift(&witnesses).into_iter().find(|s| !w.contains(*s)) {
        return Err(Error::FlipPrecondition(format!(
            "witness {missing} is missing"
        )));
    }
    let mut out = w.clone();
    out.remove(from);
    out.insert(to)?;
    if let Some((a, b)) = check_pairwise(&out, pred).violation {
        return Err(Error::Falsified(format!(
            "flip at {site} produced the bad pair {a}, {b} ({mode:?} witnesses)"
        )));
    }
    Ok(out)
}

/// Every site over `[n]` with `|P ∪ Q| = r + 2`, in canonical order: by
/// support, then by `X`.
pub fn all_sites(n: usize, r: usize) -> Result<Vec<FlipSite>> {
    let g = GroundSet::new(n)?;
    if r + 2 > n {
        return Err(Error::Params(format!("need r + 2 <= n, got n={n}, r={r}")));
    }
    let parity = Parity::of(r);
    let mut out = Vec::new();
    for support in g.k_subsets(r + 2) {
        let mut xs = g.complement(support).subsets().collect::<Vec<_>>();
        xs.sort_unstable();
        for x in xs {
            out.push(FlipSite::from_support(x, support, parity)?);
        }
    }
    Ok(out)
}

/// `k/m`: run the sites whose canonical index is `k` modulo `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shard {
    pub index: usize,
    pub count: usize,
}

impl Shard {
    pub const ALL: Shard = Shard { index: 0, count: 1 };

    pub fn new(index: usize, count: usize) -> Result<Self> {
        if count == 0 || index >= count {
            return Err(Error::Params(format!("bad shard {index}/{count}")));
        }
        Ok(Shard { index, count })
    }

    fn take<T: Clone>(&self, items: &[T]) -> Vec<T> {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| i % self.count == self.index)
            .map(|(_, t)| t.clone())
            .collect()
    }
}

impl std::str::FromStr for Shard {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(s.to_string()))?;
        let a = a.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        let b = b.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        Shard::new(a, b)
    }
}

/// A violated claim, with the cortege of the offending pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub site: FlipSite,
    pub y: Subset,
    pub clause: String,
    pub cortege: Cortege,
}

/// Outcome of a harness run; `counterexamples` is empty when every claim
/// held.
#[derive(Clone, Debug, Serialize)]
pub struct HarnessReport {
    pub harness: &'static str,
    pub n: usize,
    pub r: usize,
    pub parity: Parity,
    pub shard: Shard,
    pub sites: usize,
    pub pairs: usize,
    /// Instances where the hypothesis of the checked claim held.
    pub triggered: usize,
    /// Named side counts that are recorded without being judged.
    pub recorded: Vec<(String, usize)>,
    pub counterexamples: Vec<Counterexample>,
}

impl HarnessReport {
    pub fn ok(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_EXHAUSTIVE_BOUND {
        return Err(Error::Bound {
            n,
            bound: MAX_EXHAUSTIVE_BOUND,
        });
    }
    Ok(())
}

#[derive(Default)]
struct Tally {
    pairs: usize,
    triggered: usize,
    recorded: Vec<usize>,
    found: Vec<Counterexample>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.pairs += other.pairs;
        self.triggered += other.triggered;
        if self.recorded.len() < other.recorded.len() {
            self.recorded.resize(other.recorded.len(), 0);
        }
        for (a, b) in self.recorded.iter_mut().zip(other.recorded) {
            *a += b;
        }
        self.found.extend(other.found);
        self
    }

    fn record(&mut self, slot: usize) {
        if self.recorded.len() <= slot {
            self.recorded.resize(slot + 1, 0);
        }
        self.recorded[slot] += 1;
    }

    fn fail(&mut self, site: &FlipSite, y: Subset, other: Subset, clause: impl Into<String>) {
        self.found.push(Counterexample {
            site: *site,
            y,
            clause: clause.into(),
            cortege: interval_cortege(y, other),
        });
    }
}

fn run_harness<F>(
    harness: &'static str,
    n: usize,
    r: usize,
    shard: Shard,
    labels: &[&str],
    per_site: F,
) -> Result<HarnessReport>
where
    F: Fn(&FlipSite, &[Subset], &mut Tally) + Sync,
{
    check_n(n)?;
    let sites = shard.take(&all_sites(n, r)?);
    let ys = GroundSet::new(n)?.subsets();
    let tally = sites
        .par_iter()
        .map(|site| {
            let mut t = Tally::default();
            per_site(site, &ys, &mut t);
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::default(), Tally::merge);
    let mut recorded: Vec<(String, usize)> = labels.iter().map(|l| (l.to_string(), 0)).collect();
    for (slot, v) in tally.recorded.into_iter().enumerate() {
        recorded[slot].1 = v;
    }
    Ok(HarnessReport {
        harness,
        n,
        r,
        parity: Parity::of(r),
        shard,
        sites: sites.len(),
        pairs: tally.pairs,
        triggered: tally.triggered,
        recorded,
        counterexamples: tally.found,
    })
}

/// Both clauses of the flip theorem for odd `r`: a bad pair `{Y, XP}` has a
/// bad partner `XS` with `S ∈ N↑`, and dually for `XQ` with `N↓`. All `Y`
/// are tried, including those meeting `X`. Also checks that dropping
/// `X ∩ Y` from both sides preserves every verdict, and that the second
/// clause is the first one under complementation.
pub fn verify_flip_theorem_odd(n: usize, r: usize) -> Result<HarnessReport> {
    verify_flip_theorem_odd_sharded(n, r, Shard::ALL)
}

pub fn verify_flip_theorem_odd_sharded(n: usize, r: usize, shard: Shard) -> Result<HarnessReport> {
    if r % 2 == 0 {
        return Err(Error::Parity {
            what: "flip theorem",
            expected: "odd",
            r,
        });
    }
    let full = GroundSet::new(n)?.full();
    let labels = ["clause (i) triggered", "clause (ii) triggered", "Y meets X"];
    run_harness("flip-theorem", n, r, shard, &labels, move |site, ys, t| {
        let up = site.lift(&neighbors_up(site));
        let down = site.lift(&neighbors_down(site));
        let (xp, xq) = (site.xp(), site.xq());
        let dual = FlipSite {
            x: full - site.x - site.support(),
            ..*site
        };
        let dual_up = dual.lift(&neighbors_up(&dual));
        for &y in ys {
            if y == xp || y == xq {
                continue;
            }
            t.pairs += 1;
            if !y.is_disjoint(site.x) {
                t.record(2);
            }
            let clause_i = is_bad(y, xp, r);
            if clause_i {
                t.triggered += 1;
                t.record(0);
                if !up.iter().any(|&s| is_bad(y, s, r)) {
                    t.fail(site, y, xp, "(i): no S in N-up with {Y, XS} bad");
                }
            }
            let clause_ii = is_bad(y, xq, r);
            if clause_ii {
                t.triggered += 1;
                t.record(1);
                if !down.iter().any(|&s| is_bad(y, s, r)) {
                    t.fail(site, y, xq, "(ii): no S in N-down with {Y, XS} bad");
                }
            }
            // (ii) at (X, Y) is (i) at the complemented instance
            let yc = full - y;
            let dual_ii = is_bad(yc, dual.xp(), r);
            let dual_ii_witness = dual_up.iter().any(|&s| is_bad(yc, s, r));
            let direct_ii_witness = down.iter().any(|&s| is_bad(y, s, r));
            if dual_ii != clause_ii || dual_ii_witness != direct_ii_witness {
                t.fail(site, y, xq, "complement duality");
            }
            // verdicts only depend on X − Y and Y − X
            let common = y & site.x;
            if !common.is_empty() {
                let y0 = y - common;
                let norm = FlipSite {
                    x: site.x - common,
                    ..*site
                };
                let checks = [(xp, norm.xp()), (xq, norm.xq())];
                let same = checks
                    .iter()
                    .all(|&(a, b)| is_bad(y, a, r) == is_bad(y0, b, r))
                    && up
                        .iter()
                        .zip(norm.lift(&neighbors_up(site)))
                        .all(|(&a, b)| is_bad(y, a, r) == is_bad(y0, b, r));
                if !same {
                    t.fail(site, y, xp, "normalization Y ∩ X = ∅ changes a verdict");
                }
            }
        }
    })
}

/// `p ∈ P` is refined when `{p}` is a single-element `XP`-brick of the
/// cortege of `(Y, XP)`; `q ∈ Q` when `{q}` is a single-element `Y`-brick.
fn refined(cortege: &Cortege, site: &FlipSite) -> (bool, bool) {
    let single = |e: usize, side: BrickSide| {
        cortege
            .brick_of(e)
            .is_some_and(|b| b.is_singleton() && b.side == side)
    };
    let all_p = site.p.elements().all(|p| single(p, BrickSide::B));
    let all_q = site.q.elements().all(|q| single(q, BrickSide::A));
    (all_p, all_q)
}

/// Whenever `{Y, XP}` is bad but every `{Y, XS}`, `S ∈ N↑`, is good, all of
/// `P` or all of `Q` must be refined. For odd `r` the flip theorem rules
/// the hypothesis out, so `triggered` stays 0; for even `r` the same check
/// runs on even sites.
pub fn verify_refined_lemma(n: usize, r: usize) -> Result<HarnessReport> {
    if r == 0 {
        return Err(Error::Parity {
            what: "refined lemma",
            expected: "positive",
            r,
        });
    }
    run_harness(
        "refined-lemma",
        n,
        r,
        Shard::ALL,
        &[],
        move |site, ys, t| {
            let up = site.lift(&neighbors_up(site));
            let xp = site.xp();
            for &y in ys {
                if y == xp || y == site.xq() {
                    continue;
                }
                t.pairs += 1;
                if !is_bad(y, xp, r) || up.iter().any(|&s| is_bad(y, s, r)) {
                    continue;
                }
                t.triggered += 1;
                let cortege = interval_cortege(y, xp);
                let (all_p, all_q) = refined(&cortege, site);
                if !all_p && !all_q {
                    t.fail(site, y, xp, "neither all of P nor all of Q refined");
                }
            }
        },
    )
}

/// The local neighborhood theorem for even `r`, with the uniqueness of the
/// double comb among the upper (lower) neighbor pools and the converse
/// construction. Pairs of interlacing degree above `r + 2` are counted
/// but not judged.
pub fn verify_local_neighb_even(n: usize, r: usize) -> Result<HarnessReport> {
    if r % 2 == 1 || r == 0 {
        return Err(Error::Parity {
            what: "local neighborhood theorem",
            expected: "even positive",
            r,
        });
    }
    let labels = [
        "assertion 1 triggered",
        "assertion 2 triggered",
        "assertion 1 pattern, degree > r+2",
        "assertion 2 pattern, degree > r+2",
        "converse instances",
    ];
    let full = GroundSet::new(n)?.full();
    run_harness(
        "local-neighb-even",
        n,
        r,
        Shard::ALL,
        &labels,
        move |site, ys, t| {
            let k = site.r_prime();
            let up = site.lift(&neighbors_up(site));
            let down = site.lift(&neighbors_down(site));
            let (xp, xq) = (site.xp(), site.xq());
            let p: Vec<usize> = site.p.elements().collect();
            let q: Vec<usize> = site.q.elements().collect();
            let p1 = p[0];
            let slot = |e: usize| p.iter().rposition(|&pi| pi < e);
            let upper_pool: Vec<Subset> = site
                .support()
                .subsets()
                .filter(|s| (k..=k + 1).contains(&s.len()) && *s != site.p && *s != site.q)
                .collect();
            let lower_pool: Vec<Subset> = site
                .support()
                .subsets()
                .filter(|s| (k - 1..=k).contains(&s.len()) && *s != site.p && *s != site.q)
                .collect();
            let combs = |y: Subset, pool: &[Subset]| -> Vec<Subset> {
                pool.iter()
                    .copied()
                    .filter(|&s| is_double_r_comb(y, site.x | s, r))
                    .collect()
            };
            for &y in ys {
                if y == xp || y == xq {
                    continue;
                }
                t.pairs += 1;
                // assertion 1
                if is_bad(y, xp, r) && !up.iter().any(|&s| is_bad(y, s, r)) {
                    if interlacing_degree(y, xp) == r + 2 {
                        t.triggered += 1;
                        t.record(0);
                        let extra = y - xq;
                        let a = extra.min();
                        let shape = xq.is_subset_of(y)
                            && extra.len() == 1
                            && a.is_some_and(|a| !xp.contains(a) && a > p1);
                        if !shape {
                            t.fail(
                                site,
                                y,
                                xp,
                                "assertion 1: Y is not XQ + a with a outside XPQ, a > p_1",
                            );
                        } else {
                            let i = slot(a.unwrap()).expect("a > p_1");
                            let found = combs(y, &upper_pool);
                            if found != vec![site.p.with(q[i])] {
                                t.fail(
                                    site,
                                    y,
                                    xp,
                                    format!(
                                        "uniqueness: combs with {found:?}, expected P + q_{}",
                                        i + 1
                                    ),
                                );
                            }
                        }
                    } else {
                        t.record(2);
                    }
                }
                // assertion 2
                if is_bad(y, xq, r) && !down.iter().any(|&s| is_bad(y, s, r)) {
                    if interlacing_degree(y, xq) == r + 2 {
                        t.triggered += 1;
                        t.record(1);
                        let gone = xp - y;
                        let b = gone.min();
                        let shape = y.is_subset_of(xp)
                            && gone.len() == 1
                            && b.is_some_and(|b| site.x.contains(b) && b > p1);
                        if !shape {
                            t.fail(
                                site,
                                y,
                                xq,
                                "assertion 2: Y is not XP - b with b in X, b > p_1",
                            );
                        } else {
                            let i = slot(b.unwrap()).expect("b > p_1");
                            let found = combs(y, &lower_pool);
                            if found != vec![site.q.without(q[i])] {
                                t.fail(
                                    site,
                                    y,
                                    xq,
                                    format!(
                                        "uniqueness: combs with {found:?}, expected Q - q_{}",
                                        i + 1
                                    ),
                                );
                            }
                        }
                    } else {
                        t.record(3);
                    }
                }
            }
            // converse: the described Y really are bad with XP (XQ) and good
            // with every member of N↑ (N↓)
            for a in (full - xp - site.q).elements().filter(|&a| a > p1) {
                t.record(4);
                let y = xq.with(a);
                if !is_bad(y, xp, r) || up.iter().any(|&s| is_bad(y, s, r)) {
                    t.fail(site, y, xp, "converse of assertion 1");
                }
            }
            for b in site.x.elements().filter(|&b| b > p1) {
                t.record(4);
                let y = xp.without(b);
                if !is_bad(y, xq, r) || down.iter().any(|&s| is_bad(y, s, r)) {
                    t.fail(site, y, xq, "converse of assertion 2");
                }
            }
        },
    )
}

/// Default `n` for the harnesses when none is given.
pub const DEFAULT_HARNESS_N: usize = DEFAULT_EXHAUSTIVE_BOUND;
