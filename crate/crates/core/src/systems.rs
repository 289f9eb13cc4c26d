//! Set systems and exhaustive searches over the compatibility graph on
//! `2^[n]`: pairwise checks, greedy extension to inclusion-maximal systems,
//! exact maximum cliques and enumeration of all maximal cliques.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;
use crate::ground::{GroundSet, Subset};
use crate::separation::{is_double_r_comb, is_strongly_r_separated, weak_even, weak_odd};

/// Default largest `n` for searches over `2^[n]`.
pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 7;
/// Largest `n` accepted when the caller opts in.
pub const MAX_EXHAUSTIVE_BOUND: usize = 8;

/// A duplicate-free collection of subsets of `[n]`, kept in canonical order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetSystem {
    ground: GroundSet,
    members: Vec<Subset>,
}

impl SetSystem {
    pub fn new<I: IntoIterator<Item = Subset>>(ground: GroundSet, members: I) -> Result<Self> {
        let mut members: Vec<Subset> = members.into_iter().collect();
        for &m in &members {
            ground.check(m)?;
        }
        members.sort_unstable();
        members.dedup();
        Ok(SetSystem { ground, members })
    }

    pub fn empty(ground: GroundSet) -> Self {
        SetSystem {
            ground,
            members: Vec::new(),
        }
    }

    /// The whole power set `2^[n]`.
    pub fn power_set(ground: GroundSet) -> Self {
        SetSystem {
            ground,
            members: ground.subsets(),
        }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.n()
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, x: Subset) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn insert(&mut self, x: Subset) -> Result<bool> {
        self.ground.check(x)?;
        match self.members.binary_search(&x) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.members.insert(pos, x);
                Ok(true)
            }
        }
    }

    pub fn remove(&mut self, x: Subset) -> bool {
        match self.members.binary_search(&x) {
            Ok(pos) => {
                self.members.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn union(&self, other: &SetSystem) -> SetSystem {
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        members.sort_unstable();
        members.dedup();
        SetSystem {
            ground: self.ground,
            members,
        }
    }

    /// Members of `self` that are not in `other`.
    pub fn difference(&self, other: &SetSystem) -> SetSystem {
        let members = self.iter().filter(|x| !other.contains(*x)).collect();
        SetSystem {
            ground: self.ground,
            members,
        }
    }

    pub fn is_subset_of(&self, other: &SetSystem) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    /// `{[n] − X : X ∈ self}`.
    pub fn complements(&self) -> SetSystem {
        let g = self.ground;
        let mut members: Vec<Subset> = self.iter().map(|x| g.complement(x)).collect();
        members.sort_unstable();
        SetSystem { ground: g, members }
    }

    pub fn export(&self, predicate: Option<PairwisePredicate>) -> SystemExport {
        SystemExport {
            n: self.n(),
            predicate,
            members: self.members.clone(),
        }
    }
}

impl fmt::Debug for SetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetSystem(n={}, {:?})", self.n(), self.members)
    }
}

impl fmt::Display for SetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|m| m.compact()).collect();
        write!(f, "{{{}}}", parts.join(" "))
    }
}

/// JSON form of a set system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemExport {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub predicate: Option<PairwisePredicate>,
    pub members: Vec<Subset>,
}

impl SystemExport {
    pub fn into_system(self) -> Result<SetSystem> {
        SetSystem::new(GroundSet::new(self.n)?, self.members)
    }
}

/// The pairwise relation a set system must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "r", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PairwisePredicate {
    Strong(usize),
    WeakOdd(usize),
    WeakEven(usize),
    WeakEvenNoComb(usize),
}

impl PairwisePredicate {
    /// Validates the parity of `r` against the kind.
    pub fn validated(self) -> Result<Self> {
        match self {
            PairwisePredicate::Strong(_) => Ok(self),
            PairwisePredicate::WeakOdd(r) if r % 2 == 1 => Ok(self),
            PairwisePredicate::WeakOdd(r) => Err(Error::Parity {
                what: "WEAK_ODD",
                expected: "odd",
                r,
            }),
            PairwisePredicate::WeakEven(r) | PairwisePredicate::WeakEvenNoComb(r)
                if r % 2 == 0 && r > 0 =>
            {
                Ok(self)
            }
            PairwisePredicate::WeakEven(r) | PairwisePredicate::WeakEvenNoComb(r) => {
                Err(Error::Parity {
                    what: "WEAK_EVEN",
                    expected: "even positive",
                    r,
                })
            }
        }
    }

    /// Weak separation of the right parity for `r`.
    pub fn weak(r: usize) -> Result<Self> {
        if r % 2 == 1 {
            Ok(PairwisePredicate::WeakOdd(r))
        } else {
            PairwisePredicate::WeakEven(r).validated()
        }
    }

    pub fn r(&self) -> usize {
        match *self {
            PairwisePredicate::Strong(r)
            | PairwisePredicate::WeakOdd(r)
            | PairwisePredicate::WeakEven(r)
            | PairwisePredicate::WeakEvenNoComb(r) => r,
        }
    }

    #[inline]
    pub fn holds(&self, a: Subset, b: Subset) -> bool {
        match *self {
            PairwisePredicate::Strong(r) => is_strongly_r_separated(a, b, r),
            PairwisePredicate::WeakOdd(r) => weak_odd(a, b, r),
            PairwisePredicate::WeakEven(r) => weak_even(a, b, r),
            PairwisePredicate::WeakEvenNoComb(r) => {
                weak_even(a, b, r) && !is_double_r_comb(a, b, r)
            }
        }
    }
}

impl fmt::Display for PairwisePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairwisePredicate::Strong(r) => write!(f, "STRONG({r})"),
            PairwisePredicate::WeakOdd(r) => write!(f, "WEAK_ODD({r})"),
            PairwisePredicate::WeakEven(r) => write!(f, "WEAK_EVEN({r})"),
            PairwisePredicate::WeakEvenNoComb(r) => write!(f, "WEAK_EVEN_NO_COMB({r})"),
        }
    }
}

/// Outcome of [`check_pairwise`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairwiseCheck {
    pub ok: bool,
    /// Lexicographically first violating pair in canonical member order.
    pub violation: Option<(Subset, Subset)>,
}

pub fn check_pairwise(w: &SetSystem, p: PairwisePredicate) -> PairwiseCheck {
    let m = w.members();
    for (i, &a) in m.iter().enumerate() {
        for &b in &m[i + 1..] {
            if !p.holds(a, b) {
                return PairwiseCheck {
                    ok: false,
                    violation: Some((a, b)),
                };
            }
        }
    }
    PairwiseCheck {
        ok: true,
        violation: None,
    }
}

/// Greedily adds every compatible subset of `[n]`, scanned in canonical
/// order. One pass suffices: a skipped candidate conflicts with a member
/// that is never removed.
pub fn extend_to_maximal(w: &SetSystem, p: PairwisePredicate) -> Result<SetSystem> {
    let p = p.validated()?;
    if let Some((a, b)) = check_pairwise(w, p).violation {
        return Err(Error::Violation {
            predicate: p.to_string(),
            a,
            b,
        });
    }
    let mut out = w.clone();
    for x in w.ground().subsets() {
        if !out.contains(x) && out.iter().all(|y| p.holds(x, y)) {
            out.insert(x)?;
        }
    }
    Ok(out)
}

/// True iff no subset outside `w` is compatible with all of `w`.
pub fn is_maximal(w: &SetSystem, p: PairwisePredicate) -> bool {
    w.ground()
        .subsets()
        .into_iter()
        .filter(|x| !w.contains(*x))
        .all(|x| w.iter().any(|y| !p.holds(x, y)))
}

/// `C(n, ≤ r+1) = Σ_{j=0}^{r+1} C(n, j)`; saturates at `2^n` once `r + 1 ≥ n`.
pub fn s_formula(n: usize, r: usize) -> u128 {
    (0..=(r + 1).min(n)).map(|j| binomial(n, j)).sum()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `V(Z(6,4)) ∪ {24, 35, 1346}`: an inclusion-maximal weakly 3-separated
/// system on `[6]` with 55 members, two short of the maximum size 57.
pub fn nonpurity_witness() -> SetSystem {
    let mut a = geometry::boundary_vertices(6, 4).expect("Z(6,4) is in range");
    for extra in [
        Subset::of(&[2, 4]),
        Subset::of(&[3, 5]),
        Subset::of(&[1, 3, 4, 6]),
    ] {
        a.insert(extra).expect("inside [6]");
    }
    a
}

// ---------------------------------------------------------------------------
// Compatibility graph and clique search
// ---------------------------------------------------------------------------

const WORDS: usize = (1 << MAX_EXHAUSTIVE_BOUND) / 64;

/// Vertex bitset over at most `2^8 = 256` vertices.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
struct VSet([u64; WORDS]);

impl VSet {
    fn full(m: usize) -> Self {
        let mut s = VSet::default();
        for v in 0..m {
            s.insert(v);
        }
        s
    }
    #[inline]
    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }
    #[inline]
    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1 << (v % 64));
    }
    #[inline]
    fn and(&self, o: &VSet) -> VSet {
        let mut r = *self;
        for i in 0..WORDS {
            r.0[i] &= o.0[i];
        }
        r
    }
    #[inline]
    fn and_not(&self, o: &VSet) -> VSet {
        let mut r = *self;
        for i in 0..WORDS {
            r.0[i] &= !o.0[i];
        }
        r
    }
    #[inline]
    fn or(&self, o: &VSet) -> VSet {
        let mut r = *self;
        for i in 0..WORDS {
            r.0[i] |= o.0[i];
        }
        r
    }
    #[inline]
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    #[inline]
    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    #[inline]
    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + b)
            })
        })
    }
}

/// The graph on `2^[n]` (canonical vertex order) whose edges are the
/// compatible pairs.
pub struct CompatibilityGraph {
    ground: GroundSet,
    predicate: PairwisePredicate,
    vertices: Vec<Subset>,
    adj: Vec<VSet>,
}

impl CompatibilityGraph {
    pub fn new(n: usize, p: PairwisePredicate, bound: usize) -> Result<Self> {
        let p = p.validated()?;
        check_bound(n, bound)?;
        let ground = GroundSet::new(n)?;
        let vertices = ground.subsets();
        let m = vertices.len();
        let mut adj = vec![VSet::default(); m];
        for i in 0..m {
            for j in i + 1..m {
                if p.holds(vertices[i], vertices[j]) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        Ok(CompatibilityGraph {
            ground,
            predicate: p,
            vertices,
            adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VSet::len).sum::<usize>() / 2
    }

    /// Vertices compatible with every other vertex; they lie in every
    /// maximal clique.
    pub fn universal(&self) -> Vec<Subset> {
        let m = self.vertex_count();
        (0..m)
            .filter(|&v| self.adj[v].len() == m - 1)
            .map(|v| self.vertices[v])
            .collect()
    }

    fn universal_set(&self) -> VSet {
        let m = self.vertex_count();
        let mut u = VSet::default();
        for v in 0..m {
            if self.adj[v].len() == m - 1 {
                u.insert(v);
            }
        }
        u
    }

    fn system(&self, vs: impl Iterator<Item = usize>) -> SetSystem {
        let mut members: Vec<Subset> = vs.map(|v| self.vertices[v]).collect();
        members.sort_unstable();
        SetSystem {
            ground: self.ground,
            members,
        }
    }

    /// Exact maximum clique by branch and bound with greedy colouring bounds.
    pub fn max_clique(&self) -> SetSystem {
        let m = self.vertex_count();
        let universal = self.universal_set();
        let rest = VSet::full(m).and_not(&universal);

        // Renumber the non-universal vertices by degree (descending), ties
        // by canonical order, so that "first set bit" follows that order.
        let mut order: Vec<usize> = rest.iter().collect();
        order.sort_by(|&a, &b| {
            let (da, db) = (self.adj[a].and(&rest).len(), self.adj[b].and(&rest).len());
            db.cmp(&da).then(a.cmp(&b))
        });
        let k = order.len();
        let mut local_adj = vec![VSet::default(); k];
        let mut pos = vec![usize::MAX; m];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        for (i, &v) in order.iter().enumerate() {
            for u in self.adj[v].and(&rest).iter() {
                local_adj[i].insert(pos[u]);
            }
        }

        let mut best: Vec<usize> = Vec::new();
        let mut clique: Vec<usize> = Vec::new();
        expand(&local_adj, &mut clique, VSet::full(k), &mut best);

        let chosen = best.into_iter().map(|i| order[i]).chain(universal.iter());
        self.system(chosen)
    }

    /// Calls `visit` on every inclusion-maximal clique (Bron–Kerbosch with
    /// pivoting, vertices in canonical order). Stops when `visit` breaks.
    pub fn for_each_maximal<F>(&self, mut visit: F)
    where
        F: FnMut(SetSystem) -> ControlFlow<()>,
    {
        let m = self.vertex_count();
        let universal = self.universal_set();
        let rest = VSet::full(m).and_not(&universal);
        let adj: Vec<VSet> = self.adj.iter().map(|a| a.and(&rest)).collect();
        let mut r = Vec::new();
        let _ = bron_kerbosch(
            &adj,
            &mut r,
            rest,
            VSet::default(),
            &mut |clique: &[usize]| {
                visit(self.system(clique.iter().copied().chain(universal.iter())))
            },
        );
    }

    /// Graphviz rendering; node ids are canonical vertex indices.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph compat {{");
        let _ = writeln!(
            out,
            "  label=\"{} on 2^[{}]\";",
            self.predicate,
            self.ground.n()
        );
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  {i} [label=\"{}\"];", v.compact());
        }
        for i in 0..self.vertex_count() {
            for j in self.adj[i].iter().filter(|&j| j > i) {
                let _ = writeln!(out, "  {i} -- {j};");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn check_bound(n: usize, bound: usize) -> Result<()> {
    let bound = bound.min(MAX_EXHAUSTIVE_BOUND);
    if n > bound {
        return Err(Error::Bound { n, bound });
    }
    Ok(())
}

fn color_sort(adj: &[VSet], cand: VSet) -> (Vec<usize>, Vec<usize>) {
    let mut order = Vec::with_capacity(cand.len());
    let mut colors = Vec::with_capacity(cand.len());
    let mut uncolored = cand;
    let mut color = 0;
    while !uncolored.is_empty() {
        color += 1;
        let mut q = uncolored;
        while let Some(v) = q.first() {
            q.remove(v);
            q = q.and_not(&adj[v]);
            uncolored.remove(v);
            order.push(v);
            colors.push(color);
        }
    }
    (order, colors)
}

fn expand(adj: &[VSet], clique: &mut Vec<usize>, mut cand: VSet, best: &mut Vec<usize>) {
    if cand.is_empty() {
        if clique.len() > best.len() {
            *best = clique.clone();
        }
        return;
    }
    let (order, colors) = color_sort(adj, cand);
    for i in (0..order.len()).rev() {
        if clique.len() + colors[i] <= best.len() {
            return;
        }
        let v = order[i];
        clique.push(v);
        expand(adj, clique, cand.and(&adj[v]), best);
        clique.pop();
        cand.remove(v);
    }
}

fn bron_kerbosch<F>(
    adj: &[VSet],
    r: &mut Vec<usize>,
    mut p: VSet,
    mut x: VSet,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if p.is_empty() {
        if x.is_empty() {
            return visit(r);
        }
        return ControlFlow::Continue(());
    }
    let pivot = p
        .or(&x)
        .iter()
        .max_by(|&a, &b| {
            p.and(&adj[a])
                .len()
                .cmp(&p.and(&adj[b]).len())
                .then(b.cmp(&a))
        })
        .expect("p is non-empty");
    let branch: Vec<usize> = p.and_not(&adj[pivot]).iter().collect();
    for v in branch {
        r.push(v);
        let flow = bron_kerbosch(adj, r, p.and(&adj[v]), x.and(&adj[v]), visit);
        r.pop();
        flow?;
        p.remove(v);
        x.insert(v);
    }
    ControlFlow::Continue(())
}

/// Result of [`max_size`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxClique {
    pub size: usize,
    pub witness: SetSystem,
}

/// Exact maximum size of a `p`-compatible system in `2^[n]`, with a witness.
pub fn max_size(n: usize, p: PairwisePredicate) -> Result<MaxClique> {
    max_size_with_bound(n, p, DEFAULT_EXHAUSTIVE_BOUND)
}

pub fn max_size_with_bound(n: usize, p: PairwisePredicate, bound: usize) -> Result<MaxClique> {
    let g = CompatibilityGraph::new(n, p, bound)?;
    let witness = g.max_clique();
    Ok(MaxClique {
        size: witness.len(),
        witness,
    })
}

/// At most `limit` inclusion-maximal systems, in enumeration order.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub systems: Vec<SetSystem>,
    /// True if enumeration stopped at the limit.
    pub truncated: bool,
}

pub fn enumerate_maximal(n: usize, p: PairwisePredicate, limit: usize) -> Result<Enumeration> {
    let g = CompatibilityGraph::new(n, p, DEFAULT_EXHAUSTIVE_BOUND)?;
    let mut systems = Vec::new();
    let mut truncated = false;
    g.for_each_maximal(|s| {
        if systems.len() == limit {
            truncated = true;
            return ControlFlow::Break(());
        }
        systems.push(s);
        ControlFlow::Continue(())
    });
    Ok(Enumeration { systems, truncated })
}

/// Histogram of maximal-clique sizes; the system class is pure iff it has
/// a single key.
pub fn maximal_size_histogram(n: usize, p: PairwisePredicate) -> Result<BTreeMap<usize, u64>> {
    let g = CompatibilityGraph::new(n, p, DEFAULT_EXHAUSTIVE_BOUND)?;
    let mut hist = BTreeMap::new();
    g.for_each_maximal(|s| {
        *hist.entry(s.len()).or_insert(0) += 1;
        ControlFlow::Continue(())
    });
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(e: &[usize]) -> Subset {
        Subset::of(e)
    }

    fn sys(n: usize, ms: &[&[usize]]) -> SetSystem {
        SetSystem::new(GroundSet::new(n).unwrap(), ms.iter().map(|m| s(m))).unwrap()
    }

    /// Maximum clique by trying every subset of the vertex set (tiny n only).
    fn brute_force_max(n: usize, p: PairwisePredicate) -> usize {
        let all = GroundSet::new(n).unwrap().subsets();
        let m = all.len();
        assert!(m <= 16);
        let mut best = 0;
        for mask in 0u32..(1 << m) {
            let chosen: Vec<Subset> = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| all[i])
                .collect();
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(i, &a)| chosen[i + 1..].iter().all(|&b| p.holds(a, b)));
            if ok {
                best = best.max(chosen.len());
            }
        }
        best
    }

    #[test]
    fn set_system_is_canonical() {
        let w = sys(3, &[&[1, 2], &[], &[3], &[1, 2]]);
        assert_eq!(w.members(), &[Subset::EMPTY, s(&[3]), s(&[1, 2])]);
        assert!(SetSystem::new(GroundSet::new(2).unwrap(), [s(&[3])]).is_err());
        let json = serde_json::to_string(&w.export(Some(PairwisePredicate::WeakOdd(1)))).unwrap();
        assert_eq!(
            json,
            r#"{"n":3,"predicate":{"kind":"WEAK_ODD","r":1},"members":[[],[3],[1,2]]}"#
        );
        let back: SystemExport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_system().unwrap(), w);
    }

    #[test]
    fn pairwise_examples() {
        let chain = sys(4, &[&[], &[1], &[1, 2], &[1, 2, 3], &[1, 2, 3, 4]]);
        for p in [
            PairwisePredicate::Strong(0),
            PairwisePredicate::WeakOdd(1),
            PairwisePredicate::WeakEven(2),
        ] {
            assert!(check_pairwise(&chain, p).ok);
        }
        let w = sys(7, &[&[1, 2, 5, 6, 7], &[1, 3, 4, 5]]);
        let c = check_pairwise(&w, PairwisePredicate::WeakOdd(1));
        assert!(!c.ok);
        assert_eq!(c.violation, Some((s(&[1, 3, 4, 5]), s(&[1, 2, 5, 6, 7]))));
        assert!(check_pairwise(&nonpurity_witness(), PairwisePredicate::WeakOdd(3)).ok);
    }

    #[test]
    fn parity_validation() {
        assert!(PairwisePredicate::WeakOdd(2).validated().is_err());
        assert!(PairwisePredicate::WeakEven(3).validated().is_err());
        assert!(PairwisePredicate::WeakEvenNoComb(0).validated().is_err());
        assert_eq!(
            PairwisePredicate::weak(3).unwrap(),
            PairwisePredicate::WeakOdd(3)
        );
        assert_eq!(
            PairwisePredicate::weak(2).unwrap(),
            PairwisePredicate::WeakEven(2)
        );
    }

    #[test]
    fn extension_examples() {
        let a = nonpurity_witness();
        let ext = extend_to_maximal(&a, PairwisePredicate::WeakOdd(3)).unwrap();
        assert_eq!(ext.len(), 55);
        assert_eq!(ext, a);

        let e = extend_to_maximal(
            &SetSystem::empty(GroundSet::new(2).unwrap()),
            PairwisePredicate::Strong(0),
        )
        .unwrap();
        assert_eq!(e, sys(2, &[&[], &[1], &[1, 2]]));
        let again = extend_to_maximal(&e, PairwisePredicate::Strong(0)).unwrap();
        assert_eq!(again, e);

        let bad = sys(7, &[&[1, 2, 5, 6, 7], &[1, 3, 4, 5]]);
        assert!(matches!(
            extend_to_maximal(&bad, PairwisePredicate::WeakOdd(1)),
            Err(Error::Violation { .. })
        ));
    }

    #[test]
    fn s_formula_values() {
        assert_eq!(s_formula(6, 3), 57);
        assert_eq!(s_formula(4, 1), 11);
        for n in 1..10 {
            assert_eq!(s_formula(n, n - 1), 1 << n);
            assert_eq!(s_formula(n, 1) as usize, n * (n + 1) / 2 + 1);
        }
        assert_eq!(s_formula(64, 63), 1u128 << 64);
    }

    #[test]
    fn nonpurity_witness_shape() {
        let a = nonpurity_witness();
        assert_eq!(a.len(), 55);
        assert!(a.contains(s(&[2, 4])) && a.contains(s(&[3, 5])) && a.contains(s(&[1, 3, 4, 6])));
        assert!(is_maximal(&a, PairwisePredicate::WeakOdd(3)));
        assert!((a.len() as u128) < s_formula(6, 3));
    }

    #[test]
    fn max_size_matches_brute_force_on_tiny_grounds() {
        for n in 1..=4 {
            for r in 0..n {
                let p = PairwisePredicate::Strong(r);
                assert_eq!(
                    max_size(n, p).unwrap().size,
                    brute_force_max(n, p),
                    "n={n} r={r}"
                );
                if r % 2 == 1 {
                    let p = PairwisePredicate::WeakOdd(r);
                    assert_eq!(max_size(n, p).unwrap().size, brute_force_max(n, p));
                } else if r > 0 {
                    for p in [
                        PairwisePredicate::WeakEven(r),
                        PairwisePredicate::WeakEvenNoComb(r),
                    ] {
                        assert_eq!(max_size(n, p).unwrap().size, brute_force_max(n, p));
                    }
                }
            }
        }
    }

    #[test]
    fn max_size_examples() {
        let m = max_size(4, PairwisePredicate::WeakOdd(1)).unwrap();
        assert_eq!(m.size, 11);
        assert!(check_pairwise(&m.witness, PairwisePredicate::WeakOdd(1)).ok);
        assert!(is_maximal(&m.witness, PairwisePredicate::WeakOdd(1)));
        assert_eq!(max_size(5, PairwisePredicate::Strong(2)).unwrap().size, 26);
        assert!(matches!(
            max_size(8, PairwisePredicate::Strong(2)),
            Err(Error::Bound { n: 8, bound: 7 })
        ));
        assert!(max_size_with_bound(9, PairwisePredicate::Strong(2), 9).is_err());
    }

    #[test]
    fn maximal_enumeration_examples() {
        let e = enumerate_maximal(4, PairwisePredicate::WeakOdd(1), usize::MAX).unwrap();
        assert!(!e.truncated);
        assert!(!e.systems.is_empty());
        assert!(e.systems.iter().all(|w| w.len() == 11));
        for w in &e.systems {
            assert!(check_pairwise(w, PairwisePredicate::WeakOdd(1)).ok);
            assert!(is_maximal(w, PairwisePredicate::WeakOdd(1)));
        }
        let all = enumerate_maximal(3, PairwisePredicate::Strong(2), 10).unwrap();
        assert_eq!(all.systems.len(), 1);
        assert_eq!(all.systems[0].len(), 8);
        let capped = enumerate_maximal(4, PairwisePredicate::WeakOdd(1), 3).unwrap();
        assert!(capped.truncated);
        assert_eq!(capped.systems.len(), 3);
    }

    #[test]
    fn weak_three_on_six_is_not_pure() {
        let hist = maximal_size_histogram(6, PairwisePredicate::WeakOdd(3)).unwrap();
        assert!(hist.contains_key(&55), "{hist:?}");
        assert!(hist.contains_key(&57), "{hist:?}");
        assert_eq!(*hist.keys().max().unwrap(), 57);
    }

    #[test]
    fn maximal_chains_count() {
        // maximal 0-separated systems are maximal chains: n! of them
        let hist = maximal_size_histogram(4, PairwisePredicate::Strong(0)).unwrap();
        assert_eq!(hist, BTreeMap::from([(5, 24)]));
    }

    #[test]
    fn dot_export() {
        let g = CompatibilityGraph::new(2, PairwisePredicate::Strong(0), 7).unwrap();
        let dot = g.to_dot();
        assert!(dot.starts_with("graph compat {"));
        assert_eq!(g.edge_count(), 5);
        assert_eq!(dot.matches(" -- ").count(), 5);
    }
}
