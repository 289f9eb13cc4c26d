//! Combinatorial cubes `(X | T)`, standard and anti-standard cubillages,
//! validation, the cube precedence graph, bead-threads and s-membranes.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::ops::ControlFlow;

use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Cell, CyclicConfiguration, Side};
use crate::ground::{GroundSet, Subset};
use crate::systems::{binomial, check_pairwise, s_formula, PairwisePredicate, SetSystem};

pub type Cube = Cell;
pub type FacetDescriptor = Cell;

/// Largest `n` accepted by the constructions here.
pub const CUBILLAGE_BOUND: usize = 16;

/// `F_i = (X | T − p_i)` or `G_i = (X p_i | T − p_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FacetKind {
    F,
    G,
}

/// The `i`-th facet of kind `kind` of `c` (`1 ≤ i ≤ d`).
pub fn facet(c: &Cube, kind: FacetKind, i: usize) -> FacetDescriptor {
    let p = c
        .typ
        .elements()
        .nth(i - 1)
        .expect("facet index within 1..=d");
    let typ = c.typ.without(p);
    match kind {
        FacetKind::F => Cell { root: c.root, typ },
        FacetKind::G => Cell {
            root: c.root.with(p),
            typ,
        },
    }
}

/// `F_i` is on the front side iff `d − i` is even, `G_i` iff `d − i` is odd.
pub fn facet_side(d: usize, kind: FacetKind, i: usize) -> Side {
    let even = (d - i) % 2 == 0;
    match (kind, even) {
        (FacetKind::F, true) | (FacetKind::G, false) => Side::Front,
        _ => Side::Rear,
    }
}

/// All `2d` facets with their sides, `F_1, G_1, F_2, G_2, …`.
pub fn facets(c: &Cube) -> Vec<(FacetDescriptor, Side)> {
    let d = c.dim();
    (1..=d)
        .flat_map(|i| [FacetKind::F, FacetKind::G].map(|k| (facet(c, k, i), facet_side(d, k, i))))
        .collect()
}

pub fn side_facets(c: &Cube, side: Side) -> Vec<FacetDescriptor> {
    facets(c)
        .into_iter()
        .filter(|(_, s)| *s == side)
        .map(|(f, _)| f)
        .collect()
}

pub fn cube_vertices(c: &Cube) -> Vec<Subset> {
    c.vertices()
}

/// `(t_C, h_C)`: with `T = (p_1 < … < p_d)`, `t_C = X ∪ {p_i : d − i odd}`
/// and `h_C = X ∪ {p_i : d − i even}`.
pub fn apex_vertices(c: &Cube) -> (Subset, Subset) {
    let d = c.dim();
    let (mut t, mut h) = (c.root, c.root);
    for (idx, p) in c.typ.elements().enumerate() {
        if (d - idx - 1) % 2 == 1 {
            t = t.with(p);
        } else {
            h = h.with(p);
        }
    }
    (t, h)
}

/// A tiling of `Z(n, d)` by cubes, given combinatorially.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cubillage {
    pub n: usize,
    pub d: usize,
    pub cubes: Vec<Cube>,
}

/// Everything [`Cubillage::validate`] found wrong; empty when valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_dims(n: usize, d: usize) -> Result<GroundSet> {
    let g = GroundSet::new(n)?;
    if d == 0 || d > n {
        return Err(Error::Params(format!("need 1 <= d <= n, got n={n}, d={d}")));
    }
    if n > CUBILLAGE_BOUND {
        return Err(Error::Bound {
            n,
            bound: CUBILLAGE_BOUND,
        });
    }
    Ok(g)
}

fn lifted_cubillage(n: usize, d: usize, side: Side) -> Result<Cubillage> {
    let g = check_dims(n, d)?;
    let config = CyclicConfiguration::lifted(n, d + 1)?;
    let cubes = g
        .k_subsets(d)
        .into_par_iter()
        .map(|t| {
            // root = the i ∉ T on the wanted side of the hyperplane spanned by ξ_T
            let mut cols: Vec<usize> = t.elements().collect();
            cols.push(0);
            let mut root = Subset::EMPTY;
            for i in (1..=n).filter(|&i| !t.contains(i)) {
                cols[d] = i;
                let o = config.orientation(&cols);
                if o.is_eq() {
                    return Err(Error::Degenerate(t));
                }
                if o.is_lt() == (side == Side::Front) {
                    root = root.with(i);
                }
            }
            Ok(Cell { root, typ: t })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cubillage { n, d, cubes })
}

/// Projection of the front side of `Z(n, d+1)`.
pub fn standard_cubillage(n: usize, d: usize) -> Result<Cubillage> {
    lifted_cubillage(n, d, Side::Front)
}

/// Projection of the rear side of `Z(n, d+1)`.
pub fn anti_standard_cubillage(n: usize, d: usize) -> Result<Cubillage> {
    lifted_cubillage(n, d, Side::Rear)
}

impl Cubillage {
    /// Wraps cubes without validating the tiling; cells are checked for
    /// shape only.
    pub fn new(n: usize, d: usize, cubes: Vec<Cube>) -> Result<Self> {
        let g = check_dims(n, d)?;
        for c in &cubes {
            g.check(c.root | c.typ)?;
            if c.typ.len() != d {
                return Err(Error::Cube {
                    root: c.root,
                    typ: c.typ,
                    reason: format!("type must have {d} elements"),
                });
            }
            Cell::new(c.root, c.typ)?;
        }
        Ok(Cubillage { n, d, cubes })
    }

    /// [`Cubillage::new`] followed by [`Cubillage::validate`].
    pub fn validated(n: usize, d: usize, cubes: Vec<Cube>) -> Result<Self> {
        let q = Cubillage::new(n, d, cubes)?;
        let report = q.validate();
        if !report.ok() {
            return Err(Error::Cubillage(report.violations.join("; ")));
        }
        Ok(q)
    }

    /// Rebuilds the cubillage whose vertex set is `collection`: `(X | T)` is
    /// taken as a cube iff all `X ∪ A`, `A ⊆ T`, are in the collection.
    /// The result must validate, otherwise the collection is rejected.
    pub fn from_collection(n: usize, d: usize, collection: &SetSystem) -> Result<Self> {
        let g = check_dims(n, d)?;
        let mut cubes = Vec::new();
        for t in g.k_subsets(d) {
            for x in collection.iter().filter(|x| x.is_disjoint(t)) {
                if t.subsets().all(|a| collection.contains(x | a)) {
                    cubes.push(Cell { root: x, typ: t });
                }
            }
        }
        let q = Cubillage::validated(n, d, cubes)?;
        if q.vertices() != *collection {
            return Err(Error::Cubillage(
                "vertex set differs from the collection".into(),
            ));
        }
        Ok(q)
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet::new(self.n).expect("checked at construction")
    }

    pub fn vertices(&self) -> SetSystem {
        SetSystem::new(self.ground(), self.cubes.iter().flat_map(Cell::vertices))
            .expect("cells lie in [n]")
    }

    pub fn validate(&self) -> ValidationReport {
        let (n, d) = (self.n, self.d);
        let mut violations = Vec::new();

        let expected = binomial(n, d) as usize;
        if self.cubes.len() != expected {
            violations.push(format!(
                "{} cubes, expected C({n},{d}) = {expected}",
                self.cubes.len()
            ));
        }
        let mut by_type: BTreeMap<Subset, usize> = BTreeMap::new();
        for c in &self.cubes {
            *by_type.entry(c.typ).or_default() += 1;
            if !c.root.is_disjoint(c.typ) {
                violations.push(format!("cube {c}: root meets type"));
            }
        }
        for (t, k) in &by_type {
            if *k > 1 {
                violations.push(format!("type {t} used by {k} cubes"));
            }
        }
        for t in self.ground().k_subsets(d) {
            if !by_type.contains_key(&t) {
                violations.push(format!("missing type {t}"));
            }
        }

        // facet matching: internal facets are front of one cube and rear of
        // another; the others must be boundary facets on the matching side
        let mut seen: BTreeMap<Cell, (usize, usize)> = BTreeMap::new();
        for c in &self.cubes {
            for (f, side) in facets(c) {
                let e = seen.entry(f).or_default();
                match side {
                    Side::Front => e.0 += 1,
                    Side::Rear => e.1 += 1,
                }
            }
        }
        let boundary = |side| -> HashSet<Cell> {
            geometry::boundary_facets(n, d, side)
                .map(|v| v.into_iter().collect())
                .unwrap_or_default()
        };
        let (front, rear) = (boundary(Side::Front), boundary(Side::Rear));
        for (f, &(fr, re)) in &seen {
            let ok = match (fr, re) {
                (1, 1) => true,
                (1, 0) => front.contains(f),
                (0, 1) => rear.contains(f),
                _ => false,
            };
            if !ok {
                violations.push(format!(
                    "facet {f} is a front facet of {fr} and a rear facet of {re} cubes"
                ));
            }
        }
        for f in front.iter().chain(rear.iter()) {
            if !seen.contains_key(f) {
                violations.push(format!("boundary facet {f} is not covered"));
            }
        }

        let v = self.vertices();
        let want = s_formula(n, d - 1);
        if v.len() as u128 != want {
            violations.push(format!("{} vertices, expected {want}", v.len()));
        }
        if let Some((a, b)) = check_pairwise(&v, PairwisePredicate::Strong(d - 1)).violation {
            violations.push(format!("vertices {a} and {b} are not {}-separated", d - 1));
        }
        ValidationReport { violations }
    }

    /// `Γ_Q`: the precedence graph on the cubes of this cubillage.
    pub fn gamma_graph(&self) -> DiGraph<Cube, ()> {
        gamma_graph(&self.cubes)
    }

    /// Cube indices in a topological order of `Γ_Q`.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let g = self.gamma_graph();
        toposort(&g, None)
            .map(|o| o.into_iter().map(NodeIndex::index).collect())
            .map_err(|c| {
                Error::Falsified(format!("cube order has a cycle through {}", g[c.node_id()]))
            })
    }
}

/// All cubes `(X | T)` of `Z(n, d)`: every `d`-subset `T` and `X ⊆ [n] − T`.
pub fn all_cubes(n: usize, d: usize) -> Result<Vec<Cube>> {
    let g = check_dims(n, d)?;
    let mut out = Vec::new();
    for t in g.k_subsets(d) {
        for x in g.complement(t).subsets() {
            out.push(Cell { root: x, typ: t });
        }
    }
    out.sort_unstable_by_key(|c| (c.typ, c.root));
    Ok(out)
}

/// Some rear facet of `c` is a front facet of `c2`.
pub fn immediately_precedes(c: &Cube, c2: &Cube) -> bool {
    let front2 = side_facets(c2, Side::Front);
    side_facets(c, Side::Rear)
        .iter()
        .any(|f| front2.contains(f))
}

/// Precedence digraph on any set of cubes; node `i` is `cubes[i]`.
pub fn gamma_graph(cubes: &[Cube]) -> DiGraph<Cube, ()> {
    let mut g = DiGraph::with_capacity(cubes.len(), 0);
    let nodes: Vec<NodeIndex> = cubes.iter().map(|c| g.add_node(*c)).collect();
    let mut by_front: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, c) in cubes.iter().enumerate() {
        for f in side_facets(c, Side::Front) {
            by_front.entry(f).or_default().push(i);
        }
    }
    for (i, c) in cubes.iter().enumerate() {
        let mut targets: Vec<usize> = side_facets(c, Side::Rear)
            .iter()
            .flat_map(|f| by_front.get(f).into_iter().flatten().copied())
            .collect();
        targets.sort_unstable();
        targets.dedup();
        for j in targets {
            g.add_edge(nodes[i], nodes[j], ());
        }
    }
    g
}

pub fn is_acyclic<N, E>(g: &DiGraph<N, E>) -> bool {
    toposort(g, None).is_ok()
}

/// Graphviz digraph with plain node ids.
pub fn graph_dot<N: std::fmt::Display>(name: &str, g: &DiGraph<N, ()>) -> String {
    let mut out = format!("digraph {name} {{\n");
    for i in g.node_indices() {
        let _ = writeln!(out, "  {} [label=\"{}\"];", i.index(), g[i]);
    }
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).expect("edge exists");
        let _ = writeln!(out, "  {} -> {};", a.index(), b.index());
    }
    out.push_str("}\n");
    out
}

/// The digraph `B_Q` with one arc `t_C → h_C` per cube.
#[derive(Clone, Debug, Serialize)]
pub struct BeadThreads {
    pub arcs: Vec<(Subset, Subset)>,
    /// Nondegenerate threads, each listed from its front end.
    pub threads: Vec<Vec<Subset>>,
    /// Vertices without arcs.
    pub isolated: Vec<Subset>,
    pub violations: Vec<String>,
}

impl BeadThreads {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_dot(&self) -> String {
        let mut g: DiGraph<Subset, ()> = DiGraph::new();
        let mut idx: BTreeMap<Subset, NodeIndex> = BTreeMap::new();
        let mut node =
            |g: &mut DiGraph<Subset, ()>, v: Subset| *idx.entry(v).or_insert_with(|| g.add_node(v));
        for &(t, h) in &self.arcs {
            let (a, b) = (node(&mut g, t), node(&mut g, h));
            g.add_edge(a, b, ());
        }
        for &v in &self.isolated {
            node(&mut g, v);
        }
        graph_dot("beads", &g)
    }
}

pub fn bead_thread_graph(q: &Cubillage) -> Result<BeadThreads> {
    let (n, d) = (q.n, q.d);
    let front = geometry::side_vertices(n, d, Side::Front)?;
    let rear = geometry::side_vertices(n, d, Side::Rear)?;
    let vertices = q.vertices();
    let mut violations = Vec::new();

    let mut arcs: Vec<(Subset, Subset)> = q.cubes.iter().map(apex_vertices).collect();
    arcs.sort_unstable();
    let mut next: BTreeMap<Subset, Subset> = BTreeMap::new();
    let mut prev: BTreeMap<Subset, Subset> = BTreeMap::new();
    for &(t, h) in &arcs {
        if next.insert(t, h).is_some() {
            violations.push(format!("{t} has out-degree > 1"));
        }
        if prev.insert(h, t).is_some() {
            violations.push(format!("{h} has in-degree > 1"));
        }
        let (lt, lh) = (t.len(), h.len());
        if (d % 2 == 1 && lh != lt + 1) || (d % 2 == 0 && lh != lt) {
            violations.push(format!("arc {t} -> {h} has the wrong height step"));
        }
    }
    for v in vertices.iter() {
        if next.contains_key(&v) == rear.contains(v) {
            violations.push(format!(
                "{v}: out-arc present = {}, on rear = {}",
                next.contains_key(&v),
                rear.contains(v)
            ));
        }
        if prev.contains_key(&v) == front.contains(v) {
            violations.push(format!(
                "{v}: in-arc present = {}, on front = {}",
                prev.contains_key(&v),
                front.contains(v)
            ));
        }
    }

    let mut threads = Vec::new();
    for v in vertices
        .iter()
        .filter(|v| next.contains_key(v) && !prev.contains_key(v))
    {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(&h) = next.get(&cur) {
            if path.len() > arcs.len() {
                violations.push(format!("thread from {v} does not terminate"));
                break;
            }
            path.push(h);
            cur = h;
        }
        if !front.contains(v) || rear.contains(v) {
            violations.push(format!("thread starts at {v}, outside front minus rim"));
        }
        if !rear.contains(cur) || front.contains(cur) {
            violations.push(format!("thread ends at {cur}, outside rear minus rim"));
        }
        threads.push(path);
    }
    let on_thread: usize = threads.iter().map(|t| t.len() - 1).sum();
    if on_thread != arcs.len() {
        violations.push(format!("{} arcs lie on cycles", arcs.len() - on_thread));
    }
    let isolated: Vec<Subset> = vertices
        .iter()
        .filter(|v| !next.contains_key(v) && !prev.contains_key(v))
        .collect();
    for &v in &isolated {
        if !(front.contains(v) && rear.contains(v)) {
            violations.push(format!("isolated vertex {v} is not on the rim"));
        }
    }
    Ok(BeadThreads {
        arcs,
        threads,
        isolated,
        violations,
    })
}

/// Depth-first enumeration of the order ideals of a DAG whose nodes are
/// numbered in topological order (`preds[i]` only holds indices `< i`).
/// `raise`/`lower` keep caller state in sync with the current ideal.
pub(crate) struct IdealWalk<'a, S> {
    pub preds: &'a [Vec<usize>],
    pub limit: usize,
    pub state: S,
    pub raise: fn(&mut S, usize) -> Result<()>,
    pub lower: fn(&mut S, usize),
}

impl<S> IdealWalk<'_, S> {
    /// Visits every ideal; fails with [`Error::Limit`] past `limit` ideals.
    pub fn run<F>(&mut self, mut visit: F) -> Result<usize>
    where
        F: FnMut(&S, &[bool]) -> Result<ControlFlow<()>>,
    {
        let mut included = vec![false; self.preds.len()];
        let mut count = 0;
        let _stopped = self.step(0, &mut included, &mut count, &mut visit)?;
        Ok(count)
    }

    fn step<F>(
        &mut self,
        k: usize,
        included: &mut Vec<bool>,
        count: &mut usize,
        visit: &mut F,
    ) -> Result<ControlFlow<()>>
    where
        F: FnMut(&S, &[bool]) -> Result<ControlFlow<()>>,
    {
        if k == included.len() {
            if *count == self.limit {
                return Err(Error::Limit(self.limit));
            }
            *count += 1;
            return visit(&self.state, included);
        }
        if let ControlFlow::Break(()) = self.step(k + 1, included, count, visit)? {
            return Ok(ControlFlow::Break(()));
        }
        if self.preds[k].iter().all(|&p| included[p]) {
            (self.raise)(&mut self.state, k)?;
            included[k] = true;
            let flow = self.step(k + 1, included, count, visit);
            included[k] = false;
            (self.lower)(&mut self.state, k);
            return flow;
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Outcome of [`s_membranes`].
#[derive(Clone, Debug, Default, Serialize)]
pub struct SMembraneReport {
    pub membranes: usize,
    pub expected_size: u128,
    pub violations: Vec<String>,
}

impl SMembraneReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

struct FacetState {
    cubes: Vec<Cube>,
    facets: HashSet<Cell>,
    vertex_mult: HashMap<Subset, u32>,
    fail: Option<String>,
}

impl FacetState {
    fn add(&mut self, f: Cell) {
        for v in f.vertices() {
            *self.vertex_mult.entry(v).or_default() += 1;
        }
        assert!(self.facets.insert(f), "facet {f} added twice");
    }

    fn remove(&mut self, f: Cell) -> bool {
        if !self.facets.remove(&f) {
            return false;
        }
        for v in f.vertices() {
            let m = self.vertex_mult.get_mut(&v).expect("vertex counted");
            *m -= 1;
            if *m == 0 {
                self.vertex_mult.remove(&v);
            }
        }
        true
    }

    fn swap(&mut self, cube: usize, from: Side) -> Result<()> {
        let c = self.cubes[cube];
        for f in side_facets(&c, from) {
            if !self.remove(f) {
                let msg = format!("flip of {c} needs facet {f}, which is not on the membrane");
                self.fail = Some(msg.clone());
                return Err(Error::Falsified(msg));
            }
        }
        for f in side_facets(&c, from.opposite()) {
            self.add(f);
        }
        Ok(())
    }

    fn vertices(&self) -> Vec<Subset> {
        let mut v: Vec<Subset> = self.vertex_mult.keys().copied().collect();
        v.sort_unstable();
        v
    }
}

/// Precedence lists for the cubes of `q` in a topological order of `Γ_Q`.
fn cube_order(q: &Cubillage) -> Result<(Vec<usize>, Vec<Cube>, Vec<Vec<usize>>)> {
    let order = q.topological_order()?;
    let cubes: Vec<Cube> = order.iter().map(|&i| q.cubes[i]).collect();
    let mut pos = vec![0; order.len()];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    let g = q.gamma_graph();
    let mut preds = vec![Vec::new(); cubes.len()];
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).expect("edge exists");
        preds[pos[b.index()]].push(pos[a.index()]);
    }
    Ok((order, cubes, preds))
}

/// Vertex set of the s-membrane bounding the ideal `ideal` (indices into
/// `q.cubes`) from above.
pub fn s_membrane_vertices(q: &Cubillage, ideal: &[usize]) -> Result<SetSystem> {
    let (order, cubes, _) = cube_order(q)?;
    let mut st = FacetState {
        cubes,
        facets: HashSet::new(),
        vertex_mult: HashMap::new(),
        fail: None,
    };
    for f in geometry::boundary_facets(q.n, q.d, Side::Front)? {
        st.add(f);
    }
    let wanted: HashSet<usize> = ideal.iter().copied().collect();
    for (k, &i) in order.iter().enumerate() {
        if wanted.contains(&i) {
            st.swap(k, Side::Front)?;
        }
    }
    SetSystem::new(q.ground(), st.vertices())
}

/// Enumerates the s-membranes of `q` (ideals of `Γ_Q`) and checks that each
/// vertex set is `(d−2)`-separated of size `s(n, d−2)`.
pub fn s_membranes(q: &Cubillage, limit: usize) -> Result<SMembraneReport> {
    if q.d < 2 {
        return Err(Error::Params("s-membranes need d >= 2".into()));
    }
    let (_, cubes, preds) = cube_order(q)?;
    let mut st = FacetState {
        cubes,
        facets: HashSet::new(),
        vertex_mult: HashMap::new(),
        fail: None,
    };
    for f in geometry::boundary_facets(q.n, q.d, Side::Front)? {
        st.add(f);
    }
    let expected_size = s_formula(q.n, q.d - 2);
    let ground = q.ground();
    let mut violations = Vec::new();
    let mut walk = IdealWalk {
        preds: &preds,
        limit,
        state: st,
        raise: |s: &mut FacetState, k| s.swap(k, Side::Front),
        lower: |s: &mut FacetState, k| s.swap(k, Side::Rear).expect("undoing a raise"),
    };
    let membranes = walk.run(|s, ideal| {
        let v = SetSystem::new(ground, s.vertices())?;
        let members: Vec<usize> = (0..ideal.len()).filter(|&i| ideal[i]).collect();
        if v.len() as u128 != expected_size {
            violations.push(format!("ideal {members:?}: {} vertices", v.len()));
        }
        if let Some((a, b)) = check_pairwise(&v, PairwisePredicate::Strong(q.d - 2)).violation {
            violations.push(format!(
                "ideal {members:?}: {a} and {b} not {}-separated",
                q.d - 2
            ));
        }
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(SMembraneReport {
        membranes,
        expected_size,
        violations,
    })
}
