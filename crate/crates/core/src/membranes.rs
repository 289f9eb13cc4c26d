//! Fragmentations of a cubillage by the horizontal hyperplanes, the
//! precedence order on fragments, w-membranes as order ideals, and the
//! enlarged fragmentation behind e-membranes (even `d`).
//!
//! A membrane is stored as its ideal of pieces together with its tiles.
//! The slanted projection that decides which side of a fragment a facet
//! belongs to is handled purely combinatorially: the lower horizontal
//! section belongs to the front side of a fragment and the upper one to its
//! rear side.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::ControlFlow;

use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::cubillage::{apex_vertices, graph_dot, side_facets, Cube, Cubillage, IdealWalk};
use crate::error::{Error, Result};
use crate::flips::{apply_flip, Direction, FlipSite, WitnessMode};
use crate::geometry::{self, Cell, Side};
use crate::ground::{GroundSet, Subset};
use crate::separation::is_double_r_comb;
use crate::systems::{check_pairwise, s_formula, PairwisePredicate, SetSystem};

/// Largest `n` handled by membrane enumeration.
pub const MEMBRANE_BOUND: usize = 10;

/// Default cap on the number of enumerated ideals.
pub const DEFAULT_IDEAL_LIMIT: usize = 5_000_000;

/// A facet of a fragment. `H` is the horizontal section `(X | C(T, h))`;
/// `V` is the slab of the `(d−1)`-cell `(Y | U)` between the absolute
/// heights `level` and `level + 1`. Only nondegenerate tiles exist:
/// `1 ≤ h ≤ d − 1` and `|Y| ≤ level ≤ |Y| + d − 2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind")]
pub enum Tile {
    H {
        root: Subset,
        #[serde(rename = "type")]
        typ: Subset,
        h: usize,
    },
    V {
        root: Subset,
        #[serde(rename = "type")]
        typ: Subset,
        level: usize,
    },
}

impl Tile {
    pub fn vertices(&self) -> Vec<Subset> {
        let mut v: Vec<Subset> = match *self {
            Tile::H { root, typ, h } => typ
                .subsets()
                .filter(|a| a.len() == h)
                .map(|a| root | a)
                .collect(),
            Tile::V { root, typ, level } => typ
                .subsets()
                .filter(|a| {
                    let k = root.len() + a.len();
                    k == level || k == level + 1
                })
                .map(|a| root | a)
                .collect(),
        };
        v.sort_unstable();
        v
    }

    pub fn is_horizontal(&self) -> bool {
        matches!(self, Tile::H { .. })
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Tile::H { root, typ, h } => write!(f, "H{}@{h}", Cell { root, typ }),
            Tile::V { root, typ, level } => write!(f, "V{}@{level}", Cell { root, typ }),
        }
    }
}

impl fmt::Debug for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Nondegenerate slabs of a `(d−1)`-cell at the given absolute levels.
fn v_tiles(f: Cell, levels: impl Iterator<Item = usize>) -> impl Iterator<Item = Tile> {
    let lo = f.root.len();
    let hi = lo + f.typ.len().saturating_sub(1);
    levels
        .filter(move |&l| f.typ.len() >= 1 && l >= lo && l <= hi)
        .map(move |level| Tile::V {
            root: f.root,
            typ: f.typ,
            level,
        })
}

/// All slabs of the boundary side of `Z(n, d)`.
fn boundary_tiles(n: usize, d: usize, side: Side) -> Result<BTreeSet<Tile>> {
    let mut out = BTreeSet::new();
    for f in geometry::boundary_facets(n, d, side)? {
        out.extend(v_tiles(f, 0..=n));
    }
    Ok(out)
}

/// Slabs `lo..=hi` of one cube: an ordinary fragment when `lo == hi`, a
/// center (two middle slabs merged) otherwise.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Piece {
    pub cube: Cube,
    pub lo: usize,
    pub hi: usize,
}

impl Piece {
    pub fn is_center(&self) -> bool {
        self.lo < self.hi
    }

    /// Twice the mid-height `|X| + lo − 1/2` of the lowest slab.
    pub fn height2(&self) -> usize {
        2 * (self.cube.root.len() + self.lo) - 1
    }

    /// Front side: front-facet slabs plus the lower section.
    pub fn eps_front(&self) -> Vec<Tile> {
        let d = self.cube.dim();
        let base = self.cube.root.len();
        let mut out: Vec<Tile> = side_facets(&self.cube, Side::Front)
            .into_iter()
            .flat_map(|f| v_tiles(f, (self.lo..=self.hi).map(|h| base + h - 1)))
            .collect();
        if self.lo >= 2 && self.lo - 1 <= d - 1 {
            out.push(Tile::H {
                root: self.cube.root,
                typ: self.cube.typ,
                h: self.lo - 1,
            });
        }
        out.sort_unstable();
        out
    }

    /// Rear side: rear-facet slabs plus the upper section.
    pub fn eps_rear(&self) -> Vec<Tile> {
        let d = self.cube.dim();
        let base = self.cube.root.len();
        let mut out: Vec<Tile> = side_facets(&self.cube, Side::Rear)
            .into_iter()
            .flat_map(|f| v_tiles(f, (self.lo..=self.hi).map(|h| base + h - 1)))
            .collect();
        if self.hi <= d - 1 {
            out.push(Tile::H {
                root: self.cube.root,
                typ: self.cube.typ,
                h: self.hi,
            });
        }
        out.sort_unstable();
        out
    }

    /// Vertices of the piece: sections `lo − 1 ..= hi`.
    pub fn vertices(&self) -> Vec<Subset> {
        let mut v: Vec<Subset> = self
            .cube
            .typ
            .subsets()
            .filter(|a| a.len() + 1 >= self.lo && a.len() <= self.hi)
            .map(|a| self.cube.root | a)
            .collect();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_center() {
            write!(f, "{}[{}..{}]", self.cube, self.lo, self.hi)
        } else {
            write!(f, "{}[{}]", self.cube, self.lo)
        }
    }
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Flavor {
    /// Ordinary fragments; ideals give w-membranes.
    W,
    /// Centers merged (even `d`); ideals give e-membranes.
    E,
}

/// The pieces of a cubillage, indexed in a topological order of their
/// precedence graph, with the tiles of both sides of every piece.
#[derive(Clone, Debug)]
pub struct Fragmentation {
    n: usize,
    d: usize,
    flavor: Flavor,
    pieces: Vec<Piece>,
    front: Vec<Vec<usize>>,
    rear: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    tiles: Vec<Tile>,
    tile_vertices: Vec<Vec<Subset>>,
    base: Vec<usize>,
    top: Vec<usize>,
}

/// Ordinary fragmentation: `d` slabs per cube.
pub fn fragments(q: &Cubillage) -> Result<Fragmentation> {
    Fragmentation::build(q, Flavor::W)
}

/// Enlarged fragmentation: the two middle slabs of each cube merged.
pub fn enlarged_fragmentation(q: &Cubillage) -> Result<Fragmentation> {
    Fragmentation::build(q, Flavor::E)
}

/// Precedence digraph of the ordinary fragmentation.
pub fn fragment_precedence(q: &Cubillage) -> Result<DiGraph<Piece, ()>> {
    Ok(fragments(q)?.precedence_graph())
}

/// Precedence digraph of the enlarged fragmentation.
pub fn enlarged_precedence(q: &Cubillage) -> Result<DiGraph<Piece, ()>> {
    Ok(enlarged_fragmentation(q)?.precedence_graph())
}

impl Fragmentation {
    fn build(q: &Cubillage, flavor: Flavor) -> Result<Self> {
        let (n, d) = (q.n, q.d);
        if n > MEMBRANE_BOUND {
            return Err(Error::Bound {
                n,
                bound: MEMBRANE_BOUND,
            });
        }
        if d < 2 {
            return Err(Error::Params("fragmentations need d >= 2".into()));
        }
        let report = q.validate();
        if !report.ok() {
            return Err(Error::Cubillage(report.violations.join("; ")));
        }
        let slabs: Vec<(usize, usize)> = match flavor {
            Flavor::W => (1..=d).map(|h| (h, h)).collect(),
            Flavor::E => {
                if d % 2 == 1 {
                    return Err(Error::Parity {
                        what: "enlarged fragmentation",
                        expected: "even",
                        r: d,
                    });
                }
                let m = d / 2;
                (1..m)
                    .map(|h| (h, h))
                    .chain([(m, m + 1)])
                    .chain((m + 2..=d).map(|h| (h, h)))
                    .collect()
            }
        };
        let mut cubes = q.cubes.clone();
        cubes.sort_unstable_by_key(|c| (c.typ, c.root));
        let raw: Vec<Piece> = cubes
            .iter()
            .flat_map(|&cube| slabs.iter().map(move |&(lo, hi)| Piece { cube, lo, hi }))
            .collect();

        let mut front_owner: HashMap<Tile, usize> = HashMap::new();
        for (i, p) in raw.iter().enumerate() {
            for t in p.eps_front() {
                if let Some(j) = front_owner.insert(t, i) {
                    return Err(Error::Falsified(format!(
                        "tile {t} on the front of both {} and {p}",
                        raw[j]
                    )));
                }
            }
        }
        let mut g: DiGraph<usize, ()> = DiGraph::new();
        let nodes: Vec<NodeIndex> = (0..raw.len()).map(|i| g.add_node(i)).collect();
        let mut rear_owner: HashMap<Tile, usize> = HashMap::new();
        for (i, p) in raw.iter().enumerate() {
            let mut targets = Vec::new();
            for t in p.eps_rear() {
                if let Some(j) = rear_owner.insert(t, i) {
                    return Err(Error::Falsified(format!(
                        "tile {t} on the rear of both {} and {p}",
                        raw[j]
                    )));
                }
                if let Some(&j) = front_owner.get(&t) {
                    targets.push(j);
                }
            }
            targets.sort_unstable();
            targets.dedup();
            for j in targets {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
        let order = toposort(&g, None).map_err(|c| {
            Error::Falsified(format!(
                "fragment precedence has a cycle through {}",
                raw[g[c.node_id()]]
            ))
        })?;
        let order: Vec<usize> = order.into_iter().map(|v| g[v]).collect();
        let mut pos = vec![0; raw.len()];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        let pieces: Vec<Piece> = order.iter().map(|&i| raw[i]).collect();
        let mut preds = vec![Vec::new(); pieces.len()];
        let mut succs = vec![Vec::new(); pieces.len()];
        for e in g.edge_indices() {
            let (a, b) = g.edge_endpoints(e).expect("edge exists");
            let (a, b) = (pos[g[a]], pos[g[b]]);
            preds[b].push(a);
            succs[a].push(b);
        }
        for l in preds.iter_mut().chain(succs.iter_mut()) {
            l.sort_unstable();
        }

        let base_tiles = boundary_tiles(n, d, Side::Front)?;
        let top_tiles = boundary_tiles(n, d, Side::Rear)?;
        let mut ids: HashMap<Tile, usize> = HashMap::new();
        let mut tiles = Vec::new();
        let mut intern = |t: Tile| {
            *ids.entry(t).or_insert_with(|| {
                tiles.push(t);
                tiles.len() - 1
            })
        };
        let front: Vec<Vec<usize>> = pieces
            .iter()
            .map(|p| p.eps_front().into_iter().map(&mut intern).collect())
            .collect();
        let rear: Vec<Vec<usize>> = pieces
            .iter()
            .map(|p| p.eps_rear().into_iter().map(&mut intern).collect())
            .collect();
        let base: Vec<usize> = base_tiles.iter().map(|&t| intern(t)).collect();
        let top: Vec<usize> = top_tiles.iter().map(|&t| intern(t)).collect();

        // every tile is either on the front boundary or on some rear side,
        // and either on the rear boundary or on some front side
        for t in &tiles {
            let below = rear_owner.contains_key(t) || base_tiles.contains(t);
            let above = front_owner.contains_key(t) || top_tiles.contains(t);
            let double = (rear_owner.contains_key(t) && base_tiles.contains(t))
                || (front_owner.contains_key(t) && top_tiles.contains(t));
            if !below || !above || double {
                return Err(Error::Falsified(format!(
                    "tile {t} is not matched across the fragmentation"
                )));
            }
        }
        let tile_vertices = tiles.iter().map(Tile::vertices).collect();
        Ok(Fragmentation {
            n,
            d,
            flavor,
            pieces,
            front,
            rear,
            preds,
            succs,
            tiles,
            tile_vertices,
            base,
            top,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Pieces in topological order; indices elsewhere refer to this list.
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn eps_front(&self, i: usize) -> Vec<Tile> {
        self.front[i].iter().map(|&t| self.tiles[t]).collect()
    }

    pub fn eps_rear(&self, i: usize) -> Vec<Tile> {
        self.rear[i].iter().map(|&t| self.tiles[t]).collect()
    }

    /// Immediate predecessors of piece `i`.
    pub fn preds(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    pub fn succs(&self, i: usize) -> &[usize] {
        &self.succs[i]
    }

    pub fn arc_count(&self) -> usize {
        self.preds.iter().map(Vec::len).sum()
    }

    pub fn precedence_graph(&self) -> DiGraph<Piece, ()> {
        let mut g = DiGraph::new();
        let nodes: Vec<NodeIndex> = self.pieces.iter().map(|&p| g.add_node(p)).collect();
        for (b, ps) in self.preds.iter().enumerate() {
            for &a in ps {
                g.add_edge(nodes[a], nodes[b], ());
            }
        }
        g
    }

    pub fn to_dot(&self) -> String {
        graph_dot("fragments", &self.precedence_graph())
    }

    fn membrane(&self, ideal: BTreeSet<usize>, tiles: BTreeSet<Tile>) -> Membrane {
        Membrane {
            n: self.n,
            d: self.d,
            flavor: self.flavor,
            ideal,
            tiles,
        }
    }

    /// The front side of the zonotope sliced into slabs.
    pub fn base_membrane(&self) -> Membrane {
        self.membrane(
            BTreeSet::new(),
            self.base.iter().map(|&t| self.tiles[t]).collect(),
        )
    }

    pub fn top_membrane(&self) -> Membrane {
        self.membrane(
            (0..self.len()).collect(),
            self.top.iter().map(|&t| self.tiles[t]).collect(),
        )
    }

    pub fn is_ideal(&self, ideal: &BTreeSet<usize>) -> Result<()> {
        for &i in ideal {
            if i >= self.len() {
                return Err(Error::Params(format!("piece index {i} out of range")));
            }
            if self.preds[i].iter().any(|p| !ideal.contains(p)) {
                return Err(Error::NotIdeal(i));
            }
        }
        Ok(())
    }

    /// Replays raising flips over `ideal` in topological order, starting
    /// from the base membrane.
    pub fn membrane_from_ideal(&self, ideal: &[usize]) -> Result<Membrane> {
        let wanted: BTreeSet<usize> = ideal.iter().copied().collect();
        self.is_ideal(&wanted)?;
        let mut m = self.base_membrane();
        for &i in &wanted {
            m = self.raising_flip(&m, i)?;
        }
        Ok(m)
    }

    /// Membrane bounding `ideal` from above, read off directly: a tile is
    /// present iff the piece below it (if any) is in the ideal and the
    /// piece above it (if any) is not.
    pub fn membrane_by_rule(&self, ideal: &[usize]) -> Result<Membrane> {
        let wanted: BTreeSet<usize> = ideal.iter().copied().collect();
        self.is_ideal(&wanted)?;
        let mut below = vec![None; self.tiles.len()];
        let mut above = vec![None; self.tiles.len()];
        for i in 0..self.len() {
            for &t in &self.rear[i] {
                below[t] = Some(i);
            }
            for &t in &self.front[i] {
                above[t] = Some(i);
            }
        }
        let tiles = (0..self.tiles.len())
            .filter(|&t| {
                below[t].is_none_or(|i| wanted.contains(&i))
                    && above[t].is_none_or(|i| !wanted.contains(&i))
            })
            .map(|t| self.tiles[t])
            .collect();
        Ok(self.membrane(wanted, tiles))
    }

    /// Adds piece `i` to the ideal, replacing its front side by its rear
    /// side.
    pub fn raising_flip(&self, m: &Membrane, i: usize) -> Result<Membrane> {
        if m.ideal.contains(&i) {
            return Err(Error::FlipPrecondition(format!(
                "{} is already below the membrane",
                self.pieces[i]
            )));
        }
        if let Some(p) = self.preds[i].iter().find(|p| !m.ideal.contains(p)) {
            return Err(Error::FlipPrecondition(format!(
                "{} cannot be raised before its predecessor {}",
                self.pieces[i], self.pieces[*p]
            )));
        }
        self.swap(m, i, true)
    }

    /// Removes piece `i` from the ideal.
    pub fn lowering_flip(&self, m: &Membrane, i: usize) -> Result<Membrane> {
        if !m.ideal.contains(&i) {
            return Err(Error::FlipPrecondition(format!(
                "{} is not below the membrane",
                self.pieces[i]
            )));
        }
        if let Some(s) = self.succs[i].iter().find(|s| m.ideal.contains(s)) {
            return Err(Error::FlipPrecondition(format!(
                "{} cannot be lowered while {} is raised",
                self.pieces[i], self.pieces[*s]
            )));
        }
        self.swap(m, i, false)
    }

    fn swap(&self, m: &Membrane, i: usize, raise: bool) -> Result<Membrane> {
        let (from, to) = if raise {
            (&self.front[i], &self.rear[i])
        } else {
            (&self.rear[i], &self.front[i])
        };
        let mut tiles = m.tiles.clone();
        for &t in from {
            if !tiles.remove(&self.tiles[t]) {
                return Err(Error::Falsified(format!(
                    "flip of {} needs tile {}, which is not on the membrane",
                    self.pieces[i], self.tiles[t]
                )));
            }
        }
        for &t in to {
            if !tiles.insert(self.tiles[t]) {
                return Err(Error::Falsified(format!(
                    "flip of {} duplicates tile {}",
                    self.pieces[i], self.tiles[t]
                )));
            }
        }
        let mut ideal = m.ideal.clone();
        if raise {
            ideal.insert(i);
        } else {
            ideal.remove(&i);
        }
        Ok(self.membrane(ideal, tiles))
    }

    /// The vertex swap a raising flip of piece `i` is expected to make:
    /// `t_C → h_C` for the middle slab (odd `d`) or a center, nothing for
    /// other pieces. `None` where no claim is made (middle slabs of a
    /// w-fragmentation with even `d`).
    pub fn expected_effect(&self, i: usize) -> Option<Option<(Subset, Subset)>> {
        let p = self.pieces[i];
        let d = self.d;
        let swap = Some(apex_vertices(&p.cube));
        match (d % 2, p.is_center()) {
            (1, _) => Some(if p.lo == d.div_ceil(2) { swap } else { None }),
            (_, true) => Some(swap),
            (_, false) if self.flavor == Flavor::E => Some(None),
            _ if p.lo < d / 2 || p.lo > d / 2 + 1 => Some(None),
            _ => None,
        }
    }

    /// Visits every membrane (one per ideal) through a depth-first walk
    /// that raises and lowers pieces incrementally.
    pub fn for_each_membrane<F>(&self, limit: usize, mut visit: F) -> Result<MembraneWalkStats>
    where
        F: FnMut(&MembraneView<'_>) -> Result<ControlFlow<()>>,
    {
        let mut state = WalkState::new(self);
        for &t in &self.base {
            state.add_tile(t);
        }
        let mut walk = IdealWalk {
            preds: &self.preds,
            limit,
            state,
            raise: |s: &mut WalkState<'_>, i| s.raise(i),
            lower: |s: &mut WalkState<'_>, i| s.lower(i),
        };
        let count = walk.run(|s, ideal| {
            let view = MembraneView {
                frag: self,
                ideal,
                present: &s.present,
                mult: &s.mult,
                hash: s.hash,
            };
            visit(&view)
        })?;
        let state = walk.state;
        Ok(MembraneWalkStats {
            membranes: count,
            effect_violations: state.effect_violations,
            swaps: state.swaps,
        })
    }

    /// Enumerates all membranes and checks the vertex-set invariants.
    pub fn scan(&self, limit: usize) -> Result<MembraneScan> {
        let odd = self.d % 2 == 1;
        let r = self.d - 2;
        let expected_size = if self.d >= 3 {
            Some(s_formula(self.n, r))
        } else {
            None
        };
        let mut distinct: HashMap<u64, Vec<Subset>> = HashMap::new();
        let mut violations = Vec::new();
        let mut sizes: BTreeSet<usize> = BTreeSet::new();
        let check_weak = |v: &[Subset]| -> Option<(Subset, Subset)> {
            if self.d < 3 {
                return None;
            }
            let pred = if odd {
                PairwisePredicate::WeakOdd(r)
            } else {
                PairwisePredicate::WeakEven(r)
            };
            let sys = SetSystem::new(
                GroundSet::new(self.n).expect("n checked"),
                v.iter().copied(),
            )
            .expect("inside [n]");
            check_pairwise(&sys, pred).violation
        };
        let mut weak_failures = 0usize;
        let mut effect_violations = Vec::new();
        let mut seen_swaps = HashSet::new();
        let mut swaps: Vec<Swap> = Vec::new();
        let stats = self.for_each_membrane(limit, |m| {
            if let std::collections::hash_map::Entry::Vacant(e) = distinct.entry(m.hash) {
                let v = m.vertices();
                sizes.insert(v.len());
                if odd || self.flavor == Flavor::E {
                    if let Some((a, b)) = check_weak(&v) {
                        weak_failures += 1;
                        if violations.len() < 20 {
                            violations.push(format!("ideal {:?}: {a} and {b} are not weakly {r}-separated", m.ideal()));
                        }
                    }
                    if let Some(want) = expected_size {
                        if v.len() as u128 != want {
                            violations.push(format!("ideal {:?}: {} vertices, expected {want}", m.ideal(), v.len()));
                        }
                    }
                }
                e.insert(v);
            } else if distinct[&m.hash] != m.vertices() {
                return Err(Error::Falsified("vertex-set hash collision".into()));
            }
            for i in 0..self.len() {
                let Some((gone, appeared)) = m.raise_effect(i) else { continue };
                let observed = match (gone.as_slice(), appeared.as_slice()) {
                    ([], []) => Some(None),
                    ([t], [h]) => Some(Some((*t, *h))),
                    _ => None,
                };
                if let Some(want) = self.expected_effect(i) {
                    if observed != Some(want) && effect_violations.len() < 20 {
                        effect_violations.push(format!(
                            "raising {} from {:?} removes {gone:?} and adds {appeared:?}, expected {want:?}",
                            self.pieces[i],
                            m.ideal()
                        ));
                    }
                }
                if let Some(Some((t, h))) = observed {
                    let swap = Swap { before: m.hash, after: m.hash ^ splitmix(t.bits()) ^ splitmix(h.bits()), cube: self.pieces[i].cube };
                    if seen_swaps.insert(swap.clone()) {
                        swaps.push(swap);
                    }
                }
            }
            Ok(ControlFlow::Continue(()))
        })?;
        violations.extend(effect_violations);

        // raising swaps between representable collections: each must be a
        // combinatorial flip, V(front) the only source and V(rear) the only sink
        let front_hash = vertex_hash(&self.base_membrane().vertices().members().to_vec());
        let top_hash = vertex_hash(&self.top_membrane().vertices().members().to_vec());
        let mut has_in: HashSet<u64> = HashSet::new();
        let mut has_out: HashSet<u64> = HashSet::new();
        for s in &swaps {
            has_in.insert(s.after);
            has_out.insert(s.before);
        }
        let mut poset_violations = Vec::new();
        for &h in distinct.keys() {
            if h != front_hash && !has_in.contains(&h) {
                poset_violations.push(format!(
                    "{:?} is a further minimal collection",
                    distinct[&h]
                ));
            }
            if h != top_hash && !has_out.contains(&h) {
                poset_violations.push(format!(
                    "{:?} is a further maximal collection",
                    distinct[&h]
                ));
            }
        }
        violations.extend(poset_violations.into_iter().take(20));
        if odd && self.d >= 3 {
            let ground = GroundSet::new(self.n)?;
            for s in &swaps {
                let before = SetSystem::new(ground, distinct[&s.before].iter().copied())?;
                let after = SetSystem::new(ground, distinct[&s.after].iter().copied())?;
                let site = FlipSite::from_cube(&s.cube)?;
                match apply_flip(&before, &site, Direction::Raise, WitnessMode::Sharp) {
                    Ok(w) if w == after => {}
                    Ok(_) => {
                        violations.push(format!(
                            "swap at {} differs from the combinatorial flip",
                            s.cube
                        ));
                    }
                    Err(e) => {
                        violations.push(format!("swap at {}: {e}", s.cube));
                    }
                }
            }
        }
        Ok(MembraneScan {
            flavor: self.flavor,
            n: self.n,
            d: self.d,
            pieces: self.len(),
            arcs: self.arc_count(),
            membranes: stats.membranes,
            distinct_vertex_sets: distinct.len(),
            vertex_set_sizes: sizes.into_iter().collect(),
            expected_size,
            combinatorial_flips: swaps.len(),
            weak_failures,
            violations,
        })
    }

    /// Raises every piece in topological order, recording the vertex
    /// changes.
    pub fn flip_walk(&self) -> Result<Vec<FlipStep>> {
        let mut m = self.base_membrane();
        let mut steps = Vec::new();
        for i in 0..self.len() {
            let before = m.vertices();
            m = self.raising_flip(&m, i)?;
            let after = m.vertices();
            let removed: Vec<Subset> = before.difference(&after).members().to_vec();
            let added: Vec<Subset> = after.difference(&before).members().to_vec();
            steps.push(FlipStep {
                piece: i,
                fragment: self.pieces[i],
                removed,
                added,
            });
        }
        Ok(steps)
    }
}

/// One raising flip of [`Fragmentation::flip_walk`].
#[derive(Clone, Debug, Serialize)]
pub struct FlipStep {
    pub piece: usize,
    pub fragment: Piece,
    pub removed: Vec<Subset>,
    pub added: Vec<Subset>,
}

/// Vertex-set swap `t_C → h_C` observed during enumeration, keyed by
/// vertex-set hashes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Swap {
    pub before: u64,
    pub after: u64,
    pub cube: Cube,
}

#[derive(Clone, Debug, Default)]
pub struct MembraneWalkStats {
    pub membranes: usize,
    pub effect_violations: Vec<String>,
    /// Distinct vertex-changing raises.
    pub swaps: Vec<Swap>,
}

/// Summary of [`Fragmentation::scan`].
#[derive(Clone, Debug, Serialize)]
pub struct MembraneScan {
    pub flavor: Flavor,
    pub n: usize,
    pub d: usize,
    pub pieces: usize,
    pub arcs: usize,
    pub membranes: usize,
    pub distinct_vertex_sets: usize,
    pub vertex_set_sizes: Vec<usize>,
    pub expected_size: Option<u128>,
    pub combinatorial_flips: usize,
    pub weak_failures: usize,
    pub violations: Vec<String>,
}

impl MembraneScan {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn vertex_hash(v: &[Subset]) -> u64 {
    v.iter().fold(0, |h, x| h ^ splitmix(x.bits()))
}

struct WalkState<'a> {
    frag: &'a Fragmentation,
    present: Vec<bool>,
    mult: Vec<u32>,
    hash: u64,
    effect_violations: Vec<String>,
    seen_swaps: HashSet<Swap>,
    swaps: Vec<Swap>,
}

impl<'a> WalkState<'a> {
    fn new(frag: &'a Fragmentation) -> Self {
        WalkState {
            frag,
            present: vec![false; frag.tiles.len()],
            mult: vec![0; 1 << frag.n],
            hash: 0,
            effect_violations: Vec::new(),
            seen_swaps: HashSet::new(),
            swaps: Vec::new(),
        }
    }

    fn add_tile(&mut self, t: usize) -> Vec<Subset> {
        debug_assert!(!self.present[t]);
        self.present[t] = true;
        let mut appeared = Vec::new();
        for &v in &self.frag.tile_vertices[t] {
            let m = &mut self.mult[v.bits() as usize];
            *m += 1;
            if *m == 1 {
                self.hash ^= splitmix(v.bits());
                appeared.push(v);
            }
        }
        appeared
    }

    fn remove_tile(&mut self, t: usize) -> Vec<Subset> {
        self.present[t] = false;
        let mut gone = Vec::new();
        for &v in &self.frag.tile_vertices[t] {
            let m = &mut self.mult[v.bits() as usize];
            *m -= 1;
            if *m == 0 {
                self.hash ^= splitmix(v.bits());
                gone.push(v);
            }
        }
        gone
    }

    fn raise(&mut self, i: usize) -> Result<()> {
        let frag = self.frag;
        for &t in &frag.front[i] {
            if !self.present[t] {
                return Err(Error::Falsified(format!(
                    "raising {} needs tile {}, which is not on the membrane",
                    frag.pieces[i], frag.tiles[t]
                )));
            }
        }
        for &t in &frag.rear[i] {
            if self.present[t] {
                return Err(Error::Falsified(format!(
                    "raising {} duplicates tile {}",
                    frag.pieces[i], frag.tiles[t]
                )));
            }
        }
        let before = self.hash;
        let mut gone: Vec<Subset> = Vec::new();
        let mut appeared: Vec<Subset> = Vec::new();
        for &t in &frag.front[i] {
            gone.extend(self.remove_tile(t));
        }
        for &t in &frag.rear[i] {
            for v in self.add_tile(t) {
                if let Some(pos) = gone.iter().position(|&g| g == v) {
                    gone.swap_remove(pos);
                } else {
                    appeared.push(v);
                }
            }
        }
        let observed = match (gone.as_slice(), appeared.as_slice()) {
            ([], []) => Some(None),
            ([t], [h]) => Some(Some((*t, *h))),
            _ => None,
        };
        match (frag.expected_effect(i), observed) {
            (None, _) => {}
            (Some(want), Some(got)) if want == got => {}
            (Some(want), _) => {
                if self.effect_violations.len() < 20 {
                    self.effect_violations.push(format!(
                        "raising {} removed {gone:?} and added {appeared:?}, expected {want:?}",
                        frag.pieces[i]
                    ));
                }
            }
        }
        if let Some(Some(_)) = observed {
            let swap = Swap {
                before,
                after: self.hash,
                cube: frag.pieces[i].cube,
            };
            if self.seen_swaps.insert(swap.clone()) {
                self.swaps.push(swap);
            }
        }
        Ok(())
    }

    fn lower(&mut self, i: usize) {
        let frag = self.frag;
        for &t in &frag.rear[i] {
            self.remove_tile(t);
        }
        for &t in &frag.front[i] {
            self.add_tile(t);
        }
    }
}

/// Read-only view of the current membrane during enumeration.
pub struct MembraneView<'a> {
    frag: &'a Fragmentation,
    ideal: &'a [bool],
    present: &'a [bool],
    mult: &'a [u32],
    hash: u64,
}

impl MembraneView<'_> {
    pub fn ideal(&self) -> Vec<usize> {
        (0..self.ideal.len()).filter(|&i| self.ideal[i]).collect()
    }

    pub fn contains_piece(&self, i: usize) -> bool {
        self.ideal[i]
    }

    /// Vertex set in canonical order.
    pub fn vertices(&self) -> Vec<Subset> {
        let mut v: Vec<Subset> = (0..self.mult.len())
            .filter(|&b| self.mult[b] > 0)
            .map(|b| Subset::from_bits(b as u64))
            .collect();
        v.sort_unstable();
        v
    }

    pub fn has_vertex(&self, x: Subset) -> bool {
        self.mult.get(x.bits() as usize).is_some_and(|&m| m > 0)
    }

    /// Order-independent hash of the vertex set.
    pub fn vertex_hash(&self) -> u64 {
        self.hash
    }

    pub fn tiles(&self) -> impl Iterator<Item = Tile> + '_ {
        (0..self.present.len())
            .filter(|&t| self.present[t])
            .map(|t| self.frag.tiles[t])
    }

    pub fn to_membrane(&self) -> Membrane {
        self.frag
            .membrane(self.ideal().into_iter().collect(), self.tiles().collect())
    }

    /// Vertices lost and gained if piece `i` were raised; `None` when `i`
    /// cannot be raised from this ideal.
    pub fn raise_effect(&self, i: usize) -> Option<(Vec<Subset>, Vec<Subset>)> {
        let frag = self.frag;
        if self.ideal[i] || frag.preds[i].iter().any(|&p| !self.ideal[p]) {
            return None;
        }
        let mut delta: HashMap<u64, i64> = HashMap::new();
        for &t in &frag.front[i] {
            for v in &frag.tile_vertices[t] {
                *delta.entry(v.bits()).or_default() -= 1;
            }
        }
        for &t in &frag.rear[i] {
            for v in &frag.tile_vertices[t] {
                *delta.entry(v.bits()).or_default() += 1;
            }
        }
        let (mut gone, mut appeared) = (Vec::new(), Vec::new());
        for (&b, &dv) in &delta {
            let before = self.mult[b as usize] as i64;
            let after = before + dv;
            if before > 0 && after == 0 {
                gone.push(Subset::from_bits(b));
            } else if before == 0 && after > 0 {
                appeared.push(Subset::from_bits(b));
            }
        }
        gone.sort_unstable();
        appeared.sort_unstable();
        Some((gone, appeared))
    }
}

/// A membrane: the ideal of pieces below it and its tiles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membrane {
    pub n: usize,
    pub d: usize,
    pub flavor: Flavor,
    pub ideal: BTreeSet<usize>,
    pub tiles: BTreeSet<Tile>,
}

/// JSON form of a membrane.
#[derive(Clone, Debug, Serialize)]
pub struct MembraneExport {
    pub ideal: Vec<usize>,
    pub tiles: Vec<Tile>,
    pub vertices: Vec<Subset>,
}

impl Membrane {
    pub fn vertices(&self) -> SetSystem {
        let g = GroundSet::new(self.n).expect("n checked");
        SetSystem::new(g, self.tiles.iter().flat_map(Tile::vertices)).expect("inside [n]")
    }

    pub fn export(&self) -> MembraneExport {
        MembraneExport {
            ideal: self.ideal.iter().copied().collect(),
            tiles: self.tiles.iter().copied().collect(),
            vertices: self.vertices().members().to_vec(),
        }
    }
}

pub fn membrane_vertices(m: &Membrane) -> SetSystem {
    m.vertices()
}

/// No tile is the middle section of a cube (`d` even).
pub fn is_e_membrane(m: &Membrane) -> bool {
    m.d % 2 == 0
        && !m
            .tiles
            .iter()
            .any(|t| matches!(*t, Tile::H { h, .. } if 2 * h == m.d))
}

/// For every cube, at most one of `t_C`, `h_C` is a vertex of `m`.
pub fn meets_at_most_one_apex(q: &Cubillage, m: &Membrane) -> bool {
    let v = m.vertices();
    q.cubes.iter().all(|c| {
        let (t, h) = apex_vertices(c);
        !(v.contains(t) && v.contains(h))
    })
}

/// All pairs of `s` forming a double `r`-comb.
pub fn double_comb_scan(s: &SetSystem, r: usize) -> Vec<(Subset, Subset)> {
    let m = s.members();
    let mut out = Vec::new();
    for (i, &a) in m.iter().enumerate() {
        for &b in &m[i + 1..] {
            if is_double_r_comb(a, b, r) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Outcome of [`property_p_scan`].
#[derive(Clone, Debug, Serialize)]
pub struct PropertyPReport {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub e_membranes: usize,
    pub distinct_vertex_sets: usize,
    pub expected_size: u128,
    /// Double combs found on e-membranes (none expected).
    pub combs: Vec<(Vec<usize>, Subset, Subset)>,
    pub violations: Vec<String>,
}

impl PropertyPReport {
    pub fn ok(&self) -> bool {
        self.combs.is_empty() && self.violations.is_empty()
    }
}

/// Scans every e-membrane of `q` (even `d`, `r = d − 2`) for double
/// `r`-combs and for failures of weak `r`-separation and of the size
/// `s(n, r)`.
pub fn property_p_scan(q: &Cubillage, limit: usize) -> Result<PropertyPReport> {
    if q.d % 2 == 1 || q.d < 4 {
        return Err(Error::Params(format!(
            "property (P) scans need even d >= 4, got d = {}",
            q.d
        )));
    }
    let r = q.d - 2;
    let frag = enlarged_fragmentation(q)?;
    let ground = GroundSet::new(q.n)?;
    let expected_size = s_formula(q.n, r);
    let mut seen: HashSet<u64> = HashSet::new();
    let mut combs = Vec::new();
    let mut violations = Vec::new();
    let stats = frag.for_each_membrane(limit, |m| {
        if !seen.insert(m.vertex_hash()) {
            return Ok(ControlFlow::Continue(()));
        }
        let v = SetSystem::new(ground, m.vertices())?;
        for (a, b) in double_comb_scan(&v, r) {
            combs.push((m.ideal(), a, b));
        }
        if let Some((a, b)) = check_pairwise(&v, PairwisePredicate::WeakEven(r)).violation {
            violations.push(format!(
                "ideal {:?}: {a} and {b} are not weakly {r}-separated",
                m.ideal()
            ));
        }
        if v.len() as u128 != expected_size {
            violations.push(format!(
                "ideal {:?}: {} vertices, expected {expected_size}",
                m.ideal(),
                v.len()
            ));
        }
        if m.tiles()
            .any(|t| matches!(t, Tile::H { h, .. } if 2 * h == q.d))
        {
            violations.push(format!("ideal {:?}: a middle section is a tile", m.ideal()));
        }
        Ok(ControlFlow::Continue(()))
    })?;
    violations.extend(stats.effect_violations);
    Ok(PropertyPReport {
        n: q.n,
        d: q.d,
        r,
        e_membranes: stats.membranes,
        distinct_vertex_sets: seen.len(),
        expected_size,
        combs,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubillage::{anti_standard_cubillage, standard_cubillage};
    use crate::geometry::front_rear_vertices;

    fn s(e: &[usize]) -> Subset {
        Subset::of(e)
    }

    fn all_ideals(f: &Fragmentation) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        f.for_each_membrane(usize::MAX, |m| {
            out.push(m.ideal());
            Ok(ControlFlow::Continue(()))
        })
        .unwrap();
        out
    }

    #[test]
    fn tiles_and_degeneracy() {
        let c = Cell {
            root: Subset::EMPTY,
            typ: s(&[1, 2, 3]),
        };
        let p1 = Piece {
            cube: c,
            lo: 1,
            hi: 1,
        };
        assert!(p1.eps_front().iter().all(|t| !t.is_horizontal()));
        assert!(p1.eps_rear().contains(&Tile::H {
            root: Subset::EMPTY,
            typ: s(&[1, 2, 3]),
            h: 1
        }));
        let p3 = Piece {
            cube: c,
            lo: 3,
            hi: 3,
        };
        assert!(p3.eps_rear().iter().all(|t| !t.is_horizontal()));
        assert_eq!(
            Tile::V {
                root: s(&[2]),
                typ: s(&[1, 3]),
                level: 2
            }
            .vertices(),
            vec![s(&[1, 2]), s(&[2, 3]), s(&[1, 2, 3])]
        );
    }

    #[test]
    fn sides_cover_each_nondegenerate_facet_once() {
        for d in 2..=5 {
            let cube = Cell {
                root: s(&[9]),
                typ: Subset::interval(1, d),
            };
            for h in 1..=d {
                let p = Piece { cube, lo: h, hi: h };
                let (f, r) = (p.eps_front(), p.eps_rear());
                assert!(f.iter().all(|t| !r.contains(t)));
                let vertical = f
                    .iter()
                    .chain(r.iter())
                    .filter(|t| !t.is_horizontal())
                    .count();
                // F_{h,i} is degenerate for h = d, G_{h,i} for h = 1
                let want = if d == 1 {
                    0
                } else {
                    (if h < d { d } else { 0 }) + (if h > 1 { d } else { 0 })
                };
                assert_eq!(vertical, want, "d={d} h={h}");
                let mut vs: HashSet<Subset> = HashSet::new();
                for t in f.iter().chain(r.iter()) {
                    vs.extend(t.vertices());
                }
                let mut got: Vec<Subset> = vs.into_iter().collect();
                got.sort_unstable();
                assert_eq!(got, p.vertices());
            }
        }
    }

    #[test]
    fn trivial_cubillage_is_a_chain() {
        let q = standard_cubillage(3, 3).unwrap();
        let f = fragments(&q).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.arc_count(), 2);
        assert!((0..3).all(|i| f.pieces()[i].lo == i + 1));
        assert_eq!(all_ideals(&f).len(), 4);

        let q4 = standard_cubillage(4, 4).unwrap();
        let e = enlarged_fragmentation(&q4).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(all_ideals(&e).len(), 4);
    }

    #[test]
    fn fragment_counts_and_heights() {
        for (n, d) in [(4, 3), (5, 3), (5, 4), (6, 3)] {
            let q = standard_cubillage(n, d).unwrap();
            let f = fragments(&q).unwrap();
            assert_eq!(f.len(), d * q.cubes.len());
            for b in 0..f.len() {
                for &a in f.preds(b) {
                    assert!(a < b);
                    assert!(f.pieces()[a].height2() <= f.pieces()[b].height2() + 1);
                }
            }
        }
    }

    #[test]
    fn base_and_top() {
        for (n, d) in [(4, 3), (5, 3), (6, 5)] {
            let q = standard_cubillage(n, d).unwrap();
            let f = fragments(&q).unwrap();
            let fr = front_rear_vertices(n, d).unwrap();
            assert_eq!(f.base_membrane().vertices(), fr.front);
            assert_eq!(f.membrane_from_ideal(&[]).unwrap(), f.base_membrane());
            let all: Vec<usize> = (0..f.len()).collect();
            let top = f.membrane_from_ideal(&all).unwrap();
            assert_eq!(top.tiles, f.top_membrane().tiles);
            assert_eq!(top.vertices(), fr.rear);
        }
    }

    #[test]
    fn flips_and_ideals() {
        let q = standard_cubillage(4, 3).unwrap();
        let f = fragments(&q).unwrap();
        let base = f.base_membrane();
        let first = (0..f.len()).find(|&i| f.preds(i).is_empty()).unwrap();
        let up = f.raising_flip(&base, first).unwrap();
        assert_eq!(f.lowering_flip(&up, first).unwrap(), base);
        let blocked = (0..f.len()).find(|&i| !f.preds(i).is_empty()).unwrap();
        assert!(matches!(
            f.raising_flip(&base, blocked),
            Err(Error::FlipPrecondition(_))
        ));
        assert!(matches!(
            f.membrane_from_ideal(&[blocked]),
            Err(Error::NotIdeal(_))
        ));
    }

    #[test]
    fn replay_matches_the_direct_rule_and_lattice_laws() {
        for q in [
            standard_cubillage(4, 3).unwrap(),
            anti_standard_cubillage(5, 3).unwrap(),
            standard_cubillage(5, 4).unwrap(),
        ] {
            let f = fragments(&q).unwrap();
            let ideals = all_ideals(&f);
            let mut by_ideal = HashMap::new();
            for i in &ideals {
                let m = f.membrane_from_ideal(i).unwrap();
                assert_eq!(m, f.membrane_by_rule(i).unwrap());
                let mut keys: Vec<Vec<Subset>> = m.tiles.iter().map(Tile::vertices).collect();
                let total = keys.len();
                keys.sort();
                keys.dedup();
                assert_eq!(keys.len(), total);
                by_ideal.insert(i.clone(), m);
            }
            for a in ideals.iter().take(40) {
                for b in ideals.iter().take(40) {
                    let sa: BTreeSet<usize> = a.iter().copied().collect();
                    let sb: BTreeSet<usize> = b.iter().copied().collect();
                    let meet: Vec<usize> = sa.intersection(&sb).copied().collect();
                    let join: Vec<usize> = sa.union(&sb).copied().collect();
                    assert!(by_ideal.contains_key(&meet) && by_ideal.contains_key(&join));
                }
            }
        }
    }

    #[test]
    fn w_membranes_of_small_odd_cubillages() {
        for (n, d) in [(4, 3), (5, 3), (5, 5), (6, 5)] {
            for q in [
                standard_cubillage(n, d).unwrap(),
                anti_standard_cubillage(n, d).unwrap(),
            ] {
                let scan = fragments(&q).unwrap().scan(DEFAULT_IDEAL_LIMIT).unwrap();
                assert!(scan.ok(), "({n},{d}) {:?}", scan.violations);
                assert_eq!(scan.vertex_set_sizes, vec![s_formula(n, d - 2) as usize]);
            }
        }
    }

    #[test]
    fn e_membranes_of_z44() {
        let q = standard_cubillage(4, 4).unwrap();
        let e = enlarged_fragmentation(&q).unwrap();
        let ideals = all_ideals(&e);
        assert_eq!(ideals.len(), 4);
        for i in &ideals {
            let m = e.membrane_from_ideal(i).unwrap();
            assert!(is_e_membrane(&m));
            assert!(double_comb_scan(&m.vertices(), 2).is_empty());
        }
        let report = property_p_scan(&q, 100).unwrap();
        assert!(report.ok(), "{report:?}");
        assert_eq!(report.e_membranes, 4);

        // through both middle sections: the w-membrane with the middle
        // section as a tile contains the comb {1,3},{2,4}
        let f = fragments(&q).unwrap();
        let m = f.membrane_from_ideal(&[0, 1]).unwrap();
        assert!(!is_e_membrane(&m));
        let v = m.vertices();
        assert_eq!(double_comb_scan(&v, 2), vec![(s(&[1, 3]), s(&[2, 4]))]);
        assert!(check_pairwise(&v, PairwisePredicate::WeakEven(2)).ok);
    }

    #[test]
    fn e_membrane_characterizations_agree() {
        for q in [
            standard_cubillage(4, 4).unwrap(),
            standard_cubillage(5, 4).unwrap(),
            anti_standard_cubillage(5, 4).unwrap(),
        ] {
            let f = fragments(&q).unwrap();
            f.for_each_membrane(usize::MAX, |view| {
                let m = view.to_membrane();
                assert_eq!(
                    is_e_membrane(&m),
                    meets_at_most_one_apex(&q, &m),
                    "{:?}",
                    m.ideal
                );
                Ok(ControlFlow::Continue(()))
            })
            .unwrap();
            // every e-membrane is a w-membrane
            let e = enlarged_fragmentation(&q).unwrap();
            e.for_each_membrane(usize::MAX, |view| {
                let m = view.to_membrane();
                let ideal: Vec<usize> = m
                    .ideal
                    .iter()
                    .flat_map(|&i| {
                        let p = e.pieces()[i];
                        (p.lo..=p.hi).map(move |h| Piece {
                            cube: p.cube,
                            lo: h,
                            hi: h,
                        })
                    })
                    .map(|p| f.pieces().iter().position(|x| *x == p).unwrap())
                    .collect();
                assert_eq!(f.membrane_from_ideal(&ideal).unwrap().tiles, m.tiles);
                Ok(ControlFlow::Continue(()))
            })
            .unwrap();
        }
    }

    #[test]
    fn property_p_on_five_four() {
        for q in [
            standard_cubillage(5, 4).unwrap(),
            anti_standard_cubillage(5, 4).unwrap(),
        ] {
            let report = property_p_scan(&q, DEFAULT_IDEAL_LIMIT).unwrap();
            assert!(report.ok(), "{report:?}");
            assert_eq!(report.expected_size, s_formula(5, 2));
        }
        assert!(property_p_scan(&standard_cubillage(4, 3).unwrap(), 10).is_err());
    }

    #[test]
    fn flip_walk_swaps_apexes_at_the_middle_slab() {
        let q = standard_cubillage(5, 3).unwrap();
        let f = fragments(&q).unwrap();
        for step in f.flip_walk().unwrap() {
            let (t, h) = apex_vertices(&step.fragment.cube);
            if step.fragment.lo == 2 {
                assert_eq!(
                    (step.removed.as_slice(), step.added.as_slice()),
                    ([t].as_slice(), [h].as_slice())
                );
            } else {
                assert!(step.removed.is_empty() && step.added.is_empty());
            }
        }
    }

    #[test]
    fn membrane_json() {
        let q = standard_cubillage(3, 3).unwrap();
        let f = fragments(&q).unwrap();
        let m = f.membrane_from_ideal(&[0]).unwrap();
        let json = serde_json::to_value(m.export()).unwrap();
        assert_eq!(json["ideal"], serde_json::json!([0]));
        assert!(json["tiles"]
            .as_array()
            .unwrap()
            .iter()
            .any(|t| t["kind"] == "H"));
        assert!(f.to_dot().contains("0 -> 1"));
    }
}
