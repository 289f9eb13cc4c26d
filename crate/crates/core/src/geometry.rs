//! Exact cyclic configurations and zonotope vertex tests.
//!
//! Every vector of a Veronese configuration is integral, so all arithmetic
//! runs over `BigInt` with fraction-free elimination; there is no floating
//! point anywhere in here.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ground::{low_mask, GroundSet, Subset};
use crate::systems::SetSystem;

/// Largest `n` for which [`boundary_vertices`] scans all of `2^[n]`.
pub const VERTEX_ENUMERATION_BOUND: usize = 20;

/// A configuration `ξ_1, …, ξ_n` in `R^d` with `ξ_i = (1, t_i, …, t_i^{d−1})`
/// and all flag minors positive.
#[derive(Clone, PartialEq, Eq)]
pub struct CyclicConfiguration {
    d: usize,
    t: Vec<i64>,
    vectors: Vec<Vec<BigInt>>,
}

#[derive(Serialize)]
struct ConfigJson<'a> {
    n: usize,
    d: usize,
    t: &'a [i64],
}

impl Serialize for CyclicConfiguration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConfigJson {
            n: self.n(),
            d: self.d,
            t: &self.t,
        }
        .serialize(s)
    }
}

impl fmt::Debug for CyclicConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CyclicConfiguration(n={}, d={}, t={:?})",
            self.n(),
            self.d,
            self.t
        )
    }
}

impl CyclicConfiguration {
    /// The Veronese configuration `t_i = i`, `2 ≤ d ≤ n`.
    pub fn veronese(n: usize, d: usize) -> Result<Self> {
        if d < 2 || d > n {
            return Err(Error::Params(format!(
                "veronese needs 2 <= d <= n, got n={n}, d={d}"
            )));
        }
        Self::lifted(n, d)
    }

    /// Veronese configuration without the `d ≤ n` restriction; used for the
    /// `(d+1)`-dimensional lift behind standard cubillages.
    pub(crate) fn lifted(n: usize, d: usize) -> Result<Self> {
        GroundSet::new(n)?;
        Self::from_parameters((1..=n as i64).collect(), d)
    }

    /// Configuration on custom curve parameters; rejected unless every flag
    /// minor is positive.
    pub fn from_parameters(t: Vec<i64>, d: usize) -> Result<Self> {
        if d == 0 || t.is_empty() || t.len() > 64 {
            return Err(Error::Params(format!(
                "need d >= 1 and 1..=64 parameters, got d={d}, {}",
                t.len()
            )));
        }
        let vectors = t
            .iter()
            .map(|&ti| {
                let mut v = Vec::with_capacity(d);
                let mut p = BigInt::one();
                for _ in 0..d {
                    v.push(p.clone());
                    p *= ti;
                }
                v
            })
            .collect();
        let config = CyclicConfiguration { d, t, vectors };
        config.validate_flag_minors()?;
        Ok(config)
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn parameters(&self) -> &[i64] {
        &self.t
    }

    /// `ξ_i`, 1-indexed.
    pub fn vector(&self, i: usize) -> &[BigInt] {
        &self.vectors[i - 1]
    }

    /// Checks that the minor on rows `1..=k` and any `k` columns is positive.
    fn validate_flag_minors(&self) -> Result<()> {
        let n = self.n();
        let g = GroundSet::new(n)?;
        for k in 1..=self.d.min(n) {
            for cols in g.k_subsets(k) {
                let m: Vec<Vec<BigInt>> = (0..k)
                    .map(|row| {
                        cols.elements()
                            .map(|c| self.vectors[c - 1][row].clone())
                            .collect()
                    })
                    .collect();
                if !determinant(m).is_positive() {
                    return Err(Error::NotCyclic(format!(
                        "flag minor on rows 1..={k}, columns {cols} is not positive"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `Σ_{i∈X} ξ_i`.
    pub fn point_of(&self, x: Subset) -> ZonotopePoint {
        let mut coords = vec![BigInt::zero(); self.d];
        for i in x.elements() {
            for (c, v) in coords.iter_mut().zip(self.vector(i)) {
                *c += v;
            }
        }
        ZonotopePoint {
            coords,
            subset: Some(x),
        }
    }

    /// Sign of `det[ξ_{c_1}, …, ξ_{c_d}]` for the given columns (in order).
    pub fn orientation(&self, cols: &[usize]) -> Ordering {
        assert_eq!(cols.len(), self.d, "need exactly d columns");
        let m = (0..self.d)
            .map(|row| {
                cols.iter()
                    .map(|&c| self.vectors[c - 1][row].clone())
                    .collect()
            })
            .collect();
        determinant(m).sign_cmp()
    }

    /// Normal `ν` of the hyperplane spanned by `{ξ_u : u ∈ U}`, `|U| = d − 1`,
    /// with `ν·v = det[ξ_U, v]` (columns of `U` in increasing order). Its last
    /// coordinate is positive.
    pub fn facet_normal(&self, u: Subset) -> Result<Vec<BigInt>> {
        if u.len() + 1 != self.d || u.max().is_some_and(|m| m > self.n()) {
            return Err(Error::Params(format!(
                "facet type {u} needs d-1 = {} elements of [{}]",
                self.d - 1,
                self.n()
            )));
        }
        let cols: Vec<usize> = u.elements().collect();
        let d = self.d;
        let mut nu = Vec::with_capacity(d);
        for j in 0..d {
            // cofactor of entry (j, d-1) in [ξ_U | e_j]
            let minor: Vec<Vec<BigInt>> = (0..d)
                .filter(|&row| row != j)
                .map(|row| {
                    cols.iter()
                        .map(|&c| self.vectors[c - 1][row].clone())
                        .collect()
                })
                .collect();
            let det = if minor.is_empty() {
                BigInt::one()
            } else {
                determinant(minor)
            };
            nu.push(if (j + d - 1) % 2 == 0 { det } else { -det });
        }
        if nu.iter().all(Zero::is_zero) {
            return Err(Error::Degenerate(u));
        }
        Ok(nu)
    }

    /// Root of the boundary facet of `Z(n, d)` with type `U` on the given
    /// side, read off the sign of `ν·ξ_i`: the rear (upper) facet collects
    /// the `i ∉ U` with `ν·ξ_i > 0`, the front one those with `ν·ξ_i < 0`.
    pub fn boundary_facet_root(&self, u: Subset, side: Side) -> Result<Subset> {
        let nu = self.facet_normal(u)?;
        let mut root = Subset::EMPTY;
        for i in 1..=self.n() {
            if u.contains(i) {
                continue;
            }
            let dot: BigInt = nu.iter().zip(self.vector(i)).map(|(a, b)| a * b).sum();
            let keep = match side {
                Side::Rear => dot.is_positive(),
                Side::Front => dot.is_negative(),
            };
            if dot.is_zero() {
                return Err(Error::Degenerate(u));
            }
            if keep {
                root = root.with(i);
            }
        }
        Ok(root)
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let k = m.len();
    if k == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for p in 0..k - 1 {
        if m[p][p].is_zero() {
            match (p + 1..k).find(|&r| !m[r][p].is_zero()) {
                Some(r) => {
                    m.swap(p, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let v = (&m[i][j] * &m[p][p] - &m[i][p] * &m[p][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[p][p].clone();
    }
    sign * &m[k - 1][k - 1]
}

/// A point of a zonotope; `subset` is set when the point is `Σ_{i∈X} ξ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZonotopePoint {
    pub coords: Vec<BigInt>,
    pub subset: Option<Subset>,
}

impl ZonotopePoint {
    /// First coordinate, `|X|` for subset points.
    pub fn height(&self) -> &BigInt {
        &self.coords[0]
    }
}

impl Serialize for ZonotopePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // integers too wide for i64 fall back to decimal strings
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for c in &self.coords {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

/// A cell `(X | T)` of a zonotopal tiling: the parallelotope with vertices
/// `X ∪ A`, `A ⊆ T`. Used both for cubes (`|T| = d`) and facets
/// (`|T| = d − 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub root: Subset,
    #[serde(rename = "type")]
    pub typ: Subset,
}

impl Cell {
    pub fn new(root: Subset, typ: Subset) -> Result<Self> {
        if !root.is_disjoint(typ) {
            return Err(Error::Cube {
                root,
                typ,
                reason: "root and type intersect".into(),
            });
        }
        Ok(Cell { root, typ })
    }

    pub fn dim(&self) -> usize {
        self.typ.len()
    }

    /// All `X ∪ A`, `A ⊆ T`, in canonical order.
    pub fn vertices(&self) -> Vec<Subset> {
        let mut v: Vec<Subset> = self.typ.subsets().map(|a| self.root | a).collect();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = if self.root.is_empty() {
            "∅".to_string()
        } else {
            self.root.compact()
        };
        write!(f, "({r}|{})", self.typ.compact())
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Front (lower, seen along the last coordinate) or rear side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Side {
    Front,
    Rear,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Front => Side::Rear,
            Side::Rear => Side::Front,
        }
    }
}

/// Number of positions `i < n` where membership in `X` differs between `i`
/// and `i + 1`.
#[inline]
pub fn sign_changes(x: Subset, n: usize) -> usize {
    let b = x.bits() & low_mask(n);
    ((b ^ (b >> 1)) & low_mask(n.saturating_sub(1))).count_ones() as usize
}

/// `Σ_{i∈X} ξ_i` is a vertex of `Z(n, d)` iff the `±` characteristic
/// sequence of `X` has at most `d − 1` sign changes (a functional `c` gives
/// the polynomial `t ↦ c·ξ(t)` of degree `d − 1`).
#[inline]
pub fn is_zonotope_vertex(x: Subset, n: usize, d: usize) -> bool {
    sign_changes(x, n) < d
}

/// Geometric vertex test: is there `c` with `c·ξ_i > 0` for `i ∈ X` and
/// `c·ξ_i < 0` otherwise? Decided by Fourier–Motzkin elimination.
pub fn is_vertex_geometric(config: &CyclicConfiguration, x: Subset) -> bool {
    let rows: Vec<Vec<BigInt>> = (1..=config.n())
        .map(|i| {
            let v = config.vector(i);
            if x.contains(i) {
                v.to_vec()
            } else {
                v.iter().map(|c| -c).collect()
            }
        })
        .collect();
    strict_homogeneous_feasible(rows)
}

/// Feasibility of `{a·c > 0 : a ∈ rows}` over the rationals.
pub fn strict_homogeneous_feasible(rows: Vec<Vec<BigInt>>) -> bool {
    let Some(dim) = rows.first().map(Vec::len) else {
        return true;
    };
    let mut rows: Vec<Vec<BigInt>> = rows.into_iter().map(normalize).collect();
    for var in 0..dim {
        if rows.iter().any(|r| r.iter().all(Zero::is_zero)) {
            return false;
        }
        let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            match r[var].sign_cmp() {
                Ordering::Greater => pos.push(r),
                Ordering::Less => neg.push(r),
                Ordering::Equal => zero.push(r),
            }
        }
        // rows of one sign only are satisfied by pushing c[var] far enough
        if !pos.is_empty() && !neg.is_empty() {
            for p in &pos {
                for q in &neg {
                    let (a, b) = (p[var].clone(), -q[var].clone());
                    let combo: Vec<BigInt> =
                        p.iter().zip(q).map(|(x, y)| &b * x + &a * y).collect();
                    zero.push(normalize(combo));
                }
            }
        }
        zero.sort();
        zero.dedup();
        rows = zero;
    }
    rows.is_empty()
}

fn normalize(mut row: Vec<BigInt>) -> Vec<BigInt> {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
    row
}

/// `V(Z(n, d))` in canonical order.
pub fn boundary_vertices(n: usize, d: usize) -> Result<SetSystem> {
    if d == 0 || d > n {
        return Err(Error::Params(format!("need 1 <= d <= n, got n={n}, d={d}")));
    }
    if n > VERTEX_ENUMERATION_BOUND {
        return Err(Error::Bound {
            n,
            bound: VERTEX_ENUMERATION_BOUND,
        });
    }
    let g = GroundSet::new(n)?;
    SetSystem::new(
        g,
        g.subsets()
            .into_iter()
            .filter(|&x| is_zonotope_vertex(x, n, d)),
    )
}

/// Front, rear and rim vertex sets of `Z(n, d)` for odd `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontRear {
    pub front: SetSystem,
    pub rear: SetSystem,
    pub rim: SetSystem,
}

/// Closed form for odd `d`: the front vertices are `∅` and the
/// `k`-intervals with `k ≤ (d−1)/2`, the rear ones their complements. The
/// rim is assembled from its own description (the `k`-intervals with
/// `k < (d−1)/2` and the `(d−1)/2`-intervals meeting `{1, n}`), not as an
/// intersection.
pub fn front_rear_vertices(n: usize, d: usize) -> Result<FrontRear> {
    if d % 2 == 0 {
        return Err(Error::Parity {
            what: "front/rear closed form",
            expected: "odd",
            r: d,
        });
    }
    if d > n {
        return Err(Error::Params(format!("need d <= n, got n={n}, d={d}")));
    }
    if n > VERTEX_ENUMERATION_BOUND {
        return Err(Error::Bound {
            n,
            bound: VERTEX_ENUMERATION_BOUND,
        });
    }
    let g = GroundSet::new(n)?;
    let half = (d - 1) / 2;
    let all = g.subsets();
    let front = SetSystem::new(
        g,
        all.iter().copied().filter(|x| x.interval_count() <= half),
    )?;
    let rear = front.complements();
    let touches_end = |x: Subset| x.contains(1) || x.contains(n);
    let rim = SetSystem::new(
        g,
        all.iter().copied().filter(|&x| {
            let k = x.interval_count();
            k < half || (k == half && touches_end(x))
        }),
    )?;
    Ok(FrontRear { front, rear, rim })
}

/// Root of the boundary facet of type `U` on the given side, in closed
/// form: `i ∉ U` goes to the rear root iff an even number of elements of
/// `U` exceed `i`.
pub fn boundary_facet_root(u: Subset, n: usize, side: Side) -> Subset {
    let mut root = Subset::EMPTY;
    for i in 1..=n {
        if u.contains(i) {
            continue;
        }
        let above = (u.bits() >> i).count_ones();
        let rear = above % 2 == 0;
        if rear == (side == Side::Rear) {
            root = root.with(i);
        }
    }
    root
}

/// All boundary facets of `Z(n, d)` on one side: one per `(d−1)`-subset.
pub fn boundary_facets(n: usize, d: usize, side: Side) -> Result<Vec<Cell>> {
    if d == 0 || d > n {
        return Err(Error::Params(format!("need 1 <= d <= n, got n={n}, d={d}")));
    }
    let g = GroundSet::new(n)?;
    Ok(g.k_subsets(d - 1)
        .into_iter()
        .map(|u| Cell {
            root: boundary_facet_root(u, n, side),
            typ: u,
        })
        .collect())
}

/// Vertices of the front or rear side, for any `d`, from its facets.
pub fn side_vertices(n: usize, d: usize, side: Side) -> Result<SetSystem> {
    let g = GroundSet::new(n)?;
    let facets = boundary_facets(n, d, side)?;
    SetSystem::new(g, facets.iter().flat_map(Cell::vertices))
}
