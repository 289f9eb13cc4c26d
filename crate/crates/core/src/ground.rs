//! Ground-set arithmetic: subsets of `[n]` as bit masks, interval
//! decompositions and interval corteges.
//!
//! Elements are 1-indexed: element `i` lives in bit `i - 1`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 64;

/// The ground set `[n] = {1, ..., n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::GroundSize(n));
        }
        Ok(GroundSet { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn full(&self) -> Subset {
        Subset(low_mask(self.n))
    }

    #[inline]
    pub fn complement(&self, x: Subset) -> Subset {
        Subset(!x.0 & low_mask(self.n))
    }

    /// True iff `x` has no element outside `[n]`.
    #[inline]
    pub fn contains(&self, x: Subset) -> bool {
        x.0 & !low_mask(self.n) == 0
    }

    pub fn check(&self, x: Subset) -> Result<Subset> {
        if self.contains(x) {
            Ok(x)
        } else {
            Err(Error::OutsideGround {
                subset: x,
                n: self.n,
            })
        }
    }

    /// `min(x)` with the convention `min(∅) = n + 1`.
    pub fn min_of(&self, x: Subset) -> usize {
        x.min().unwrap_or(self.n + 1)
    }

    /// `max(x)` with the convention `max(∅) = 0`.
    pub fn max_of(&self, x: Subset) -> usize {
        x.max().unwrap_or(0)
    }

    /// All `2^n` subsets in canonical order (cardinality, then bit value).
    ///
    /// Panics if `n` is too large for the subsets to be materialized.
    pub fn subsets(&self) -> Vec<Subset> {
        assert!(self.n <= 30, "refusing to enumerate 2^{} subsets", self.n);
        let mut all: Vec<Subset> = (0..(1u64 << self.n)).map(Subset).collect();
        all.sort_unstable();
        all
    }

    /// All `k`-element subsets in canonical order.
    pub fn k_subsets(&self, k: usize) -> Vec<Subset> {
        let mut out = Vec::new();
        if k > self.n {
            return out;
        }
        if k == 0 {
            out.push(Subset::EMPTY);
            return out;
        }
        // Gosper's hack walks k-subsets in increasing numeric order.
        let full = self.full().0;
        let mut x: u64 = low_mask(k);
        loop {
            out.push(Subset(x));
            let c = x & x.wrapping_neg();
            let (r, overflow) = x.overflowing_add(c);
            if overflow {
                break;
            }
            let next = (((r ^ x) >> 2) / c) | r;
            if next & !full != 0 {
                break;
            }
            x = next;
        }
        out
    }
}

#[inline]
pub(crate) fn low_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// A subset of the ground set, stored as a bit mask.
///
/// The total order is the canonical one used everywhere for reproducible
/// output: by cardinality first, then by numeric bit value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Builds a subset from 1-indexed elements.
    pub fn from_elems<I: IntoIterator<Item = usize>>(elems: I) -> Result<Self> {
        let mut bits = 0u64;
        for e in elems {
            if e == 0 || e > MAX_N {
                return Err(Error::BadElement(e));
            }
            bits |= 1u64 << (e - 1);
        }
        Ok(Subset(bits))
    }

    /// Shorthand for tests and fixed instances; panics on bad elements.
    pub fn of(elems: &[usize]) -> Self {
        Self::from_elems(elems.iter().copied()).expect("valid elements")
    }

    /// The interval `[a, b]`.
    pub fn interval(a: usize, b: usize) -> Self {
        assert!(1 <= a && a <= b && b <= MAX_N);
        Subset(low_mask(b) & !low_mask(a - 1))
    }

    #[inline]
    pub fn singleton(e: usize) -> Self {
        debug_assert!(e >= 1 && e <= MAX_N);
        Subset(1u64 << (e - 1))
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, e: usize) -> bool {
        e >= 1 && e <= MAX_N && self.0 >> (e - 1) & 1 == 1
    }

    #[inline]
    pub fn with(self, e: usize) -> Self {
        self | Subset::singleton(e)
    }

    #[inline]
    pub fn without(self, e: usize) -> Self {
        self - Subset::singleton(e)
    }

    #[inline]
    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }

    /// Elements in increasing order.
    pub fn elements(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.elements().collect()
    }

    /// All subsets of `self`, in increasing numeric order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let m = self.0;
        let mut cur = Some(0u64);
        std::iter::from_fn(move || {
            let s = cur?;
            cur = if s == m {
                None
            } else {
                Some(((s | !m).wrapping_add(1)) & m)
            };
            Some(Subset(s))
        })
    }

    /// Number of maximal runs of consecutive elements; the `k` of "k-interval".
    #[inline]
    pub fn interval_count(self) -> usize {
        (self.0 & !(self.0 << 1)).count_ones() as usize
    }

    /// Compact form such as `1346` (used for small ground sets).
    pub fn compact(self) -> String {
        if self.is_empty() {
            return "∅".to_string();
        }
        self.elements()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(if self.max().unwrap_or(0) >= 10 {
                ","
            } else {
                ""
            })
    }
}

pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize + 1;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Elements {}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .count_ones()
            .cmp(&other.0.count_ones())
            .then(self.0.cmp(&other.0))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl BitOr for Subset {
    type Output = Subset;
    #[inline]
    fn bitor(self, rhs: Subset) -> Subset {
        Subset(self.0 | rhs.0)
    }
}

impl BitAnd for Subset {
    type Output = Subset;
    #[inline]
    fn bitand(self, rhs: Subset) -> Subset {
        Subset(self.0 & rhs.0)
    }
}

impl BitXor for Subset {
    type Output = Subset;
    #[inline]
    fn bitxor(self, rhs: Subset) -> Subset {
        Subset(self.0 ^ rhs.0)
    }
}

impl Sub for Subset {
    type Output = Subset;
    #[inline]
    fn sub(self, rhs: Subset) -> Subset {
        Subset(self.0 & !rhs.0)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `1,2,6`, `{1,2,6}`, `[1,2,6]`, `126` (single digits) or `∅`/empty.
impl FromStr for Subset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s
            .trim()
            .trim_matches(|c| matches!(c, '{' | '}' | '[' | ']'))
            .trim();
        if t.is_empty() || t == "∅" || t == "-" {
            return Ok(Subset::EMPTY);
        }
        let parts: Vec<&str> = if t.contains(',') || t.contains(' ') {
            t.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|p| !p.is_empty())
                .collect()
        } else {
            t.split("").filter(|p| !p.is_empty()).collect()
        };
        let mut elems = Vec::with_capacity(parts.len());
        for p in parts {
            let e: usize = p.parse().map_err(|_| Error::Parse(s.to_string()))?;
            elems.push(e);
        }
        Subset::from_elems(elems)
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let elems = Vec::<usize>::deserialize(deserializer)?;
        Subset::from_elems(elems).map_err(serde::de::Error::custom)
    }
}

/// A closed interval `[lo, hi]` of the ground set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_subset(&self) -> Subset {
        Subset::interval(self.lo, self.hi)
    }
}

/// Maximal runs of `x`, in increasing order.
pub fn interval_decomposition(x: Subset) -> Vec<Interval> {
    let mut out = Vec::with_capacity(x.interval_count());
    let mut rest = x.bits();
    while rest != 0 {
        let lo = rest.trailing_zeros() as usize;
        // length of the run of ones starting at `lo`
        let run = (!(rest >> lo)).trailing_zeros() as usize;
        out.push(Interval {
            lo: lo + 1,
            hi: lo + run,
        });
        rest &= !(low_mask(lo + run) & !low_mask(lo));
    }
    out
}

/// Which difference a cortege interval covers: `A` for `A − B`, `B` for `B − A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Brick {
    pub lo: usize,
    pub hi: usize,
    pub side: Side,
}

impl Brick {
    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }
}

/// The interval cortege of a pair `(A, B)`: alternating bricks covering
/// `A − B` and `B − A`, with the fewest intervals and least total length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cortege {
    bricks: Vec<Brick>,
}

impl Cortege {
    pub fn bricks(&self) -> &[Brick] {
        &self.bricks
    }

    pub fn len(&self) -> usize {
        self.bricks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bricks.is_empty()
    }

    pub fn first_side(&self) -> Option<Side> {
        self.bricks.first().map(|b| b.side)
    }

    pub fn last_side(&self) -> Option<Side> {
        self.bricks.last().map(|b| b.side)
    }

    /// Number of bricks on the given side.
    pub fn count(&self, side: Side) -> usize {
        self.bricks.iter().filter(|b| b.side == side).count()
    }

    /// The brick containing element `e`, if any.
    pub fn brick_of(&self, e: usize) -> Option<&Brick> {
        self.bricks.iter().find(|b| b.lo <= e && e <= b.hi)
    }
}

impl fmt::Display for Cortege {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.bricks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let s = match b.side {
                Side::A => "A",
                Side::B => "B",
            };
            if b.lo == b.hi {
                write!(f, "{{{}}}_{}", b.lo, s)?;
            } else {
                write!(f, "[{},{}]_{}", b.lo, b.hi, s)?;
            }
        }
        write!(f, ")")
    }
}

/// Merges `A − B` and `B − A` in increasing order and emits one brick per
/// maximal block of same-side elements, spanning the block's min and max.
pub fn interval_cortege(a: Subset, b: Subset) -> Cortege {
    let mut bricks: Vec<Brick> = Vec::new();
    for e in (a ^ b).elements() {
        let side = if a.contains(e) { Side::A } else { Side::B };
        match bricks.last_mut() {
            Some(last) if last.side == side => last.hi = e,
            _ => bricks.push(Brick { lo: e, hi: e, side }),
        }
    }
    Cortege { bricks }
}

/// Number of intervals in the cortege of `(A, B)`.
#[inline]
pub fn interlacing_degree(a: Subset, b: Subset) -> usize {
    let diff = (a ^ b).bits();
    if diff == 0 {
        return 0;
    }
    // Compress A's bits onto the positions of the symmetric difference, then
    // count side changes between consecutive difference elements.
    let mut changes = 0usize;
    let mut rest = diff;
    let mut prev = a.bits() >> rest.trailing_zeros() & 1;
    rest &= rest - 1;
    while rest != 0 {
        let cur = a.bits() >> rest.trailing_zeros() & 1;
        changes += (cur != prev) as usize;
        prev = cur;
        rest &= rest - 1;
    }
    changes + 1
}
