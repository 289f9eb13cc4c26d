//! Pairwise separation predicates: strong `r`-separation, weak
//! `r`-separation (odd and even `r`), surround relations and double combs.
//!
//! The empty-set conventions `max(∅) = 0` and `min(∅) = n + 1` only ever
//! enter through comparisons, so the predicates below do not need `n`: an
//! empty difference compares below (for `max`) or above (for `min`) every
//! element.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::{interlacing_degree, Subset};

#[inline]
fn min_or_top(x: Subset) -> usize {
    x.min().unwrap_or(usize::MAX)
}

#[inline]
fn max_or_zero(x: Subset) -> usize {
    x.max().unwrap_or(0)
}

/// True iff the interlacing degree of `(a, b)` is at most `r + 1`.
#[inline]
pub fn is_strongly_r_separated(a: Subset, b: Subset, r: usize) -> bool {
    interlacing_degree(a, b) <= r + 1
}

/// `A` surrounds `B`: `min(A − B) < min(B − A)` and `max(A − B) > max(B − A)`.
#[inline]
pub fn surrounds(a: Subset, b: Subset) -> bool {
    let (ab, ba) = (a - b, b - a);
    min_or_top(ab) < min_or_top(ba) && max_or_zero(ab) > max_or_zero(ba)
}

/// `A` surrounds `B` from the right: `max(A − B) > max(B − A)`.
#[inline]
pub fn surrounds_from_right(a: Subset, b: Subset) -> bool {
    max_or_zero(a - b) > max_or_zero(b - a)
}

pub(crate) fn weak_odd(a: Subset, b: Subset, r: usize) -> bool {
    let deg = interlacing_degree(a, b);
    if deg <= r + 1 {
        return true;
    }
    if deg > r + 2 {
        return false;
    }
    let (sab, sba) = (surrounds(a, b), surrounds(b, a));
    assert!(
        sab || sba,
        "{a} and {b} are {deg}-interlaced with odd degree but neither surrounds the other"
    );
    (sab && a.len() <= b.len()) || (sba && b.len() <= a.len())
}

pub(crate) fn weak_even(a: Subset, b: Subset, r: usize) -> bool {
    let deg = interlacing_degree(a, b);
    if deg <= r + 1 {
        return true;
    }
    if deg > r + 2 {
        return false;
    }
    (surrounds_from_right(a, b) && a.len() <= b.len())
        || (surrounds_from_right(b, a) && b.len() <= a.len())
}

/// Weak `r`-separation for odd `r`.
pub fn is_weakly_r_separated_odd(a: Subset, b: Subset, r: usize) -> Result<bool> {
    if r % 2 == 0 {
        return Err(Error::Parity {
            what: "weak separation (odd)",
            expected: "odd",
            r,
        });
    }
    Ok(weak_odd(a, b, r))
}

/// Weak `r`-separation for even positive `r`.
pub fn is_weakly_r_separated_even(a: Subset, b: Subset, r: usize) -> Result<bool> {
    if r % 2 == 1 || r == 0 {
        return Err(Error::Parity {
            what: "weak separation (even)",
            expected: "even positive",
            r,
        });
    }
    Ok(weak_even(a, b, r))
}

/// Dispatches on the parity of `r`. `r = 0` is rejected (weak
/// separation is only defined for positive `r`).
pub fn is_weakly_r_separated(a: Subset, b: Subset, r: usize) -> Result<bool> {
    match r {
        0 => Err(Error::Parity {
            what: "weak separation",
            expected: "positive",
            r,
        }),
        r if r % 2 == 1 => Ok(weak_odd(a, b, r)),
        r => Ok(weak_even(a, b, r)),
    }
}

/// `(a, b)` are `(r+2)`-interlaced and `|A △ B| = r + 2`.
#[inline]
pub fn is_double_r_comb(a: Subset, b: Subset, r: usize) -> bool {
    (a ^ b).len() == r + 2 && interlacing_degree(a, b) == r + 2
}

/// A "bad" pair is one that is not weakly `r`-separated.
#[inline]
pub(crate) fn is_bad(a: Subset, b: Subset, r: usize) -> bool {
    if r % 2 == 1 {
        !weak_odd(a, b, r)
    } else {
        !weak_even(a, b, r)
    }
}

/// Everything the engine knows about a pair, for display and JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationVerdict {
    pub degree: usize,
    pub surrounds_ab: bool,
    pub surrounds_ba: bool,
    pub surrounds_right_ab: bool,
    pub surrounds_right_ba: bool,
    pub r: usize,
    pub strongly_separated: bool,
    pub weakly_separated: Option<bool>,
    pub double_comb: bool,
}

pub fn verdict(a: Subset, b: Subset, r: usize) -> SeparationVerdict {
    let v = SeparationVerdict {
        degree: interlacing_degree(a, b),
        surrounds_ab: surrounds(a, b),
        surrounds_ba: surrounds(b, a),
        surrounds_right_ab: surrounds_from_right(a, b),
        surrounds_right_ba: surrounds_from_right(b, a),
        r,
        strongly_separated: is_strongly_r_separated(a, b, r),
        weakly_separated: is_weakly_r_separated(a, b, r).ok(),
        double_comb: is_double_r_comb(a, b, r),
    };
    debug_assert!(a == b || !(v.surrounds_ab && v.surrounds_ba));
    v
}
