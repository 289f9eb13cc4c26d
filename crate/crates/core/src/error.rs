use thiserror::Error;

use crate::ground::Subset;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground set size {0} outside 1..=64")]
    GroundSize(usize),
    #[error("element {0} outside 1..=64")]
    BadElement(usize),
    #[error("subset {subset} has elements outside [{n}]")]
    OutsideGround { subset: Subset, n: usize },
    #[error("cannot parse subset from {0:?}")]
    Parse(String),
    #[error("parity mismatch: {what} needs {expected} r, got r = {r}")]
    Parity {
        what: &'static str,
        expected: &'static str,
        r: usize,
    },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("n = {n} exceeds the exhaustive bound {bound}")]
    Bound { n: usize, bound: usize },
    #[error("set system violates {predicate}: {a} and {b}")]
    Violation {
        predicate: String,
        a: Subset,
        b: Subset,
    },
    #[error("configuration is not cyclic: {0}")]
    NotCyclic(String),
    #[error("degenerate span for type {0}")]
    Degenerate(Subset),
    #[error("invalid cube ({root}|{typ}): {reason}")]
    Cube {
        root: Subset,
        typ: Subset,
        reason: String,
    },
    #[error("cubillage rejected: {0}")]
    Cubillage(String),
    #[error("not an order ideal: piece {0} is included but a predecessor is not")]
    NotIdeal(usize),
    #[error("flip precondition failed: {0}")]
    FlipPrecondition(String),
    #[error("enumeration exceeded the limit of {0}")]
    Limit(usize),
    #[error("falsification finding: {0}")]
    Falsified(String),
}
