//! Exact combinatorics of weak and strong `r`-separation, cyclic zonotopes,
//! cubillages and membranes.
//!
//! Subsets of `[n] = {1, …, n}` (`n ≤ 64`) are bit masks ([`Subset`]).
//! Every search is exhaustive and deterministic; geometry uses exact
//! integer arithmetic only.

pub mod cubillage;
pub mod error;
pub mod flips;
pub mod geometry;
pub mod ground;
pub mod membranes;
pub mod separation;
pub mod systems;

pub use error::{Error, Result};
pub use ground::{interlacing_degree, interval_cortege, Cortege, GroundSet, Subset};
pub use separation::{
    is_double_r_comb, is_strongly_r_separated, is_weakly_r_separated, surrounds,
    surrounds_from_right,
};
pub use systems::{PairwisePredicate, SetSystem};
