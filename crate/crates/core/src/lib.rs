//! Continuous local search for hybrid Boolean formulas.
//!
//! Each OR / XOR / at-least-k constraint is relaxed to its Walsh expansion on
//! `[-1, 1]^n` (−1 is True), evaluated through a product tree over roots of
//! unity with reverse-mode gradients. Projected gradient descent with
//! restarts, adaptive constraint weights and rephasing searches for a corner
//! whose sign rounding satisfies everything, or for the lightest falsified
//! weight in MaxSAT mode.

pub mod bench;
pub mod error;
pub mod formula;
pub mod heuristics;
pub mod optimizer;
pub mod parallel;
pub mod rng;
pub mod walsh;

pub use error::{Error, ParseError, Result};
pub use formula::{Constraint, ConstraintKind, DiscreteAssignment, Formula, Literal};
pub use optimizer::{Mode, SolveResult, Status};
pub use parallel::{multi_start_run, portfolio_run, RunConfig};
