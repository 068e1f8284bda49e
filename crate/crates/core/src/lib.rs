//! Probability ("coin") representation of qubit states.
//!
//! A qubit state is a triple of classical probabilities `(p1, p2, p3)` packed
//! into the table matrix
//!
//! ```text
//! rho = [ p3                       (p1 - 1/2) - i (p2 - 1/2) ]
//!       [ (p1 - 1/2) + i (p2 - 1/2)  1 - p3                  ]
//! ```
//!
//! The triple is quantum when it lies in the ball of radius 1/2 around
//! `(1/2, 1/2, 1/2)`, i.e. when `rho` is positive semidefinite.

pub mod cmat;
pub mod errata;
pub mod evolve;
pub mod exec;
pub mod mat4prob;
pub mod observable;
pub mod qubit;
pub mod superpose;
pub mod suprematism;

pub use cmat::{CMat, CMat2, CMat4, CVec, CVec2, C64};
pub use exec::Execution;
pub use observable::DichotomicObservable;
pub use qubit::{DensityMatrix2, ProbabilityTriple};
