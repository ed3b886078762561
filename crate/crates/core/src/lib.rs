//! Rate-distortion functions for joint compression and semantic inference
//! with side information.
//!
//! An encoder observes `X1` (which carries a hidden semantic variable `S`)
//! and a second source `X2`; encoder and decoder share side information `Y`.
//! The decoder reconstructs `X̂1`, `X̂2` and an estimate `Ŝ` of the
//! semantics. This crate evaluates the optimal rate for given distortion
//! targets in two independent ways and checks them against each other:
//!
//! - [`closed_form`] and [`gaussian`] evaluate the exact expressions known for
//!   binary, integer-classification and Gaussian sources;
//! - [`solver`] computes the rate numerically for any finite-alphabet source
//!   by alternating minimization;
//! - [`channels`] builds explicit test channels that attain the closed forms.
//!
//! [`figures`], [`sweep`] and [`verify`] back the `semrd` command-line tool.

pub mod channels;
pub mod closed_form;
pub mod error;
pub mod figures;
pub mod gaussian;
pub mod models;
pub mod prob;
pub mod semantic;
pub mod solver;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use prob::{Alphabet, BinarySourceSpec, DistortionMatrix, JointPmf, LogBase};
pub use solver::{RdGrid, RdPoint, RdProblem, RdQuery, RdSurface, SolverOptions};
