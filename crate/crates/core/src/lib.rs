//! Numerical laboratory for conductivity problems with closely spaced
//! inclusions in two dimensions.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`] — shape catalog, admissibility checks and gap metrics;
//! * [`matrix`] — sign-diagonal determinant identities, maximal-submatrix
//!   determinants and the potential-difference bound;
//! * [`bem`] — boundary-element engine for the Laplace equation;
//! * [`perfect`], [`insulated`], [`transmission`] — the three conductivity
//!   regimes and their rate studies;
//! * [`lab`] — configuration, sweeps, slope fitting and report emission.

// Input validation is written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod geometry;

pub use error::{Error, Result};
pub use exec::Execution;
pub mod matrix;
pub mod bem;
pub mod data;
pub mod lab;
pub mod perfect;
pub mod insulated;
pub mod transmission;
