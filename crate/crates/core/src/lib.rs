//! Multiparameter method of moments for quantum metrology.
//!
//! The crate computes moment, Fisher and squeezing matrices for finite
//! dimensional quantum states, optimizes measured observables and
//! phase-imprinting generators, and ships ready-made scenarios for
//! multimode spin ensembles and Gaussian continuous-variable probes.
//!
//! Modules build on each other bottom-up:
//!
//! * [`linalg`]: dense real and complex matrix utilities (eigen, pseudoinverse,
//!   Loewner order, symplectic form).
//! * [`quantum`]: states, observables, moment/Fisher/squeezing matrices.
//! * [`spin`]: collective spins in the Dicke basis, one-axis twisting, the
//!   spin-squeezing matrix and its scenarios.
//! * [`gaussian`]: covariance-matrix formalism for Gaussian states.
//! * [`montecarlo`]: sampling and moment-matching estimation.
//! * [`oracle`]: brute-force reference computations.
//! * [`verify`]: the invariant suite that ties everything together.

pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod montecarlo;
pub mod oracle;
pub mod par;
pub mod quantum;
pub mod spin;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
