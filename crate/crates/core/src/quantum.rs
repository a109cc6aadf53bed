//! States, observables and the moment-matrix engine.
//!
//! A probe state is imprinted with parameters through `exp(−i Σ θ_k H_k)`.
//! Measuring observables `X` and matching their sample means yields an
//! estimator whose covariance is governed by the moment matrix
//! `M = Cᵀ Γ⁺ C`, built from the covariance matrix `Γ` of `X` and the
//! commutator matrix `C_kl = −i⟨[X_k, H_l]⟩`. The moment matrix is bounded by
//! the classical and quantum Fisher matrices, and the squeezing matrix
//! compares it against a shot-noise reference.

mod fisher;
mod moments;
mod observables;
mod squeezing;
mod state;
#[cfg(test)]
pub(crate) mod testing;

pub use fisher::{classical_fisher_matrix, quantum_fisher_matrix, sld_operators, P_FLOOR};
pub use moments::{
    accessible_moment_matrix, accessible_parts, commutator_matrix, covariance_matrix, evolve,
    means, moment_from_parts, moment_matrix, optimal_hamiltonians, optimal_measurement_coefficients,
    optimal_moment_matrix, optimal_observables, second_moments, Diagnostic, MomentReport,
    OptimalHamiltonians, OptimalObservables,
};
pub use observables::{ObservableSet, TransformPair};
pub use squeezing::{squeezing_matrix, SqueezingReport, SHOT_NOISE_MARGIN};
pub use state::QuantumState;

/// Default tolerance for Loewner-order checks between information matrices.
pub const LOEWNER_TOL: f64 = 1e-8;
