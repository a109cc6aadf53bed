use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ops::collective_spin_ops;
use crate::error::{Error, Result};
use crate::linalg::{max_abs, CVector, HermitianOp, RealSymMatrix};
use crate::quantum::{evolve, moment_matrix, quantum_fisher_matrix, Diagnostic, ObservableSet, QuantumState};

const RICHARDSON_LEVELS: usize = 5;

/// Dicke state with `m = 0` for an even particle number.
pub fn twin_fock_state(n: usize) -> Result<QuantumState> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("twin-Fock state needs an even particle number, got {n}")));
    }
    let mut v = CVector::zeros(n + 1);
    v[n / 2] = Complex64::new(1.0, 0.0);
    Ok(QuantumState::Pure(v))
}

/// Generators `(J_x, J_y)` and the nonlinear observables
/// `(J_x|TF⟩⟨TF|J_x, J_y|TF⟩⟨TF|J_y)`.
pub fn twin_fock_observables(n: usize) -> Result<(ObservableSet, ObservableSet)> {
    let tf = twin_fock_state(n)?;
    let psi = tf.as_vector().expect("pure");
    let ops = collective_spin_ops(n)?;
    let ax = ops.jx.matrix() * psi;
    let ay = ops.jy.matrix() * psi;
    let x1 = HermitianOp::hermitian_part(&ax * ax.adjoint());
    let x2 = HermitianOp::hermitian_part(&ay * ay.adjoint());
    let h = ObservableSet::new("H", vec![ops.jx, ops.jy])?;
    let x = ObservableSet::new("X", vec![x1, x2])?;
    Ok((h, x))
}

/// Moment matrix of the twin-Fock scheme in the small-angle limit.
#[derive(Debug, Clone)]
pub struct TwinFockReport {
    pub n: usize,
    /// Richardson extrapolation of the finite-angle sequence to zero angle.
    pub extrapolated: RealSymMatrix,
    /// `(angle scale, moment matrix)` pairs used by the extrapolation.
    pub sequence: Vec<(f64, RealSymMatrix)>,
    pub quantum_fisher: RealSymMatrix,
    /// `N(N+2)/2`.
    pub analytic: f64,
    /// `⟨J_x²⟩ = ⟨J_y²⟩ = N(N+2)/8` on the probe state.
    pub q: f64,
    /// `max|M − (N(N+2)/2) I| / (N(N+2)/2)`.
    pub relative_deviation: f64,
    /// `max|M − F_Q| / (N(N+2)/2)`.
    pub fisher_deviation: f64,
    /// `‖[X_1, X_2]‖_max`.
    pub commutator_norm: f64,
    pub diagnostics: Vec<Diagnostic>,
}

/// Evaluates the moment matrix at `θ/2^j` for `j = 0..5` and extrapolates in
/// `θ²` to the zero-angle limit, where the covariance of the observables
/// becomes singular.
pub fn twin_fock_moment(n: usize, theta: [f64; 2]) -> Result<TwinFockReport> {
    let (h, x) = twin_fock_observables(n)?;
    let tf = twin_fock_state(n)?;
    if theta.iter().all(|t| *t == 0.0) || theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("twin-Fock evaluation needs a finite nonzero angle".into()));
    }
    let mut diagnostics = Vec::new();
    for t in theta {
        if !(1e-6..=1e-2).contains(&t.abs()) {
            diagnostics.push(Diagnostic::Conditioning(format!(
                "angle component {t:e} lies outside [1e-6, 1e-2]"
            )));
        }
    }

    let mut sequence = Vec::with_capacity(RICHARDSON_LEVELS);
    for j in 0..RICHARDSON_LEVELS {
        let scale = 0.5f64.powi(j as i32);
        let th = [theta[0] * scale, theta[1] * scale];
        let rep = moment_matrix(&evolve(&tf, &h, &th)?, &h, &x)?;
        sequence.push((scale, rep.moment));
    }

    // Even expansion in the angle: each level removes the next power of θ².
    let mut table: Vec<DMatrix<f64>> = sequence.iter().map(|(_, m)| m.matrix().clone()).collect();
    for level in 1..RICHARDSON_LEVELS {
        let f = 4f64.powi(level as i32);
        for j in (level..RICHARDSON_LEVELS).rev() {
            table[j] = (&table[j] * f - &table[j - 1]) / (f - 1.0);
        }
    }
    let extrapolated = RealSymMatrix::new(table[RICHARDSON_LEVELS - 1].clone());

    let quantum_fisher = quantum_fisher_matrix(&tf, &h)?;
    let analytic = (n * (n + 2)) as f64 / 2.0;
    let q = tf.expect(&(h.ops()[0].matrix() * h.ops()[0].matrix())).re;
    let relative_deviation =
        max_abs(&(extrapolated.matrix() - DMatrix::identity(2, 2) * analytic)) / analytic;
    let fisher_deviation = max_abs(&(extrapolated.matrix() - quantum_fisher.matrix())) / analytic;
    let commutator_norm = x.max_commutator_norm();
    Ok(TwinFockReport {
        n,
        extrapolated,
        sequence,
        quantum_fisher,
        analytic,
        q,
        relative_deviation,
        fisher_deviation,
        commutator_norm,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observables_commute() {
        let (_, x) = twin_fock_observables(10).unwrap();
        assert!(x.max_commutator_norm() < 1e-12);
    }

    #[test]
    fn second_moments_equal_q() {
        for n in [2, 4, 10, 20] {
            let tf = twin_fock_state(n).unwrap();
            let ops = collective_spin_ops(n).unwrap();
            let qx = tf.expect(&(ops.jx.matrix() * ops.jx.matrix())).re;
            let qy = tf.expect(&(ops.jy.matrix() * ops.jy.matrix())).re;
            let q = (n * (n + 2)) as f64 / 8.0;
            assert!((qx - q).abs() < 1e-12 * q && (qy - q).abs() < 1e-12 * q);
        }
    }

    #[test]
    fn n4_extrapolates_to_twelve() {
        let r = twin_fock_moment(4, [1e-2, 1e-2]).unwrap();
        assert_eq!(r.analytic, 12.0);
        assert!(r.relative_deviation < 1e-4, "deviation {}", r.relative_deviation);
        assert!(r.fisher_deviation < 1e-4);
        assert!(r.diagnostics.is_empty());
    }

    #[test]
    fn out_of_window_angle_warns() {
        let r = twin_fock_moment(4, [5e-2, 1e-2]).unwrap();
        assert_eq!(r.diagnostics.len(), 1);
        assert!(twin_fock_moment(3, [1e-2, 1e-2]).is_err());
        assert!(twin_fock_moment(4, [0.0, 0.0]).is_err());
    }
}
