use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{ObservableSet, QuantumState};
use crate::error::{Error, Result};
use crate::linalg::{
    herm_eig, max_abs, numerical_rank, pinv_sym, row_orthonormality_error, sym_eig, CMatrix,
    HermitianOp, RealMatrix, RealSymMatrix, PINV_CUTOFF,
};

/// Non-fatal findings attached to moment computations.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    /// The covariance matrix of the measured observables has rank below the
    /// number of parameters, so some observables carry redundant information.
    RedundantObservables { covariance_rank: usize, required: usize },
    /// The commutator matrix has rank below the number of parameters.
    RankDeficientCommutator { rank: usize, required: usize },
    /// Eigenvalues tie at the cut between selected and discarded directions.
    DegenerateCut { eigenvalue: f64 },
    /// The pseudoinverse of `Γ` annihilates directions needed for saturation.
    SaturationNotAchievable { residual: f64 },
    /// Evaluation outside the numerically reliable window.
    Conditioning(String),
}

/// Moment matrix together with the parts it was built from.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub moment: RealSymMatrix,
    pub covariance: RealSymMatrix,
    pub commutator: RealMatrix,
    pub theta: Option<DVector<f64>>,
    pub diagnostics: Vec<Diagnostic>,
}

impl MomentReport {
    /// Recomputes `Cᵀ Γ⁺ C` from the stored parts.
    pub fn rebuild(&self) -> RealSymMatrix {
        moment_from_parts(&self.covariance, &self.commutator)
    }
}

fn check_set(state: &QuantumState, set: &ObservableSet) -> Result<()> {
    state.check_dim(set.dim())
}

/// Matrix of second moments `⟨A_k B_l⟩`.
pub fn second_moments(state: &QuantumState, a: &ObservableSet, b: &ObservableSet) -> Result<CMatrix> {
    check_set(state, a)?;
    check_set(state, b)?;
    let mut out = CMatrix::zeros(a.len(), b.len());
    match state {
        QuantumState::Pure(psi) => {
            let pa: Vec<_> = a.ops().iter().map(|op| op.matrix() * psi).collect();
            let pb: Vec<_> = b.ops().iter().map(|op| op.matrix() * psi).collect();
            for (k, u) in pa.iter().enumerate() {
                for (l, v) in pb.iter().enumerate() {
                    out[(k, l)] = u.dotc(v);
                }
            }
        }
        QuantumState::Mixed(rho) => {
            let ra: Vec<_> = a.ops().iter().map(|op| rho.matrix() * op.matrix()).collect();
            for (k, p) in ra.iter().enumerate() {
                for (l, op) in b.ops().iter().enumerate() {
                    // Tr(P B) = Σ_ij P_ij B_ji
                    out[(k, l)] = p.iter().zip(op.matrix().transpose().iter()).map(|(x, y)| x * y).sum();
                }
            }
        }
    }
    Ok(out)
}

/// Expectation values `⟨A_k⟩`.
pub fn means(state: &QuantumState, a: &ObservableSet) -> Result<DVector<f64>> {
    check_set(state, a)?;
    Ok(DVector::from_iterator(a.len(), a.ops().iter().map(|op| state.expect(op.matrix()).re)))
}

/// `exp(−i Σ_k θ_k H_k) ρ exp(+i Σ_k θ_k H_k)`.
pub fn evolve(state: &QuantumState, h: &ObservableSet, theta: &[f64]) -> Result<QuantumState> {
    if theta.len() != h.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} parameters for {} generators",
            theta.len(),
            h.len()
        )));
    }
    check_set(state, h)?;
    let g = HermitianOp::real_combination(theta, h.ops())?;
    let eig = herm_eig(g.matrix())?;
    let u = eig.map_values(|l| Complex64::new(0.0, -l).exp());
    Ok(state.apply_unitary(&u))
}

/// Symmetrized covariance matrix `½⟨A_kA_l + A_lA_k⟩ − ⟨A_k⟩⟨A_l⟩`.
pub fn covariance_matrix(state: &QuantumState, a: &ObservableSet) -> Result<RealSymMatrix> {
    let sm = second_moments(state, a, a)?;
    let m = means(state, a)?;
    Ok(RealSymMatrix::new(DMatrix::from_fn(a.len(), a.len(), |k, l| {
        sm[(k, l)].re - m[k] * m[l]
    })))
}

/// Commutator matrix `C_kl = −i⟨[X_k, H_l]⟩ = 2 Im⟨X_k H_l⟩`.
pub fn commutator_matrix(state: &QuantumState, x: &ObservableSet, h: &ObservableSet) -> Result<RealMatrix> {
    Ok(second_moments(state, x, h)?.map(|z| 2.0 * z.im))
}

/// `Cᵀ Γ⁺ C`.
pub fn moment_from_parts(gamma: &RealSymMatrix, c: &RealMatrix) -> RealSymMatrix {
    let gp = pinv_sym(gamma, PINV_CUTOFF);
    RealSymMatrix::new(c.transpose() * gp.matrix() * c)
}

/// Moment matrix of generators `h` and measured observables `x` on an
/// already-imprinted state.
pub fn moment_matrix(state_theta: &QuantumState, h: &ObservableSet, x: &ObservableSet) -> Result<MomentReport> {
    let covariance = covariance_matrix(state_theta, x)?;
    let commutator = commutator_matrix(state_theta, x, h)?;
    let moment = moment_from_parts(&covariance, &commutator);
    let required = h.len();
    let mut diagnostics = Vec::new();
    let grank = numerical_rank(covariance.matrix(), PINV_CUTOFF);
    if grank < required {
        diagnostics.push(Diagnostic::RedundantObservables { covariance_rank: grank, required });
    }
    let crank = numerical_rank(&commutator, PINV_CUTOFF);
    if crank < required {
        diagnostics.push(Diagnostic::RankDeficientCommutator { rank: crank, required });
    }
    Ok(MomentReport { moment, covariance, commutator, theta: None, diagnostics })
}

/// Covariance `Γ` and commutator matrix `C̃_kl = −i⟨[A_k, A_l]⟩` of an
/// accessible operator set.
pub fn accessible_parts(state: &QuantumState, a: &ObservableSet) -> Result<(RealSymMatrix, RealMatrix)> {
    let sm = second_moments(state, a, a)?;
    let m = means(state, a)?;
    let l = a.len();
    let gamma = RealSymMatrix::new(DMatrix::from_fn(l, l, |i, j| sm[(i, j)].re - m[i] * m[j]));
    let ct = DMatrix::from_fn(l, l, |i, j| sm[(i, j)].im - sm[(j, i)].im);
    Ok((gamma, ct))
}

/// Accessible moment matrix `M̃ = C̃ᵀ Γ⁺ C̃`.
pub fn accessible_moment_matrix(state: &QuantumState, a: &ObservableSet) -> Result<RealSymMatrix> {
    let (gamma, ct) = accessible_parts(state, a)?;
    Ok(moment_from_parts(&gamma, &ct))
}

fn require_orthonormal(r: &RealMatrix, l: usize) -> Result<()> {
    if r.ncols() != l {
        return Err(Error::DimensionMismatch(format!(
            "R has {} columns for {l} accessible operators",
            r.ncols()
        )));
    }
    let e = row_orthonormality_error(r);
    if e > 1e-10 {
        return Err(Error::NotOrthonormal(e));
    }
    Ok(())
}

/// Best moment matrix `R M̃ Rᵀ` reachable with generators `R A` and
/// observables drawn from the span of `A`.
pub fn optimal_moment_matrix(state: &QuantumState, r: &RealMatrix, a: &ObservableSet) -> Result<RealSymMatrix> {
    require_orthonormal(r, a.len())?;
    let mt = accessible_moment_matrix(state, a)?;
    Ok(RealSymMatrix::new(r * mt.matrix() * r.transpose()))
}

/// Observables that saturate the optimal moment matrix.
#[derive(Debug, Clone)]
pub struct OptimalObservables {
    /// Coefficients `S` so that `X = S A`.
    pub coefficients: RealMatrix,
    pub observables: ObservableSet,
    /// `‖[X_i, X_j]‖_max` for every pair.
    pub commutator_norms: DMatrix<f64>,
    /// Relative deviation of the achieved moment matrix from `R M̃ Rᵀ`.
    pub saturation_residual: f64,
    pub diagnostics: Vec<Diagnostic>,
}

/// Coefficient-level form of [`optimal_observables`]: returns
/// `S = T R C̃ᵀ Γ⁺`, the relative saturation residual and diagnostics.
pub fn optimal_measurement_coefficients(
    gamma: &RealSymMatrix,
    ctilde: &RealMatrix,
    r: &RealMatrix,
    t: &RealMatrix,
) -> Result<(RealMatrix, f64, Vec<Diagnostic>)> {
    let l = gamma.dim();
    require_orthonormal(r, l)?;
    let m = r.nrows();
    if t.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!("T must be {m}x{m}")));
    }
    if numerical_rank(t, 1e-12) < m {
        return Err(Error::InvalidArgument("T is not invertible".into()));
    }
    let gp = pinv_sym(gamma, PINV_CUTOFF);
    let s = t * r * ctilde.transpose() * gp.matrix();

    let mut diagnostics = Vec::new();
    let needed = ctilde * r.transpose();
    let proj = gamma.matrix() * gp.matrix();
    let lost = max_abs(&(&needed - &proj * &needed)) / max_abs(&needed).max(1.0);
    if lost > 1e-8 {
        diagnostics.push(Diagnostic::SaturationNotAchievable { residual: lost });
    }

    let target = RealSymMatrix::new(r * moment_from_parts(gamma, ctilde).matrix() * r.transpose());
    let achieved = moment_from_parts(
        &RealSymMatrix::new(&s * gamma.matrix() * s.transpose()),
        &(&s * ctilde * r.transpose()),
    );
    let residual = max_abs(&(achieved.matrix() - target.matrix())) / max_abs(&target).max(1.0);
    if residual > 1e-8 && lost <= 1e-8 {
        diagnostics.push(Diagnostic::SaturationNotAchievable { residual });
    }
    Ok((s, residual, diagnostics))
}

/// Measurement observables `X = T R C̃ᵀ Γ⁺ A` attaining `R M̃ Rᵀ`.
pub fn optimal_observables(
    state: &QuantumState,
    r: &RealMatrix,
    a: &ObservableSet,
    t: &RealMatrix,
) -> Result<OptimalObservables> {
    let (gamma, ct) = accessible_parts(state, a)?;
    let (coefficients, saturation_residual, diagnostics) =
        optimal_measurement_coefficients(&gamma, &ct, r, t)?;
    let observables = a.combine("X_opt", &coefficients)?;
    let commutator_norms = observables.commutator_norms();
    Ok(OptimalObservables { coefficients, observables, commutator_norms, saturation_residual, diagnostics })
}

/// Generators spanning the leading eigenspace of `M̃`.
#[derive(Debug, Clone)]
pub struct OptimalHamiltonians {
    /// Rows are eigenvectors of `M̃` for the largest eigenvalues, descending.
    pub r: RealMatrix,
    /// The selected eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Selects the `m` generator directions with the largest accessible moments.
pub fn optimal_hamiltonians(state: &QuantumState, a: &ObservableSet, m: usize) -> Result<OptimalHamiltonians> {
    let l = a.len();
    if m == 0 || m > l {
        return Err(Error::InvalidArgument(format!("need 1 <= M <= {l}, got {m}")));
    }
    leading_directions(&accessible_moment_matrix(state, a)?, m)
}

/// Rows of `R` are the eigenvectors of `mt` with the `m` largest eigenvalues.
pub(crate) fn leading_directions(mt: &RealSymMatrix, m: usize) -> Result<OptimalHamiltonians> {
    let l = mt.dim();
    let eig = sym_eig(mt)?;
    let mut r = DMatrix::zeros(m, l);
    let mut eigenvalues = Vec::with_capacity(m);
    for row in 0..m {
        let idx = l - 1 - row;
        r.set_row(row, &eig.vectors.column(idx).transpose());
        eigenvalues.push(eig.values[idx]);
    }
    let mut diagnostics = Vec::new();
    if m < l {
        let kept = eig.values[l - m];
        let dropped = eig.values[l - m - 1];
        if (kept - dropped).abs() <= 1e-9 * kept.abs().max(1.0) {
            diagnostics.push(Diagnostic::DegenerateCut { eigenvalue: kept });
        }
    }
    Ok(OptimalHamiltonians { r, eigenvalues, diagnostics })
}
