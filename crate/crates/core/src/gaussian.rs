//! Continuous-variable Gaussian probes described entirely by their quadrature
//! covariance matrix.
//!
//! Quadratures are ordered `(x₁, p₁, …, x_M, p_M)` and scaled so that the
//! vacuum has `Γ = I/4`. The symplectic form is `Ω = ⊕ [[0, 1], [−1, 0]]`.
//! For squeezing parameters `r_k > 0` the `p` quadrature of mode `k` is the
//! squeezed one.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{
    herm_eig, is_orthogonal_symplectic, max_abs, row_orthonormality_error, sym_eig, symplectic_form,
    RealMatrix, RealSymMatrix,
};
use crate::quantum::SqueezingReport;
use crate::C64;

/// Tolerance on the uncertainty relation `Γ + iΩ/4 ≥ 0`.
pub const UNCERTAINTY_TOL: f64 = 1e-9;
/// Margin below `1/4` for the smallest covariance eigenvalue to count as squeezed.
pub const SIMON_MARGIN: f64 = 1e-12;
const ENCODING_TOL: f64 = 1e-10;
const PURITY_TOL: f64 = 1e-8;

/// Gaussian state given by its covariance matrix and displacement.
#[derive(Debug, Clone)]
pub struct GaussianState {
    gamma: RealSymMatrix,
    displacement: DVector<f64>,
}

impl GaussianState {
    /// Validates dimensions and the uncertainty relation.
    pub fn new(gamma: RealSymMatrix, displacement: DVector<f64>) -> Result<Self> {
        let d = gamma.dim();
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::OddDimension(d));
        }
        if displacement.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "displacement has length {}, covariance is {d}x{d}",
                displacement.len()
            )));
        }
        let om = symplectic_form(d / 2);
        let h = DMatrix::from_fn(d, d, |i, j| C64::new(gamma[(i, j)], 0.25 * om[(i, j)]));
        let lmin = herm_eig(&h)?.values.min();
        if lmin < -UNCERTAINTY_TOL {
            return Err(Error::InvalidState(format!(
                "covariance violates the uncertainty relation (eigenvalue {lmin:e})"
            )));
        }
        Ok(Self { gamma, displacement })
    }

    /// Zero-displacement state with the given covariance.
    pub fn centered(gamma: RealSymMatrix) -> Result<Self> {
        let d = gamma.dim();
        Self::new(gamma, DVector::zeros(d))
    }

    pub fn modes(&self) -> usize {
        self.gamma.dim() / 2
    }

    pub fn gamma(&self) -> &RealSymMatrix {
        &self.gamma
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.displacement
    }

    /// State after the passive operation described by `V`, with covariance `VᵀΓV`.
    pub fn apply_passive(&self, v: &RealMatrix) -> Result<Self> {
        if !is_orthogonal_symplectic(v, ENCODING_TOL)? || v.nrows() != self.gamma.dim() {
            return Err(Error::InvalidArgument("transformation is not passive on this state".into()));
        }
        let gamma = RealSymMatrix::new(v.transpose() * self.gamma.matrix() * v);
        let displacement = v.transpose() * &self.displacement;
        Ok(Self { gamma, displacement })
    }

    /// `det(4Γ)`, equal to one for pure states.
    pub fn purity_determinant(&self) -> f64 {
        (self.gamma.matrix() * 4.0).determinant()
    }

    pub fn is_pure(&self) -> bool {
        (self.purity_determinant() - 1.0).abs() <= PURITY_TOL
    }
}

/// Local squeezing parameters followed by a passive transformation.
#[derive(Debug, Clone)]
pub struct SqueezedVacuumSpec {
    r: Vec<f64>,
    o: RealMatrix,
}

impl SqueezedVacuumSpec {
    pub fn new(r: Vec<f64>, o: RealMatrix) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        if o.nrows() != 2 * r.len() || !is_orthogonal_symplectic(&o, ENCODING_TOL)? {
            return Err(Error::InvalidArgument(
                "passive transformation must be orthogonal symplectic on 2M quadratures".into(),
            ));
        }
        Ok(Self { r, o })
    }

    /// Squeezing without any mode mixing.
    pub fn local(r: Vec<f64>) -> Self {
        let d = 2 * r.len();
        Self { r, o: DMatrix::identity(d, d) }
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn passive(&self) -> &RealMatrix {
        &self.o
    }
}

/// The `M`-mode vacuum.
pub fn vacuum(modes: usize) -> Result<GaussianState> {
    if modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    let d = 2 * modes;
    GaussianState::centered(RealSymMatrix::new(DMatrix::identity(d, d) * 0.25))
}

fn local_squeezed_diagonal(r: &[f64]) -> DMatrix<f64> {
    let d: Vec<f64> = r.iter().flat_map(|&rk| [0.25 * (2.0 * rk).exp(), 0.25 * (-2.0 * rk).exp()]).collect();
    DMatrix::from_diagonal(&DVector::from_vec(d))
}

/// Squeezed vacuum with covariance `Oᵀ (¼ ⊕ diag(e^{2r_k}, e^{−2r_k})) O`.
pub fn squeezed_vacuum(spec: &SqueezedVacuumSpec) -> Result<GaussianState> {
    let core = local_squeezed_diagonal(&spec.r);
    GaussianState::centered(RealSymMatrix::new(spec.o.transpose() * core * &spec.o))
}

/// Moment matrix for displacement sensing, `¼ Ωᵀ Γ⁻¹ Ω`. For Gaussian states it
/// equals the quantum Fisher matrix of the quadratures.
pub fn cv_moment_matrix(state: &GaussianState) -> Result<RealSymMatrix> {
    let om = symplectic_form(state.modes());
    let inv = state.gamma.matrix().clone().try_inverse().ok_or(Error::SingularCovariance)?;
    Ok(RealSymMatrix::new(om.transpose() * inv * &om * 0.25))
}

/// Checks that the rows of `R` are orthonormal and generate commuting quadratures.
pub fn check_encoding(r: &RealMatrix, modes: usize) -> Result<()> {
    if r.ncols() != 2 * modes || r.nrows() == 0 || r.nrows() > modes {
        return Err(Error::DimensionMismatch(format!(
            "encoding is {}x{}, expected at most {modes} rows of length {}",
            r.nrows(),
            r.ncols(),
            2 * modes
        )));
    }
    let ortho = row_orthonormality_error(r);
    if ortho > ENCODING_TOL {
        return Err(Error::NotOrthonormal(ortho));
    }
    let comm = max_abs(&(r * symplectic_form(modes) * r.transpose()));
    if comm > ENCODING_TOL {
        return Err(Error::NoncommutingEncoding(comm));
    }
    Ok(())
}

/// Squeezing matrix `4 R Ωᵀ Γ Ω Rᵀ` for generators `R q̂`, optimized over the
/// measured quadratures. The shot-noise reference is the identity.
pub fn cv_squeezing_matrix(state: &GaussianState, r: &RealMatrix) -> Result<SqueezingReport> {
    check_encoding(r, state.modes())?;
    let om = symplectic_form(state.modes());
    let rot = r * om.transpose();
    let xi2 = RealSymMatrix::new(&rot * state.gamma.matrix() * rot.transpose() * 4.0);
    let k = r.nrows();
    let mut report = SqueezingReport::from_xi2(xi2, RealSymMatrix::identity(k))?;
    if let Ok(mt) = cv_moment_matrix(state) {
        report.moment = Some(RealSymMatrix::new(r * mt.matrix() * r.transpose()));
    }
    Ok(report)
}

/// Rows of `4ΩᵀΓΩ` eigenvectors that minimize the squeezing spectrum.
///
/// For pure states each eigenvector with eigenvalue `λ` is paired with its
/// symplectic partner at `1/λ`, so a greedy pass in ascending order that
/// removes every accepted direction together with its partner yields `M`
/// commuting rows. Mixed states use the `M` smallest eigenvectors directly
/// and fail if those do not commute.
pub fn optimal_cv_encoding(state: &GaussianState) -> Result<RealMatrix> {
    let m = state.modes();
    let om = symplectic_form(m);
    let g = RealSymMatrix::new(om.transpose() * state.gamma.matrix() * &om * 4.0);
    let eig = sym_eig(&g)?;
    let rows: Vec<DVector<f64>> = if state.is_pure() {
        let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(m);
        let mut span: Vec<DVector<f64>> = Vec::with_capacity(2 * m);
        for j in 0..2 * m {
            if chosen.len() == m {
                break;
            }
            let mut w = eig.vectors.column(j).into_owned();
            for s in &span {
                w -= s * s.dot(&w);
            }
            let n = w.norm();
            if n > 1e-6 {
                w /= n;
                span.push(&om * &w);
                span.push(w.clone());
                chosen.push(w);
            }
        }
        chosen
    } else {
        (0..m).map(|j| eig.vectors.column(j).into_owned()).collect()
    };
    if rows.len() != m {
        return Err(Error::NoncommutingEncoding(f64::NAN));
    }
    let r = RealMatrix::from_fn(m, 2 * m, |i, j| rows[i][j]);
    let comm = max_abs(&(&r * &om * r.transpose()));
    if comm > ENCODING_TOL {
        return Err(Error::NoncommutingEncoding(comm));
    }
    Ok(r)
}

/// Outcome of the multimode squeezing test on the smallest covariance eigenvalue.
#[derive(Debug, Clone)]
pub struct SimonCheck {
    pub squeezed: bool,
    pub lambda_min: f64,
    /// Encoding whose squeezing matrix dips below shot noise, present iff `squeezed`.
    pub witness: Option<RealMatrix>,
    /// Smallest squeezing-matrix eigenvalue reachable with the constructed encoding.
    pub encoding_min_xi2: f64,
}

/// Decides whether any commuting quadrature encoding beats shot noise.
///
/// When the full optimal encoding cannot be built for a mixed state, the
/// single most squeezed direction is used as a one-parameter witness.
pub fn simon_check(state: &GaussianState) -> Result<SimonCheck> {
    let lambda_min = sym_eig(&state.gamma)?.min();
    let squeezed = lambda_min < 0.25 - SIMON_MARGIN;
    let r = match optimal_cv_encoding(state) {
        Ok(r) => r,
        Err(Error::NoncommutingEncoding(_)) => {
            let m = state.modes();
            let om = symplectic_form(m);
            let g = RealSymMatrix::new(om.transpose() * state.gamma.matrix() * &om);
            let v = sym_eig(&g)?.vectors.column(0).transpose();
            RealMatrix::from_row_slice(1, 2 * m, v.as_slice())
        }
        Err(e) => return Err(e),
    };
    let encoding_min_xi2 = cv_squeezing_matrix(state, &r)?.eigenvalues.min();
    Ok(SimonCheck { squeezed, lambda_min, witness: squeezed.then_some(r), encoding_min_xi2 })
}

/// Passive transformation `A ⊗ I₂` whose matrix `A` has the basis vectors as
/// rows. Applied to a locally squeezed vacuum it turns the optimal squeezing
/// matrix into `Σ_k e^{−2r_k} n_k n_kᵀ`.
pub fn basis_change_w(basis: &[DVector<f64>]) -> Result<RealMatrix> {
    let m = basis.len();
    if m == 0 || basis.iter().any(|n| n.len() != m) {
        return Err(Error::DimensionMismatch("basis must contain M vectors of length M".into()));
    }
    let a = RealMatrix::from_fn(m, m, |k, j| basis[k][j]);
    let err = row_orthonormality_error(&a);
    if err > ENCODING_TOL {
        return Err(Error::NotOrthonormal(err));
    }
    Ok(a.kronecker(&DMatrix::identity(2, 2)))
}

/// Encoding `P_M Ω` that imprints phases along the squeezed quadratures of a
/// locally squeezed vacuum.
pub fn local_encoding(modes: usize) -> RealMatrix {
    let om = symplectic_form(modes);
    let mut pick = DMatrix::zeros(modes, 2 * modes);
    for k in 0..modes {
        pick[(k, 2 * k + 1)] = 1.0;
    }
    pick * om
}

/// Optimal mode-separable squeezing distribution for estimating `nᵀθ`.
#[derive(Debug, Clone)]
pub struct MsepAllocation {
    pub r: Vec<f64>,
    pub variance: f64,
    /// Common factor `Σ_j (e^{4r_j} − 1)`.
    pub scale: f64,
    /// `|Σ_k sinh² r_k − N|`.
    pub photon_residual: f64,
    /// Largest deviation of `(e^{4r_k} − 1)/scale` from `n_k²`.
    pub proportionality_residual: f64,
}

fn photons_for_scale(n2: &[f64], s: f64) -> f64 {
    n2.iter().map(|&w| (0.25 * (1.0 + w * s).ln()).sinh().powi(2)).sum()
}

/// Distributes `N` mean photons over locally squeezed modes so that the
/// variance `Σ_k n_k² e^{−2r_k}` is minimal.
///
/// The stationarity conditions fix `e^{4r_k} − 1 = n_k² S` for a common `S`;
/// the photon count is increasing in `S`, so it is found by bisection.
pub fn msep_allocation(n: &[f64], photons: f64, tol: f64) -> Result<MsepAllocation> {
    if n.is_empty() || !(photons > 0.0) || !photons.is_finite() {
        return Err(Error::InvalidArgument("need a nonempty direction and N > 0".into()));
    }
    let norm2: f64 = n.iter().map(|x| x * x).sum();
    if (norm2 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("direction has squared norm {norm2}, expected 1")));
    }
    if let Some(k) = n.iter().position(|x| *x == 0.0) {
        return Err(Error::DegenerateMode(k));
    }
    let n2: Vec<f64> = n.iter().map(|x| x * x).collect();
    let mut hi = 1.0;
    while photons_for_scale(&n2, hi) < photons {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::InvalidArgument("photon number too large to bracket".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if photons_for_scale(&n2, mid) < photons {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol.min(1e-15) * hi {
            break;
        }
    }
    let scale = 0.5 * (lo + hi);
    let r: Vec<f64> = n2.iter().map(|&w| 0.25 * (1.0 + w * scale).ln()).collect();
    let variance = n2.iter().zip(&r).map(|(w, rk)| w * (-2.0 * rk).exp()).sum();
    let total: f64 = r.iter().map(|rk| rk.sinh().powi(2)).sum();
    let sum_terms: f64 = r.iter().map(|rk| (4.0 * rk).exp() - 1.0).sum();
    let proportionality_residual = r
        .iter()
        .zip(&n2)
        .map(|(rk, w)| (((4.0 * rk).exp() - 1.0) / sum_terms - w).abs())
        .fold(0.0, f64::max);
    Ok(MsepAllocation { r, variance, scale, photon_residual: (total - photons).abs(), proportionality_residual })
}

/// All squeezing concentrated in one mode that is then mapped onto the
/// estimated combination. Returns `(r', e^{−2r'})` with `sinh² r' = N`.
pub fn ment_allocation(photons: f64) -> Result<(f64, f64)> {
    if !(photons >= 0.0) || !photons.is_finite() {
        return Err(Error::InvalidArgument(format!("photon number {photons} must be finite and ≥ 0")));
    }
    let rp = photons.sqrt().asinh();
    Ok((rp, (-2.0 * rp).exp()))
}

/// One row of the mode-entanglement gain table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig3Row {
    pub modes: usize,
    pub r: f64,
    /// Variance ratio of the entangled to the separable strategy.
    pub ratio: f64,
    pub approx_small_r: f64,
    pub approx_large_r: f64,
}

/// Entangled-versus-separable variance ratio for a uniform average over `M`
/// parameters with equal local squeezing `r`.
pub fn fig3_scan(modes: usize, r_grid: &[f64]) -> Result<Vec<Fig3Row>> {
    if modes < 2 {
        return Err(Error::InvalidArgument(format!("need at least two modes, got {modes}")));
    }
    let m = modes as f64;
    Ok(r_grid
        .iter()
        .map(|&r| {
            let rp = (m.sqrt() * r.sinh().abs()).asinh();
            Fig3Row {
                modes,
                r,
                ratio: (-2.0 * rp + 2.0 * r.abs()).exp(),
                approx_small_r: (-2.0 * (m.sqrt() - 1.0) * r).exp(),
                approx_large_r: 1.0 / m,
            }
        })
        .collect())
}

/// Largest quadrature variance (in units of the vacuum) reachable with `N`
/// mean photons, `2N + 1 + 2√(N(N+1))`.
pub fn max_variance_identity(photons: f64) -> Result<f64> {
    if !(photons >= 0.0) || !photons.is_finite() {
        return Err(Error::InvalidArgument(format!("photon number {photons} must be finite and ≥ 0")));
    }
    Ok(2.0 * photons + 1.0 + 2.0 * (photons * (photons + 1.0)).sqrt())
}
