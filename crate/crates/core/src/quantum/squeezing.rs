use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{pinv_sym, sym_eig, sym_sqrt, RealMatrix, RealSymMatrix, PINV_CUTOFF};

/// Eigenvalues of `Ξ²` below `1 − SHOT_NOISE_MARGIN` count towards the
/// shot-noise rank.
pub const SHOT_NOISE_MARGIN: f64 = 1e-9;

/// Squeezing matrix with its spectrum and shot-noise rank.
#[derive(Debug, Clone)]
pub struct SqueezingReport {
    pub xi2: RealSymMatrix,
    pub shot_noise: RealSymMatrix,
    /// Ascending eigenvalues of `xi2`.
    pub eigenvalues: DVector<f64>,
    /// Eigenvectors of `xi2` as columns.
    pub eigenvectors: RealMatrix,
    pub shot_noise_rank: usize,
    /// True when every eigenvalue is below shot noise.
    pub full_multiparameter_squeezing: bool,
    /// The moment matrix behind `xi2`, if it was computed from one.
    pub moment: Option<RealSymMatrix>,
    /// Eigendirections of the moment matrix along which it vanishes while the
    /// shot-noise reference does not: the uncertainty there is unbounded.
    pub infinite_uncertainty: Vec<DVector<f64>>,
}

impl SqueezingReport {
    /// Builds the report from an already-computed squeezing matrix.
    pub fn from_xi2(xi2: RealSymMatrix, shot_noise: RealSymMatrix) -> Result<Self> {
        let eig = sym_eig(&xi2)?;
        let shot_noise_rank = eig.values.iter().filter(|l| **l < 1.0 - SHOT_NOISE_MARGIN).count();
        Ok(Self {
            full_multiparameter_squeezing: shot_noise_rank == xi2.dim(),
            eigenvalues: eig.values,
            eigenvectors: eig.vectors,
            shot_noise_rank,
            xi2,
            shot_noise,
            moment: None,
            infinite_uncertainty: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.xi2.dim()
    }

    /// Ratio of shot-noise to actual variance for the parameter combination
    /// `nᵀθ`, in dB: `10 log₁₀(nᵀ Σ_SN n / nᵀ Σ n)` with `Σ_SN ∝ F_SN⁻¹` and
    /// `Σ ∝ F_SN^{-1/2} Ξ² F_SN^{-1/2}`.
    pub fn gain_db(&self, n: &[f64]) -> Result<f64> {
        if n.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "direction of length {} for {} parameters",
                n.len(),
                self.dim()
            )));
        }
        let n = DVector::from_column_slice(n);
        let inv_sqrt = pinv_sym(&sym_sqrt(&self.shot_noise)?, PINV_CUTOFF);
        let w = inv_sqrt.matrix() * &n;
        let sn = w.dot(&w);
        let actual = w.dot(&(self.xi2.matrix() * &w));
        Ok(10.0 * (sn / actual).log10())
    }

    /// `10 log₁₀(Tr Σ_SN / Tr Σ)`, the gain for uncorrelated averaging.
    pub fn average_gain_db(&self) -> Result<f64> {
        let inv_sqrt = pinv_sym(&sym_sqrt(&self.shot_noise)?, PINV_CUTOFF);
        let sn = (inv_sqrt.matrix() * inv_sqrt.matrix()).trace();
        let actual = (inv_sqrt.matrix() * self.xi2.matrix() * inv_sqrt.matrix()).trace();
        Ok(10.0 * (sn / actual).log10())
    }
}

/// `Ξ² = F_SN^{1/2} M⁺ F_SN^{1/2}` with spectrum and shot-noise rank.
pub fn squeezing_matrix(moment: &RealSymMatrix, shot_noise: &RealSymMatrix) -> Result<SqueezingReport> {
    if moment.dim() != shot_noise.dim() {
        return Err(Error::DimensionMismatch(format!(
            "moment {}x{} vs shot noise {}x{}",
            moment.dim(),
            moment.dim(),
            shot_noise.dim(),
            shot_noise.dim()
        )));
    }
    let root = sym_sqrt(shot_noise)?;
    let mp = pinv_sym(moment, PINV_CUTOFF);
    let xi2 = RealSymMatrix::new(root.matrix() * mp.matrix() * root.matrix());

    let eig = sym_eig(moment)?;
    let scale = eig.values.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    let root_scale = root.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    let mut infinite = Vec::new();
    for (i, lam) in eig.values.iter().enumerate() {
        if lam.abs() <= PINV_CUTOFF * scale.max(f64::MIN_POSITIVE) || scale == 0.0 {
            let v = eig.vectors.column(i).into_owned();
            if (root.matrix() * &v).norm() > 1e-8 * root_scale.max(f64::MIN_POSITIVE) {
                infinite.push(v);
            }
        }
    }
    let mut report = SqueezingReport::from_xi2(xi2, shot_noise.clone())?;
    report.moment = Some(moment.clone());
    report.infinite_uncertainty = infinite;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use nalgebra::DMatrix;
    use approx::assert_relative_eq;

    #[test]
    fn moment_equal_to_shot_noise_gives_identity() {
        let f = RealSymMatrix::from_diagonal(&[3.0, 5.0]);
        let r = squeezing_matrix(&f, &f).unwrap();
        assert!(max_abs(&(r.xi2.matrix() - DMatrix::identity(2, 2))) < 1e-12);
        assert_eq!(r.shot_noise_rank, 0);
        assert!(!r.full_multiparameter_squeezing);
        assert!(r.infinite_uncertainty.is_empty());
    }

    #[test]
    fn rank_counts_sub_shot_noise_directions() {
        let m = RealSymMatrix::from_diagonal(&[4.0, 0.5, 2.0]);
        let r = squeezing_matrix(&m, &RealSymMatrix::identity(3)).unwrap();
        assert_eq!(r.shot_noise_rank, 2);
        assert_relative_eq!(r.eigenvalues[0], 0.25, epsilon = 1e-14);
        assert_relative_eq!(r.gain_db(&[1.0, 0.0, 0.0]).unwrap(), 10.0 * 4f64.log10(), epsilon = 1e-12);
    }

    #[test]
    fn full_rank_flag() {
        let m = RealSymMatrix::from_diagonal(&[2.0, 3.0]);
        let r = squeezing_matrix(&m, &RealSymMatrix::identity(2)).unwrap();
        assert!(r.full_multiparameter_squeezing);
    }

    #[test]
    fn singular_moment_flags_direction() {
        let m = RealSymMatrix::from_diagonal(&[1.0, 0.0]);
        let r = squeezing_matrix(&m, &RealSymMatrix::identity(2)).unwrap();
        assert_eq!(r.infinite_uncertainty.len(), 1);
        assert_relative_eq!(r.infinite_uncertainty[0][1].abs(), 1.0);
    }

    #[test]
    fn average_gain_of_identity_is_zero() {
        let r = SqueezingReport::from_xi2(RealSymMatrix::identity(2), RealSymMatrix::from_diagonal(&[50.0, 50.0])).unwrap();
        assert_eq!(r.average_gain_db().unwrap(), 0.0);
        assert_relative_eq!(r.gain_db(&[0.6, 0.8]).unwrap(), 0.0, epsilon = 1e-12);
    }
}
