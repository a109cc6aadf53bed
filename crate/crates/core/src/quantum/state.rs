use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, CMatrix, CVector, HermitianOp};

const NORM_TOL: f64 = 1e-10;

/// A pure state vector or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(CVector),
    Mixed(HermitianOp),
}

impl QuantumState {
    /// Wraps a unit vector; the norm must be 1 within `1e-10`.
    pub fn pure(v: CVector) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state vector has norm {n}")));
        }
        Ok(Self::Pure(v))
    }

    /// Normalizes `v` and wraps it.
    pub fn pure_normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self::Pure(v / Complex64::new(n, 0.0)))
    }

    /// Wraps a density matrix after checking unit trace and positivity.
    pub fn mixed(rho: HermitianOp) -> Result<Self> {
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("density matrix has trace {tr}")));
        }
        let eig = herm_eig(rho.matrix())?;
        if eig.values[0] < -NORM_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix has eigenvalue {:e}",
                eig.values[0]
            )));
        }
        Ok(Self::Mixed(rho))
    }

    /// Convex mixture `Σ w_i ρ_i`.
    pub fn mixture(weights: &[f64], states: &[QuantumState]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch("weights and states differ in length".into()));
        }
        let d = states[0].dim();
        let mut rho = CMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != d {
                return Err(Error::DimensionMismatch("mixture of unequal dimensions".into()));
            }
            rho += s.density_matrix() * Complex64::new(*w, 0.0);
        }
        Self::mixed(HermitianOp::hermitian_part(rho))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(v) => v.len(),
            Self::Mixed(r) => r.dim(),
        }
    }

    pub fn is_pure_vector(&self) -> bool {
        matches!(self, Self::Pure(_))
    }

    pub fn as_vector(&self) -> Option<&CVector> {
        match self {
            Self::Pure(v) => Some(v),
            Self::Mixed(_) => None,
        }
    }

    pub fn density_matrix(&self) -> CMatrix {
        match self {
            Self::Pure(v) => v * v.adjoint(),
            Self::Mixed(r) => r.matrix().clone(),
        }
    }

    /// Same state as a density matrix.
    pub fn to_mixed(&self) -> Self {
        match self {
            Self::Pure(_) => Self::Mixed(HermitianOp::hermitian_part(self.density_matrix())),
            Self::Mixed(_) => self.clone(),
        }
    }

    /// `Tr(ρ A)`.
    pub fn expect(&self, op: &CMatrix) -> Complex64 {
        match self {
            Self::Pure(v) => v.dotc(&(op * v)),
            Self::Mixed(r) => (r.matrix() * op).trace(),
        }
    }

    /// `U ρ U†`.
    pub fn apply_unitary(&self, u: &CMatrix) -> Self {
        match self {
            Self::Pure(v) => Self::Pure(u * v),
            Self::Mixed(r) => Self::Mixed(HermitianOp::hermitian_part(u * r.matrix() * u.adjoint())),
        }
    }

    /// Diagonal of `ρ` in the basis given by the columns of `basis`.
    pub fn probabilities_in(&self, basis: &CMatrix) -> DVector<f64> {
        match self {
            Self::Pure(v) => {
                let amp = basis.adjoint() * v;
                amp.map(|z| z.norm_sqr())
            }
            Self::Mixed(r) => {
                let rot = basis.adjoint() * r.matrix() * basis;
                DVector::from_iterator(rot.nrows(), (0..rot.nrows()).map(|i| rot[(i, i)].re))
            }
        }
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {} with operators of dimension {d}",
                self.dim()
            )));
        }
        Ok(())
    }
}
