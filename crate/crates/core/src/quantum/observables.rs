use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{commutator, max_abs_c, row_orthonormality_error, HermitianOp, RealMatrix};

/// Ordered, nonempty list of Hermitian operators on one Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    ops: Vec<HermitianOp>,
    label: String,
}

impl ObservableSet {
    pub fn new(label: impl Into<String>, ops: Vec<HermitianOp>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::InvalidArgument("observable set must be nonempty".into()));
        };
        let d = first.dim();
        if let Some(bad) = ops.iter().find(|o| o.dim() != d) {
            return Err(Error::DimensionMismatch(format!(
                "operators of dimension {d} and {}",
                bad.dim()
            )));
        }
        Ok(Self { ops, label: label.into() })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn ops(&self) -> &[HermitianOp] {
        &self.ops
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// New set whose `i`-th operator is `Σ_j coeffs[(i,j)] ops_j`.
    pub fn combine(&self, label: impl Into<String>, coeffs: &RealMatrix) -> Result<Self> {
        if coeffs.ncols() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficient columns for {} operators",
                coeffs.ncols(),
                self.len()
            )));
        }
        let ops = coeffs
            .row_iter()
            .map(|row| {
                let c: Vec<f64> = row.iter().copied().collect();
                HermitianOp::real_combination(&c, &self.ops)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, ops)
    }

    /// `‖[A_i, A_j]‖_max` for every pair.
    pub fn commutator_norms(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let c = max_abs_c(&commutator(self.ops[i].matrix(), self.ops[j].matrix()));
                out[(i, j)] = c;
                out[(j, i)] = c;
            }
        }
        out
    }

    pub fn max_commutator_norm(&self) -> f64 {
        self.commutator_norms().iter().fold(0.0_f64, |a, b| a.max(*b))
    }
}

/// Row-orthonormal real matrices mapping accessible operators to generators
/// (`H = R A`) and measured observables (`X = S A`).
#[derive(Debug, Clone, PartialEq)]
pub struct TransformPair {
    r: RealMatrix,
    s: RealMatrix,
}

impl TransformPair {
    pub fn new(r: RealMatrix, s: RealMatrix) -> Result<Self> {
        if r.ncols() != s.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "R has {} columns, S has {}",
                r.ncols(),
                s.ncols()
            )));
        }
        for m in [&r, &s] {
            let e = row_orthonormality_error(m);
            if e > 1e-10 {
                return Err(Error::NotOrthonormal(e));
            }
        }
        Ok(Self { r, s })
    }

    pub fn r(&self) -> &RealMatrix {
        &self.r
    }

    pub fn s(&self) -> &RealMatrix {
        &self.s
    }

    /// Generators `R A` and observables `S A`.
    pub fn apply(&self, a: &ObservableSet) -> Result<(ObservableSet, ObservableSet)> {
        Ok((a.combine("H", &self.r)?, a.combine("X", &self.s)?))
    }
}
