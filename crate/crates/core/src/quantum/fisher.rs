use nalgebra::DMatrix;
use num_complex::Complex64;

use super::moments::{commutator_matrix, covariance_matrix, means};
use super::{ObservableSet, QuantumState};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, max_abs_c, CMatrix, RealSymMatrix};

/// Outcome probabilities at or below this value are left out of Fisher sums.
pub const P_FLOOR: f64 = 1e-12;

/// Quantum Fisher matrix for the unitary family generated by `h`.
///
/// Pure vectors use `4Γ[ψ, H]`. Density matrices go through the symmetric
/// logarithmic derivatives built on the eigenbasis of `ρ`; pairs of levels with
/// `p_i + p_j ≤ 1e-12` contribute nothing.
pub fn quantum_fisher_matrix(state: &QuantumState, h: &ObservableSet) -> Result<RealSymMatrix> {
    match state {
        QuantumState::Pure(_) => {
            let g = covariance_matrix(state, h)?;
            Ok(RealSymMatrix::new(g.matrix() * 4.0))
        }
        QuantumState::Mixed(rho) => {
            state.check_dim(h.dim())?;
            let eig = herm_eig(rho.matrix())?;
            let p: Vec<f64> = eig.values.iter().map(|x| x.max(0.0)).collect();
            let v = &eig.vectors;
            let rotated: Vec<CMatrix> =
                h.ops().iter().map(|op| v.adjoint() * op.matrix() * v).collect();
            let d = p.len();
            let m = h.len();
            let mut f = DMatrix::zeros(m, m);
            for i in 0..d {
                for j in 0..d {
                    let s = p[i] + p[j];
                    if s <= P_FLOOR {
                        continue;
                    }
                    let w = 2.0 * (p[i] - p[j]).powi(2) / s;
                    if w == 0.0 {
                        continue;
                    }
                    for k in 0..m {
                        for l in k..m {
                            let val = w * (rotated[k][(i, j)] * rotated[l][(j, i)]).re;
                            f[(k, l)] += val;
                            if k != l {
                                f[(l, k)] += val;
                            }
                        }
                    }
                }
            }
            Ok(RealSymMatrix::new(f))
        }
    }
}

/// Symmetric logarithmic derivatives `L_k` solving `−i[H_k, ρ] = (L_kρ + ρL_k)/2`
/// on the support of `ρ`, returned in the original basis.
pub fn sld_operators(state: &QuantumState, h: &ObservableSet) -> Result<Vec<CMatrix>> {
    state.check_dim(h.dim())?;
    let rho = state.density_matrix();
    let eig = herm_eig(&rho)?;
    let p: Vec<f64> = eig.values.iter().map(|x| x.max(0.0)).collect();
    let v = &eig.vectors;
    let d = p.len();
    Ok(h.ops()
        .iter()
        .map(|op| {
            let hr = v.adjoint() * op.matrix() * v;
            let lr = CMatrix::from_fn(d, d, |i, j| {
                let s = p[i] + p[j];
                if s > P_FLOOR {
                    Complex64::new(0.0, -2.0) * hr[(i, j)] * ((p[j] - p[i]) / s)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            v * lr * v.adjoint()
        })
        .collect())
}

/// Classical Fisher matrix of a projective measurement on the imprinted state,
/// with `∂_k p(x) = −i⟨[Π_x, H_k]⟩`.
pub fn classical_fisher_matrix(
    state_theta: &QuantumState,
    projectors: &ObservableSet,
    h: &ObservableSet,
) -> Result<RealSymMatrix> {
    let d = projectors.dim();
    let mut total = CMatrix::zeros(d, d);
    for p in projectors.ops() {
        total += p.matrix();
    }
    let dev = max_abs_c(&(total - CMatrix::identity(d, d)));
    if dev > 1e-10 {
        return Err(Error::NotResolvingIdentity(dev));
    }
    let probs = means(state_theta, projectors)?;
    let deriv = commutator_matrix(state_theta, projectors, h)?;
    let m = h.len();
    let mut f = DMatrix::zeros(m, m);
    for (x, px) in probs.iter().enumerate() {
        if *px <= P_FLOOR {
            continue;
        }
        let row = deriv.row(x);
        f += row.transpose() * row / *px;
    }
    Ok(RealSymMatrix::new(f))
}
