use num_complex::Complex64;

use super::ops::{apply_mode_op, collective_spin_ops, SpinNetwork};
use crate::error::Result;
use crate::linalg::{herm_eig, CVector, HermEigen};
use crate::quantum::QuantumState;

/// Product of the top Dicke states: every particle polarized along `+z`.
pub fn css_up(net: &SpinNetwork) -> QuantumState {
    let mut v = CVector::zeros(net.total_dim());
    v[0] = Complex64::new(1.0, 0.0);
    QuantumState::Pure(v)
}

/// One-axis twisting about `y` applied to the polarized state, with the
/// per-mode `J_y` eigendecompositions cached so scans over `χt` reuse them.
#[derive(Debug, Clone)]
pub struct OatPropagator {
    net: SpinNetwork,
    jy: Vec<HermEigen>,
    /// `Σ_k m_k` for every joint index of the `J_y` eigenbasis.
    joint_m: Vec<f64>,
}

impl OatPropagator {
    pub fn new(net: &SpinNetwork) -> Result<Self> {
        let jy = net
            .mode_sizes()
            .iter()
            .map(|&n| herm_eig(collective_spin_ops(n)?.jy.matrix()))
            .collect::<Result<Vec<_>>>()?;
        let mut joint_m = vec![0.0; net.total_dim()];
        for (idx, slot) in joint_m.iter_mut().enumerate() {
            let mut rest = idx;
            for k in (0..net.modes()).rev() {
                let d = net.mode_dim(k);
                *slot += jy[k].values[rest % d];
                rest /= d;
            }
        }
        Ok(Self { net: net.clone(), jy, joint_m })
    }

    pub fn network(&self) -> &SpinNetwork {
        &self.net
    }

    /// `exp(−i χt Σ_k J_{y,k}²) |↑…↑⟩`: twisting within each mode.
    pub fn local(&self, chi_t: f64) -> Result<QuantumState> {
        let mut psi = css_up(&self.net).as_vector().cloned().expect("pure");
        for (k, eig) in self.jy.iter().enumerate() {
            let u = eig.map_values(|m| Complex64::new(0.0, -m * m * chi_t).exp());
            psi = apply_mode_op(&self.net, k, &u, &psi)?;
        }
        Ok(QuantumState::Pure(psi))
    }

    /// `exp(−i χt (Σ_k J_{y,k})²) |↑…↑⟩`: twisting of the joint spin.
    pub fn nonlocal(&self, chi_t: f64) -> Result<QuantumState> {
        let mut psi = css_up(&self.net).as_vector().cloned().expect("pure");
        for (k, eig) in self.jy.iter().enumerate() {
            psi = apply_mode_op(&self.net, k, &eig.vectors.adjoint(), &psi)?;
        }
        for (z, m) in psi.iter_mut().zip(&self.joint_m) {
            *z *= Complex64::new(0.0, -m * m * chi_t).exp();
        }
        for (k, eig) in self.jy.iter().enumerate() {
            psi = apply_mode_op(&self.net, k, &eig.vectors, &psi)?;
        }
        Ok(QuantumState::Pure(psi))
    }
}

/// Local one-axis twisting `exp(−i χt Σ_k J_{y,k}²)|↑…↑⟩`.
pub fn oat_local(net: &SpinNetwork, chi_t: f64) -> Result<QuantumState> {
    OatPropagator::new(net)?.local(chi_t)
}

/// Collective one-axis twisting `exp(−i χt (Σ_k J_{y,k})²)|↑…↑⟩`.
pub fn oat_nonlocal(net: &SpinNetwork, chi_t: f64) -> Result<QuantumState> {
    OatPropagator::new(net)?.nonlocal(chi_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::spin::ops::joint_mode_ops;
    use nalgebra::SVD;

    fn schmidt_values(net: &SpinNetwork, psi: &CVector) -> Vec<f64> {
        let (d0, d1) = (net.mode_dim(0), net.mode_dim(1));
        let m = CMatrix::from_fn(d0, d1, |a, b| psi[a * d1 + b]);
        SVD::new(m, false, false).singular_values.iter().copied().collect()
    }

    #[test]
    fn css_expectations() {
        let net = SpinNetwork::new(vec![2]).unwrap();
        let s = css_up(&net);
        assert_eq!(s.as_vector().unwrap().iter().map(|z| z.re).collect::<Vec<_>>(), vec![1.0, 0.0, 0.0]);
        let net = SpinNetwork::new(vec![3, 5]).unwrap();
        let s = css_up(&net);
        let ops = joint_mode_ops(&net).unwrap();
        for (k, o) in ops.iter().enumerate() {
            let n = net.mode_sizes()[k] as f64;
            assert!((s.expect(o.jz.matrix()).re - n / 2.0).abs() < 1e-14);
            assert!(s.expect(o.jx.matrix()).norm() < 1e-14);
            assert!(s.expect(o.jy.matrix()).norm() < 1e-14);
            let var = s.expect(&(o.jx.matrix() * o.jx.matrix())).re;
            assert!((var - n / 4.0).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_twist_is_css() {
        let net = SpinNetwork::split_evenly(8).unwrap();
        let css = css_up(&net);
        for s in [oat_local(&net, 0.0).unwrap(), oat_nonlocal(&net, 0.0).unwrap()] {
            assert!((s.as_vector().unwrap() - css.as_vector().unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn local_twist_stays_product() {
        let net = SpinNetwork::split_evenly(10).unwrap();
        let prop = OatPropagator::new(&net).unwrap();
        for chi in [0.05, 0.2, 0.7] {
            let s = prop.local(chi).unwrap();
            let sv = schmidt_values(&net, s.as_vector().unwrap());
            assert!(sv[1] < 1e-10, "Schmidt rank above one at χt={chi}");
            assert!((s.as_vector().unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nonlocal_twist_entangles_modes() {
        let net = SpinNetwork::split_evenly(10).unwrap();
        let s = oat_nonlocal(&net, 0.02).unwrap();
        let sv = schmidt_values(&net, s.as_vector().unwrap());
        let entropy: f64 = sv.iter().map(|x| x * x).filter(|p| *p > 0.0).map(|p| -p * p.ln()).sum();
        assert!(entropy > 1e-4);
    }

    #[test]
    fn nonlocal_matches_dense_exponential() {
        let net = SpinNetwork::new(vec![2, 3]).unwrap();
        let ops = joint_mode_ops(&net).unwrap();
        let g = ops[0].jy.matrix() + ops[1].jy.matrix();
        let g2 = &g * &g;
        let eig = herm_eig(&g2).unwrap();
        let u = eig.map_values(|l| Complex64::new(0.0, -0.37 * l).exp());
        let expect = u * css_up(&net).as_vector().unwrap();
        let got = oat_nonlocal(&net, 0.37).unwrap();
        assert!((got.as_vector().unwrap() - expect).norm() < 1e-12);
    }
}
