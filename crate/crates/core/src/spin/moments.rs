use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ops::{apply_mode_op, collective_spin_ops, joint_mode_ops, LocalDirection, SpinNetwork};
use super::Z_FLOOR_REL;
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, CMatrix, HermitianOp, RealMatrix, RealSymMatrix};
use crate::quantum::{second_moments, ObservableSet, QuantumState, SqueezingReport};

/// First and second moments of all collective spin components of a multimode
/// state, ordered `(J_{x,1}, J_{y,1}, J_{z,1}, J_{x,2}, …)`.
#[derive(Debug, Clone)]
pub struct SpinMoments {
    net: SpinNetwork,
    mean: Vec<f64>,
    second: CMatrix,
}

/// Collects the moments with mode-local operator application for pure states
/// and dense embedded operators for density matrices.
pub fn spin_moments(state: &QuantumState, net: &SpinNetwork) -> Result<SpinMoments> {
    state.check_dim(net.total_dim())?;
    let n_ops = 3 * net.modes();
    let (mean, second) = match state {
        QuantumState::Pure(psi) => {
            let mut images = Vec::with_capacity(n_ops);
            for k in 0..net.modes() {
                let local = collective_spin_ops(net.mode_sizes()[k])?;
                for op in local.as_array() {
                    images.push(apply_mode_op(net, k, op.matrix(), psi)?);
                }
            }
            let mean = images.iter().map(|v| psi.dotc(v).re).collect();
            let second = CMatrix::from_fn(n_ops, n_ops, |a, b| images[a].dotc(&images[b]));
            (mean, second)
        }
        QuantumState::Mixed(_) => {
            let ops: Vec<HermitianOp> = joint_mode_ops(net)?
                .into_iter()
                .flat_map(|o| [o.jx, o.jy, o.jz])
                .collect();
            let set = ObservableSet::new("J", ops)?;
            let second = second_moments(state, &set, &set)?;
            let mean = set.ops().iter().map(|o| state.expect(o.matrix()).re).collect();
            (mean, second)
        }
    };
    Ok(SpinMoments { net: net.clone(), mean, second })
}

impl SpinMoments {
    pub fn network(&self) -> &SpinNetwork {
        &self.net
    }

    /// `(⟨J_x⟩, ⟨J_y⟩, ⟨J_z⟩)` of mode `k`.
    pub fn mean_spin(&self, k: usize) -> [f64; 3] {
        [self.mean[3 * k], self.mean[3 * k + 1], self.mean[3 * k + 2]]
    }

    pub fn jz(&self, k: usize) -> f64 {
        self.mean[3 * k + 2]
    }

    fn sym_cov(&self, a: usize, b: usize) -> f64 {
        self.second[(a, b)].re - self.mean[a] * self.mean[b]
    }

    /// Symmetrized covariance of the in-plane components
    /// `(J_{x,1}, J_{y,1}, J_{x,2}, J_{y,2}, …)`.
    pub fn perp_covariance(&self) -> RealSymMatrix {
        let idx = self.perp_indices();
        let n = idx.len();
        RealSymMatrix::new(DMatrix::from_fn(n, n, |i, j| self.sym_cov(idx[i], idx[j])))
    }

    /// `−i⟨[A_i, A_j]⟩` for the in-plane components.
    pub fn perp_commutator(&self) -> RealMatrix {
        let idx = self.perp_indices();
        let n = idx.len();
        DMatrix::from_fn(n, n, |i, j| {
            self.second[(idx[i], idx[j])].im - self.second[(idx[j], idx[i])].im
        })
    }

    /// In-plane 2×2 covariance block `[[Var J_x, Cov], [Cov, Var J_y]]` of mode `k`.
    pub fn plane_block(&self, k: usize) -> [[f64; 2]; 2] {
        let (x, y) = (3 * k, 3 * k + 1);
        [[self.sym_cov(x, x), self.sym_cov(x, y)], [self.sym_cov(y, x), self.sym_cov(y, y)]]
    }

    /// `Cov(s_k·J_k, s_l·J_l)` for in-plane unit vectors.
    pub fn directional_cov(&self, k: usize, s_k: [f64; 2], l: usize, s_l: [f64; 2]) -> f64 {
        let mut acc = 0.0;
        for (a, ca) in s_k.iter().enumerate() {
            for (b, cb) in s_l.iter().enumerate() {
                acc += ca * cb * self.sym_cov(3 * k + a, 3 * l + b);
            }
        }
        acc
    }

    fn perp_indices(&self) -> Vec<usize> {
        (0..self.net.modes()).flat_map(|k| [3 * k, 3 * k + 1]).collect()
    }

    pub(crate) fn check_mean_spin(&self) -> Result<()> {
        for k in 0..self.net.modes() {
            let floor = Z_FLOOR_REL * self.net.mode_sizes()[k] as f64;
            let jz = self.jz(k);
            if jz.abs() <= floor {
                return Err(Error::ZeroMeanSpin { mode: k, mean: jz, floor });
            }
        }
        Ok(())
    }

    /// Squeezing matrix
    /// `Ξ²_kl = √(N_k N_l) Cov(J_{s_k,k}, J_{s_l,l}) / (⟨J_{z,k}⟩⟨J_{z,l}⟩)`
    /// without validation, for use inside optimizers.
    pub(crate) fn xi2_raw(&self, dirs: &LocalDirection) -> DMatrix<f64> {
        let m = self.net.modes();
        let sizes = self.net.mode_sizes();
        DMatrix::from_fn(m, m, |k, l| {
            let norm = (sizes[k] as f64 * sizes[l] as f64).sqrt() / (self.jz(k) * self.jz(l));
            norm * self.directional_cov(k, dirs.s(k), l, dirs.s(l))
        })
    }

    /// Validated squeezing report for the given directions.
    pub fn squeezing(&self, dirs: &LocalDirection) -> Result<SqueezingReport> {
        if dirs.modes() != self.net.modes() {
            return Err(Error::DimensionMismatch(format!(
                "{} directions for {} modes",
                dirs.modes(),
                self.net.modes()
            )));
        }
        self.check_mean_spin()?;
        SqueezingReport::from_xi2(RealSymMatrix::new(self.xi2_raw(dirs)), shot_noise_matrix_spin(&self.net))
    }
}

/// Spin-squeezing matrix of a multimode state for local measurement and
/// rotation directions; shot noise is `diag(N_1, …, N_M)`.
pub fn spin_squeezing_matrix(state: &QuantumState, net: &SpinNetwork, dirs: &LocalDirection) -> Result<SqueezingReport> {
    spin_moments(state, net)?.squeezing(dirs)
}

/// Minimal single-mode Wineland coefficient from the in-plane covariance
/// block, returning `(ξ²_min, φ)` where `φ` is the angle of the optimal
/// measured direction.
pub fn xi_min_from_moments(block: [[f64; 2]; 2], jz: f64, n: usize) -> (f64, f64) {
    let plus = 0.5 * (block[0][0] + block[1][1]);
    let minus = 0.5 * (block[0][0] - block[1][1]);
    let cov = 0.5 * (block[0][1] + block[1][0]);
    let radius = (cov * cov + minus * minus).sqrt();
    let xi2 = n as f64 / (jz * jz) * (plus - radius);
    // Variance along φ is plus + radius·cos(2φ − α) with α = atan2(cov, minus).
    let alpha = cov.atan2(minus);
    let phi = 0.5 * (alpha + std::f64::consts::PI);
    (xi2, phi)
}

/// Closed-form minimum over in-plane directions of the single-mode
/// squeezing coefficient, with the optimal measurement angle.
pub fn local_xi_min(state_k: &QuantumState, n_k: usize) -> Result<(f64, f64)> {
    let net = SpinNetwork::new(vec![n_k])?;
    let m = spin_moments(state_k, &net)?;
    m.check_mean_spin()?;
    Ok(xi_min_from_moments(m.plane_block(0), m.jz(0), n_k))
}

/// Shot-noise Fisher matrix `diag(N_1, …, N_M)` for one local generator per mode.
pub fn shot_noise_matrix_spin(net: &SpinNetwork) -> RealSymMatrix {
    let d: Vec<f64> = net.mode_sizes().iter().map(|&n| n as f64).collect();
    RealSymMatrix::from_diagonal(&d)
}

/// Shot-noise Fisher matrix `diag(N_1, N_1, …, N_M, N_M)` over the in-plane
/// components of every mode.
pub fn shot_noise_perp(net: &SpinNetwork) -> RealSymMatrix {
    let d: Vec<f64> = net.mode_sizes().iter().flat_map(|&n| [n as f64, n as f64]).collect();
    RealSymMatrix::from_diagonal(&d)
}

/// Shot-noise Fisher matrix `R F_SN[J_⊥] Rᵀ` of generators `H = R J_⊥`.
pub fn shot_noise_for(net: &SpinNetwork, r: &RealMatrix) -> Result<RealSymMatrix> {
    let f = shot_noise_perp(net);
    if r.ncols() != f.dim() {
        return Err(Error::DimensionMismatch(format!(
            "R has {} columns, expected {}",
            r.ncols(),
            f.dim()
        )));
    }
    Ok(RealSymMatrix::new(r * f.matrix() * r.transpose()))
}

/// Rotates every mode so that its mean spin points along `+z`.
pub fn align_mean_spin(state: &QuantumState, net: &SpinNetwork) -> Result<QuantumState> {
    let moments = spin_moments(state, net)?;
    let mut out = state.clone();
    for k in 0..net.modes() {
        let [x, y, z] = moments.mean_spin(k);
        let len = (x * x + y * y + z * z).sqrt();
        let floor = Z_FLOOR_REL * net.mode_sizes()[k] as f64;
        if len <= floor {
            return Err(Error::ZeroMeanSpin { mode: k, mean: len, floor });
        }
        let planar = (x * x + y * y).sqrt();
        if planar <= 1e-15 * len && z > 0.0 {
            continue;
        }
        // Rotate by the polar angle about the axis (mean × ẑ)/|mean × ẑ|.
        let beta = (z / len).clamp(-1.0, 1.0).acos();
        let (ax, ay) = if planar > 1e-15 * len { (y / planar, -x / planar) } else { (1.0, 0.0) };
        let local = collective_spin_ops(net.mode_sizes()[k])?;
        let gen = local.jx.matrix() * Complex64::new(ax, 0.0) + local.jy.matrix() * Complex64::new(ay, 0.0);
        let u = herm_eig(&gen)?.map_values(|l| Complex64::new(0.0, -beta * l).exp());
        out = match &out {
            QuantumState::Pure(psi) => QuantumState::Pure(apply_mode_op(net, k, &u, psi)?),
            QuantumState::Mixed(_) => {
                let (outer, inner) = net.outer_inner(k);
                let full = CMatrix::identity(outer, outer).kronecker(&u).kronecker(&CMatrix::identity(inner, inner));
                out.apply_unitary(&full)
            }
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_state_vector;
    use crate::linalg::{max_abs, sym_eig};
    use crate::spin::states::{css_up, oat_local, oat_nonlocal};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn css_gives_identity() {
        let net = SpinNetwork::new(vec![4, 6]).unwrap();
        let r = spin_squeezing_matrix(&css_up(&net), &net, &LocalDirection::from_angles(&[0.4, 2.0])).unwrap();
        assert!(max_abs(&(r.xi2.matrix() - DMatrix::identity(2, 2))) < 1e-12);
        assert_eq!(r.shot_noise_rank, 0);
        let (xi, _) = local_xi_min(&css_up(&SpinNetwork::new(vec![7]).unwrap()), 7).unwrap();
        assert_relative_eq!(xi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn local_oat_is_diagonal() {
        let net = SpinNetwork::split_evenly(20).unwrap();
        let s = oat_local(&net, 0.1).unwrap();
        let r = spin_squeezing_matrix(&s, &net, &LocalDirection::from_angles(&[0.3, 1.1])).unwrap();
        assert!(r.xi2[(0, 1)].abs() < 1e-10);
    }

    #[test]
    fn zero_mean_spin_is_rejected() {
        let net = SpinNetwork::new(vec![2]).unwrap();
        let mut v = crate::linalg::CVector::zeros(3);
        v[1] = Complex64::new(1.0, 0.0);
        let s = QuantumState::Pure(v);
        assert!(matches!(
            spin_squeezing_matrix(&s, &net, &LocalDirection::from_angles(&[0.0])),
            Err(Error::ZeroMeanSpin { mode: 0, .. })
        ));
    }

    #[test]
    fn closed_form_reduces_without_covariance() {
        let block = [[0.2, 0.0], [0.0, 3.0]];
        let (xi, phi) = xi_min_from_moments(block, 2.0, 4);
        assert_relative_eq!(xi, 4.0 * 0.2 / 4.0, epsilon = 1e-15);
        assert_relative_eq!(phi.cos().abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn returned_angle_reproduces_minimum() {
        let net = SpinNetwork::new(vec![12]).unwrap();
        let s = oat_local(&net, 0.15).unwrap();
        let (xi, phi) = local_xi_min(&s, 12).unwrap();
        let direct = spin_squeezing_matrix(&s, &net, &LocalDirection::from_angles(&[phi])).unwrap();
        assert!((direct.xi2[(0, 0)] - xi).abs() < 1e-9);
        assert!(xi < 1.0);
    }

    #[test]
    fn squeezed_mode_has_antisqueezed_partner() {
        let net = SpinNetwork::new(vec![10]).unwrap();
        for chi in [0.05, 0.1, 0.2] {
            let s = oat_local(&net, chi).unwrap();
            let m = spin_moments(&s, &net).unwrap();
            let b = m.plane_block(0);
            let scale = 10.0 / (m.jz(0) * m.jz(0));
            let eig = sym_eig(&RealSymMatrix::new(DMatrix::from_row_slice(2, 2, &[b[0][0], b[0][1], b[1][0], b[1][1]]))).unwrap();
            if eig.values[0] * scale < 1.0 {
                assert!(eig.values[1] * scale > 1.0);
            }
        }
    }

    #[test]
    fn shot_noise_matrices() {
        let net = SpinNetwork::new(vec![50, 50]).unwrap();
        assert_eq!(shot_noise_matrix_spin(&net), RealSymMatrix::from_diagonal(&[50.0, 50.0]));
        assert_eq!(shot_noise_perp(&net), RealSymMatrix::from_diagonal(&[50.0, 50.0, 50.0, 50.0]));
        let single = SpinNetwork::new(vec![9]).unwrap();
        assert_eq!(shot_noise_matrix_spin(&single)[(0, 0)], 9.0);
        let h = 0.5f64.sqrt();
        let r = DMatrix::from_row_slice(2, 4, &[h, 0.0, h, 0.0, 0.0, h, 0.0, -h]);
        let f = shot_noise_for(&net, &r).unwrap();
        assert!(max_abs(&(f.matrix() - DMatrix::identity(2, 2) * 50.0)) < 1e-12);
    }

    #[test]
    fn pure_and_mixed_paths_agree() {
        let net = SpinNetwork::new(vec![2, 3]).unwrap();
        let s = oat_nonlocal(&net, 0.2).unwrap();
        let a = spin_moments(&s, &net).unwrap();
        let b = spin_moments(&s.to_mixed(), &net).unwrap();
        assert!(max_abs(&(a.perp_covariance().matrix() - b.perp_covariance().matrix())) < 1e-12);
        assert!(max_abs(&(a.perp_commutator() - b.perp_commutator())) < 1e-12);
    }

    #[test]
    fn alignment_points_mean_spin_up() {
        let net = SpinNetwork::new(vec![3, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_state_vector(4, &mut rng);
        let b = random_state_vector(3, &mut rng);
        let s = QuantumState::Pure(a.kronecker(&b));
        let before = spin_moments(&s, &net).unwrap();
        let aligned = align_mean_spin(&s, &net).unwrap();
        let after = spin_moments(&aligned, &net).unwrap();
        for k in 0..2 {
            let [x0, y0, z0] = before.mean_spin(k);
            let [x, y, z] = after.mean_spin(k);
            assert!(x.abs() < 1e-10 && y.abs() < 1e-10);
            assert_relative_eq!(z, (x0 * x0 + y0 * y0 + z0 * z0).sqrt(), epsilon = 1e-10);
        }
    }
}
