use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianOp};

/// Particle numbers of the modes of a multimode spin system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinNetwork {
    mode_sizes: Vec<usize>,
}

impl SpinNetwork {
    pub fn new(mode_sizes: Vec<usize>) -> Result<Self> {
        if mode_sizes.is_empty() || mode_sizes.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "every mode needs at least one particle, got {mode_sizes:?}"
            )));
        }
        Ok(Self { mode_sizes })
    }

    /// Two modes of `n/2` particles each; `n` must be even and positive.
    pub fn split_evenly(n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("total particle number must be even and positive, got {n}")));
        }
        Self::new(vec![n / 2, n / 2])
    }

    pub fn modes(&self) -> usize {
        self.mode_sizes.len()
    }

    pub fn mode_sizes(&self) -> &[usize] {
        &self.mode_sizes
    }

    pub fn total_particles(&self) -> usize {
        self.mode_sizes.iter().sum()
    }

    pub fn mode_dim(&self, k: usize) -> usize {
        self.mode_sizes[k] + 1
    }

    pub fn total_dim(&self) -> usize {
        self.mode_sizes.iter().map(|n| n + 1).product()
    }

    /// Product of the dimensions of modes before and after `k`.
    pub(crate) fn outer_inner(&self, k: usize) -> (usize, usize) {
        let outer = self.mode_sizes[..k].iter().map(|n| n + 1).product();
        let inner = self.mode_sizes[k + 1..].iter().map(|n| n + 1).product();
        (outer, inner)
    }

    pub(crate) fn check_mode(&self, k: usize) -> Result<()> {
        if k >= self.modes() {
            return Err(Error::InvalidArgument(format!("mode {k} out of range for {} modes", self.modes())));
        }
        Ok(())
    }
}

/// `J_x, J_y, J_z` for a single collective spin.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub jx: HermitianOp,
    pub jy: HermitianOp,
    pub jz: HermitianOp,
}

impl SpinOps {
    pub fn as_array(&self) -> [&HermitianOp; 3] {
        [&self.jx, &self.jy, &self.jz]
    }
}

/// Angular momentum matrices for spin `N/2` in the basis `m = N/2, …, −N/2`.
pub fn collective_spin_ops(n: usize) -> Result<SpinOps> {
    if n == 0 {
        return Err(Error::InvalidArgument("particle number must be positive".into()));
    }
    let j = n as f64 / 2.0;
    let d = n + 1;
    // ⟨m+1|J₊|m⟩ = √(j(j+1) − m(m+1)); index i holds m = j − i.
    let mut raise = CMatrix::zeros(d, d);
    for i in 1..d {
        let m = j - i as f64;
        raise[(i - 1, i)] = Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let jx = HermitianOp::hermitian_part((&raise + &lower) * Complex64::new(0.5, 0.0));
    let jy = HermitianOp::hermitian_part((&raise - &lower) * Complex64::new(0.0, -0.5));
    let jz = HermitianOp::hermitian_part(DMatrix::from_fn(d, d, |a, b| {
        Complex64::new(if a == b { j - a as f64 } else { 0.0 }, 0.0)
    }));
    Ok(SpinOps { jx, jy, jz })
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` acting on mode `k`.
pub fn embed_mode_op(net: &SpinNetwork, k: usize, op: &HermitianOp) -> Result<HermitianOp> {
    net.check_mode(k)?;
    if op.dim() != net.mode_dim(k) {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} on mode {k} of dimension {}",
            op.dim(),
            net.mode_dim(k)
        )));
    }
    let (outer, inner) = net.outer_inner(k);
    let full = CMatrix::identity(outer, outer)
        .kronecker(op.matrix())
        .kronecker(&CMatrix::identity(inner, inner));
    Ok(HermitianOp::hermitian_part(full))
}

/// Embedded `J_x, J_y, J_z` of every mode.
pub fn joint_mode_ops(net: &SpinNetwork) -> Result<Vec<SpinOps>> {
    (0..net.modes())
        .map(|k| {
            let local = collective_spin_ops(net.mode_sizes()[k])?;
            Ok(SpinOps {
                jx: embed_mode_op(net, k, &local.jx)?,
                jy: embed_mode_op(net, k, &local.jy)?,
                jz: embed_mode_op(net, k, &local.jz)?,
            })
        })
        .collect()
}

/// Applies a mode-local matrix to a joint state vector without forming the
/// embedded operator.
pub fn apply_mode_op(net: &SpinNetwork, k: usize, op: &CMatrix, psi: &CVector) -> Result<CVector> {
    net.check_mode(k)?;
    let d = net.mode_dim(k);
    if op.shape() != (d, d) || psi.len() != net.total_dim() {
        return Err(Error::DimensionMismatch(format!(
            "mode operator {:?} and state of length {} on network {:?}",
            op.shape(),
            psi.len(),
            net.mode_sizes()
        )));
    }
    let (outer, inner) = net.outer_inner(k);
    let mut out = CVector::zeros(psi.len());
    for o in 0..outer {
        let base = o * d * inner;
        for a in 0..d {
            for b in 0..d {
                let c = op[(a, b)];
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (dst, src) = (base + a * inner, base + b * inner);
                for i in 0..inner {
                    out[dst + i] += c * psi[src + i];
                }
            }
        }
    }
    Ok(out)
}

/// Per-mode orthonormal in-plane directions: the measured spin component
/// `s_k` and the rotation axis `r_k`, with `r_k` obtained from `s_k` by a
/// quarter turn so that `s_k × r_k = +ẑ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDirection {
    s: Vec<[f64; 2]>,
}

impl LocalDirection {
    pub fn from_angles(angles: &[f64]) -> Self {
        Self { s: angles.iter().map(|a| [a.cos(), a.sin()]).collect() }
    }

    pub fn from_vectors(s: Vec<[f64; 2]>) -> Result<Self> {
        for v in &s {
            let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
            if (n - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("direction {v:?} is not a unit vector")));
            }
        }
        Ok(Self { s })
    }

    pub fn modes(&self) -> usize {
        self.s.len()
    }

    /// Measured direction of mode `k`.
    pub fn s(&self, k: usize) -> [f64; 2] {
        self.s[k]
    }

    /// Rotation axis of mode `k`.
    pub fn r(&self, k: usize) -> [f64; 2] {
        let [x, y] = self.s[k];
        [-y, x]
    }

    pub fn angle(&self, k: usize) -> f64 {
        self.s[k][1].atan2(self.s[k][0])
    }

    /// Same directions with `r_k` and `s_k` of mode `k` negated.
    pub fn flipped(&self, k: usize) -> Self {
        let mut s = self.s.clone();
        s[k] = [-s[k][0], -s[k][1]];
        Self { s }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, max_abs_c};
    use crate::linalg::random::random_state_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spin_half_is_pauli_over_two() {
        let s = collective_spin_ops(1).unwrap();
        assert_eq!(s.jx[(0, 1)], Complex64::new(0.5, 0.0));
        assert_eq!(s.jy[(0, 1)], Complex64::new(0.0, -0.5));
        assert_eq!(s.jz[(1, 1)], Complex64::new(-0.5, 0.0));
    }

    #[test]
    fn spin_one_jz() {
        let s = collective_spin_ops(2).unwrap();
        let d: Vec<f64> = (0..3).map(|i| s.jz[(i, i)].re).collect();
        assert_eq!(d, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn algebra_and_casimir() {
        for n in [1, 2, 5, 10] {
            let s = collective_spin_ops(n).unwrap();
            let c = commutator(s.jx.matrix(), s.jy.matrix()) - s.jz.matrix() * Complex64::new(0.0, 1.0);
            assert!(max_abs_c(&c) < 1e-12);
            let j = n as f64 / 2.0;
            let cas = s.jx.matrix() * s.jx.matrix() + s.jy.matrix() * s.jy.matrix() + s.jz.matrix() * s.jz.matrix();
            let d = n + 1;
            assert!(max_abs_c(&(cas - CMatrix::identity(d, d) * Complex64::new(j * (j + 1.0), 0.0))) < 1e-12);
        }
    }

    #[test]
    fn embeddings_commute_and_preserve_identity() {
        let net = SpinNetwork::new(vec![2, 3]).unwrap();
        let id = embed_mode_op(&net, 0, &HermitianOp::identity(3)).unwrap();
        assert_eq!(id.matrix(), &CMatrix::identity(12, 12));
        let ops = joint_mode_ops(&net).unwrap();
        assert!(max_abs_c(&commutator(ops[0].jy.matrix(), ops[1].jy.matrix())) < 1e-12);
        assert!(embed_mode_op(&net, 1, &HermitianOp::identity(3)).is_err());
    }

    #[test]
    fn local_application_matches_embedding() {
        let net = SpinNetwork::new(vec![2, 1, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let psi = random_state_vector(net.total_dim(), &mut rng);
        for k in 0..3 {
            let local = collective_spin_ops(net.mode_sizes()[k]).unwrap();
            let fast = apply_mode_op(&net, k, local.jy.matrix(), &psi).unwrap();
            let dense = embed_mode_op(&net, k, &local.jy).unwrap().matrix() * &psi;
            assert!((fast - dense).norm() < 1e-12);
        }
    }

    #[test]
    fn product_state_expectation_factorizes() {
        let net = SpinNetwork::new(vec![2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_state_vector(3, &mut rng);
        let b = random_state_vector(3, &mut rng);
        let joint = a.kronecker(&b);
        let local = collective_spin_ops(2).unwrap();
        let emb = embed_mode_op(&net, 1, &local.jx).unwrap();
        let lhs = joint.dotc(&(emb.matrix() * &joint));
        let rhs = b.dotc(&(local.jx.matrix() * &b));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn directions_are_orthonormal_quarter_turns() {
        let d = LocalDirection::from_angles(&[0.3, -1.2]);
        for k in 0..2 {
            let (s, r) = (d.s(k), d.r(k));
            assert!((s[0] * r[0] + s[1] * r[1]).abs() < 1e-15);
            assert!((s[0] * r[1] - s[1] * r[0] - 1.0).abs() < 1e-15);
        }
        let f = d.flipped(1);
        assert_eq!(f.s(1), [-d.s(1)[0], -d.s(1)[1]]);
        assert_eq!(f.r(1), [-d.r(1)[0], -d.r(1)[1]]);
        assert!(LocalDirection::from_vectors(vec![[1.0, 1.0]]).is_err());
    }
}
