//! Brute-force reference computations for cross-checking the main modules.
//!
//! Everything here is deliberately built from raw matrices and dense
//! exponentials: spin systems are represented qubit by qubit, directions are
//! found by grid search, Fisher matrices by finite differences and Gaussian
//! states in a truncated Fock space. Only the linear-algebra layer is shared
//! with the rest of the crate.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::random::{random_matrix, random_state_vector};
use crate::linalg::{sym_eig, CMatrix, CVector, RealMatrix, RealSymMatrix};
use crate::par;
use crate::C64;

/// Size limits for oracle computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    pub max_qubits: usize,
    pub fock_cutoff: usize,
    pub grid_points: usize,
    pub random_trials: usize,
    pub seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { max_qubits: 8, fock_cutoff: 40, grid_points: 10_000, random_trials: 200, seed: 0 }
    }
}

impl OracleBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_qubits == 0 || self.fock_cutoff < 2 || self.grid_points < 8 || self.random_trials == 0 {
            return Err(Error::InvalidArgument(format!("budget {self:?} has a non-positive limit")));
        }
        if self.max_qubits > 12 {
            return Err(Error::BudgetExceeded(format!("{} qubits exceed the dense ceiling of 12", self.max_qubits)));
        }
        Ok(())
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn pauli() -> [CMatrix; 3] {
    let i = C64::i();
    [
        CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
        CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    ]
}

fn expect(psi: &CVector, op: &CMatrix) -> f64 {
    psi.dotc(&(op * psi)).re
}

/// Symmetrized covariance of `ops` in a pure state.
pub fn pure_covariance(psi: &CVector, ops: &[CMatrix]) -> RealSymMatrix {
    let images: Vec<CVector> = ops.iter().map(|o| o * psi).collect();
    let means: Vec<f64> = images.iter().map(|v| psi.dotc(v).re).collect();
    let n = ops.len();
    RealSymMatrix::new(DMatrix::from_fn(n, n, |a, b| images[a].dotc(&images[b]).re - means[a] * means[b]))
}

/// Spin network written out particle by particle on `2^N` amplitudes.
/// Qubit `|0⟩` is spin up; the qubits of mode 0 are the most significant.
#[derive(Debug, Clone)]
pub struct QubitSpinSystem {
    sizes: Vec<usize>,
    /// `J_x, J_y, J_z` of every mode as sums of single-qubit Pauli halves.
    ops: Vec<[CMatrix; 3]>,
}

/// Builds the qubit-level spin system for the given mode sizes.
pub fn full_qubit_spin(sizes: &[usize], budget: &OracleBudget) -> Result<QubitSpinSystem> {
    budget.validate()?;
    let total: usize = sizes.iter().sum();
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidArgument("every mode needs at least one particle".into()));
    }
    if total > budget.max_qubits {
        return Err(Error::BudgetExceeded(format!("{total} qubits, budget {}", budget.max_qubits)));
    }
    let dim = 1usize << total;
    let paulis = pauli();
    let mut ops = Vec::with_capacity(sizes.len());
    let mut site = 0;
    for &n in sizes {
        let mut acc: [CMatrix; 3] = std::array::from_fn(|_| CMatrix::zeros(dim, dim));
        for q in site..site + n {
            let before = 1usize << q;
            let after = 1usize << (total - q - 1);
            for (a, s) in paulis.iter().enumerate() {
                let emb = CMatrix::identity(before, before)
                    .kronecker(&(s * c(0.5)))
                    .kronecker(&CMatrix::identity(after, after));
                acc[a] += emb;
            }
        }
        ops.push(acc);
        site += n;
    }
    Ok(QubitSpinSystem { sizes: sizes.to_vec(), ops })
}

impl QubitSpinSystem {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn qubits(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits()
    }

    /// `[J_x, J_y, J_z]` of mode `k`.
    pub fn mode_ops(&self, k: usize) -> &[CMatrix; 3] {
        &self.ops[k]
    }

    /// `(J_{x,1}, J_{y,1}, …, J_{x,M}, J_{y,M})`.
    pub fn perp_ops(&self) -> Vec<CMatrix> {
        self.ops.iter().flat_map(|o| [o[0].clone(), o[1].clone()]).collect()
    }

    /// All qubits up.
    pub fn polarized(&self) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[0] = c(1.0);
        v
    }

    /// Tensor product of single-qubit states, one per particle in site order.
    pub fn product_state(&self, qubits: &[CVector]) -> Result<CVector> {
        if qubits.len() != self.qubits() || qubits.iter().any(|q| q.len() != 2) {
            return Err(Error::DimensionMismatch("need one two-component state per particle".into()));
        }
        let mut v = CVector::from_element(1, c(1.0));
        for q in qubits {
            v = v.kronecker(q);
        }
        Ok(v)
    }

    /// Lifts a state given in the product of per-mode Dicke bases
    /// (`m = N_k/2, …, −N_k/2`, mode 0 most significant) to the qubit space.
    pub fn embed_dicke(&self, psi: &CVector) -> Result<CVector> {
        let dims: Vec<usize> = self.sizes.iter().map(|n| n + 1).collect();
        if psi.len() != dims.iter().product::<usize>() {
            return Err(Error::DimensionMismatch(format!("Dicke vector of length {}", psi.len())));
        }
        let total = self.qubits();
        let mut out = CVector::zeros(self.dim());
        for (b, slot) in out.iter_mut().enumerate() {
            let mut idx = 0;
            let mut norm = 1.0;
            let mut site = 0;
            for (k, &n) in self.sizes.iter().enumerate() {
                let mask = ((1usize << n) - 1) << (total - site - n);
                let down = (b & mask).count_ones() as usize;
                idx = idx * dims[k] + down;
                norm *= binomial(n, down);
                site += n;
            }
            *slot = psi[idx] / norm.sqrt();
        }
        Ok(out)
    }

    /// One-axis twisting of the polarized state about `y` by dense matrix
    /// exponentiation: within every mode, or of the total spin.
    pub fn twisted(&self, chi_t: f64, collective: bool) -> CVector {
        let d = self.dim();
        let gen = if collective {
            let jy = self.ops.iter().fold(CMatrix::zeros(d, d), |acc, o| acc + &o[1]);
            &jy * &jy
        } else {
            self.ops.iter().fold(CMatrix::zeros(d, d), |acc, o| acc + &o[1] * &o[1])
        };
        (gen * C64::new(0.0, -chi_t)).exp() * self.polarized()
    }

    /// `√(N_k N_l) Cov(s_k·J_k, s_l·J_l) / (⟨J_{z,k}⟩⟨J_{z,l}⟩)` for in-plane
    /// unit vectors `s_k`.
    pub fn squeezing_entries(&self, psi: &CVector, s: &[[f64; 2]]) -> RealMatrix {
        let along: Vec<CMatrix> =
            self.ops.iter().zip(s).map(|(o, d)| &o[0] * c(d[0]) + &o[1] * c(d[1])).collect();
        let cov = pure_covariance(psi, &along);
        let jz: Vec<f64> = self.ops.iter().map(|o| expect(psi, &o[2])).collect();
        let m = self.sizes.len();
        DMatrix::from_fn(m, m, |k, l| {
            (self.sizes[k] as f64 * self.sizes[l] as f64).sqrt() * cov[(k, l)] / (jz[k] * jz[l])
        })
    }

    /// `⟨J_{z,k}⟩` of every mode.
    pub fn mean_jz(&self, psi: &CVector) -> Vec<f64> {
        self.ops.iter().map(|o| expect(psi, &o[2])).collect()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Single-mode spin matrices in the Dicke basis, built independently of the
/// spin module.
fn dicke_ops(n: usize) -> [DMatrix<C64>; 3] {
    let j = n as f64 / 2.0;
    let d = n + 1;
    let mut jp = CMatrix::zeros(d, d);
    for i in 1..d {
        let m = j - i as f64;
        jp[(i - 1, i)] = c(((j - m) * (j + m + 1.0)).sqrt());
    }
    let jm = jp.adjoint();
    let jz = CMatrix::from_diagonal(&DVector::from_fn(d, |i, _| c(j - i as f64)));
    [(&jp + &jm) * c(0.5), (&jp - &jm) * C64::new(0.0, -0.5), jz]
}

/// Smallest squeezing coefficient over in-plane measurement directions of a
/// single-mode spin state, by grid search with local refinement. Returns
/// `(ξ²_min, angle)`.
pub fn grid_minimize_direction(psi: &CVector, n: usize, budget: &OracleBudget) -> Result<(f64, f64)> {
    budget.validate()?;
    if psi.len() != n + 1 {
        return Err(Error::DimensionMismatch(format!("state of length {} for {n} particles", psi.len())));
    }
    let [jx, jy, jz] = dicke_ops(n);
    let mean_z = expect(psi, &jz);
    let xi2 = |phi: f64| {
        let op = &jx * c(phi.cos()) + &jy * c(phi.sin());
        let mean = expect(psi, &op);
        let second = (&op * psi).norm_squared();
        n as f64 * (second - mean * mean) / (mean_z * mean_z)
    };
    let pts = budget.grid_points;
    let step = std::f64::consts::PI / pts as f64;
    let (mut best_phi, mut best) = (0.0, f64::INFINITY);
    for i in 0..pts {
        let phi = i as f64 * step;
        let v = xi2(phi);
        if v < best {
            best = v;
            best_phi = phi;
        }
    }
    // Shrinking bracket around the best grid point.
    let (mut lo, mut hi) = (best_phi - step, best_phi + step);
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if xi2(a) < xi2(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let phi = 0.5 * (lo + hi);
    let v = xi2(phi);
    Ok(if v < best { (v, phi.rem_euclid(std::f64::consts::PI)) } else { (best, best_phi) })
}

/// Classical Fisher matrix of projective measurements on
/// `exp(−iΣθH) ρ exp(iΣθH)` at `θ = 0`, with derivatives of the outcome
/// probabilities taken by central differences.
pub fn finite_diff_fisher(rho: &CMatrix, h: &[CMatrix], projectors: &[CMatrix], step: f64) -> Result<RealSymMatrix> {
    if !(1e-6..=1e-3).contains(&step) {
        return Err(Error::InvalidArgument(format!("step {step} outside [1e-6, 1e-3]")));
    }
    let d = rho.nrows();
    if h.iter().chain(projectors).any(|o| o.nrows() != d || o.ncols() != d) {
        return Err(Error::DimensionMismatch("operators and state differ in dimension".into()));
    }
    let m = h.len();
    let probs = |theta: &[f64]| -> Vec<f64> {
        let g = h.iter().zip(theta).fold(CMatrix::zeros(d, d), |acc, (hk, t)| acc + hk * c(*t));
        let u = (g * C64::new(0.0, -1.0)).exp();
        let r = &u * rho * u.adjoint();
        projectors.iter().map(|p| (p * &r).trace().re).collect()
    };
    let p0 = probs(&vec![0.0; m]);
    let derivs: Vec<Vec<f64>> = (0..m)
        .map(|l| {
            let mut plus = vec![0.0; m];
            let mut minus = vec![0.0; m];
            plus[l] = step;
            minus[l] = -step;
            let (a, b) = (probs(&plus), probs(&minus));
            a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * step)).collect()
        })
        .collect();
    let mut f = DMatrix::zeros(m, m);
    for (x, &p) in p0.iter().enumerate() {
        if p <= 1e-12 {
            continue;
        }
        for k in 0..m {
            for l in 0..m {
                f[(k, l)] += derivs[k][x] * derivs[l][x] / p;
            }
        }
    }
    Ok(RealSymMatrix::new(f))
}

/// Annihilation operator truncated to `cutoff` Fock levels.
pub fn fock_annihilation(cutoff: usize) -> CMatrix {
    let mut a = CMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    a
}

/// Quadratures `x = (a + a†)/2`, `p = (a − a†)/(2i)` on the truncated space.
pub fn fock_quadratures(cutoff: usize) -> (CMatrix, CMatrix) {
    let a = fock_annihilation(cutoff);
    let ad = a.adjoint();
    ((&a + &ad) * c(0.5), (&a - &ad) * C64::new(0.0, -0.5))
}

/// Single-mode squeezed vacuum with squeezed `p` quadrature for `r > 0`,
/// truncated to `cutoff` levels and renormalized. Also returns the discarded
/// probability weight.
pub fn fock_squeezed_vacuum(r: f64, cutoff: usize) -> (CVector, f64) {
    let t = r.tanh();
    let mut v = CVector::zeros(cutoff);
    // Amplitude of |2n⟩ is tanh(r)ⁿ √((2n)!) / (2ⁿ n! √cosh r), built by recursion.
    let mut amp = 1.0 / r.cosh().sqrt();
    let mut n = 0;
    while 2 * n < cutoff {
        v[2 * n] = c(amp);
        let k = (n + 1) as f64;
        amp *= t * ((2.0 * k - 1.0) * 2.0 * k).sqrt() / (2.0 * k);
        n += 1;
    }
    let kept = v.norm_squared();
    (v.unscale(kept.sqrt()), (1.0 - kept).max(0.0))
}

/// Truncated-Fock evaluation of a single-mode squeezed vacuum.
#[derive(Debug, Clone)]
pub struct FockCheck {
    /// Quadrature covariance.
    pub gamma: RealSymMatrix,
    /// Quantum Fisher matrix for the generators `(x, p)`.
    pub fisher: RealSymMatrix,
    /// Probability weight of the exact state beyond the cutoff.
    pub truncation_weight: f64,
    pub warning: Option<String>,
}

pub fn fock_cv_check(r: f64, cutoff: usize) -> Result<FockCheck> {
    if cutoff < 2 {
        return Err(Error::InvalidArgument("cutoff must be at least 2".into()));
    }
    let (psi, truncation_weight) = fock_squeezed_vacuum(r, cutoff);
    let (x, p) = fock_quadratures(cutoff);
    let gamma = pure_covariance(&psi, &[x, p]);
    let fisher = RealSymMatrix::new(gamma.matrix() * 4.0);
    let warning = (truncation_weight > 1e-10 || (2.0 * r.abs()).exp() * 4.0 > cutoff as f64).then(|| {
        format!("cutoff {cutoff} is tight for r = {r}: discarded weight {truncation_weight:e}")
    });
    Ok(FockCheck { gamma, fisher, truncation_weight, warning })
}

/// Randomized search for the largest quadrature variance at fixed mean photon
/// number. Returns the smallest observed `bound(⟨n⟩) − 4 Var(x_φ)`.
pub fn max_variance_search(budget: &OracleBudget) -> Result<f64> {
    budget.validate()?;
    let cutoff = budget.fock_cutoff;
    let a = fock_annihilation(cutoff);
    let num = a.adjoint() * &a;
    let margins = par::map_indexed(budget.random_trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        rng.set_stream(t as u64);
        // Random support size keeps most states far from the truncation edge.
        let support = rng.random_range(2..=cutoff.min(12));
        let mut psi = CVector::zeros(cutoff);
        psi.rows_mut(0, support).copy_from(&random_state_vector(support, &mut rng));
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let rot = a.clone() * C64::from_polar(1.0, -phi);
        let quad = (&rot + rot.adjoint()) * c(0.5);
        let photons = expect(&psi, &num);
        let var = pure_covariance(&psi, &[quad])[(0, 0)];
        let bound = 2.0 * photons + 1.0 + 2.0 * (photons * (photons + 1.0)).sqrt();
        bound - 4.0 * var
    });
    Ok(margins.into_iter().fold(f64::INFINITY, f64::min))
}

/// Outcome of the product-state Fisher bound check.
#[derive(Debug, Clone)]
pub struct ProductFisherCheck {
    /// Every sampled product state obeyed `F_Q[J_⊥] ≤ diag(N_k, N_k)`.
    pub bound_holds: bool,
    /// Smallest eigenvalue of `diag(N_k, N_k) − F_Q` over all samples.
    pub worst_margin: f64,
    /// Deviation of the polarized state's Fisher matrix from the bound.
    pub polarized_deviation: f64,
}

/// Samples Haar-random single-particle states and checks the shot-noise bound
/// on the in-plane Fisher matrix.
pub fn random_product_state_fisher(sizes: &[usize], budget: &OracleBudget) -> Result<ProductFisherCheck> {
    let sys = full_qubit_spin(sizes, budget)?;
    let perp = sys.perp_ops();
    let bound = DMatrix::from_diagonal(&DVector::from_iterator(
        perp.len(),
        sizes.iter().flat_map(|&n| [n as f64, n as f64]),
    ));
    let fisher = |psi: &CVector| pure_covariance(psi, &perp).into_inner() * 4.0;
    let margins = par::map_indexed(budget.random_trials, |t| -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        rng.set_stream(t as u64);
        let qubits: Vec<CVector> = (0..sys.qubits()).map(|_| random_state_vector(2, &mut rng)).collect();
        let psi = sys.product_state(&qubits)?;
        Ok(sym_eig(&RealSymMatrix::new(&bound - fisher(&psi)))?.min())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let polarized_deviation = (fisher(&sys.polarized()) - &bound).abs().max();
    Ok(ProductFisherCheck { bound_holds: worst_margin >= -1e-8, worst_margin, polarized_deviation })
}

/// In-plane quantum Fisher matrix of the `n`-qubit GHZ state
/// `(|+x⟩^{⊗n} + |−x⟩^{⊗n})/√2`.
pub fn ghz_perp_fisher(n: usize, budget: &OracleBudget) -> Result<RealSymMatrix> {
    let sys = full_qubit_spin(&[n], budget)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = CVector::from_vec(vec![c(h), c(h)]);
    let minus = CVector::from_vec(vec![c(h), c(-h)]);
    let a = sys.product_state(&vec![plus; n])?;
    let b = sys.product_state(&vec![minus; n])?;
    let ghz = (a + b).normalize();
    Ok(RealSymMatrix::new(pure_covariance(&ghz, &sys.perp_ops()).into_inner() * 4.0))
}

/// Best split of `photons` between two locally squeezed modes for the
/// variance `Σ_k w_k² e^{−2r_k}`, found by scanning the photon fraction of the
/// first mode and refining around the best grid point. Returns the squeezing
/// parameters and the variance.
pub fn two_mode_allocation_search(w: [f64; 2], photons: f64, budget: &OracleBudget) -> Result<([f64; 2], f64)> {
    budget.validate()?;
    if !(photons > 0.0) || !photons.is_finite() {
        return Err(Error::InvalidArgument(format!("photon number {photons} must be positive")));
    }
    let split = |t: f64| [(t * photons).sqrt().asinh(), ((1.0 - t) * photons).sqrt().asinh()];
    let variance = |t: f64| {
        let r = split(t);
        w[0] * w[0] * (-2.0 * r[0]).exp() + w[1] * w[1] * (-2.0 * r[1]).exp()
    };
    let g = budget.grid_points;
    let step = 1.0 / g as f64;
    let best = (0..=g).map(|i| i as f64 * step).fold((0.0, f64::INFINITY), |acc, t| {
        let v = variance(t);
        if v < acc.1 {
            (t, v)
        } else {
            acc
        }
    });
    // The variance is convex in the split, so a ternary search on the
    // neighbouring cells converges to the global minimum.
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(1.0));
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if variance(a) < variance(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok((split(t), variance(t)))
}

/// Result of the randomized matrix Cauchy–Schwarz check.
#[derive(Debug, Clone, Copy)]
pub struct LemmaCheck {
    /// Smallest eigenvalue of `AᵀA − AᵀB(BᵀB)⁻¹BᵀA` over all samples.
    pub min_eigenvalue: f64,
    /// Largest entry of that difference when `A = BE`.
    pub saturation_residual: f64,
}

impl LemmaCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol && self.saturation_residual <= tol
    }
}

/// Random test of `AᵀA ≥ AᵀB(BᵀB)⁻¹BᵀA` for `A` of size `p×n`, `B` of size
/// `p×m`, together with equality for `A = BE`.
pub fn cauchy_schwarz_lemma_test(p: usize, n: usize, m: usize, trials: usize, seed: u64) -> Result<LemmaCheck> {
    if m > p || p == 0 || n == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!("need 1 ≤ m ≤ p, got p={p}, m={m}")));
    }
    let gap = |a: &RealMatrix, b: &RealMatrix| -> Result<RealMatrix> {
        let btb = (b.transpose() * b).try_inverse().ok_or(Error::SingularCovariance)?;
        Ok(a.transpose() * a - a.transpose() * b * btb * b.transpose() * a)
    };
    let mut min_eigenvalue = f64::INFINITY;
    let mut saturation_residual: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let a = random_matrix(p, n, &mut rng);
        let b = random_matrix(p, m, &mut rng);
        let g = gap(&a, &b)?;
        let scale = (a.transpose() * &a).abs().max().max(1.0);
        min_eigenvalue = min_eigenvalue.min(sym_eig(&RealSymMatrix::new(g))?.min() / scale);
        let e = random_matrix(m, n, &mut rng);
        let sat = gap(&(&b * e), &b)?;
        saturation_residual = saturation_residual.max(sat.abs().max() / scale);
    }
    Ok(LemmaCheck { min_eigenvalue, saturation_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn budget_is_enforced() {
        let b = OracleBudget { max_qubits: 3, ..Default::default() };
        assert!(matches!(full_qubit_spin(&[2, 2], &b), Err(Error::BudgetExceeded(_))));
        assert!(OracleBudget { random_trials: 0, ..Default::default() }.validate().is_err());
        assert_eq!(OracleBudget::default().grid_points, 10_000);
    }

    #[test]
    fn two_qubit_triplet_spectrum() {
        let sys = full_qubit_spin(&[2], &OracleBudget::default()).unwrap();
        let dicke: Vec<CVector> = (0..3)
            .map(|i| {
                let mut v = CVector::zeros(3);
                v[i] = c(1.0);
                sys.embed_dicke(&v).unwrap()
            })
            .collect();
        for (i, v) in dicke.iter().enumerate() {
            assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-14);
            assert_relative_eq!(expect(v, &sys.mode_ops(0)[2]), 1.0 - i as f64, epsilon = 1e-14);
        }
    }

    #[test]
    fn polarized_state_has_full_length() {
        let sys = full_qubit_spin(&[3, 2], &OracleBudget::default()).unwrap();
        let jz = sys.mean_jz(&sys.polarized());
        assert_relative_eq!(jz[0], 1.5, epsilon = 1e-14);
        assert_relative_eq!(jz[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn collective_twisting_stays_symmetric() {
        let sys = full_qubit_spin(&[2, 2], &OracleBudget::default()).unwrap();
        let psi = sys.twisted(0.3, false);
        assert_relative_eq!(psi.norm(), 1.0, epsilon = 1e-12);
        let ops = sys.mode_ops(0);
        let total: CMatrix = ops.iter().map(|o| o * o).fold(CMatrix::zeros(16, 16), |a, b| a + b);
        // J² stays at its maximal value j(j+1) = 2 for a symmetric pair.
        assert_relative_eq!(expect(&psi, &total), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_search_on_coherent_state() {
        let mut psi = CVector::zeros(5);
        psi[0] = c(1.0);
        let (xi2, _) = grid_minimize_direction(&psi, 4, &OracleBudget::default()).unwrap();
        assert_relative_eq!(xi2, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn finite_difference_fisher_for_qubit_ramsey() {
        let [sx, sy, _] = pauli();
        let rho = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let plus = (CMatrix::identity(2, 2) + &sx) * c(0.5);
        let minus = (CMatrix::identity(2, 2) - &sx) * c(0.5);
        // Rotation about y at θ = 0 gives p(±) = (1 ± sin θ)/2, so F = 1.
        let f = finite_diff_fisher(&rho, &[&sy * c(0.5)], &[plus.clone(), minus.clone()], 1e-4).unwrap();
        assert_relative_eq!(f[(0, 0)], 1.0, epsilon = 1e-7);
        let f0 = finite_diff_fisher(&rho, &[&sx * c(0.0)], &[plus, minus], 1e-4).unwrap();
        assert!(f0[(0, 0)].abs() < 1e-12);
        assert!(finite_diff_fisher(&rho, &[sy], &[], 1e-2).is_err());
    }

    #[test]
    fn fock_vacuum_and_squeezed() {
        for cutoff in [2, 5, 40] {
            let chk = fock_cv_check(0.0, cutoff).unwrap();
            assert_relative_eq!(chk.gamma.matrix(), &(DMatrix::identity(2, 2) * 0.25), epsilon = 1e-15);
        }
        let chk = fock_cv_check(0.5, 40).unwrap();
        let want = DMatrix::from_diagonal(&DVector::from_vec(vec![1f64.exp() / 4.0, (-1f64).exp() / 4.0]));
        assert!((chk.gamma.matrix() - want).abs().max() < 1e-6);
        assert!(chk.warning.is_none());
        assert!(fock_cv_check(3.0, 10).unwrap().warning.is_some());
    }

    #[test]
    fn quadrature_variance_bound_holds() {
        let b = OracleBudget { fock_cutoff: 30, random_trials: 300, seed: 3, ..Default::default() };
        assert!(max_variance_search(&b).unwrap() >= -1e-6);
    }

    #[test]
    fn product_states_respect_shot_noise() {
        let chk = random_product_state_fisher(&[2, 2], &OracleBudget { random_trials: 100, ..Default::default() }).unwrap();
        assert!(chk.bound_holds);
        assert!(chk.polarized_deviation < 1e-12);
        let ghz = ghz_perp_fisher(4, &OracleBudget::default()).unwrap();
        assert_relative_eq!(ghz[(0, 0)], 16.0, epsilon = 1e-10);
        assert!(sym_eig(&ghz).unwrap().max() > 4.0);
    }

    #[test]
    fn even_split_for_equal_weights() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (r, v) = two_mode_allocation_search([h, h], 4.0, &OracleBudget::default()).unwrap();
        let want = 2f64.sqrt().asinh();
        assert_relative_eq!(r[0], want, epsilon = 1e-8);
        assert_relative_eq!(r[1], want, epsilon = 1e-8);
        assert_relative_eq!(v, (-2.0 * want).exp(), epsilon = 1e-12);
        let (lopsided, _) = two_mode_allocation_search([0.9, 0.19f64.sqrt()], 4.0, &OracleBudget::default()).unwrap();
        assert!(lopsided[0] > lopsided[1]);
    }

    #[test]
    fn matrix_cauchy_schwarz() {
        let scalar = cauchy_schwarz_lemma_test(5, 1, 1, 50, 1).unwrap();
        assert!(scalar.passed(1e-9));
        let chk = cauchy_schwarz_lemma_test(7, 3, 4, 200, 2).unwrap();
        assert!(chk.passed(1e-9), "{chk:?}");
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(6, 3, &mut rng);
        let g = a.transpose() * &a - a.transpose() * &a * (a.transpose() * &a).try_inverse().unwrap() * a.transpose() * &a;
        assert!(g.abs().max() < 1e-9);
    }
}
