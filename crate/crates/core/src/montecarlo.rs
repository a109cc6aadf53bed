//! Monte Carlo simulation of the method of moments: projective measurements
//! of commuting observables are sampled, parameters are recovered by matching
//! sample means to the calibration curve, and the spread of the estimates is
//! compared against the moment-matrix prediction.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, max_abs_c, numerical_rank, pinv, CMatrix, HermitianOp, RealMatrix, RealSymMatrix};
use crate::par;
use crate::quantum::{evolve, moment_matrix, ObservableSet, QuantumState};
use crate::spin::{css_up, joint_mode_ops, oat_local, spin_moments, xi_min_from_moments, LocalDirection, SpinNetwork};
use crate::C64;

/// Largest commutator norm tolerated between jointly measured observables.
pub const COMMUTATION_TOL: f64 = 1e-9;
const RECONSTRUCTION_TOL: f64 = 1e-10;
const PROBABILITY_TOL: f64 = 1e-10;
const NEWTON_RESIDUAL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 100;
const RANK_CUTOFF: f64 = 1e-10;
const COMBINATION_SEED: u64 = 0x6d6f_6d65_6e74_73;

/// Joint eigenbasis of a commuting observable set with the value every
/// observable takes on each basis vector.
#[derive(Debug, Clone)]
pub struct MeasurementModel {
    basis: CMatrix,
    values: RealMatrix,
    source: ObservableSet,
}

impl MeasurementModel {
    /// Unitary whose columns are the measured basis states.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// `values[(k, i)]` is the outcome of observable `k` on basis state `i`.
    pub fn values(&self) -> &RealMatrix {
        &self.values
    }

    pub fn source(&self) -> &ObservableSet {
        &self.source
    }

    pub fn observables(&self) -> usize {
        self.values.nrows()
    }

    pub fn outcomes(&self) -> usize {
        self.values.ncols()
    }
}

fn clusters(values: &[f64], idx: &[usize], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..idx.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for i in order {
        if values[i] - last > tol || out.is_empty() {
            out.push(Vec::new());
        }
        last = values[i];
        out.last_mut().unwrap().push(idx[i]);
    }
    out
}

fn spectral_tol(values: &[f64]) -> f64 {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    1e-9 * scale
}

/// Diagonalizes observable `k` inside the span of `cols`, then recurses into
/// its degenerate sub-blocks with the next observable.
fn refine(ops: &[HermitianOp], basis: &mut CMatrix, cols: Vec<usize>, k: usize) -> Result<()> {
    if cols.len() < 2 || k == ops.len() {
        return Ok(());
    }
    let vc = CMatrix::from_fn(basis.nrows(), cols.len(), |i, j| basis[(i, cols[j])]);
    let block = vc.adjoint() * ops[k].matrix() * &vc;
    let eig = herm_eig(&block)?;
    let rotated = &vc * &eig.vectors;
    for (j, &c) in cols.iter().enumerate() {
        basis.set_column(c, &rotated.column(j));
    }
    let vals: Vec<f64> = eig.values.iter().copied().collect();
    for sub in clusters(&vals, &cols, spectral_tol(&vals)) {
        refine(ops, basis, sub, k + 1)?;
    }
    Ok(())
}

/// Finds a joint eigenbasis by diagonalizing a generic real combination of
/// the observables and resolving any remaining degeneracy block by block.
pub fn build_model(x: &ObservableSet) -> Result<MeasurementModel> {
    let comm = x.max_commutator_norm();
    if comm > COMMUTATION_TOL {
        return Err(Error::NonCommutingObservables(comm));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(COMBINATION_SEED);
    let coeffs: Vec<f64> = (0..x.len()).map(|_| rng.random_range(0.5..1.5)).collect();
    let generic = HermitianOp::real_combination(&coeffs, x.ops())?;
    let eig = herm_eig(generic.matrix())?;
    let mut basis = eig.vectors;
    let vals: Vec<f64> = eig.values.iter().copied().collect();
    let all: Vec<usize> = (0..vals.len()).collect();
    for block in clusters(&vals, &all, spectral_tol(&vals)) {
        refine(x.ops(), &mut basis, block, 0)?;
    }

    let d = x.dim();
    let mut values = DMatrix::zeros(x.len(), d);
    for (k, op) in x.ops().iter().enumerate() {
        let diag = basis.adjoint() * op.matrix() * &basis;
        for i in 0..d {
            values[(k, i)] = diag[(i, i)].re;
        }
        let rebuilt = &basis * CMatrix::from_diagonal(&diag.diagonal().map(|z| C64::new(z.re, 0.0))) * basis.adjoint();
        let err = max_abs_c(&(op.matrix() - rebuilt));
        let scale = max_abs_c(op.matrix()).max(1.0);
        if err > RECONSTRUCTION_TOL * scale {
            return Err(Error::DecompositionFailure(format!(
                "joint eigenbasis reproduces observable {k} only to {err:e}"
            )));
        }
    }
    Ok(MeasurementModel { basis, values, source: x.clone() })
}

/// Born-rule outcome distribution of `state` in the model basis.
pub fn outcome_probabilities(model: &MeasurementModel, state: &QuantumState) -> Result<DVector<f64>> {
    if state.dim() != model.basis.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for a model of dimension {}",
            state.dim(),
            model.basis.nrows()
        )));
    }
    let p = state.probabilities_in(&model.basis);
    let total: f64 = p.sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::InvalidState(format!("outcome probabilities sum to {total}")));
    }
    Ok(p.map(|x| x.max(0.0)))
}

/// Draws `mu` outcomes and returns the sample mean of every observable.
///
/// Outcome counts are multinomial, generated as a chain of binomials over the
/// remaining probability mass.
pub fn sample<R: Rng + ?Sized>(model: &MeasurementModel, state: &QuantumState, mu: u64, rng: &mut R) -> Result<DVector<f64>> {
    if mu == 0 {
        return Err(Error::InvalidArgument("need at least one repetition".into()));
    }
    let p = outcome_probabilities(model, state)?;
    let counts = multinomial(&p, mu, rng)?;
    let mut mean = DVector::zeros(model.observables());
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            mean += model.values.column(i) * (c as f64 / mu as f64);
        }
    }
    Ok(mean)
}

fn multinomial<R: Rng + ?Sized>(p: &DVector<f64>, n: u64, rng: &mut R) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; p.len()];
    let mut left = n;
    let mut mass: f64 = p.sum();
    for (i, &pi) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == p.len() || pi >= mass {
            counts[i] = left;
            break;
        }
        let q = (pi / mass).clamp(0.0, 1.0);
        let c = Binomial::new(left, q).map_err(|e| Error::InvalidArgument(e.to_string()))?.sample(rng);
        counts[i] = c;
        left -= c;
        mass -= pi;
    }
    Ok(counts)
}

/// Map from parameters to expected observable values.
pub trait Calibration: Sync {
    fn parameters(&self) -> usize;
    fn means(&self, theta: &[f64]) -> Result<DVector<f64>>;
    /// Means together with the derivative matrix `D_kl = ∂⟨X_k⟩/∂θ_l`.
    fn means_and_jacobian(&self, theta: &[f64]) -> Result<(DVector<f64>, RealMatrix)>;
}

/// Calibration of a probe imprinted by `exp(−i Σ θ_l H_l)` and read out
/// through observables `X`.
#[derive(Debug, Clone)]
pub struct UnitaryCalibration {
    state: QuantumState,
    h: ObservableSet,
    x: ObservableSet,
}

impl UnitaryCalibration {
    pub fn new(state: QuantumState, h: ObservableSet, x: ObservableSet) -> Result<Self> {
        if h.dim() != state.dim() || x.dim() != state.dim() {
            return Err(Error::DimensionMismatch("generators, observables and state differ in dimension".into()));
        }
        Ok(Self { state, h, x })
    }
}

fn exp_minus_i(l: f64) -> C64 {
    C64::new(0.0, -l).exp()
}

impl Calibration for UnitaryCalibration {
    fn parameters(&self) -> usize {
        self.h.len()
    }

    fn means(&self, theta: &[f64]) -> Result<DVector<f64>> {
        let rho = evolve(&self.state, &self.h, theta)?;
        Ok(DVector::from_iterator(self.x.len(), self.x.ops().iter().map(|op| rho.expect(op.matrix()).re)))
    }

    fn means_and_jacobian(&self, theta: &[f64]) -> Result<(DVector<f64>, RealMatrix)> {
        if theta.len() != self.h.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters for {} generators",
                theta.len(),
                self.h.len()
            )));
        }
        let g = HermitianOp::real_combination(theta, self.h.ops())?;
        let eig = herm_eig(g.matrix())?;
        let v = &eig.vectors;
        let lam = &eig.values;
        let d = lam.len();
        // Divided differences of λ ↦ e^{−iλ} give the derivative of the
        // matrix exponential along any direction.
        let div = CMatrix::from_fn(d, d, |i, j| {
            let (a, b) = (lam[i], lam[j]);
            if (a - b).abs() < 1e-10 {
                C64::new(0.0, -1.0) * exp_minus_i(0.5 * (a + b))
            } else {
                (exp_minus_i(a) - exp_minus_i(b)) / (a - b)
            }
        });
        let u = eig.map_values(exp_minus_i);
        let du: Vec<CMatrix> = self
            .h
            .ops()
            .iter()
            .map(|h| v * (v.adjoint() * h.matrix() * v).component_mul(&div) * v.adjoint())
            .collect();
        let k = self.x.len();
        let m = self.h.len();
        let mut means = DVector::zeros(k);
        let mut jac = DMatrix::zeros(k, m);
        match &self.state {
            QuantumState::Pure(psi) => {
                let phi = &u * psi;
                let dphi: Vec<_> = du.iter().map(|dm| dm * psi).collect();
                for (a, x) in self.x.ops().iter().enumerate() {
                    let xphi = x.matrix() * &phi;
                    means[a] = phi.dotc(&xphi).re;
                    for l in 0..m {
                        jac[(a, l)] = 2.0 * xphi.dotc(&dphi[l]).re;
                    }
                }
            }
            QuantumState::Mixed(rho) => {
                let rho_u = rho.matrix() * u.adjoint();
                let evolved = &u * &rho_u;
                for (a, x) in self.x.ops().iter().enumerate() {
                    means[a] = (x.matrix() * &evolved).trace().re;
                    for l in 0..m {
                        jac[(a, l)] = 2.0 * (x.matrix() * &du[l] * &rho_u).trace().re;
                    }
                }
            }
        }
        Ok((means, jac))
    }
}

/// Result of one moment-matching solve.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub theta: DVector<f64>,
    /// Euclidean norm of `X̄ − ⟨X⟩(θ)` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

/// Solves `⟨X⟩(θ) = X̄` in the least-squares sense by damped Gauss–Newton
/// iteration starting from `theta_init`.
pub fn estimate(calibration: &dyn Calibration, xbar: &DVector<f64>, theta_init: &[f64]) -> Result<Estimate> {
    let m = calibration.parameters();
    if theta_init.len() != m {
        return Err(Error::DimensionMismatch(format!("{} initial values for {m} parameters", theta_init.len())));
    }
    let mut theta = DVector::from_column_slice(theta_init);
    let (mut f, mut jac) = calibration.means_and_jacobian(theta.as_slice())?;
    if f.len() != xbar.len() {
        return Err(Error::DimensionMismatch(format!("{} sample means for {} observables", xbar.len(), f.len())));
    }
    let mut residual = (xbar - &f).norm();
    let mut iterations = 0;
    while iterations < NEWTON_MAX_ITER && residual >= NEWTON_RESIDUAL {
        iterations += 1;
        let rank = numerical_rank(&jac, RANK_CUTOFF);
        if rank < m {
            return Err(Error::UnidentifiableParameters { rank, required: m });
        }
        let step = pinv(&jac, 1e-12) * (xbar - &f);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = &theta + &step * t;
            let ft = calibration.means(trial.as_slice())?;
            let rt = (xbar - &ft).norm();
            if rt < residual {
                accepted = Some((trial, rt));
                break;
            }
            t *= 0.5;
        }
        let Some((next, rt)) = accepted else { break };
        let moved = (&next - &theta).norm();
        theta = next;
        residual = rt;
        if moved <= 1e-15 * (1.0 + theta.norm()) {
            break;
        }
        (f, jac) = calibration.means_and_jacobian(theta.as_slice())?;
    }
    Ok(Estimate { theta, residual, iterations })
}

/// Settings of a repeated-estimation experiment.
#[derive(Debug, Clone)]
pub struct EstimationRun {
    pub mu: u64,
    pub trials: usize,
    pub theta_true: Vec<f64>,
    pub seed: u64,
}

impl EstimationRun {
    pub fn new(mu: u64, trials: usize, theta_true: Vec<f64>, seed: u64) -> Result<Self> {
        if mu == 0 || trials < 2 {
            return Err(Error::InvalidArgument(format!(
                "need mu ≥ 1 and at least two trials, got mu = {mu}, trials = {trials}"
            )));
        }
        Ok(Self { mu, trials, theta_true, seed })
    }

    /// Random stream for one trial; independent of the order in which trials run.
    pub fn trial_rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

/// Empirical versus predicted estimator covariance.
#[derive(Debug, Clone)]
pub struct CovarianceExperiment {
    pub empirical: RealSymMatrix,
    /// `(μ M)⁻¹` at the true parameters.
    pub predicted: RealSymMatrix,
    /// Element-wise deviation in units of the sampling standard error.
    pub z_scores: RealMatrix,
    pub max_abs_z: f64,
    pub mean_estimate: DVector<f64>,
    pub estimates: Vec<DVector<f64>>,
}

/// Runs `trials` independent simulated estimations of `θ_true` and compares
/// the spread of the estimates with the moment-matrix prediction.
///
/// Every solve starts at `θ_true`, so the experiment probes the local
/// behaviour of the estimator and not global identifiability.
pub fn covariance_experiment(
    run: &EstimationRun,
    state: &QuantumState,
    h: &ObservableSet,
    x: &ObservableSet,
) -> Result<CovarianceExperiment> {
    let m = h.len();
    if run.theta_true.len() != m {
        return Err(Error::DimensionMismatch(format!("{} true values for {m} generators", run.theta_true.len())));
    }
    let model = build_model(x)?;
    let rho_true = evolve(state, h, &run.theta_true)?;
    let moment = moment_matrix(&rho_true, h, x)?.moment;
    let rank = numerical_rank(moment.matrix(), RANK_CUTOFF);
    if rank < m {
        return Err(Error::UnidentifiableParameters { rank, required: m });
    }
    let predicted = RealSymMatrix::new(pinv(moment.matrix(), 1e-12) / run.mu as f64);
    let calibration = UnitaryCalibration::new(state.clone(), h.clone(), x.clone())?;
    let p = outcome_probabilities(&model, &rho_true)?;

    let estimates: Vec<DVector<f64>> = par::map_indexed(run.trials, |t| -> Result<DVector<f64>> {
        let mut rng = run.trial_rng(t);
        let counts = multinomial(&p, run.mu, &mut rng)?;
        let mut xbar = DVector::zeros(model.observables());
        for (i, &c) in counts.iter().enumerate() {
            if c > 0 {
                xbar += model.values.column(i) * (c as f64 / run.mu as f64);
            }
        }
        Ok(estimate(&calibration, &xbar, &run.theta_true)?.theta)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let n = run.trials as f64;
    let mean_estimate = estimates.iter().fold(DVector::zeros(m), |acc, e| acc + e) / n;
    let mut cov = DMatrix::zeros(m, m);
    for e in &estimates {
        let d = e - &mean_estimate;
        cov += &d * d.transpose();
    }
    let empirical = RealSymMatrix::new(cov / (n - 1.0));
    let s = predicted.matrix();
    let z_scores = DMatrix::from_fn(m, m, |k, l| {
        let se = ((s[(k, k)] * s[(l, l)] + s[(k, l)] * s[(k, l)]) / n).sqrt();
        (empirical[(k, l)] - s[(k, l)]) / se
    });
    let max_abs_z = z_scores.iter().fold(0.0f64, |a, z| a.max(z.abs()));
    Ok(CovarianceExperiment { empirical, predicted, z_scores, max_abs_z, mean_estimate, estimates })
}

/// Probe, generators, observables and shot-noise Fisher matrix of a standard
/// validation setup.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub state: QuantumState,
    pub h: ObservableSet,
    pub x: ObservableSet,
    pub shot_noise: RealSymMatrix,
}

/// Ramsey rotation of a coherent spin state of `n` particles about `J_y`,
/// read out through `J_x`.
pub fn css_ramsey(n: usize) -> Result<Scenario> {
    let net = SpinNetwork::new(vec![n])?;
    let ops = joint_mode_ops(&net)?.remove(0);
    Ok(Scenario {
        state: css_up(&net),
        h: ObservableSet::new("H", vec![ops.jy])?,
        x: ObservableSet::new("X", vec![ops.jx])?,
        shot_noise: RealSymMatrix::from_diagonal(&[n as f64]),
    })
}

/// Two modes of `n_per_mode` particles, each squeezed by its own one-axis
/// twist for `chi_t`. Every mode is rotated about the axis conjugate to its
/// least noisy in-plane spin component, which is the one measured.
pub fn local_oat_scenario(n_per_mode: usize, chi_t: f64) -> Result<Scenario> {
    let net = SpinNetwork::new(vec![n_per_mode, n_per_mode])?;
    let state = oat_local(&net, chi_t)?;
    let moments = spin_moments(&state, &net)?;
    let angles: Vec<f64> =
        (0..2).map(|k| xi_min_from_moments(moments.plane_block(k), moments.jz(k), n_per_mode).1).collect();
    let dirs = LocalDirection::from_angles(&angles);
    let ops = joint_mode_ops(&net)?;
    let along = |k: usize, d: [f64; 2]| {
        HermitianOp::real_combination(&d, &[ops[k].jx.clone(), ops[k].jy.clone()])
    };
    let h = (0..2).map(|k| along(k, dirs.r(k))).collect::<Result<Vec<_>>>()?;
    let x = (0..2).map(|k| along(k, dirs.s(k))).collect::<Result<Vec<_>>>()?;
    Ok(Scenario {
        state,
        h: ObservableSet::new("H", h)?,
        x: ObservableSet::new("X", x)?,
        shot_noise: RealSymMatrix::from_diagonal(&[n_per_mode as f64; 2]),
    })
}
