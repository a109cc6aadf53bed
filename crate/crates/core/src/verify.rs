//! The invariant suite: every property the library promises, checked
//! against closed forms or against the brute-force routines in
//! [`crate::oracle`].
//!
//! Each [`Property`] bundles a handful of [`Check`]s, a runtime ceiling and a
//! runner. [`run_verify`] evaluates all of them and returns a
//! [`VerifyReport`] listing every measured residual next to its tolerance.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gaussian::{
    basis_change_w, cv_moment_matrix, cv_squeezing_matrix, fig3_scan, local_encoding, ment_allocation,
    msep_allocation, optimal_cv_encoding, simon_check, squeezed_vacuum, GaussianState, SqueezedVacuumSpec,
};
use crate::linalg::random::{random_hermitian, random_orthogonal, random_passive, random_unitary, complex_normal};
use crate::linalg::{
    herm_eig, is_orthogonal_symplectic_with, loewner_margin, max_abs, symplectic_form, CMatrix, HermitianOp,
    RealMatrix, RealSymMatrix,
};
use crate::montecarlo::{covariance_experiment, css_ramsey, local_oat_scenario, EstimationRun};
use crate::oracle::{
    cauchy_schwarz_lemma_test, finite_diff_fisher, fock_cv_check, full_qubit_spin, grid_minimize_direction,
    max_variance_search, random_product_state_fisher, two_mode_allocation_search, OracleBudget,
};
use crate::par;
use crate::quantum::{classical_fisher_matrix, moment_matrix, optimal_measurement_coefficients, quantum_fisher_matrix};
use crate::quantum::{ObservableSet, QuantumState};
use crate::spin::{
    fig2_point, fig2_scan, local_xi_min, shot_noise_perp, spin_moments, twin_fock_moment, LocalDirection,
    OatPropagator, SpinNetwork,
};
use crate::C64;

/// One measured quantity compared against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub residual: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `residual ≤ tolerance`; a NaN residual fails.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), tolerance, residual, passed: residual <= tolerance }
    }

    /// Passes when `residual < bound`.
    pub fn below(name: impl Into<String>, residual: f64, bound: f64) -> Self {
        Self { name: name.into(), tolerance: bound, residual, passed: residual < bound }
    }
}

/// Knobs for the suite. The defaults match the documented acceptance settings.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub budget: OracleBudget,
    pub fig2_particles: usize,
    pub fig2_chi_t_max: f64,
    pub fig2_points: usize,
    pub mc_repetitions: u64,
    pub mc_trials: usize,
    /// Symplectic form used by the symplectic-structure checks. Replacing it
    /// with a corrupted form must make those checks fail.
    pub symplectic_form: fn(usize) -> RealMatrix,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            budget: OracleBudget::default(),
            fig2_particles: 100,
            fig2_chi_t_max: 0.06,
            fig2_points: 13,
            mc_repetitions: 10_000,
            mc_trials: 2000,
            symplectic_form,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        self.budget.validate()?;
        if self.fig2_particles < 2 || !self.fig2_particles.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("fig2 particle number {} must be even", self.fig2_particles)));
        }
        if self.fig2_points < 2 || !(self.fig2_chi_t_max > 0.0) {
            return Err(Error::InvalidArgument("fig2 grid needs at least two points and a positive range".into()));
        }
        if self.mc_trials < 2 || self.mc_repetitions == 0 {
            return Err(Error::InvalidArgument("Monte Carlo needs at least two trials".into()));
        }
        Ok(())
    }

    fn rng(&self, tag: u64, stream: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.budget.seed.wrapping_mul(0x9E37_79B9).wrapping_add(tag));
        rng.set_stream(stream as u64);
        rng
    }

    /// The evenly spaced `χt` grid scanned by the spin-twisting property.
    pub fn fig2_grid(&self) -> Vec<f64> {
        let n = self.fig2_points;
        (0..n).map(|i| self.fig2_chi_t_max * i as f64 / (n - 1) as f64).collect()
    }
}

/// A named group of checks with a runtime ceiling.
#[derive(Clone, Copy)]
pub struct Property {
    pub id: &'static str,
    pub title: &'static str,
    /// Wall-clock ceiling in seconds.
    pub time_limit: f64,
    run: fn(&VerifyConfig) -> Result<Vec<Check>>,
}

impl std::fmt::Debug for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Property").field("id", &self.id).field("title", &self.title).finish()
    }
}

impl Property {
    pub fn evaluate(&self, cfg: &VerifyConfig) -> PropertyReport {
        let start = Instant::now();
        let outcome = (self.run)(cfg);
        let seconds = start.elapsed().as_secs_f64();
        let (mut checks, error) = match outcome {
            Ok(c) => (c, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        checks.push(Check::at_most("runtime seconds", seconds, self.time_limit));
        PropertyReport { id: self.id, title: self.title, checks, seconds, error }
    }
}

/// Outcome of one [`Property`].
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub id: &'static str,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub error: Option<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub properties: Vec<PropertyReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyReport::passed)
    }
}

/// Every property of the suite, in reporting order.
pub fn properties() -> Vec<Property> {
    vec![
        Property { id: "twin-fock", title: "twin-Fock moment matrix equals the quantum Fisher matrix", time_limit: 10.0, run: twin_fock_property },
        Property { id: "mode-entanglement", title: "mode-entanglement gain ratio", time_limit: 1.0, run: mode_entanglement_property },
        Property { id: "squeezed-vacuum", title: "squeezed-vacuum optimal squeezing matrix and observables", time_limit: 5.0, run: squeezed_vacuum_property },
        Property { id: "simon", title: "squeezing-matrix violation iff smallest covariance eigenvalue below 1/4", time_limit: 5.0, run: simon_property },
        Property { id: "fisher-chain", title: "moment, classical and quantum Fisher matrices are ordered", time_limit: 30.0, run: fisher_chain_property },
        Property { id: "cauchy-schwarz", title: "matrix Cauchy-Schwarz inequality and its saturation", time_limit: 2.0, run: cauchy_schwarz_property },
        Property { id: "spin-oracle", title: "spin module agrees with the full qubit computation", time_limit: 60.0, run: spin_oracle_property },
        Property { id: "twisting-comparison", title: "collective versus mode-local twisting", time_limit: 300.0, run: twisting_property },
        Property { id: "monte-carlo", title: "estimator covariance follows the inverse moment matrix", time_limit: 300.0, run: monte_carlo_property },
        Property { id: "shot-noise", title: "shot-noise matrix and particle-separable bound", time_limit: 60.0, run: shot_noise_property },
        Property { id: "allocation", title: "mode-separable and mode-entangled photon allocation", time_limit: 10.0, run: allocation_property },
        Property { id: "symplectic", title: "symplectic structure of passive maps and encodings", time_limit: 5.0, run: symplectic_property },
        Property { id: "fock-oracle", title: "Gaussian formulas agree with truncated Fock space", time_limit: 30.0, run: fock_property },
    ]
}

/// Runs the whole suite.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    Ok(VerifyReport { properties: properties().iter().map(|p| p.evaluate(cfg)).collect() })
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc: f64, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}

fn twin_fock_property(_: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in [4, 10, 20] {
        let rep = twin_fock_moment(n, [1e-2, 1e-2])?;
        checks.push(Check::at_most(format!("N={n} relative deviation from N(N+2)/2 I"), rep.relative_deviation, 1e-4));
        checks.push(Check::at_most(format!("N={n} deviation from quantum Fisher matrix"), rep.fisher_deviation, 1e-4));
    }
    Ok(checks)
}

fn mode_entanglement_property(_: &VerifyConfig) -> Result<Vec<Check>> {
    let mut large = Vec::new();
    let mut origin = Vec::new();
    for m in [2usize, 5, 10, 100] {
        let rows = fig3_scan(m, &[0.0, 5.0])?;
        origin.push((rows[0].ratio - 1.0).abs());
        large.push((rows[1].ratio * m as f64 - 1.0).abs());
    }
    let small = fig3_scan(4, &[0.01])?[0];
    let small_dev = (small.ratio / (-2.0 * (2.0 - 1.0) * 0.01f64).exp() - 1.0).abs();
    Ok(vec![
        Check::at_most("r=5 relative deviation from 1/M", worst(large), 0.01),
        Check::at_most("M=4 r=0.01 relative deviation from small-r form", small_dev, 0.02),
        Check::at_most("ratio at r=0 minus one", worst(origin), 0.0),
    ])
}

fn p_picker(m: usize) -> RealMatrix {
    DMatrix::from_fn(m, 2 * m, |k, j| if j == 2 * k + 1 { 1.0 } else { 0.0 })
}

fn squeezed_vacuum_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let trials = par::map_indexed(100, |t| -> Result<[f64; 4]> {
        let mut rng = cfg.rng(3, t);
        let m = rng.random_range(1..=4);
        let r: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.5)).collect();
        let o = random_passive(m, &mut rng);
        let u = random_orthogonal(m, &mut rng);
        let state = squeezed_vacuum(&SqueezedVacuumSpec::new(r.clone(), o.clone())?)?;
        let om = symplectic_form(m);
        let picked = p_picker(m) * &o;
        let encoding = &u * &picked * &om;

        let target_diag = DMatrix::from_diagonal(&DVector::from_iterator(m, r.iter().map(|x| (-2.0 * x).exp())));
        let target = &u * &target_diag * u.transpose();
        let xi2 = cv_squeezing_matrix(&state, &encoding)?.xi2;
        let xi2_dev = max_abs(&(xi2.matrix() - &target));

        let mut want: Vec<f64> = r.iter().map(|x| (-2.0 * x).exp()).collect();
        want.sort_by(f64::total_cmp);
        let best = cv_squeezing_matrix(&state, &optimal_cv_encoding(&state)?)?.eigenvalues;
        let spectrum_dev = worst(best.iter().zip(&want).map(|(a, b)| (a - b).abs()));

        let ctilde = &om * 0.5;
        let (s, saturation, _) =
            optimal_measurement_coefficients(state.gamma(), &ctilde, &encoding, &DMatrix::identity(m, m))?;
        let scale = max_abs(&s).max(1.0);
        let outside = max_abs(&(&s - &s * picked.transpose() * &picked)) / scale;
        let weights = DMatrix::from_diagonal(&DVector::from_iterator(m, r.iter().map(|x| 2.0 * (2.0 * x).exp())));
        let mixing = max_abs(&(&s * picked.transpose() - &u * weights)) / scale;
        Ok([xi2_dev, spectrum_dev, saturation, outside.max(mixing)])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        Check::at_most("squeezing matrix equals U diag(e^-2r) U^T", worst(trials.iter().map(|t| t[0])), 1e-10),
        Check::at_most("optimal encoding spectrum equals e^-2r", worst(trials.iter().map(|t| t[1])), 1e-10),
        Check::at_most("optimal observables saturation residual", worst(trials.iter().map(|t| t[2])), 1e-8),
        Check::at_most("optimal observables lie along the squeezed quadratures", worst(trials.iter().map(|t| t[3])), 1e-8),
    ])
}

fn random_gaussian(cfg: &VerifyConfig, t: usize) -> Result<GaussianState> {
    let mut rng = cfg.rng(4, t);
    let m = rng.random_range(1..=3);
    let o = random_passive(m, &mut rng);
    let diag: Vec<f64> = (0..m)
        .flat_map(|_| {
            let (nu, r) = match t % 3 {
                0 => (1.0, rng.random_range(0.0..1.2)),
                1 => (1.0, 0.0),
                _ => (rng.random_range(1.0..3.0), rng.random_range(0.0..1.0)),
            };
            [0.25 * nu * (2.0f64 * r).exp(), 0.25 * nu * (-2.0f64 * r).exp()]
        })
        .collect();
    let core = DMatrix::from_diagonal(&DVector::from_vec(diag));
    GaussianState::centered(RealSymMatrix::new(o.transpose() * core * &o))
}

fn simon_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let outcomes = par::map_indexed(cfg.budget.random_trials, |t| -> Result<(bool, f64)> {
        let chk = simon_check(&random_gaussian(cfg, t)?)?;
        let violated = chk.encoding_min_xi2 < 1.0 - 1e-10;
        Ok((violated != chk.squeezed, (chk.encoding_min_xi2 - 4.0 * chk.lambda_min).abs()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let disagreements = outcomes.iter().filter(|o| o.0).count() as f64;
    Ok(vec![
        Check::at_most("disagreements between violation and smallest eigenvalue", disagreements, 0.0),
        Check::at_most("best squeezing eigenvalue minus 4 lambda_min", worst(outcomes.iter().map(|o| o.1)), 1e-10),
    ])
}

fn random_density<R: Rng>(d: usize, rng: &mut R) -> Result<QuantumState> {
    let g = CMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    QuantumState::mixed(HermitianOp::hermitian_part(rho / C64::new(tr, 0.0)))
}

fn projectors_of(u: &CMatrix) -> Vec<HermitianOp> {
    (0..u.ncols())
        .map(|i| {
            let v = u.column(i);
            HermitianOp::hermitian_part(v * v.adjoint())
        })
        .collect()
}

fn fisher_chain_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let chain = par::map_indexed(cfg.budget.random_trials, |t| -> Result<(f64, f64)> {
        let mut rng = cfg.rng(5, t);
        let d = rng.random_range(2..=16);
        let state = if t % 2 == 0 {
            QuantumState::pure(crate::linalg::random::random_state_vector(d, &mut rng))?
        } else {
            random_density(d, &mut rng)?
        };
        let m = rng.random_range(1..=3);
        let h = ObservableSet::new("H", (0..m).map(|_| random_hermitian(d, &mut rng)).collect())?;
        let u = random_unitary(d, &mut rng);
        let k = rng.random_range(1..=4);
        let x_ops = (0..k)
            .map(|_| {
                let diag = DVector::from_fn(d, |_, _| C64::new(crate::linalg::random::normal(&mut rng), 0.0));
                HermitianOp::hermitian_part(&u * CMatrix::from_diagonal(&diag) * u.adjoint())
            })
            .collect();
        let x = ObservableSet::new("X", x_ops)?;
        let moment = moment_matrix(&state, &h, &x)?.moment;
        let fisher = classical_fisher_matrix(&state, &ObservableSet::new("P", projectors_of(&u))?, &h)?;
        let quantum = quantum_fisher_matrix(&state, &h)?;
        Ok(((-loewner_margin(&fisher, &moment)?).max(0.0), (-loewner_margin(&quantum, &fisher)?).max(0.0)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let projective = par::map_indexed((cfg.budget.random_trials / 2).max(1), |t| -> Result<f64> {
        let mut rng = cfg.rng(6, t);
        let d = rng.random_range(2..=16);
        let state = random_density(d, &mut rng)?;
        let m = rng.random_range(1..=3);
        let h = ObservableSet::new("H", (0..m).map(|_| random_hermitian(d, &mut rng)).collect())?;
        let p = ObservableSet::new("P", projectors_of(&random_unitary(d, &mut rng)))?;
        let moment = moment_matrix(&state, &h, &p)?.moment;
        let fisher = classical_fisher_matrix(&state, &p, &h)?;
        Ok(max_abs(&(moment.matrix() - fisher.matrix())) / max_abs(fisher.matrix()).max(1.0))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    // Finite differences of the outcome probabilities against the analytic
    // commutator form.
    let step = 1e-4;
    let finite = (0..10)
        .map(|t| -> Result<f64> {
            let mut rng = cfg.rng(7, t);
            let d = rng.random_range(2..=4);
            let state = random_density(d, &mut rng)?;
            let h = (0..2)
                .map(|_| {
                    let g = random_hermitian(d, &mut rng);
                    let norm = herm_eig(g.matrix())?.values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
                    Ok(g.scaled(1.0 / norm))
                })
                .collect::<Result<Vec<HermitianOp>>>()?;
            let p = projectors_of(&random_unitary(d, &mut rng));
            let analytic =
                classical_fisher_matrix(&state, &ObservableSet::new("P", p.clone())?, &ObservableSet::new("H", h.clone())?)?;
            let raw = |ops: &[HermitianOp]| ops.iter().map(|o| o.matrix().clone()).collect::<Vec<_>>();
            let numeric = finite_diff_fisher(&state.density_matrix(), &raw(&h), &raw(&p), step)?;
            Ok(max_abs(&(numeric.matrix() - analytic.matrix())) / max_abs(analytic.matrix()).max(1e-300))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(vec![
        Check::at_most("moment matrix below classical Fisher (Loewner margin)", worst(chain.iter().map(|c| c.0)), 1e-8),
        Check::at_most("classical below quantum Fisher (Loewner margin)", worst(chain.iter().map(|c| c.1)), 1e-8),
        Check::at_most("projector observables: moment equals classical Fisher", worst(projective), 1e-8),
        Check::at_most("finite-difference Fisher relative deviation", worst(finite), 10.0 * step * step),
    ])
}

fn cauchy_schwarz_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let shapes = [(5, 1, 1), (7, 3, 4), (10, 4, 2), (12, 2, 5), (9, 4, 3)];
    let mut min_eig = f64::INFINITY;
    let mut saturation: f64 = 0.0;
    for (i, (p, n, m)) in shapes.into_iter().enumerate() {
        let chk = cauchy_schwarz_lemma_test(p, n, m, 100, cfg.budget.seed.wrapping_add(i as u64))?;
        min_eig = min_eig.min(chk.min_eigenvalue);
        saturation = saturation.max(chk.saturation_residual);
    }
    Ok(vec![
        Check::at_most("negative eigenvalue of the gap over 500 samples", (-min_eig).max(0.0), 1e-9),
        Check::at_most("gap when A = BE", saturation, 1e-9),
    ])
}

fn gain_from_xi2(xi2: &RealMatrix, sizes: &[usize], n: &[f64]) -> f64 {
    let w: Vec<f64> = n.iter().zip(sizes).map(|(a, &s)| a / (s as f64).sqrt()).collect();
    let sn: f64 = w.iter().map(|x| x * x).sum();
    let mut actual = 0.0;
    for (k, wk) in w.iter().enumerate() {
        for (l, wl) in w.iter().enumerate() {
            actual += wk * xi2[(k, l)] * wl;
        }
    }
    10.0 * (sn / actual).log10()
}

fn spin_oracle_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut state_dev: f64 = 0.0;
    let mut xi2_dev: f64 = 0.0;
    let mut jz_dev: f64 = 0.0;
    let mut gain_dev: f64 = 0.0;
    let mut rng = cfg.rng(8, 0);
    for sizes in [vec![2], vec![5], vec![2, 2], vec![3, 3], vec![1, 2, 3], vec![2, 2, 2]] {
        let net = SpinNetwork::new(sizes.clone())?;
        let prop = OatPropagator::new(&net)?;
        let sys = full_qubit_spin(&sizes, &cfg.budget)?;
        for chi_t in [0.05, 0.2, 0.6] {
            for collective in [false, true] {
                let state = if collective { prop.nonlocal(chi_t)? } else { prop.local(chi_t)? };
                let dicke = state.as_vector().ok_or_else(|| Error::InvalidState("expected a pure state".into()))?;
                let reference = sys.twisted(chi_t, collective);
                let embedded = sys.embed_dicke(dicke)?;
                state_dev = state_dev.max((1.0 - embedded.dotc(&reference).norm()).abs());

                let angles: Vec<f64> = (0..sizes.len()).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect();
                let dirs = LocalDirection::from_angles(&angles);
                let s: Vec<[f64; 2]> = (0..sizes.len()).map(|k| dirs.s(k)).collect();
                let moments = spin_moments(&state, &net)?;
                let rep = moments.squeezing(&dirs)?;
                let brute = sys.squeezing_entries(&reference, &s);
                xi2_dev = xi2_dev.max(max_abs(&(rep.xi2.matrix() - &brute)) / max_abs(&brute).max(1.0));
                let jz = sys.mean_jz(&reference);
                jz_dev = jz_dev.max(worst((0..sizes.len()).map(|k| (moments.jz(k) - jz[k]).abs())));

                let n: Vec<f64> = {
                    let raw: Vec<f64> = (0..sizes.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
                    raw.iter().map(|x| x / norm).collect()
                };
                gain_dev = gain_dev.max((rep.gain_db(&n)? - gain_from_xi2(&brute, &sizes, &n)).abs());
            }
        }
    }

    // Complete two-mode rows at N = 4, including the optimized directions.
    let net = SpinNetwork::new(vec![2, 2])?;
    let prop = OatPropagator::new(&net)?;
    let sys = full_qubit_spin(&[2, 2], &cfg.budget)?;
    let (plus, minus) = ([FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
    let mut row_dev: f64 = 0.0;
    for chi_t in [0.05, 0.15, 0.3] {
        let row = fig2_point(&prop, chi_t)?;
        let dirs = row.nonlocal_directions.clone().ok_or(Error::ZeroMeanSpin { mode: 0, mean: 0.0, floor: 0.0 })?;
        let nl = sys.squeezing_entries(&sys.twisted(chi_t, true), &[dirs.s(0), dirs.s(1)]);
        row_dev = row_dev
            .max((row.gain_sum_nonlocal_db - gain_from_xi2(&nl, &[2, 2], &plus)).abs())
            .max((row.gain_diff_nonlocal_db - gain_from_xi2(&nl, &[2, 2], &minus)).abs());
        let single = SpinNetwork::new(vec![2])?;
        let mode_state = OatPropagator::new(&single)?.local(chi_t)?;
        let (_, phi) = grid_minimize_direction(mode_state.as_vector().expect("pure"), 2, &cfg.budget)?;
        let s = [phi.cos(), phi.sin()];
        let loc = sys.squeezing_entries(&sys.twisted(chi_t, false), &[s, s]);
        row_dev = row_dev
            .max((row.gain_local_db - gain_from_xi2(&loc, &[2, 2], &plus)).abs())
            .max((row.gain_local_diff_db - gain_from_xi2(&loc, &[2, 2], &minus)).abs());
    }

    let mut closed_form_dev: f64 = 0.0;
    for n in 1..=6 {
        let net = SpinNetwork::new(vec![n])?;
        let prop = OatPropagator::new(&net)?;
        for chi_t in [0.0, 0.1, 0.3, 0.8] {
            let state = prop.local(chi_t)?;
            let (closed, _) = local_xi_min(&state, n)?;
            let (grid, _) = grid_minimize_direction(state.as_vector().expect("pure"), n, &cfg.budget)?;
            closed_form_dev = closed_form_dev.max((closed - grid).abs());
        }
    }

    Ok(vec![
        Check::at_most("Dicke state infidelity against qubit-space evolution", state_dev, 1e-9),
        Check::at_most("squeezing matrix entries", xi2_dev, 1e-9),
        Check::at_most("mean spin", jz_dev, 1e-9),
        Check::at_most("gains in dB for random combinations", gain_dev, 1e-9),
        Check::at_most("N=4 twisting comparison rows in dB", row_dev, 1e-6),
        Check::at_most("closed-form xi2_min against grid search", closed_form_dev, 1e-6),
    ])
}

fn twisting_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let grid = cfg.fig2_grid();
    let rows = fig2_scan(cfg.fig2_particles, &grid)?;
    let first = &rows[0];
    let origin = worst(
        [first.gain_sum_nonlocal_db, first.gain_diff_nonlocal_db, first.gain_local_db, first.gain_local_diff_db, first.gain_avg_nonlocal_db]
            .map(f64::abs),
    );
    let collapsed = rows.iter().filter(|r| r.collapsed).count() as f64;
    let offdiag = worst(rows.iter().map(|r| r.local_offdiag.abs()));
    let local_equal = worst(rows.iter().map(|r| (r.gain_local_db - r.gain_local_diff_db).abs()));
    let dominance = worst(rows.iter().map(|r| (r.gain_local_db - r.gain_sum_nonlocal_db).max(0.0)));

    let net = SpinNetwork::split_evenly(cfg.fig2_particles)?;
    let prop = OatPropagator::new(&net)?;
    let (plus, minus) = ([FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
    let flips = par::map_slice(&rows, |row| -> Result<f64> {
        let Some(dirs) = &row.nonlocal_directions else { return Ok(f64::NAN) };
        let rep = spin_moments(&prop.nonlocal(row.chi_t)?, &net)?.squeezing(&dirs.flipped(1))?;
        Ok((rep.gain_db(&minus)? - row.gain_sum_nonlocal_db)
            .abs()
            .max((rep.gain_db(&plus)? - row.gain_diff_nonlocal_db).abs()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(vec![
        Check::at_most("gains at chi_t = 0 in dB", origin, 1e-10),
        Check::at_most("rows with a vanishing mean spin", collapsed, 0.0),
        Check::at_most("local squeezing matrix off-diagonal", offdiag, 1e-10),
        Check::at_most("local sum and difference gains differ by (dB)", local_equal, 1e-10),
        Check::at_most("local gain exceeds collective sum gain by (dB)", dominance, 1e-10),
        Check::at_most("pi rotation of one mode swaps sum and difference gains (dB)", worst(flips), 1e-10),
    ])
}

fn monte_carlo_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let sc = css_ramsey(20)?;
    let run = EstimationRun::new(cfg.mc_repetitions, cfg.mc_trials, vec![0.0], cfg.budget.seed.wrapping_add(2024))?;
    let exp = covariance_experiment(&run, &sc.state, &sc.h, &sc.x)?;
    let again = covariance_experiment(&run, &sc.state, &sc.h, &sc.x)?;
    let expected = 1.0 / (cfg.mc_repetitions as f64 * 20.0);
    let repro = if exp.empirical.matrix() == again.empirical.matrix() { 0.0 } else { 1.0 };

    let sc = local_oat_scenario(6, 0.15)?;
    let run = EstimationRun::new(cfg.mc_repetitions, 600, vec![0.0, 0.0], cfg.budget.seed.wrapping_add(99))?;
    let oat = covariance_experiment(&run, &sc.state, &sc.h, &sc.x)?;
    let n = DVector::from_vec(vec![FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
    let empirical = (n.transpose() * oat.empirical.matrix() * &n)[0];
    let shot_noise = 1.0 / (cfg.mc_repetitions as f64 * 6.0);

    Ok(vec![
        Check::at_most("predicted variance relative to 1/(mu N)", (exp.predicted[(0, 0)] / expected - 1.0).abs(), 1e-10),
        Check::at_most("max |z| of empirical covariance", exp.max_abs_z, 4.0),
        Check::at_most("runs with identical seed differ", repro, 0.0),
        Check::below("local twisting difference variance over shot noise", empirical / shot_noise, 1.0),
    ])
}

fn shot_noise_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut exact: f64 = 0.0;
    for sizes in [vec![4], vec![3, 3], vec![1, 2, 5], vec![50, 50]] {
        let want: Vec<f64> = sizes.iter().flat_map(|&n| [n as f64, n as f64]).collect();
        let got = shot_noise_perp(&SpinNetwork::new(sizes)?);
        exact = exact.max(max_abs(&(got.matrix() - DMatrix::from_diagonal(&DVector::from_vec(want)))));
    }
    let mut margin = f64::INFINITY;
    let mut polarized: f64 = 0.0;
    for sizes in [vec![3, 3], vec![2, 2, 2]] {
        let chk = random_product_state_fisher(&sizes, &cfg.budget)?;
        margin = margin.min(chk.worst_margin);
        polarized = polarized.max(chk.polarized_deviation);
    }
    Ok(vec![
        Check::at_most("shot-noise matrix deviation from diag(N_k, N_k)", exact, 0.0),
        Check::at_most("product states exceed the shot-noise bound by", (-margin).max(0.0), 1e-8),
        Check::at_most("polarized state deviation from the bound", polarized, 1e-12),
    ])
}

fn allocation_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut uniform: f64 = 0.0;
    let mut dominance: f64 = 0.0;
    for m in 1..=6 {
        for photons in [0.5, 4.0, 30.0] {
            let n = vec![1.0 / (m as f64).sqrt(); m];
            let sep = msep_allocation(&n, photons, 1e-15)?;
            let want = (photons / m as f64).sqrt().asinh();
            uniform = uniform.max(worst(sep.r.iter().map(|r| (r - want).abs())));
            dominance = dominance.max(ment_allocation(photons)?.1 - sep.variance);
        }
    }
    let mut grid_dev: f64 = 0.0;
    let mut rng = cfg.rng(11, 0);
    for _ in 0..20 {
        let angle: f64 = rng.random_range(0.1..1.47);
        let n = [angle.cos(), angle.sin()];
        let photons = rng.random_range(0.5..20.0);
        let sep = msep_allocation(&n, photons, 1e-15)?;
        let (r, _) = two_mode_allocation_search(n, photons, &cfg.budget)?;
        grid_dev = grid_dev.max((sep.r[0] - r[0]).abs()).max((sep.r[1] - r[1]).abs());
        dominance = dominance.max(ment_allocation(photons)?.1 - sep.variance);
    }
    for _ in 0..20 {
        let m = rng.random_range(3..=6);
        let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let n: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        let photons = rng.random_range(0.5..20.0);
        dominance = dominance.max(ment_allocation(photons)?.1 - msep_allocation(&n, photons, 1e-15)?.variance);
    }
    Ok(vec![
        Check::at_most("uniform direction squeezing minus arcsinh sqrt(N/M)", uniform, 1e-10),
        Check::at_most("two-mode allocation against grid search", grid_dev, 1e-6),
        Check::at_most("mode-entangled variance exceeds mode-separable by", dominance.max(0.0), 1e-12),
    ])
}

fn symplectic_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let form = cfg.symplectic_form;
    let mut failures = 0.0;
    let mut commutators: f64 = 0.0;
    let mut uncertainty: f64 = 0.0;
    for t in 0..20 {
        let mut rng = cfg.rng(12, t);
        let m = rng.random_range(2..=4);
        let om = form(m);
        if !is_orthogonal_symplectic_with(&random_passive(m, &mut rng), 1e-10, &form)? {
            failures += 1.0;
        }
        let basis: Vec<DVector<f64>> = {
            let a = random_orthogonal(m, &mut rng);
            (0..m).map(|k| a.row(k).transpose()).collect()
        };
        if !is_orthogonal_symplectic_with(&basis_change_w(&basis)?, 1e-10, &form)? {
            failures += 1.0;
        }
        let r: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
        let state = squeezed_vacuum(&SqueezedVacuumSpec::new(r, random_passive(m, &mut rng))?)?;
        for enc in [optimal_cv_encoding(&state)?, local_encoding(m)] {
            commutators = commutators.max(max_abs(&(&enc * &om * enc.transpose())));
        }
        let d = 2 * m;
        let h = CMatrix::from_fn(d, d, |i, j| C64::new(state.gamma()[(i, j)], 0.25 * om[(i, j)]));
        uncertainty = uncertainty.max(-herm_eig(&h)?.values.min());
        // The moment matrix of a pure Gaussian state is 4Γ only if the form is right.
        let mt = cv_moment_matrix(&state)?;
        let inv = state.gamma().matrix().clone().try_inverse().ok_or(Error::SingularCovariance)?;
        let via_form = om.transpose() * inv * &om * 0.25;
        commutators = commutators.max(max_abs(&(mt.matrix() - via_form)) / max_abs(mt.matrix()).max(1.0));
    }
    Ok(vec![
        Check::at_most("passive maps or basis changes that break the form", failures, 0.0),
        Check::at_most("encoding commutators and moment-matrix form residual", commutators, 1e-10),
        Check::at_most("uncertainty relation violation", uncertainty.max(0.0), 1e-9),
    ])
}

fn fock_property(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let r = 0.5;
    let chk = fock_cv_check(r, cfg.budget.fock_cutoff)?;
    let state = squeezed_vacuum(&SqueezedVacuumSpec::local(vec![r]))?;
    let gamma_dev = max_abs(&(chk.gamma.matrix() - state.gamma().matrix()));
    let fisher_dev = max_abs(&(chk.fisher.matrix() - cv_moment_matrix(&state)?.matrix()));
    let margin = max_variance_search(&cfg.budget)?;
    Ok(vec![
        Check::at_most("truncated-Fock covariance at r=0.5", gamma_dev, 1e-6),
        Check::at_most("truncated-Fock quantum Fisher against the moment matrix", fisher_dev, 1e-4),
        Check::at_most("quadrature variance above the photon-number bound", (-margin).max(0.0), 1e-6),
    ])
}
