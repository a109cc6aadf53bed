use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::DMatrix;

use super::moments::{shot_noise_for, spin_moments, xi_min_from_moments, SpinMoments};
use super::ops::{LocalDirection, SpinNetwork};
use super::search::{periodic_min, periodic_min_2d};
use super::states::OatPropagator;
use crate::error::{Error, Result};
use crate::linalg::{RealMatrix, RealSymMatrix};
use crate::par;
use crate::quantum::{moment_from_parts, squeezing_matrix, SqueezingReport};

const ANGLE_GRID: usize = 720;

/// One row of the local-versus-nonlocal twisting comparison.
#[derive(Debug, Clone)]
pub struct Fig2Row {
    pub chi_t: f64,
    /// Gain for `θ₁ + θ₂` on the collectively twisted state.
    pub gain_sum_nonlocal_db: f64,
    /// Gain for `θ₁ − θ₂` on the collectively twisted state.
    pub gain_diff_nonlocal_db: f64,
    /// Gain for `θ₁ + θ₂` on the locally twisted state.
    pub gain_local_db: f64,
    /// Gain for `θ₁ − θ₂` on the locally twisted state.
    pub gain_local_diff_db: f64,
    /// Gain for estimating both parameters independently (trace ratio).
    pub gain_avg_nonlocal_db: f64,
    /// `⟨J_z⟩` of each mode on the collectively twisted state.
    pub mean_spin: [f64; 2],
    /// Measurement directions chosen for the collectively twisted state.
    pub nonlocal_directions: Option<LocalDirection>,
    pub nonlocal_xi2: Option<RealSymMatrix>,
    /// Off-diagonal entry of the local squeezing matrix.
    pub local_offdiag: f64,
    /// Set when a mean spin fell below the floor; gains are then NaN.
    pub collapsed: bool,
}

fn sum_weights(net: &SpinNetwork, sign: f64) -> [f64; 2] {
    // w = F_SN^{-1/2} n for n = (1, ±1)/√2.
    let s = net.mode_sizes();
    [FRAC_1_SQRT_2 / (s[0] as f64).sqrt(), sign * FRAC_1_SQRT_2 / (s[1] as f64).sqrt()]
}

/// Chooses per-mode measurement directions that maximize the gain for
/// `θ₁ + θ₂` on a two-mode state. Returns the directions and `wᵀΞ²w`.
pub fn optimize_sum_directions(m: &SpinMoments) -> Result<(LocalDirection, f64)> {
    let net = m.network();
    if net.modes() != 2 {
        return Err(Error::InvalidArgument("sum-direction optimization needs two modes".into()));
    }
    m.check_mean_spin()?;
    let sizes = net.mode_sizes();
    let w = sum_weights(net, 1.0);
    let blocks = [
        [m.plane_block(0), cross_block(m)],
        [transpose(cross_block(m)), m.plane_block(1)],
    ];
    let norm = |k: usize, l: usize| (sizes[k] as f64 * sizes[l] as f64).sqrt() / (m.jz(k) * m.jz(l));
    let coef = [
        [w[0] * w[0] * norm(0, 0), w[0] * w[1] * norm(0, 1)],
        [w[1] * w[0] * norm(1, 0), w[1] * w[1] * norm(1, 1)],
    ];
    let objective = |a: f64, b: f64| {
        let s = [[a.cos(), a.sin()], [b.cos(), b.sin()]];
        let mut acc = 0.0;
        for k in 0..2 {
            for l in 0..2 {
                acc += coef[k][l] * quad(&s[k], &blocks[k][l], &s[l]);
            }
        }
        acc
    };
    let ((a, b), v) = periodic_min_2d(objective, (PI, TAU), ANGLE_GRID);
    Ok((LocalDirection::from_angles(&[a, b]), v))
}

fn cross_block(m: &SpinMoments) -> [[f64; 2]; 2] {
    let e = [[1.0, 0.0], [0.0, 1.0]];
    let mut out = [[0.0; 2]; 2];
    for (a, ea) in e.iter().enumerate() {
        for (b, eb) in e.iter().enumerate() {
            out[a][b] = m.directional_cov(0, *ea, 1, *eb);
        }
    }
    out
}

fn transpose(b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[b[0][0], b[1][0]], [b[0][1], b[1][1]]]
}

fn quad(u: &[f64; 2], b: &[[f64; 2]; 2], v: &[f64; 2]) -> f64 {
    u[0] * (b[0][0] * v[0] + b[0][1] * v[1]) + u[1] * (b[1][0] * v[0] + b[1][1] * v[1])
}

fn plus_minus() -> ([f64; 2], [f64; 2]) {
    ([FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
}

/// Evaluates one `χt` point of the comparison using a shared propagator.
pub fn fig2_point(prop: &OatPropagator, chi_t: f64) -> Result<Fig2Row> {
    let net = prop.network();
    let (np, nm) = plus_minus();
    let mut row = Fig2Row {
        chi_t,
        gain_sum_nonlocal_db: f64::NAN,
        gain_diff_nonlocal_db: f64::NAN,
        gain_local_db: f64::NAN,
        gain_local_diff_db: f64::NAN,
        gain_avg_nonlocal_db: f64::NAN,
        mean_spin: [f64::NAN; 2],
        nonlocal_directions: None,
        nonlocal_xi2: None,
        local_offdiag: f64::NAN,
        collapsed: false,
    };

    let nl = spin_moments(&prop.nonlocal(chi_t)?, net)?;
    row.mean_spin = [nl.jz(0), nl.jz(1)];
    match optimize_sum_directions(&nl) {
        Ok((dirs, _)) => {
            let rep = nl.squeezing(&dirs)?;
            row.gain_sum_nonlocal_db = rep.gain_db(&np)?;
            row.gain_diff_nonlocal_db = rep.gain_db(&nm)?;
            row.gain_avg_nonlocal_db = rep.average_gain_db()?;
            row.nonlocal_xi2 = Some(rep.xi2);
            row.nonlocal_directions = Some(dirs);
        }
        Err(Error::ZeroMeanSpin { .. }) => row.collapsed = true,
        Err(e) => return Err(e),
    }

    let loc = spin_moments(&prop.local(chi_t)?, net)?;
    match loc.check_mean_spin() {
        Ok(()) => {
            let angles: Vec<f64> = (0..2)
                .map(|k| xi_min_from_moments(loc.plane_block(k), loc.jz(k), net.mode_sizes()[k]).1)
                .collect();
            let rep = loc.squeezing(&LocalDirection::from_angles(&angles))?;
            row.local_offdiag = rep.xi2[(0, 1)];
            row.gain_local_db = rep.gain_db(&np)?;
            row.gain_local_diff_db = rep.gain_db(&nm)?;
        }
        Err(Error::ZeroMeanSpin { .. }) => row.collapsed = true,
        Err(e) => return Err(e),
    }
    Ok(row)
}

/// Scans `χt` for `N` particles split evenly into two modes, comparing
/// collective against mode-local one-axis twisting. Directions are
/// re-optimized at every point.
pub fn fig2_scan(n: usize, chi_t: &[f64]) -> Result<Vec<Fig2Row>> {
    let net = SpinNetwork::split_evenly(n)?;
    let prop = OatPropagator::new(&net)?;
    par::map_slice(chi_t, |c| fig2_point(&prop, *c)).into_iter().collect()
}

/// Squeezing matrix for the sum/difference generators built from in-plane
/// directions `r₁` (angle `φ`) and `r₂ = r₁` turned by a quarter.
#[derive(Debug, Clone)]
pub struct NonlocalEncoding {
    pub xi_plus2: f64,
    pub xi_minus2: f64,
    pub offdiag: f64,
    /// Angle of `r₁`.
    pub angle: f64,
    pub report: SqueezingReport,
    /// Generator and measurement coefficients over `(J_{x,1}, J_{y,1}, J_{x,2}, J_{y,2})`.
    pub generators: RealMatrix,
    pub measurements: RealMatrix,
}

impl NonlocalEncoding {
    pub fn gain_plus_db(&self) -> f64 {
        -10.0 * self.xi_plus2.log10()
    }

    pub fn gain_minus_db(&self) -> f64 {
        -10.0 * self.xi_minus2.log10()
    }
}

fn encoding_matrices(phi: f64) -> (RealMatrix, RealMatrix) {
    let h = FRAC_1_SQRT_2;
    let (c, s) = (phi.cos(), phi.sin());
    let r1 = [c, s];
    let r2 = [-s, c];
    let gens = DMatrix::from_row_slice(
        2,
        4,
        &[h * r1[0], h * r1[1], h * r1[0], h * r1[1], h * r2[0], h * r2[1], -h * r2[0], -h * r2[1]],
    );
    let meas = DMatrix::from_row_slice(
        2,
        4,
        &[h * r2[0], h * r2[1], h * r2[0], h * r2[1], -h * r1[0], -h * r1[1], h * r1[0], h * r1[1]],
    );
    (gens, meas)
}

fn encoding_moment(gamma: &RealSymMatrix, ct: &RealMatrix, phi: f64) -> (RealSymMatrix, RealMatrix, RealMatrix) {
    let (r, s) = encoding_matrices(phi);
    let gx = RealSymMatrix::new(&s * gamma.matrix() * s.transpose());
    let c = &s * ct * r.transpose();
    (moment_from_parts(&gx, &c), r, s)
}

/// Optimizes `r₁` to minimize `ξ₊²` for the sum/difference encoding on a
/// two-mode state with equal mode sizes.
pub fn nonlocal_encoding_for_moments(m: &SpinMoments) -> Result<NonlocalEncoding> {
    let net = m.network();
    if net.modes() != 2 || net.mode_sizes()[0] != net.mode_sizes()[1] {
        return Err(Error::InvalidArgument("the sum/difference encoding needs two equal modes".into()));
    }
    m.check_mean_spin()?;
    let gamma = m.perp_covariance();
    let ct = m.perp_commutator();
    // Shot noise of these generators is (N_k) I whatever the angle.
    let f_sn = shot_noise_for(net, &encoding_matrices(0.0).0)?;
    let xi_plus = |phi: f64| {
        let (mm, _, _) = encoding_moment(&gamma, &ct, phi);
        // F_SN ∝ I so Ξ²₁₁ = F_SN₁₁ (M⁻¹)₁₁.
        let det = mm[(0, 0)] * mm[(1, 1)] - mm[(0, 1)] * mm[(1, 0)];
        if det <= 0.0 {
            f64::INFINITY
        } else {
            f_sn[(0, 0)] * mm[(1, 1)] / det
        }
    };
    let (phi, _) = periodic_min(xi_plus, PI, ANGLE_GRID);
    let (mm, generators, measurements) = encoding_moment(&gamma, &ct, phi);
    let report = squeezing_matrix(&mm, &f_sn)?;
    Ok(NonlocalEncoding {
        xi_plus2: report.xi2[(0, 0)],
        xi_minus2: report.xi2[(1, 1)],
        offdiag: report.xi2[(0, 1)],
        angle: phi,
        report,
        generators,
        measurements,
    })
}

/// Sum/difference encoding on the collectively twisted state of `N`
/// particles split into two modes.
pub fn nonlocal_encoding_scenario(n: usize, chi_t: f64) -> Result<NonlocalEncoding> {
    let net = SpinNetwork::split_evenly(n)?;
    let state = OatPropagator::new(&net)?.nonlocal(chi_t)?;
    nonlocal_encoding_for_moments(&spin_moments(&state, &net)?)
}

/// Sum/difference encoding evaluated on both twisted states at one `χt`.
#[derive(Debug, Clone)]
pub struct NonlocalEncodingRow {
    pub chi_t: f64,
    pub nonlocal: Option<NonlocalEncoding>,
    pub local: Option<NonlocalEncoding>,
}

fn encoding_or_collapse(m: &SpinMoments) -> Result<Option<NonlocalEncoding>> {
    match nonlocal_encoding_for_moments(m) {
        Ok(e) => Ok(Some(e)),
        Err(Error::ZeroMeanSpin { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Scans `χt` for the sum/difference encoding on both twisted states.
pub fn nonlocal_encoding_scan(n: usize, chi_t: &[f64]) -> Result<Vec<NonlocalEncodingRow>> {
    let net = SpinNetwork::split_evenly(n)?;
    let prop = OatPropagator::new(&net)?;
    par::map_slice(chi_t, |&c| {
        let nl = spin_moments(&prop.nonlocal(c)?, &net)?;
        let lo = spin_moments(&prop.local(c)?, &net)?;
        Ok(NonlocalEncodingRow { chi_t: c, nonlocal: encoding_or_collapse(&nl)?, local: encoding_or_collapse(&lo)? })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianOp;
    use crate::quantum::{covariance_matrix, ObservableSet};
    use crate::spin::ops::joint_mode_ops;

    #[test]
    fn zero_twist_rows_are_flat() {
        let rows = fig2_scan(20, &[0.0]).unwrap();
        let r = &rows[0];
        for g in [r.gain_sum_nonlocal_db, r.gain_diff_nonlocal_db, r.gain_local_db, r.gain_avg_nonlocal_db] {
            assert!(g.abs() < 1e-9, "gain {g}");
        }
        for m in r.mean_spin {
            assert!((m - 5.0).abs() < 1e-12, "mean spin {m}");
        }
    }

    #[test]
    fn nonlocal_sum_beats_local_for_small_twist() {
        let rows = fig2_scan(20, &[0.01, 0.03, 0.06]).unwrap();
        for r in rows {
            assert!(r.gain_sum_nonlocal_db >= r.gain_local_db - 1e-9, "{r:?}");
            assert!((r.gain_local_db - r.gain_local_diff_db).abs() < 1e-9);
            assert!(r.local_offdiag.abs() < 1e-10);
        }
    }

    #[test]
    fn pi_flip_swaps_sum_and_difference() {
        let net = SpinNetwork::split_evenly(16).unwrap();
        let prop = OatPropagator::new(&net).unwrap();
        let row = fig2_point(&prop, 0.05).unwrap();
        let dirs = row.nonlocal_directions.clone().unwrap();
        let m = spin_moments(&prop.nonlocal(0.05).unwrap(), &net).unwrap();
        let flipped = m.squeezing(&dirs.flipped(1)).unwrap();
        let (np, nm) = plus_minus();
        assert_eq!(flipped.gain_db(&np).unwrap(), row.gain_diff_nonlocal_db);
        assert_eq!(flipped.gain_db(&nm).unwrap(), row.gain_sum_nonlocal_db);
    }

    #[test]
    fn odd_particle_number_rejected() {
        assert!(fig2_scan(7, &[0.1]).is_err());
    }

    #[test]
    fn encoding_identity_at_zero_twist() {
        let e = nonlocal_encoding_scenario(20, 0.0).unwrap();
        assert!((e.xi_plus2 - 1.0).abs() < 1e-10);
        assert!((e.xi_minus2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn encoding_matches_collective_wineland() {
        let n = 16;
        let chi = 0.04;
        let net = SpinNetwork::split_evenly(n).unwrap();
        let state = OatPropagator::new(&net).unwrap().nonlocal(chi).unwrap();
        let e = nonlocal_encoding_for_moments(&spin_moments(&state, &net).unwrap()).unwrap();
        assert!(e.offdiag.abs() < 1e-9);
        // Independent route: dense joint spin operators and the generic covariance.
        let ops = joint_mode_ops(&net).unwrap();
        let jx = HermitianOp::hermitian_part(ops[0].jx.matrix() + ops[1].jx.matrix());
        let jy = HermitianOp::hermitian_part(ops[0].jy.matrix() + ops[1].jy.matrix());
        let jz = ops[0].jz.matrix() + ops[1].jz.matrix();
        let (c, s) = (e.angle.cos(), e.angle.sin());
        let j_r2 = HermitianOp::real_combination(&[-s, c], &[jx, jy]).unwrap();
        let var = covariance_matrix(&state, &ObservableSet::new("J", vec![j_r2]).unwrap()).unwrap()[(0, 0)];
        let mean_z = state.expect(&jz).re;
        let wineland = n as f64 * var / (mean_z * mean_z);
        assert!((wineland - e.xi_plus2).abs() < 1e-9 * wineland.max(1.0), "{wineland} vs {}", e.xi_plus2);
    }
}
