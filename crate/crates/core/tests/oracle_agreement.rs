use msqueeze::gaussian::{cv_moment_matrix, squeezed_vacuum, SqueezedVacuumSpec};
use msqueeze::linalg::{max_abs, CMatrix, HermitianOp};
use msqueeze::oracle::{finite_diff_fisher, fock_quadratures, fock_squeezed_vacuum, full_qubit_spin, OracleBudget};
use msqueeze::quantum::{classical_fisher_matrix, quantum_fisher_matrix, ObservableSet, QuantumState};
use msqueeze::spin::{fig2_scan, spin_moments, LocalDirection, OatPropagator, SpinNetwork};
use proptest::prelude::*;

#[test]
fn truncated_fock_fisher_matches_covariance_formula() {
    let (psi, discarded) = fock_squeezed_vacuum(0.5, 40);
    assert!(discarded < 1e-10);
    let (x, p) = fock_quadratures(40);
    let h = ObservableSet::new(
        "q",
        vec![HermitianOp::hermitian_part(x), HermitianOp::hermitian_part(p)],
    )
    .unwrap();
    let fq = quantum_fisher_matrix(&QuantumState::pure(psi).unwrap(), &h).unwrap();
    let state = squeezed_vacuum(&SqueezedVacuumSpec::local(vec![0.5])).unwrap();
    let cv = cv_moment_matrix(&state).unwrap();
    assert!(max_abs(&(fq.matrix() - cv.matrix())) < 1e-4);
}

#[test]
fn four_spin_twisting_matches_qubit_space() {
    let budget = OracleBudget::default();
    let sys = full_qubit_spin(&[2, 2], &budget).unwrap();
    let net = SpinNetwork::new(vec![2, 2]).unwrap();
    let prop = OatPropagator::new(&net).unwrap();
    let dirs = LocalDirection::from_angles(&[0.4, 2.1]);
    for collective in [false, true] {
        let state = if collective { prop.nonlocal(0.3).unwrap() } else { prop.local(0.3).unwrap() };
        let xi2 = spin_moments(&state, &net).unwrap().squeezing(&dirs).unwrap().xi2;
        let brute = sys.squeezing_entries(&sys.twisted(0.3, collective), &[dirs.s(0), dirs.s(1)]);
        assert!(max_abs(&(xi2.matrix() - brute)) < 1e-9);
    }
}

#[test]
fn collective_gain_dominates_on_default_grid() {
    let grid: Vec<f64> = (0..=12).map(|i| 0.005 * i as f64).collect();
    for row in fig2_scan(40, &grid).unwrap() {
        assert!(row.gain_sum_nonlocal_db >= row.gain_local_db - 1e-10, "chi_t = {}", row.chi_t);
    }
}

fn qubit_setup(a: f64, b: f64, c: f64) -> (QuantumState, Vec<CMatrix>, Vec<CMatrix>) {
    use msqueeze::C64;
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::i();
    let sx = CMatrix::from_row_slice(2, 2, &[z, one, one, z]) * C64::new(0.5, 0.0);
    let sy = CMatrix::from_row_slice(2, 2, &[z, -i, i, z]) * C64::new(0.5, 0.0);
    let sz = CMatrix::from_row_slice(2, 2, &[one, z, z, -one]) * C64::new(0.5, 0.0);
    let rho = CMatrix::identity(2, 2) * C64::new(0.5, 0.0) + (&sx * C64::new(a, 0.0) + &sz * C64::new(b, 0.0));
    let state = QuantumState::mixed(HermitianOp::hermitian_part(rho)).unwrap();
    let n = (c.cos(), c.sin());
    let axis = &sx * C64::new(n.0, 0.0) + &sz * C64::new(n.1, 0.0);
    let up = CMatrix::identity(2, 2) * C64::new(0.5, 0.0) + &axis;
    let down = CMatrix::identity(2, 2) * C64::new(0.5, 0.0) - &axis;
    (state, vec![sy], vec![up, down])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn finite_differences_match_commutator_form(a in -0.6f64..0.6, b in -0.6f64..0.6, c in 0.2f64..1.3) {
        let (state, h, proj) = qubit_setup(a, b, c);
        let hs = ObservableSet::new("H", h.iter().map(|m| HermitianOp::hermitian_part(m.clone())).collect()).unwrap();
        let ps = ObservableSet::new("P", proj.iter().map(|m| HermitianOp::hermitian_part(m.clone())).collect()).unwrap();
        let analytic = classical_fisher_matrix(&state, &ps, &hs).unwrap();
        let numeric = finite_diff_fisher(&state.density_matrix(), &h, &proj, 1e-4).unwrap();
        let scale = analytic[(0, 0)].abs().max(1e-3);
        prop_assert!((numeric[(0, 0)] - analytic[(0, 0)]).abs() / scale < 1e-6);
    }
}
