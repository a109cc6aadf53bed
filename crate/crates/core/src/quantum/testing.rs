//! Small fixtures shared by unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::QuantumState;
use crate::linalg::random::{normal, random_state_vector};
use crate::linalg::{CMatrix, CVector, HermitianOp};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn up() -> QuantumState {
    QuantumState::Pure(CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]))
}

pub fn sx() -> HermitianOp {
    HermitianOp::new(CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)])).unwrap()
}

pub fn sy() -> HermitianOp {
    HermitianOp::new(CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)])).unwrap()
}

pub fn sz() -> HermitianOp {
    HermitianOp::new(CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)])).unwrap()
}

/// Spin-`n/2` matrices in the basis `m = j, j−1, …, −j`.
pub fn spin_ops(n: usize) -> (HermitianOp, HermitianOp, HermitianOp) {
    let j = n as f64 / 2.0;
    let d = n + 1;
    let mut jp = CMatrix::zeros(d, d);
    for i in 1..d {
        let m = j - i as f64;
        jp[(i - 1, i)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let jx = HermitianOp::hermitian_part((&jp + &jm) * c(0.5, 0.0));
    let jy = HermitianOp::hermitian_part((&jp - &jm) * c(0.0, -0.5));
    let jz = HermitianOp::hermitian_part(CMatrix::from_fn(d, d, |a, b| {
        if a == b {
            c(j - a as f64, 0.0)
        } else {
            c(0.0, 0.0)
        }
    }));
    (jx, jy, jz)
}

pub fn projector(d: usize, i: usize) -> HermitianOp {
    let mut m = CMatrix::zeros(d, d);
    m[(i, i)] = c(1.0, 0.0);
    HermitianOp::new(m).unwrap()
}

/// Projector onto column `i` of `u`.
pub fn basis_projector(u: &CMatrix, i: usize) -> HermitianOp {
    let v = u.column(i);
    HermitianOp::hermitian_part(v * v.adjoint())
}

/// Random real-spectrum operator diagonal in the basis `u`.
pub fn diagonal_in<R: Rng + ?Sized>(u: &CMatrix, rng: &mut R) -> HermitianOp {
    let d = u.nrows();
    let diag = DMatrix::from_fn(d, d, |a, b| if a == b { c(normal(rng), 0.0) } else { c(0.0, 0.0) });
    HermitianOp::hermitian_part(u * diag * u.adjoint())
}

/// Random full-rank mixture of three Haar-random pure states.
pub fn random_mixed_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> QuantumState {
    let mut rho = CMatrix::zeros(d, d);
    let mut w: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    for wi in w {
        let v = random_state_vector(d, rng);
        rho += &v * v.adjoint() * c(wi, 0.0);
    }
    QuantumState::mixed(HermitianOp::hermitian_part(rho)).unwrap()
}
