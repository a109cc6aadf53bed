//! Random matrix ensembles for tests, oracles and randomized checks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, CVector, HermitianOp, RealMatrix, RealSymMatrix};

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard normal entries.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> RealMatrix {
    DMatrix::from_fn(rows, cols, |_, _| normal(rng))
}

pub fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealSymMatrix {
    RealSymMatrix::new(random_matrix(n, n, rng))
}

/// `G Gᵀ` for a Gaussian `G`, hence positive semidefinite.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealSymMatrix {
    let g = random_matrix(n, n, rng);
    RealSymMatrix::new(&g * g.transpose())
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// diagonal of R made positive).
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealMatrix {
    let qr = random_matrix(n, n, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Haar-distributed unitary matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for z in q.column_mut(j).iter_mut() {
                *z *= phase;
            }
        }
    }
    q
}

/// Hermitian matrix from the Gaussian unitary ensemble.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOp {
    HermitianOp::hermitian_part(CMatrix::from_fn(n, n, |_, _| complex_normal(rng)))
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_state_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = DVector::from_fn(n, |_, _| complex_normal(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Random passive (orthogonal symplectic) transformation on `modes` modes in
/// the interleaved quadrature ordering `(x₁, p₁, x₂, p₂, …)`.
///
/// A Haar unitary `u = A + iB` acting on the annihilation operators maps the
/// block-ordered quadratures `(x…, p…)` by `[[A, −B], [B, A]]`.
pub fn random_passive<R: Rng + ?Sized>(modes: usize, rng: &mut R) -> RealMatrix {
    let u = random_unitary(modes, rng);
    let mut o = DMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        for j in 0..modes {
            let (a, b) = (u[(i, j)].re, u[(i, j)].im);
            o[(2 * i, 2 * j)] = a;
            o[(2 * i, 2 * j + 1)] = -b;
            o[(2 * i + 1, 2 * j)] = b;
            o[(2 * i + 1, 2 * j + 1)] = a;
        }
    }
    o
}
