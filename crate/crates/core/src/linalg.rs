//! Dense matrix utilities: symmetric and Hermitian eigensolvers with a fixed
//! sign convention, pseudoinverses, the Loewner order and the symplectic form.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use std::ops::Deref;

use crate::error::{Error, Result};

pub mod random;

/// General real matrix (rectangular, finite entries).
pub type RealMatrix = DMatrix<f64>;
/// General complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Complex column vector.
pub type CVector = DVector<Complex64>;

const SIGN_THRESHOLD: f64 = 1e-8;
const EIG_MAX_SWEEPS: usize = 100_000;

/// Largest absolute entry of a real matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest modulus among the entries of a complex matrix.
pub fn max_abs_c(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

/// Real symmetric matrix. Construction symmetrizes the input.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSymMatrix(DMatrix<f64>);

impl RealSymMatrix {
    /// Symmetrizes `m` as `(m + mᵀ)/2`. Panics if `m` is not square.
    pub fn new(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "RealSymMatrix requires a square matrix");
        let t = m.transpose();
        Self((m + t) * 0.5)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

impl Deref for RealSymMatrix {
    type Target = DMatrix<f64>;
    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl From<DMatrix<f64>> for RealSymMatrix {
    fn from(m: DMatrix<f64>) -> Self {
        Self::new(m)
    }
}

/// Hermitian operator on a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp(CMatrix);

impl HermitianOp {
    /// Validates Hermiticity to `1e-12` relative to the largest entry, then
    /// stores the Hermitian part.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = max_abs_c(&(&m - m.adjoint()));
        let scale = max_abs_c(&m).max(1.0);
        if dev > 1e-12 * scale {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::hermitian_part(m))
    }

    /// Takes `(m + m†)/2` without validation.
    pub fn hermitian_part(m: CMatrix) -> Self {
        let a = m.adjoint();
        Self((m + a) * Complex64::new(0.5, 0.0))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(&self.0 * Complex64::new(s, 0.0))
    }

    /// `Σ_i c_i ops_i` for real coefficients.
    pub fn real_combination(coeffs: &[f64], ops: &[HermitianOp]) -> Result<Self> {
        if coeffs.len() != ops.len() || ops.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} operators",
                coeffs.len(),
                ops.len()
            )));
        }
        let d = ops[0].dim();
        let mut acc = CMatrix::zeros(d, d);
        for (c, op) in coeffs.iter().zip(ops) {
            if op.dim() != d {
                return Err(Error::DimensionMismatch("operators of unequal dimension".into()));
            }
            if *c != 0.0 {
                acc += op.matrix() * Complex64::new(*c, 0.0);
            }
        }
        Ok(Self(acc))
    }
}

impl Deref for HermitianOp {
    type Target = CMatrix;
    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// Commutator `[a, b] = ab − ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Eigendecomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending eigenvalues.
    pub values: DVector<f64>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Rebuilds `V diag(f(λ)) Vᵀ`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&self.values.map(f));
        &self.vectors * d * self.vectors.transpose()
    }
}

/// Symmetric eigendecomposition with ascending eigenvalues. Each eigenvector is
/// flipped so that its first component with modulus above `1e-8` is positive.
pub fn sym_eig(a: &RealSymMatrix) -> Result<SymEigen> {
    let n = a.dim();
    if n == 0 {
        return Ok(SymEigen { values: DVector::zeros(0), vectors: DMatrix::zeros(0, 0) });
    }
    let eig = SymmetricEigen::try_new(a.matrix().clone(), f64::EPSILON, EIG_MAX_SWEEPS)
        .ok_or_else(|| Error::DecompositionFailure(format!("symmetric {n}x{n}")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        if let Some(first) = v.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        vectors.set_column(col, &v);
    }
    Ok(SymEigen { values, vectors })
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct HermEigen {
    /// Ascending real eigenvalues.
    pub values: DVector<f64>,
    /// Unitary matrix of eigenvectors (columns).
    pub vectors: CMatrix,
}

impl HermEigen {
    /// Rebuilds `V diag(f(λ)) V†` for a complex-valued spectral function.
    pub fn map_values(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, lam) in self.values.iter().enumerate() {
            let c = f(*lam);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= c;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues. Each eigenvector's
/// phase is fixed so that its first component with modulus above `1e-8` is real
/// and positive.
pub fn herm_eig(a: &CMatrix) -> Result<HermEigen> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch("Hermitian eigensolver needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(HermEigen { values: DVector::zeros(0), vectors: CMatrix::zeros(0, 0) });
    }
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, EIG_MAX_SWEEPS)
        .ok_or_else(|| Error::DecompositionFailure(format!("Hermitian {n}x{n}")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        if let Some(first) = v.iter().find(|z| z.norm() > SIGN_THRESHOLD) {
            let phase = first.conj() / first.norm();
            for z in v.iter_mut() {
                *z *= phase;
            }
        }
        vectors.set_column(col, &v);
    }
    Ok(HermEigen { values, vectors })
}

/// Loewner comparison `A ≥ B`: true iff `λ_min(A−B) ≥ −tol·max(1, ‖A−B‖_max)`.
pub fn loewner_geq(a: &RealSymMatrix, b: &RealSymMatrix, tol: f64) -> Result<bool> {
    Ok(loewner_margin(a, b)? >= -tol)
}

/// Smallest eigenvalue of `A − B` divided by `max(1, ‖A−B‖_max)`.
pub fn loewner_margin(a: &RealSymMatrix, b: &RealSymMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Loewner comparison of {}x{} with {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    let diff = RealSymMatrix::new(a.matrix() - b.matrix());
    if diff.dim() == 0 {
        return Ok(0.0);
    }
    let scale = max_abs(&diff).max(1.0);
    Ok(sym_eig(&diff)?.min() / scale)
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues down
/// to `−1e-10·max(1, λ_max)` are clamped to zero; anything more negative is a
/// domain error.
pub fn sym_sqrt(a: &RealSymMatrix) -> Result<RealSymMatrix> {
    let eig = sym_eig(a)?;
    if eig.values.is_empty() {
        return Ok(a.clone());
    }
    let tol = 1e-10 * eig.max().abs().max(1.0);
    if eig.min() < -tol {
        return Err(Error::NegativeEigenvalue { eigenvalue: eig.min() });
    }
    Ok(RealSymMatrix::new(eig.map_values(|l| l.max(0.0).sqrt())))
}

/// Default relative singular-value cutoff for [`pinv`].
pub const PINV_CUTOFF: f64 = 1e-12;

/// Singular triplets `(σ, u, v)` with `σ > 0`, read off the positive half of
/// the spectrum of the symmetric embedding `[[0, A], [Aᵀ, 0]]`.
///
/// The embedding keeps the conditioning of `A` itself and relies only on the
/// symmetric eigensolver, which is more robust here than the bidiagonal SVD.
fn singular_triplets(a: &DMatrix<f64>) -> Result<Vec<(f64, DVector<f64>, DVector<f64>)>> {
    let (r, c) = a.shape();
    let mut big = DMatrix::zeros(r + c, r + c);
    big.view_mut((0, r), (r, c)).copy_from(a);
    big.view_mut((r, 0), (c, r)).copy_from(&a.transpose());
    let eig = sym_eig(&RealSymMatrix::new(big))?;
    Ok(eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, l)| **l > 0.0)
        .map(|(i, l)| {
            let w = eig.vectors.column(i);
            let s2 = std::f64::consts::SQRT_2;
            (*l, w.rows(0, r) * s2, w.rows(r, c) * s2)
        })
        .collect())
}

/// Moore–Penrose pseudoinverse. Singular values below `rel_cutoff·σ_max` are
/// treated as zero.
pub fn pinv(a: &DMatrix<f64>, rel_cutoff: f64) -> DMatrix<f64> {
    let (r, c) = a.shape();
    let mut out = DMatrix::zeros(c, r);
    if r == 0 || c == 0 {
        return out;
    }
    let triplets = singular_triplets(a).expect("symmetric eigensolver converges on finite input");
    let smax = triplets.iter().map(|t| t.0).fold(0.0, f64::max);
    for (s, u, v) in &triplets {
        if *s > rel_cutoff * smax {
            out += v * u.transpose() / *s;
        }
    }
    out
}

/// Pseudoinverse of a symmetric matrix, returned as symmetric.
pub fn pinv_sym(a: &RealSymMatrix, rel_cutoff: f64) -> RealSymMatrix {
    if a.dim() == 0 {
        return a.clone();
    }
    let eig = sym_eig(a).expect("symmetric eigensolver converges on finite input");
    let lmax = eig.values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    RealSymMatrix::new(eig.map_values(|l| if l.abs() > rel_cutoff * lmax { 1.0 / l } else { 0.0 }))
}

/// Number of singular values above `rel_cutoff·σ_max`.
pub fn numerical_rank(a: &DMatrix<f64>, rel_cutoff: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let s: Vec<f64> = match singular_triplets(a) {
        Ok(t) => t.into_iter().map(|t| t.0).collect(),
        Err(_) => return 0,
    };
    let smax = s.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|x| **x > rel_cutoff * smax).count()
}

/// Block-diagonal symplectic form `⊕ [[0,1],[−1,0]]` on `M` modes.
pub fn symplectic_form(modes: usize) -> RealMatrix {
    let mut om = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        om[(2 * k, 2 * k + 1)] = 1.0;
        om[(2 * k + 1, 2 * k)] = -1.0;
    }
    om
}

/// True iff `V` is orthogonal and preserves the symplectic form, each to `tol`
/// in the max norm.
pub fn is_orthogonal_symplectic(v: &RealMatrix, tol: f64) -> Result<bool> {
    is_orthogonal_symplectic_with(v, tol, &symplectic_form)
}

/// Same as [`is_orthogonal_symplectic`] with a caller-supplied symplectic form.
pub fn is_orthogonal_symplectic_with(
    v: &RealMatrix,
    tol: f64,
    form: &dyn Fn(usize) -> RealMatrix,
) -> Result<bool> {
    let (r, c) = v.shape();
    if r != c {
        return Err(Error::DimensionMismatch(format!("expected square matrix, got {r}x{c}")));
    }
    if r % 2 != 0 {
        return Err(Error::OddDimension(r));
    }
    let om = form(r / 2);
    let ortho = max_abs(&(v * v.transpose() - DMatrix::identity(r, r)));
    let sympl = max_abs(&(v * &om * v.transpose() - &om));
    Ok(ortho <= tol && sympl <= tol)
}

/// Maximum deviation of `A Aᵀ` from the identity.
pub fn row_orthonormality_error(a: &RealMatrix) -> f64 {
    let n = a.nrows();
    max_abs(&(a * a.transpose() - DMatrix::identity(n, n)))
}

#[cfg(test)]
mod tests {
    use super::random::*;
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_eigenvalues() {
        let e = sym_eig(&RealSymMatrix::identity(3)).unwrap();
        assert_eq!(e.values.as_slice(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigen_sorted() {
        let e = sym_eig(&RealSymMatrix::from_diagonal(&[4.0, 1.0])).unwrap();
        assert_eq!(e.values.as_slice(), &[1.0, 4.0]);
        assert_relative_eq!(e.vectors.column(0)[1], 1.0);
        assert_relative_eq!(e.vectors.column(1)[0], 1.0);
    }

    #[test]
    fn sign_convention_first_component_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_symmetric(5, &mut rng);
        let e = sym_eig(&a).unwrap();
        for v in e.vectors.column_iter() {
            let first = v.iter().find(|x| x.abs() > 1e-8).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn hermitian_eig_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(6, &mut rng);
        let e = herm_eig(h.matrix()).unwrap();
        let back = e.map_values(|l| Complex64::new(l, 0.0));
        assert!(max_abs_c(&(back - h.matrix())) < 1e-12);
        for w in e.values.as_slice().windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn loewner_examples() {
        let two = RealSymMatrix::from_diagonal(&[2.0, 2.0]);
        let one = RealSymMatrix::identity(2);
        assert!(loewner_geq(&two, &one, 1e-9).unwrap());
        assert!(!loewner_geq(&one, &two, 1e-9).unwrap());
        assert!(loewner_geq(&one, &one, 0.0).unwrap());
        assert!(loewner_geq(&one, &RealSymMatrix::identity(3), 0.0).is_err());
    }

    #[test]
    fn sqrt_examples() {
        let s = sym_sqrt(&RealSymMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert_relative_eq!(s[(0, 0)], 2.0, epsilon = 1e-14);
        assert_relative_eq!(s[(1, 1)], 3.0, epsilon = 1e-14);
        let i = sym_sqrt(&RealSymMatrix::identity(4)).unwrap();
        assert!(max_abs(&(i.matrix() - DMatrix::identity(4, 4))) < 1e-14);
        assert!(matches!(
            sym_sqrt(&RealSymMatrix::from_diagonal(&[1.0, -0.5])),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn pinv_examples() {
        let p = pinv(&DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.0])), PINV_CUTOFF);
        assert_relative_eq!(p[(0, 0)], 0.5, epsilon = 1e-15);
        assert_eq!(p[(1, 1)], 0.0);
        let z = pinv(&DMatrix::zeros(3, 2), PINV_CUTOFF);
        assert_eq!(z.shape(), (2, 3));
        assert_eq!(max_abs(&z), 0.0);
    }

    #[test]
    fn pinv_of_multinomial_covariance() {
        // diag(p) − ppᵀ is singular along the all-ones vector; a plain
        // bidiagonal SVD has been seen to mangle exactly this shape.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for d in 2..=16 {
            let raw = DVector::from_fn(d, |_, _| rng.random_range(0.05..1.0));
            let p = &raw / raw.sum();
            let g = DMatrix::from_diagonal(&p) - &p * p.transpose();
            let gp = pinv_sym(&RealSymMatrix::new(g.clone()), PINV_CUTOFF);
            assert!(max_abs(&(&g * gp.matrix() * &g - &g)) < 1e-14);
            assert!(max_abs(&(&g * pinv(&g, PINV_CUTOFF) * &g - &g)) < 1e-14);
            assert_eq!(numerical_rank(&g, PINV_CUTOFF), d - 1);
        }
    }

    #[test]
    fn pinv_matches_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(5, 5, &mut rng) + DMatrix::identity(5, 5) * 3.0;
        let inv = a.clone().try_inverse().unwrap();
        assert!(max_abs(&(pinv(&a, PINV_CUTOFF) - inv)) < 1e-10);
    }

    #[test]
    fn symplectic_form_structure() {
        let om1 = symplectic_form(1);
        assert_eq!(om1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let om2 = symplectic_form(2);
        assert_eq!(&om2 * &om2, -DMatrix::identity(4, 4));
        for m in 1..6 {
            let om = symplectic_form(m);
            assert_eq!(om.transpose(), -om.clone());
            assert_eq!(&om * om.transpose(), DMatrix::identity(2 * m, 2 * m));
            assert_relative_eq!(om.determinant(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn orthogonal_symplectic_examples() {
        assert!(is_orthogonal_symplectic(&DMatrix::identity(4, 4), 1e-12).unwrap());
        assert!(is_orthogonal_symplectic(&symplectic_form(3), 1e-12).unwrap());
        let squeeze = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]));
        assert!(!is_orthogonal_symplectic(&squeeze, 1e-12).unwrap());
        assert_eq!(
            is_orthogonal_symplectic(&DMatrix::identity(3, 3), 1e-12),
            Err(Error::OddDimension(3))
        );
    }

    #[test]
    fn hermitian_validation() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(0.0, 1.0);
        assert!(matches!(HermitianOp::new(m.clone()), Err(Error::NotHermitian(_))));
        m[(1, 0)] = Complex64::new(0.0, -1.0);
        assert!(HermitianOp::new(m).is_ok());
    }

    proptest! {
        #[test]
        fn prop_eig_reconstruction(seed in any::<u64>(), n in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_symmetric(n, &mut rng);
            let e = sym_eig(&a).unwrap();
            let back = e.map_values(|l| l);
            prop_assert!(max_abs(&(back - a.matrix())) < 1e-10 * (1.0 + max_abs(&a)));
        }

        #[test]
        fn prop_sqrt_squares_back(seed in any::<u64>(), n in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_psd(n, &mut rng);
            let s = sym_sqrt(&a).unwrap();
            let sq = s.matrix() * s.matrix();
            prop_assert!(max_abs(&(sq - a.matrix())) < 1e-10 * (1.0 + max_abs(&a)));
        }

        #[test]
        fn prop_penrose_identities(seed in any::<u64>(), r in 1usize..6, c in 1usize..6, rank in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rank.min(r).min(c);
            let a = random_matrix(r, k, &mut rng) * random_matrix(k, c, &mut rng);
            let p = pinv(&a, PINV_CUTOFF);
            let tol = 1e-8 * (1.0 + max_abs(&a)) * (1.0 + max_abs(&p));
            prop_assert!(max_abs(&(&a * &p * &a - &a)) < tol);
            prop_assert!(max_abs(&(&p * &a * &p - &p)) < tol);
            prop_assert!(max_abs(&((&a * &p).transpose() - &a * &p)) < tol);
            prop_assert!(max_abs(&((&p * &a).transpose() - &p * &a)) < tol);
        }

        #[test]
        fn prop_pinv_involution(seed in any::<u64>(), n in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(n, n, &mut rng) + DMatrix::identity(n, n) * (n as f64);
            let back = pinv(&pinv(&a, PINV_CUTOFF), PINV_CUTOFF);
            prop_assert!(max_abs(&(back - &a)) < 1e-8);
        }

        #[test]
        fn prop_loewner_transitive(seed in any::<u64>(), n in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_symmetric(n, &mut rng);
            let b = RealSymMatrix::new(c.matrix() + random_psd(n, &mut rng).matrix());
            let a = RealSymMatrix::new(b.matrix() + random_psd(n, &mut rng).matrix());
            prop_assert!(loewner_geq(&a, &b, 1e-9).unwrap());
            prop_assert!(loewner_geq(&b, &c, 1e-9).unwrap());
            prop_assert!(loewner_geq(&a, &c, 1e-9).unwrap());
        }

        #[test]
        fn prop_passive_is_orthogonal_symplectic(seed in any::<u64>(), m in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let o = random_passive(m, &mut rng);
            prop_assert!(is_orthogonal_symplectic(&o, 1e-10).unwrap());
        }
    }
}
