//! Dense complex matrices and the handful of linear-algebra primitives the
//! channel code is built on.
//!
//! Vectorization is column-stacking everywhere in this crate: the entry
//! `m[(row, col)]` of a `d x d` matrix lands at index `row + d * col`. With
//! that convention `vec(A X B) = (B^T ⊗ A) vec(X)`.
//!
//! Storage and the Hermitian eigen/SVD kernels come from `nalgebra`; the
//! wrapper keeps the public surface small and in domain terms.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute floor used when scaling Hermiticity tolerances.
const HERMITIAN_TOL: f64 = 1e-10;

/// Inversion reports a singular matrix below this smallest/largest singular
/// value ratio.
pub const SINGULAR_RATIO: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense matrix of `Complex64` entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| real(rows[i][j]))
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { Complex64::ZERO })
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { real(values[i]) } else { Complex64::ZERO })
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(real(s))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows(), self.cols()), (other.rows(), other.cols()));
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M^dagger|`, or infinity for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian up to `tol` scaled by the entry magnitude (floor 1).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.max_abs().max(1.0)
    }

    /// `<u| M |u>`.
    pub fn expectation(&self, u: &[Complex64]) -> Complex64 {
        assert_eq!(u.len(), self.rows());
        let mut acc = Complex64::ZERO;
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                acc += u[i].conj() * self.0[(i, j)] * u[j];
            }
        }
        acc
    }

    /// `M v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols());
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Sub-block `rows x cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self(self.0.view((r0, c0), (rows, cols)).into_owned())
    }
}

impl From<DMatrix<Complex64>> for ComplexMatrix {
    fn from(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![Complex64::ZERO, c64(0.0, -1.0)],
        vec![c64(0.0, 1.0), Complex64::ZERO],
    ])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::real_diag(&[1.0, -1.0])
}

/// `[I, X, Y, Z]`.
pub fn paulis() -> [ComplexMatrix; 4] {
    [ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()]
}

/// Kronecker product; `a ⊗ b` with `a` as the most significant factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Stacks the columns of `m` top to bottom.
pub fn vectorize(m: &ComplexMatrix) -> Vec<Complex64> {
    // nalgebra storage is column-major already
    m.0.as_slice().to_vec()
}

/// Inverse of [`vectorize`] for a square `dim x dim` matrix.
pub fn devectorize(v: &[Complex64], dim: usize) -> Result<ComplexMatrix> {
    if v.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: v.len(),
        });
    }
    Ok(ComplexMatrix(DMatrix::from_column_slice(dim, dim, v)))
}

/// Permutation `U_P = Σ_{k,l} |k><l| ⊗ |l><k|` on `C^N ⊗ C^N`; swaps the two
/// factors.
pub fn factor_swap(levels: usize) -> ComplexMatrix {
    let n = levels;
    let mut u = ComplexMatrix::zeros(n * n, n * n);
    for k in 0..n {
        for l in 0..n {
            // |k l> <- |l k>
            u[(k * n + l, l * n + k)] = Complex64::ONE;
        }
    }
    u
}

/// The commutation matrix `U_{2<->3} = I_N ⊗ U_P ⊗ I_N` exchanging the
/// second and third factors of a four-fold `C^N` product (dimension `N^4`).
pub fn swap_matrix(levels: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(levels);
    kron(&kron(&id, &factor_swap(levels)), &id)
}

/// Index image of `U_{2<->3}` on a basis vector of the four-fold product,
/// without materialising the `N^4 x N^4` matrix.
pub fn swap23_index(index: usize, levels: usize) -> usize {
    let n = levels;
    let h4 = index % n;
    let h3 = (index / n) % n;
    let h2 = (index / (n * n)) % n;
    let h1 = index / (n * n * n);
    ((h1 * n + h3) * n + h2) * n + h4
}

/// Applies `U_{2<->3}` to a vector of length `N^4`.
pub fn swap23_apply(v: &[Complex64], levels: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; v.len()];
    for (i, z) in v.iter().enumerate() {
        out[swap23_index(i, levels)] = *z;
    }
    out
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    if !m.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian {
            deviation: m.hermiticity_defect(),
        });
    }
    // symmetrize away rounding-level anti-Hermitian parts
    let h = (&m.0 + m.0.adjoint()) * real(0.5);
    let mut eig: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    if eig.iter().any(|x| !x.is_finite()) {
        // the QR iteration can break down (0/0 shift) on exactly sparse
        // projectors; a diagonal shift moves it off that path
        let shift = 1.0 + h.norm();
        let n = h.nrows();
        let shifted = &h + DMatrix::identity(n, n) * real(shift);
        eig = shifted.symmetric_eigenvalues().iter().map(|x| x - shift).collect();
    }
    if eig.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("Hermitian eigensolver did not converge".into()));
    }
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.0.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Trace norm `Σ σ_i`. Hermitian input takes the eigenvalue path.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() && m.is_hermitian(HERMITIAN_TOL) {
        if let Ok(eig) = hermitian_eigenvalues(m) {
            return eig.iter().map(|x| x.abs()).sum();
        }
    }
    singular_values(m).iter().sum()
}

/// Matrix inverse with an explicit conditioning check: fails with
/// [`Error::Singular`] when `σ_min < 1e-12 σ_max`.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let sv = singular_values(m);
    let largest = sv.first().copied().unwrap_or(0.0);
    let smallest = sv.last().copied().unwrap_or(0.0);
    let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
    if ratio < SINGULAR_RATIO {
        return Err(Error::Singular { ratio });
    }
    let x = m.0.clone().try_inverse().ok_or(Error::Singular { ratio })?;
    // one Newton–Schulz step: X ← X + X(I − MX)
    let residual = DMatrix::identity(m.rows(), m.rows()) - &m.0 * &x;
    Ok(ComplexMatrix(&x + &x * residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(a: &str) -> Complex64 {
        // distinct symbolic-ish entries for layout checks
        match a {
            "a" => c64(1.0, 0.5),
            "b" => c64(2.0, -1.0),
            "c" => c64(-3.0, 0.25),
            _ => c64(4.0, 2.0),
        }
    }

    #[test]
    fn eigenvalues_of_sparse_projector() {
        // rank-one projector on Σ|ii>/√8 trips the values-only solver
        let d = 8;
        let mut psi = vec![Complex64::ZERO; d * d];
        for i in 0..d {
            psi[i * d + i] = real(1.0 / (d as f64).sqrt());
        }
        let proj = ComplexMatrix::outer(&psi, &psi);
        let eig = hermitian_eigenvalues(&proj).unwrap();
        assert!(eig.iter().all(|x| x.is_finite()));
        assert!((eig[d * d - 1] - 1.0).abs() < 1e-12);
        assert!((trace_norm(&proj) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        assert_eq!(
            kron(&pauli_z(), &pauli_z()),
            ComplexMatrix::real_diag(&[1.0, -1.0, -1.0, 1.0])
        );
    }

    #[test]
    fn kron_xx_is_antidiagonal() {
        let xx = kron(&pauli_x(), &pauli_x());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx[(i, j)], real(expected));
            }
        }
    }

    #[test]
    fn vectorize_stacks_columns() {
        let m = ComplexMatrix::from_rows(&[vec![sym("a"), sym("b")], vec![sym("c"), sym("d")]]);
        assert_eq!(vectorize(&m), vec![sym("a"), sym("c"), sym("b"), sym("d")]);
        assert_eq!(
            vectorize(&ComplexMatrix::identity(2)),
            vec![Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ONE]
        );
    }

    #[test]
    fn devectorize_inverts_layout() {
        let v = vec![sym("a"), sym("c"), sym("b"), sym("d")];
        let m = devectorize(&v, 2).unwrap();
        assert_eq!(
            m,
            ComplexMatrix::from_rows(&[vec![sym("a"), sym("b")], vec![sym("c"), sym("d")]])
        );
        let id = devectorize(&[Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ONE], 2).unwrap();
        assert_eq!(id, ComplexMatrix::identity(2));
        let nine: Vec<_> = (0..9).map(|k| real(k as f64)).collect();
        let m3 = devectorize(&nine, 3).unwrap();
        assert_eq!((m3.rows(), m3.cols()), (3, 3));
        assert_eq!(m3[(1, 2)], real(7.0));
    }

    #[test]
    fn devectorize_rejects_bad_length() {
        let err = devectorize(&[Complex64::ONE; 5], 2).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 4, found: 5 });
    }

    #[test]
    fn vec_of_product_matches_kron_identity() {
        // vec(A X B) = (B^T ⊗ A) vec(X)
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c64(i as f64 + 0.3, j as f64 - 1.0));
        let x = ComplexMatrix::from_fn(3, 3, |i, j| c64((i * j) as f64, 1.0 - i as f64));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| c64(1.0 / (1.0 + i as f64 + j as f64), 0.2));
        let lhs = vectorize(&(&(&a * &x) * &b));
        let rhs = kron(&b.transpose(), &a).apply(&vectorize(&x));
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).norm() < 1e-12);
        }
    }

    #[test]
    fn swap_matrix_qubit_literal() {
        let mid = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        let i2 = ComplexMatrix::identity(2);
        let expected = kron(&kron(&i2, &mid), &i2);
        assert_eq!(swap_matrix(2), expected);
    }

    #[test]
    fn swap_matrix_is_symmetric_involution() {
        for n in 2usize..=4 {
            let u = swap_matrix(n);
            assert_eq!(u.rows(), n.pow(4));
            assert_eq!(u.transpose(), u);
            assert_eq!(&u * &u, ComplexMatrix::identity(n.pow(4)));
        }
    }

    #[test]
    fn swap23_apply_matches_dense() {
        for n in 2usize..=3 {
            let v: Vec<_> = (0..n.pow(4)).map(|k| c64(k as f64, -(k as f64) / 7.0)).collect();
            assert_eq!(swap23_apply(&v, n), swap_matrix(n).apply(&v));
        }
    }

    #[test]
    fn factor_swap_exchanges_kron_factors() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c64(i as f64 - 2.0 * j as f64, (i + j) as f64 * 0.1));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| c64((i * 3 + j) as f64 * 0.5, -(j as f64)));
        let u = factor_swap(3);
        let lhs = &(&u * &kron(&a, &b)) * &u;
        assert!(lhs.max_abs_diff(&kron(&b, &a)) < 1e-14);
    }

    #[test]
    fn eigenvalues_basic() {
        let d = ComplexMatrix::real_diag(&[3.0, 1.0, 2.0]);
        assert_eq!(hermitian_eigenvalues(&d).unwrap(), vec![1.0, 2.0, 3.0]);
        let e = hermitian_eigenvalues(&pauli_x()).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&ComplexMatrix::identity(4).scale_real(0.25)) - 1.0).abs() < 1e-15);
        assert!((trace_norm(&ComplexMatrix::real_diag(&[0.5, -0.25, 0.75])) - 1.5).abs() < 1e-15);
        // non-Hermitian path: singular values of [[0,2],[0,0]] are {2,0}
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((trace_norm(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            inverse(&ComplexMatrix::identity(3)).unwrap(),
            ComplexMatrix::identity(3)
        );
        let inv = inverse(&ComplexMatrix::real_diag(&[1.0, 0.5, 0.5, 0.5])).unwrap();
        assert!(inv.max_abs_diff(&ComplexMatrix::real_diag(&[1.0, 2.0, 2.0, 2.0])) < 1e-14);
        let sing = ComplexMatrix::real_diag(&[1.0, 1e-14]);
        assert!(matches!(inverse(&sing), Err(Error::Singular { .. })));
    }
}
