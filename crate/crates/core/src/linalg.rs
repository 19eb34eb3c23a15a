//! Small dense complex matrices and the handful of operations the kaon
//! modules need on them. Everything is in an orthonormal frame.

use nalgebra::{DMatrix, Matrix2, Matrix4, SMatrix, SVector, Vector2, Vector4};
use num_complex::Complex64;

use crate::error::{KaonError, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Ket2 = Vector2<C64>;
pub type Ket4 = Vector4<C64>;

/// Max entrywise |M - M†| accepted as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Eigenvalues above `-POSITIVITY_TOL` count as nonnegative.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn hermiticity_defect<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..N {
        for j in i..N {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn ensure_hermitian<const N: usize>(m: &SMatrix<C64, N, N>) -> Result<()> {
    let defect = hermiticity_defect(m);
    if defect > HERMITICITY_TOL || !defect.is_finite() {
        return Err(KaonError::NotHermitian(defect));
    }
    Ok(())
}

/// Symmetrized copy, (M + M†)/2.
pub fn hermitian_part<const N: usize>(m: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    (m + m.adjoint()) * real(0.5)
}

/// Real trace of a (nominally Hermitian) matrix.
pub fn trace_re<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    m.trace().re
}

pub(crate) fn to_dynamic<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> DMatrix<C64> {
    DMatrix::from_column_slice(R, C, m.as_slice())
}

pub(crate) fn from_dynamic<const R: usize, const C: usize>(m: &DMatrix<C64>) -> SMatrix<C64, R, C> {
    SMatrix::from_column_slice(m.as_slice())
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues<const N: usize>(m: &SMatrix<C64, N, N>) -> [f64; N] {
    let mut vals = [0.0; N];
    for (v, (e, _)) in vals.iter_mut().zip(hermitian_eigenpairs(m)) {
        *v = e;
    }
    vals
}

/// Eigenpairs of a Hermitian matrix, ascending by eigenvalue.
pub fn hermitian_eigenpairs<const N: usize>(m: &SMatrix<C64, N, N>) -> Vec<(f64, SVector<C64, N>)> {
    let eig = to_dynamic(&hermitian_part(m)).symmetric_eigen();
    let mut pairs: Vec<_> = (0..N)
        .map(|k| {
            let col = eig.eigenvectors.column(k);
            (
                eig.eigenvalues[k],
                SVector::from_iterator(col.iter().copied()),
            )
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

pub fn min_eigenvalue<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    hermitian_eigenvalues(m)[0]
}

/// Hermitian and positive semidefinite within the module tolerances.
pub fn ensure_density<const N: usize>(m: &SMatrix<C64, N, N>) -> Result<()> {
    ensure_hermitian(m)?;
    let lo = min_eigenvalue(m);
    if lo < -POSITIVITY_TOL {
        return Err(KaonError::NotPositive(lo));
    }
    Ok(())
}

pub fn outer2(ket: &Ket2) -> Mat2 {
    ket * ket.adjoint()
}

pub fn outer4(ket: &Ket4) -> Mat4 {
    ket * ket.adjoint()
}

/// Left ⊗ right with the left factor as the slow index.
pub fn kron(left: &Mat2, right: &Mat2) -> Mat4 {
    left.kronecker(right)
}

pub fn kron_ket(left: &Ket2, right: &Ket2) -> Ket4 {
    Ket4::new(
        left[0] * right[0],
        left[0] * right[1],
        left[1] * right[0],
        left[1] * right[1],
    )
}

/// Trace over the right factor, leaving the left marginal.
pub fn trace_out_right(rho: &Mat4) -> Mat2 {
    Mat2::from_fn(|i, j| rho[(2 * i, 2 * j)] + rho[(2 * i + 1, 2 * j + 1)])
}

/// Trace over the left factor, leaving the right marginal.
pub fn trace_out_left(rho: &Mat4) -> Mat2 {
    Mat2::from_fn(|i, j| rho[(i, j)] + rho[(2 + i, 2 + j)])
}

pub fn max_abs_diff<const R: usize, const C: usize>(
    a: &SMatrix<C64, R, C>,
    b: &SMatrix<C64, R, C>,
) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
