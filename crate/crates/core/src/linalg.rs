//! Dense symmetric linear algebra. Factorizations run in `f64` through
//! nalgebra regardless of the caller's scalar type.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::scalar::Real;

pub(crate) fn to_f64<T: Real>(m: &DMatrix<T>) -> DMatrix<f64> {
    m.map(|v| v.to_f64_lossy())
}

/// Lower-triangular `L` with `L Lᵀ = m`, or `None` if `m` is not positive
/// definite.
pub(crate) fn cholesky_lower(m: DMatrix<f64>) -> Option<DMatrix<f64>> {
    Cholesky::new(m).map(|c| c.unpack())
}

/// Eigenvalues of a symmetric matrix, nonincreasing.
pub(crate) fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

pub(crate) fn max_abs_asymmetry<T: Real>(m: &DMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn symmetrize<T: Real>(m: &mut DMatrix<T>) {
    let n = m.nrows();
    let half = T::of(0.5);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)]) * half;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}
