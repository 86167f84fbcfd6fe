//! First and second derivatives of the restricted mutual information and the
//! covariance of the restricted empirical vector.
//!
//! "Restricted" means the last cell is eliminated through
//! `p_IJ = 1 − Σ_{(i,j)≠(I,J)} p_ij`, so every derivative lives in the
//! `IJ − 1` column-major coordinates of [`RestrictedVector`].
//!
//! With `ℓ_ij = ln(p_ij / (p_i* p_*j))` the unrestricted Hessian `Ã` has
//! entries `1/p_ij − 1/p_i* − 1/p_*j` on the diagonal, `−1/p_i*` within a row,
//! `−1/p_*j` within a column and zero elsewhere. The restricted Hessian is
//! `H = A·M + 𝟙·aᵀ` where `A` is the first `IJ − 1` rows of `Ã`, `M` stacks the
//! identity over a row of `−1`, and `a_b = Ã_{L,L} − Ã_{L,b}` (with `L` the
//! eliminated cell) is the derivative of `−ℓ_IJ` along coordinate `b`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;
use crate::table::{ProbTable, RestrictedVector};

/// Gradient of the restricted MI, `g_(i,j) = ℓ_ij − ℓ_IJ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient<T: Real> {
    pub g: RestrictedVector<T>,
    pub at: ProbTable<T>,
}

/// Symmetric `(IJ−1)×(IJ−1)` second-derivative matrix in restricted
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianMatrix<T: Real> {
    h: DMatrix<T>,
    dims: (usize, usize),
    asymmetry: T,
    at: Option<ProbTable<T>>,
}

impl<T: Real> HessianMatrix<T> {
    /// Wraps an arbitrary square matrix (symmetrized) as a Hessian for a
    /// table of shape `dims`.
    pub fn from_matrix(mut h: DMatrix<T>, dims: (usize, usize)) -> Result<Self> {
        let d = dims.0 * dims.1;
        if d < 2 || h.nrows() != d - 1 || h.ncols() != d - 1 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a {}x{} table",
                h.nrows(),
                h.ncols(),
                dims.0,
                dims.1
            )));
        }
        let asymmetry = linalg::max_abs_asymmetry(&h);
        linalg::symmetrize(&mut h);
        Ok(Self { h, dims, asymmetry, at: None })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.h
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    /// Largest `|H_ab − H_ba|` before symmetrization.
    pub fn asymmetry(&self) -> T {
        self.asymmetry
    }

    /// Table the Hessian was evaluated at, if it came from one.
    pub fn evaluated_at(&self) -> Option<&ProbTable<T>> {
        self.at.as_ref()
    }

    /// `xᵀ H x`.
    pub fn quadratic_form(&self, x: &[T]) -> Result<T> {
        let d = self.h.nrows();
        if x.len() != d {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {d}x{d} form", x.len())));
        }
        let mut acc = T::zero();
        for b in 0..d {
            let mut col = T::zero();
            for a in 0..d {
                col = col + x[a] * self.h[(a, b)];
            }
            acc = acc + col * x[b];
        }
        Ok(acc)
    }

    pub fn trace(&self) -> T {
        (0..self.h.nrows()).map(|k| self.h[(k, k)]).sum()
    }
}

/// Restricted multinomial covariance `Σ_* = diag(q) − q qᵀ`, `q = vec₂(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix<T: Real> {
    sigma: DMatrix<T>,
}

impl<T: Real> CovarianceMatrix<T> {
    pub fn from_matrix(sigma: DMatrix<T>) -> Result<Self> {
        if sigma.nrows() != sigma.ncols() {
            return Err(Error::DimensionMismatch("covariance must be square".into()));
        }
        Ok(Self { sigma })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.sigma
    }

    /// Ratio of the largest to the smallest eigenvalue; infinite when the
    /// matrix is singular or indefinite.
    pub fn condition_estimate(&self) -> f64 {
        let ev = linalg::symmetric_eigenvalues(linalg::to_f64(&self.sigma));
        let (max, min) = (ev[0], ev[ev.len() - 1]);
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Unrestricted second derivative `∂ℓ_a / ∂p_b` for column-major cells `a`,
/// `b`.
fn unrestricted<T: Real>(p: &ProbTable<T>, a: usize, b: usize) -> T {
    let rows = p.rows();
    let (ia, ja) = (a % rows, a / rows);
    let (ib, jb) = (b % rows, b / rows);
    let mut v = T::zero();
    if a == b {
        v = v + p.get(ia, ja).recip();
    }
    if ia == ib {
        v = v - p.row_marginals()[ia].recip();
    }
    if ja == jb {
        v = v - p.col_marginals()[ja].recip();
    }
    v
}

fn log_ratio<T: Real>(p: &ProbTable<T>, i: usize, j: usize) -> T {
    (p.get(i, j) / (p.row_marginals()[i] * p.col_marginals()[j])).ln()
}

pub fn mi_gradient<T: Real>(p: &ProbTable<T>) -> Result<Gradient<T>> {
    p.require_positive()?;
    let (rows, cols) = p.dims();
    let last = log_ratio(p, rows - 1, cols - 1);
    let values = (0..rows * cols - 1).map(|k| log_ratio(p, k % rows, k / rows) - last).collect();
    Ok(Gradient { g: RestrictedVector::new(values, p.dims())?, at: p.clone() })
}

pub fn mi_hessian<T: Real>(p: &ProbTable<T>) -> Result<HessianMatrix<T>> {
    p.require_positive()?;
    let (rows, cols) = p.dims();
    let last = rows * cols - 1;
    let d = last;
    let corner = unrestricted(p, last, last);
    // Rank-one correction from differentiating ℓ_IJ through the constraint.
    let a: Vec<T> = (0..d).map(|b| corner - unrestricted(p, last, b)).collect();
    let mut h = DMatrix::from_fn(d, d, |r, c| {
        unrestricted(p, r, c) - unrestricted(p, r, last) + a[c]
    });
    let asymmetry = linalg::max_abs_asymmetry(&h);
    linalg::symmetrize(&mut h);
    Ok(HessianMatrix { h, dims: p.dims(), asymmetry, at: Some(p.clone()) })
}

pub fn multinomial_cov<T: Real>(p: &ProbTable<T>) -> Result<CovarianceMatrix<T>> {
    p.require_positive()?;
    let q = p.vec2();
    let q = q.values();
    let d = q.len();
    let sigma = DMatrix::from_fn(d, d, |a, b| {
        let diag = if a == b { q[a] } else { T::zero() };
        diag - q[a] * q[b]
    });
    Ok(CovarianceMatrix { sigma })
}

/// Step sizes for [`fd_derivatives`]. Both are scaled by `min(1, 10·p_min)`
/// so that small cells get proportionally small perturbations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps<T> {
    pub gradient: T,
    pub hessian: T,
}

impl<T: Real> Default for FdSteps<T> {
    fn default() -> Self {
        Self { gradient: T::of(1e-5), hessian: T::of(1e-4) }
    }
}

impl<T: Real> FdSteps<T> {
    pub fn uniform(step: T) -> Self {
        Self { gradient: step, hessian: step }
    }
}

/// Finite-difference gradient and Hessian of an arbitrary table measure in
/// restricted coordinates. The eliminated last cell absorbs every
/// perturbation so the probe points stay on the simplex.
pub fn fd_derivatives<T, F>(measure: F, p: &ProbTable<T>, steps: FdSteps<T>) -> Result<(Gradient<T>, HessianMatrix<T>)>
where
    T: Real,
    F: Fn(&ProbTable<T>) -> T,
{
    let pmin = p.min_cell();
    let scale = (T::of(10.0) * pmin).min(T::one());
    let hg = steps.gradient * scale;
    let hh = steps.hessian * scale;
    if !(hg > T::zero()) || !(hh > T::zero()) || pmin <= T::of(10.0) * hg.max(hh) {
        return Err(Error::OutsideSimplex);
    }

    let base = p.vec2();
    let dims = p.dims();
    let d = base.len();
    let eval = |moves: &[(usize, T)]| -> Result<T> {
        let mut v = base.values().to_vec();
        for &(k, delta) in moves {
            v[k] = v[k] + delta;
        }
        let table = ProbTable::from_restricted(&RestrictedVector::new(v, dims)?).map_err(|_| Error::OutsideSimplex)?;
        let y = measure(&table);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::InvalidArgument("measure is not finite near the evaluation point".into()))
        }
    };

    // Central differences at h and h/2 combined by Richardson extrapolation,
    // which removes the O(h²) truncation term.
    let two = T::of(2.0);
    let richardson = |coarse: T, fine: T| (T::of(4.0) * fine - coarse) / T::of(3.0);
    let mut g = Vec::with_capacity(d);
    for k in 0..d {
        let central = |h: T| -> Result<T> { Ok((eval(&[(k, h)])? - eval(&[(k, -h)])?) / (two * h)) };
        g.push(richardson(central(hg)?, central(hg / two)?));
    }

    let f0 = eval(&[])?;
    let diag = |a: usize, h: T| -> Result<T> { Ok((eval(&[(a, h)])? - two * f0 + eval(&[(a, -h)])?) / (h * h)) };
    let mixed = |a: usize, b: usize, h: T| -> Result<T> {
        let pp = eval(&[(a, h), (b, h)])?;
        let pm = eval(&[(a, h), (b, -h)])?;
        let mp = eval(&[(a, -h), (b, h)])?;
        let mm = eval(&[(a, -h), (b, -h)])?;
        Ok((pp - pm - mp + mm) / (T::of(4.0) * h * h))
    };
    let mut h = DMatrix::zeros(d, d);
    for a in 0..d {
        h[(a, a)] = richardson(diag(a, hh)?, diag(a, hh / two)?);
        for b in (a + 1)..d {
            let v = richardson(mixed(a, b, hh)?, mixed(a, b, hh / two)?);
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }

    let gradient = Gradient { g: RestrictedVector::new(g, dims)?, at: p.clone() };
    let hessian = HessianMatrix { h, dims, asymmetry: T::zero(), at: Some(p.clone()) };
    Ok((gradient, hessian))
}
