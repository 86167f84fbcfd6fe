//! Point measures on probability and count tables. All logarithms are
//! natural (nats); cells with zero mass contribute nothing (`0·ln 0 = 0`).
//! Sums run in column-major cell order.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::table::{JointTable, ProbTable};

/// `Σ p_ij ln(p_ij / (p_i* p_*j))` over positive cells.
pub fn mutual_information<T: Real>(p: &ProbTable<T>) -> T {
    let (rows, cols) = p.dims();
    let (r, c) = (p.row_marginals(), p.col_marginals());
    let mut acc = T::zero();
    for j in 0..cols {
        for i in 0..rows {
            let v = p.get(i, j);
            if v > T::zero() {
                acc = acc + v * (v / (r[i] * c[j])).ln();
            }
        }
    }
    // Rounding can leave a product table a hair below zero.
    acc.max(T::zero())
}

/// `−Σ p_ij ln p_ij` over positive cells.
pub fn joint_entropy<T: Real>(p: &ProbTable<T>) -> T {
    let mut acc = T::zero();
    for &v in p.matrix().iter() {
        if v > T::zero() {
            acc = acc - v * v.ln();
        }
    }
    acc.max(T::zero())
}

/// Entropy of a marginal vector.
pub fn marginal_entropy<T: Real>(m: &[T]) -> T {
    m.iter().filter(|&&v| v > T::zero()).fold(T::zero(), |acc, &v| acc - v * v.ln())
}

/// `MI / H(p)`; undefined when the joint entropy vanishes.
pub fn normalized_mutual_information<T: Real>(p: &ProbTable<T>) -> Result<T> {
    let h = joint_entropy(p);
    if h <= T::zero() {
        return Err(Error::ZeroEntropy);
    }
    Ok(mutual_information(p) / h)
}

/// `Σ_ij c_ij ln(c_ij n / (n_i* n_*j))` over positive cells. The log ratio
/// is `ln_1p` of an exactly formed integer difference, so terms near
/// independence keep full relative accuracy.
fn count_log_sum<T: Real>(t: &JointTable) -> T {
    let n = t.n() as u128;
    let rt = t.row_totals();
    let ct = t.col_totals();
    let mut acc = T::zero();
    for j in 0..t.cols() {
        for i in 0..t.rows() {
            let c = t.count(i, j);
            if c > 0 {
                let num = c as u128 * n;
                let den = rt[i] as u128 * ct[j] as u128;
                let diff = if num >= den { T::of((num - den) as f64) } else { -T::of((den - num) as f64) };
                acc = acc + T::of(c as f64) * (diff / T::of(den as f64)).ln_1p();
            }
        }
    }
    acc.max(T::zero())
}

/// MI of the empirical table `p̂ = counts / n`, evaluated from the counts so
/// that `p̂` is never rounded.
pub fn empirical_mutual_information<T: Real>(t: &JointTable) -> T {
    count_log_sum::<T>(t) / T::of(t.n() as f64)
}

/// Likelihood-ratio statistic `G² = 2 Σ n_ij ln(n_ij n / (n_i* n_*j))`,
/// computed in the count domain.
pub fn g2<T: Real>(t: &JointTable) -> T {
    let s = count_log_sum::<T>(t);
    s + s
}

/// Pearson's `χ² = Σ (n_ij − e_ij)² / e_ij` with `e_ij = n_i* n_*j / n`.
pub fn pearson_chi2<T: Real>(t: &JointTable) -> Result<T> {
    let n = T::of(t.n() as f64);
    let rt = t.row_totals();
    let ct = t.col_totals();
    let mut acc = T::zero();
    for j in 0..t.cols() {
        for i in 0..t.rows() {
            let expected = T::of(rt[i] as f64) * T::of(ct[j] as f64) / n;
            if !(expected > T::zero()) {
                return Err(Error::ZeroExpected { row: i, col: j });
            }
            let diff = T::of(t.count(i, j) as f64) - expected;
            acc = acc + diff * diff / expected;
        }
    }
    Ok(acc)
}
