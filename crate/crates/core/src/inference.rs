//! MI-based test statistics and the end-to-end independence test.
//!
//! `T1 = 2n·MI(p̂)` coincides with the likelihood-ratio `G²`; `T2` is the
//! Hessian quadratic form `n·dᵀHd` at the plug-in product of the sample
//! marginals and coincides numerically with Pearson's `χ²`.

use crate::calculus::{mi_hessian, multinomial_cov};
use crate::error::{Error, Result};
use crate::measures::{empirical_mutual_information, g2, pearson_chi2};
use crate::nulldist::{self, chi_bar_weights, ChiBarWeights, NullMethod};
use crate::scalar::Real;
use crate::special::chi2_sf;
use crate::table::{JointTable, ProbTable};

/// Below this many observations per cell a warning is attached.
pub const SMALL_SAMPLE_RATIO: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    T1,
    T2,
    Pearson,
    G2,
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::T1 => "T1",
            Statistic::T2 => "T2",
            Statistic::Pearson => "pearson",
            Statistic::G2 => "g2",
        }
    }

    pub fn compute<T: Real>(&self, t: &JointTable) -> Result<T> {
        match self {
            Statistic::T1 => Ok(t1_statistic(t)),
            Statistic::T2 => t2_statistic(t),
            Statistic::Pearson => pearson_chi2(t),
            Statistic::G2 => Ok(g2(t)),
        }
    }
}

/// How the null distribution is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueMethod {
    /// Weighted chi-square, gamma series.
    Series,
    /// Weighted chi-square, simulation.
    MonteCarlo { draws: usize },
    /// Ordinary chi-square with `(I−1)(J−1)` degrees of freedom.
    ClassicalDof,
}

impl PValueMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PValueMethod::Series => "series",
            PValueMethod::MonteCarlo { .. } => "mc",
            PValueMethod::ClassicalDof => "classical",
        }
    }
}

impl From<NullMethod> for PValueMethod {
    fn from(m: NullMethod) -> Self {
        match m {
            NullMethod::Series => PValueMethod::Series,
            NullMethod::MonteCarlo { draws } => PValueMethod::MonteCarlo { draws },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestOptions<T: Real> {
    pub statistic: Statistic,
    pub alpha: T,
    pub method: PValueMethod,
    pub seed: Option<u64>,
    /// Known true marginals `(p_X, p_Y)`; when set, the null weights are
    /// computed at their product instead of the plug-in estimate.
    pub null_marginals: Option<(Vec<T>, Vec<T>)>,
}

impl<T: Real> TestOptions<T> {
    pub fn new(statistic: Statistic, method: PValueMethod) -> Self {
        Self { statistic, alpha: T::of(0.05), method, seed: None, null_marginals: None }
    }

    pub fn alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn null_marginals(mut self, row: Vec<T>, col: Vec<T>) -> Self {
        self.null_marginals = Some((row, col));
        self
    }
}

/// Reference distribution a statistic was compared against.
#[derive(Debug, Clone, PartialEq)]
pub enum NullReference<T: Real> {
    Weights(ChiBarWeights<T>),
    Dof(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult<T: Real> {
    pub statistic: Statistic,
    pub value: T,
    pub null: NullReference<T>,
    pub p_value: T,
    pub alpha: T,
    pub reject: bool,
    /// Method actually used; differs from the requested one after a fallback.
    pub method: PValueMethod,
    pub fallback: bool,
    pub n: u64,
    pub dims: (usize, usize),
    pub warnings: Vec<String>,
}

/// `2n·MI(p̂)`.
pub fn t1_statistic<T: Real>(t: &JointTable) -> T {
    let n = T::of(t.n() as f64);
    (n + n) * empirical_mutual_information::<T>(t)
}

/// `n·dᵀHd` with `H` the MI Hessian at the product of the sample marginals
/// and `d = vec₂(p̂) − vec₂(p̂_H₀)`.
pub fn t2_statistic<T: Real>(t: &JointTable) -> Result<T> {
    let p = ProbTable::<T>::empirical(t);
    let p0 = p.product_of_marginals();
    t2_statistic_at(t, &p0)
}

/// `T2` against an explicit null table `p0`.
pub fn t2_statistic_at<T: Real>(t: &JointTable, p0: &ProbTable<T>) -> Result<T> {
    if p0.dims() != t.dims() {
        return Err(Error::DimensionMismatch(format!("null table {:?} vs data {:?}", p0.dims(), t.dims())));
    }
    if let Some(i) = p0.row_marginals().iter().position(|&v| v <= T::zero()) {
        return Err(Error::ZeroMarginal { axis: "row", index: i });
    }
    if let Some(j) = p0.col_marginals().iter().position(|&v| v <= T::zero()) {
        return Err(Error::ZeroMarginal { axis: "column", index: j });
    }
    let p = ProbTable::<T>::empirical(t);
    let h = mi_hessian(p0)?;
    let d: Vec<T> = p.vec2().values().iter().zip(p0.vec2().values()).map(|(&a, &b)| a - b).collect();
    let n = T::of(t.n() as f64);
    Ok((n * h.quadratic_form(&d)?).max(T::zero()))
}

/// Null weights for a data table: spectrum of `HΣ_*` at the plug-in product
/// table, or at the product of `null_marginals` when supplied.
pub fn null_weights<T: Real>(t: &JointTable, null_marginals: Option<(&[T], &[T])>) -> Result<ChiBarWeights<T>> {
    let p0 = match null_marginals {
        Some((r, c)) => {
            if r.len() != t.rows() || c.len() != t.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "null marginals of lengths {}x{} for a {}x{} table",
                    r.len(),
                    c.len(),
                    t.rows(),
                    t.cols()
                )));
            }
            ProbTable::from_marginals(r, c)?
        }
        None => ProbTable::<T>::empirical(t).product_of_marginals(),
    };
    chi_bar_weights(&mi_hessian(&p0)?, &multinomial_cov(&p0)?)
}

/// Computes the chosen statistic and its p-value and decides at level
/// `alpha` (reject iff `p < alpha`).
pub fn independence_test<T: Real>(t: &JointTable, opts: &TestOptions<T>) -> Result<TestResult<T>> {
    if !(opts.alpha > T::zero() && opts.alpha < T::one()) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", opts.alpha)));
    }
    let value: T = opts.statistic.compute(t)?;
    let (rows, cols) = t.dims();
    let mut warnings = Vec::new();
    let ratio = t.n() as f64 / (rows * cols) as f64;
    if ratio < SMALL_SAMPLE_RATIO {
        warnings.push(format!(
            "n/(IJ) = {ratio:.3} < {SMALL_SAMPLE_RATIO}: the asymptotic approximation may be poor"
        ));
    }
    if t.was_pruned() {
        warnings.push(format!(
            "dropped {} empty row(s) and {} empty column(s)",
            t.pruned_rows().len(),
            t.pruned_cols().len()
        ));
    }

    let (null, p_value, method, fallback) = match opts.method {
        PValueMethod::ClassicalDof => {
            let dof = (rows - 1) * (cols - 1);
            (NullReference::Dof(dof), chi2_sf(dof, value)?, opts.method, false)
        }
        PValueMethod::Series | PValueMethod::MonteCarlo { .. } => {
            let marg = opts.null_marginals.as_ref().map(|(r, c)| (r.as_slice(), c.as_slice()));
            let w = null_weights(t, marg)?;
            let nm = match opts.method {
                PValueMethod::MonteCarlo { draws } => NullMethod::MonteCarlo { draws },
                _ => NullMethod::Series,
            };
            let pv = nulldist::pvalue(&w, value, nm, opts.seed)?;
            if pv.fallback {
                warnings.push("gamma series unavailable; p-value obtained by Monte Carlo".to_string());
            }
            (NullReference::Weights(w), pv.value, pv.method.into(), pv.fallback)
        }
    };

    Ok(TestResult {
        statistic: opts.statistic,
        value,
        null,
        p_value,
        alpha: opts.alpha,
        reject: p_value < opts.alpha,
        method,
        fallback,
        n: t.n(),
        dims: (rows, cols),
        warnings,
    })
}
