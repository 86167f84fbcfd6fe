//! The weighted chi-square law `χ²_λ = Σ λ_k Z_k²` (independent standard
//! normals `Z_k`) that `2n·MI(p̂)` follows asymptotically under independence.
//!
//! The CDF is evaluated exactly (to a requested absolute tolerance) with the
//! Moschopoulos expansion of a sum of independent gamma variables as a
//! mixture of gamma distributions with a common scale. Negative weights, which
//! can appear away from independence, fall back to Monte Carlo.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::calculus::{CovarianceMatrix, HessianMatrix};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::stream_rng;
use crate::scalar::Real;
use crate::special::{gamma_p, ln_gamma};
use crate::table::ProbTable;

/// Magnitude below which an eigen-weight is treated as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;
/// Default absolute accuracy of the series CDF.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;
/// Iteration cap for the series.
pub const SERIES_MAX_TERMS: usize = 100_000;
/// Default and minimum Monte Carlo sample size for p-values and quantiles.
pub const DEFAULT_MC_DRAWS: usize = 200_000;
/// Relative gap under which two weights are merged into one gamma term.
pub const MERGE_REL_TOL: f64 = 1e-9;
/// Bisection tolerance (absolute, in the statistic's units) for quantiles.
pub const QUANTILE_TOL: f64 = 1e-8;

const BLOCK: usize = 8192;

/// Provenance of a weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightSource {
    pub dims: (usize, usize),
    /// FNV-1a hash over the bit patterns of the table the weights were
    /// computed at.
    pub table_hash: u64,
}

/// Nonincreasing weights `λ` of a weighted chi-square distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiBarWeights<T: Real> {
    lambdas: Vec<T>,
    zero_tol: T,
    source: Option<WeightSource>,
}

impl<T: Real> ChiBarWeights<T> {
    pub fn new(lambdas: Vec<T>) -> Result<Self> {
        Self::with_zero_tol(lambdas, T::of(DEFAULT_ZERO_TOL))
    }

    /// Sorts nonincreasing and clamps every `|λ| < zero_tol` to exactly zero.
    pub fn with_zero_tol(mut lambdas: Vec<T>, zero_tol: T) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::DegenerateWeights);
        }
        if lambdas.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("weights must be finite".into()));
        }
        for v in lambdas.iter_mut() {
            if v.abs() < zero_tol {
                *v = T::zero();
            }
        }
        lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
        Ok(Self { lambdas, zero_tol, source: None })
    }

    /// `k` unit weights, i.e. the ordinary `χ²_k`.
    pub fn unit(k: usize) -> Self {
        Self { lambdas: vec![T::one(); k.max(1)], zero_tol: T::of(DEFAULT_ZERO_TOL), source: None }
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn zero_tol(&self) -> T {
        self.zero_tol
    }

    pub fn source(&self) -> Option<WeightSource> {
        self.source
    }

    /// `Σ λ`, the mean of the distribution.
    pub fn sum(&self) -> T {
        self.lambdas.iter().copied().sum()
    }

    /// `2 Σ λ²`.
    pub fn variance(&self) -> T {
        T::of(2.0) * self.lambdas.iter().map(|&l| l * l).sum::<T>()
    }

    pub fn has_negative(&self) -> bool {
        self.lambdas.iter().any(|&l| l < T::zero())
    }

    /// Number of weights within `tol` of `value`.
    pub fn count_near(&self, value: T, tol: T) -> usize {
        self.lambdas.iter().filter(|&&l| (l - value).abs() <= tol).count()
    }

    /// Positive weights merged into `(λ, multiplicity)` groups.
    pub fn groups(&self) -> Vec<(T, usize)> {
        let rel = T::of(MERGE_REL_TOL);
        let mut out: Vec<(T, usize, T)> = Vec::new();
        for &l in self.lambdas.iter().filter(|&&l| l > T::zero()) {
            match out.last_mut() {
                Some((rep, m, total)) if (*rep - l).abs() <= rel * rep.abs().max(l.abs()) => {
                    *m += 1;
                    *total = *total + l;
                }
                _ => out.push((l, 1, l)),
            }
        }
        out.into_iter().map(|(_, m, total)| (total / T::of_usize(m), m)).collect()
    }
}

pub(crate) fn table_hash<T: Real>(p: &ProbTable<T>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |x: u64| {
        for byte in x.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    feed(p.rows() as u64);
    feed(p.cols() as u64);
    for v in p.matrix().iter() {
        feed(v.to_f64_lossy().to_bits());
    }
    h
}

/// Eigenvalues of `LᵀHL` where `LLᵀ = Σ_*`; the same spectrum as `HΣ_*`.
pub fn chi_bar_weights<T: Real>(h: &HessianMatrix<T>, sigma: &CovarianceMatrix<T>) -> Result<ChiBarWeights<T>> {
    let hm = linalg::to_f64(h.matrix());
    let sm = linalg::to_f64(sigma.matrix());
    if hm.shape() != sm.shape() {
        return Err(Error::DimensionMismatch(format!(
            "Hessian {:?} vs covariance {:?}",
            hm.shape(),
            sm.shape()
        )));
    }
    let l = linalg::cholesky_lower(sm).ok_or(Error::NotPositiveDefinite)?;
    let mut m = l.transpose() * hm * &l;
    linalg::symmetrize(&mut m);
    let ev = linalg::symmetric_eigenvalues(m);
    let mut w = ChiBarWeights::new(ev.into_iter().map(T::of).collect())?;
    w.source = h.evaluated_at().map(|p| WeightSource { dims: p.dims(), table_hash: table_hash(p) });
    Ok(w)
}

/// Series or simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullMethod {
    Series,
    MonteCarlo { draws: usize },
}

impl NullMethod {
    pub fn monte_carlo() -> Self {
        NullMethod::MonteCarlo { draws: DEFAULT_MC_DRAWS }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NullMethod::Series => "series",
            NullMethod::MonteCarlo { .. } => "mc",
        }
    }
}

/// A p-value together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue<T> {
    pub value: T,
    pub method: NullMethod,
    /// Set when the series was requested but Monte Carlo had to be used.
    pub fallback: bool,
}

/// `P(χ²_λ ≤ x)` by the gamma series, with absolute error at most `tol`.
pub fn cdf<T: Real>(w: &ChiBarWeights<T>, x: T, tol: T) -> Result<T> {
    if w.has_negative() {
        return Err(Error::NegativeWeights);
    }
    if !(tol > T::zero()) || tol > T::of(1e-3) {
        return Err(Error::InvalidArgument(format!("series tolerance must lie in (0, 1e-3], got {tol}")));
    }
    let groups = w.groups();
    if groups.is_empty() {
        return Err(Error::DegenerateWeights);
    }
    if x.is_nan() {
        return Err(Error::InvalidArgument("cdf argument is NaN".into()));
    }
    if x <= T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(T::one());
    }
    gamma_mixture_cdf(&groups, x, tol, SERIES_MAX_TERMS)
}

/// Moschopoulos series for `Σ_g Gamma(shape α_g = m_g/2, scale β_g = 2λ_g)`.
///
/// With `β₁ = min β_g`, `ε_g = 1 − β₁/β_g`, `ρ = Σ α_g` and
/// `C = Π (β₁/β_g)^{α_g}` the CDF is `Σ_k C δ_k P(ρ + k, x/β₁)` where
/// `δ₀ = 1` and `δ_{k} = (1/k) Σ_{i=1}^{k} i γ_i δ_{k−i}` with
/// `γ_i = Σ_g α_g ε_g^i / i`. The inner convolution is carried as
/// `S_g(k) = Σ_{i=1}^{k} ε_g^i δ_{k−i} = ε_g (δ_{k−1} + S_g(k−1))`, which makes
/// each term `O(groups)`. Since `Σ_k C δ_k = 1` and `P` decreases in its shape,
/// `(1 − Σ_{j≤k} C δ_j)·P(ρ + k, ·)` bounds the truncation error.
fn gamma_mixture_cdf<T: Real>(groups: &[(T, usize)], x: T, tol: T, max_terms: usize) -> Result<T> {
    let half = T::of(0.5);
    let shapes: Vec<T> = groups.iter().map(|&(_, m)| T::of_usize(m) * half).collect();
    let scales: Vec<T> = groups.iter().map(|&(l, _)| l + l).collect();
    let beta1 = scales.iter().copied().fold(T::infinity(), T::min);
    let rho: T = shapes.iter().copied().sum();
    let eps: Vec<T> = scales.iter().map(|&b| T::one() - beta1 / b).collect();
    let log_c: T = shapes.iter().zip(&scales).map(|(&a, &b)| a * (beta1 / b).ln()).sum();

    let y = x / beta1;
    let ln_y = y.ln();
    let mut p_k = gamma_p(rho, y)?;
    // ln of y^{ρ+k} e^{−y} / Γ(ρ+k+1), the decrement P(ρ+k) − P(ρ+k+1).
    let mut log_step = rho * ln_y - y - ln_gamma(rho + T::one());

    let mut delta = log_c.exp();
    let mut mass = delta;
    let mut sum = delta * p_k;
    if (T::one() - mass) * p_k < tol {
        return Ok(sum.max(T::zero()).min(T::one()));
    }
    let mut conv = vec![T::zero(); groups.len()];
    for k in 1..=max_terms {
        let mut next = T::zero();
        for g in 0..groups.len() {
            conv[g] = eps[g] * (delta + conv[g]);
            next = next + shapes[g] * conv[g];
        }
        delta = next / T::of_usize(k);

        p_k = (p_k - log_step.exp()).max(T::zero());
        log_step = log_step + ln_y - (rho + T::of_usize(k)).ln();

        sum = sum + delta * p_k;
        mass = mass + delta;
        if (T::one() - mass) * p_k < tol {
            return Ok(sum.max(T::zero()).min(T::one()));
        }
    }
    Err(Error::SeriesNotConverged { iterations: max_terms })
}

/// `m` independent draws of `Σ λ_k Z_k²`.
///
/// Draws are generated in fixed-size blocks, block `b` using stream `b` of
/// `seed`, so the output is identical however the blocks are scheduled.
pub fn sample<T: Real>(w: &ChiBarWeights<T>, m: usize, seed: u64) -> Vec<T> {
    let lambdas: Vec<f64> = w.lambdas().iter().filter(|&&l| l != T::zero()).map(|l| l.to_f64_lossy()).collect();
    let blocks = m.div_ceil(BLOCK);
    let chunks: Vec<Vec<T>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK.min(m - b * BLOCK);
            let mut rng = stream_rng(seed, b as u64);
            (0..len)
                .map(|_| {
                    let s: f64 = lambdas
                        .iter()
                        .map(|&l| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            l * z * z
                        })
                        .sum();
                    T::of(s)
                })
                .collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

fn series_usable<T: Real>(w: &ChiBarWeights<T>) -> bool {
    !w.has_negative()
}

/// Level-`level` quantile of `χ²_λ`.
///
/// The series path bisects the CDF to an absolute tolerance of `1e−8`. When
/// the series is unavailable (negative weights, non-convergence) and a seed is
/// given, the Monte Carlo quantile is returned instead.
pub fn quantile<T: Real>(w: &ChiBarWeights<T>, level: T, method: NullMethod, seed: Option<u64>) -> Result<T> {
    if !(level > T::zero() && level < T::one()) {
        return Err(Error::InvalidArgument(format!("quantile level must lie in (0, 1), got {level}")));
    }
    match method {
        NullMethod::Series => match series_quantile(w, level) {
            Ok(q) => Ok(q),
            Err(e @ (Error::NegativeWeights | Error::SeriesNotConverged { .. })) => match seed {
                Some(seed) => mc_quantile(w, level, DEFAULT_MC_DRAWS, seed),
                None => Err(e),
            },
            Err(e) => Err(e),
        },
        NullMethod::MonteCarlo { draws } => {
            let seed = seed.ok_or(Error::MissingSeed)?;
            mc_quantile(w, level, draws, seed)
        }
    }
}

fn series_quantile<T: Real>(w: &ChiBarWeights<T>, level: T) -> Result<T> {
    if !series_usable(w) {
        return Err(Error::NegativeWeights);
    }
    let tol = T::of(DEFAULT_SERIES_TOL);
    let mut lo = T::zero();
    let mut hi = w.sum() + T::of(10.0) * w.variance().sqrt();
    while cdf(w, hi, tol)? < level {
        lo = hi;
        hi = hi + hi;
    }
    let target = T::of(QUANTILE_TOL);
    while hi - lo > target {
        let mid = (lo + hi) * T::of(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(w, mid, tol)? < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::of(0.5))
}

fn mc_quantile<T: Real>(w: &ChiBarWeights<T>, level: T, draws: usize, seed: u64) -> Result<T> {
    let m = draws.max(DEFAULT_MC_DRAWS);
    let mut xs = sample(w, m, seed);
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    let rank = (level.to_f64_lossy() * m as f64).ceil() as usize;
    Ok(xs[rank.clamp(1, m) - 1])
}

/// Upper-tail probability `P(χ²_λ ≥ t)`.
///
/// Monte Carlo p-values use `(exceedances + 1) / (m + 1)`.
pub fn pvalue<T: Real>(w: &ChiBarWeights<T>, t: T, method: NullMethod, seed: Option<u64>) -> Result<PValue<T>> {
    if t.is_nan() || t < T::zero() {
        return Err(Error::InvalidArgument(format!("statistic must be >= 0, got {t}")));
    }
    match method {
        NullMethod::Series => {
            if t == T::zero() && !w.has_negative() {
                return Ok(PValue { value: T::one(), method, fallback: false });
            }
            match cdf(w, t, T::of(DEFAULT_SERIES_TOL)) {
                Ok(c) => Ok(PValue { value: (T::one() - c).max(T::zero()), method, fallback: false }),
                Err(e @ (Error::NegativeWeights | Error::SeriesNotConverged { .. })) => match seed {
                    Some(seed) => {
                        let mc = NullMethod::monte_carlo();
                        let value = mc_pvalue(w, t, DEFAULT_MC_DRAWS, seed);
                        Ok(PValue { value, method: mc, fallback: true })
                    }
                    None => Err(e),
                },
                Err(e) => Err(e),
            }
        }
        NullMethod::MonteCarlo { draws } => {
            let seed = seed.ok_or(Error::MissingSeed)?;
            if draws == 0 {
                return Err(Error::InvalidArgument("Monte Carlo needs at least one draw".into()));
            }
            Ok(PValue { value: mc_pvalue(w, t, draws, seed), method, fallback: false })
        }
    }
}

fn mc_pvalue<T: Real>(w: &ChiBarWeights<T>, t: T, draws: usize, seed: u64) -> T {
    let exceed = sample(w, draws, seed).into_iter().filter(|&v| v >= t).count();
    T::of_usize(exceed + 1) / T::of_usize(draws + 1)
}
