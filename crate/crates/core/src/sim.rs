//! Simulation harness: independent (or checkerboard-coupled) categorical
//! samplers, replicate studies, size/power estimation, the `T2 = χ²`
//! identity check and the 2×2 MI geometry curves.
//!
//! Replicate `r` draws from stream `r` of a seed derived from the study seed
//! and the attempt number, so results are identical however replicates are
//! scheduled across threads.

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inference::{independence_test, PValueMethod, Statistic, TestOptions};
use crate::measures::{mutual_information, pearson_chi2};
use crate::nulldist::{self, cdf, ChiBarWeights, DEFAULT_MC_DRAWS, DEFAULT_SERIES_TOL};
use crate::rng::{derive_seed, stream_rng};
use crate::table::{JointTable, ProbTable};
use crate::inference::t2_statistic;

/// Resampling attempts per replicate before giving up on a table with a
/// zero marginal.
pub const MAX_RESAMPLES: usize = 1000;

/// Marginal distribution on `{0, 1, …}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    /// Discrete uniform on `k` categories.
    Uniform(usize),
    /// Binomial with `m` trials and success probability `q` (`m + 1`
    /// categories).
    Binomial(u32, f64),
    Categorical(Vec<f64>),
}

impl Marginal {
    pub fn pmf(&self) -> Result<Vec<f64>> {
        match self {
            Marginal::Uniform(k) if *k >= 2 => Ok(vec![1.0 / *k as f64; *k]),
            Marginal::Uniform(k) => Err(Error::InvalidArgument(format!("uniform needs >= 2 categories, got {k}"))),
            Marginal::Binomial(m, q) => {
                if *m < 1 || !(*q > 0.0 && *q < 1.0) {
                    return Err(Error::InvalidArgument(format!("binomial({m}, {q}) needs m >= 1 and 0 < q < 1")));
                }
                let m = *m as usize;
                let mut pmf = Vec::with_capacity(m + 1);
                let mut choose = 1.0f64;
                for k in 0..=m {
                    if k > 0 {
                        choose = choose * (m + 1 - k) as f64 / k as f64;
                    }
                    pmf.push(choose * q.powi(k as i32) * (1.0 - q).powi((m - k) as i32));
                }
                Ok(pmf)
            }
            Marginal::Categorical(p) => {
                let s: f64 = p.iter().sum();
                if p.len() < 2 || p.iter().any(|&v| !(v > 0.0) || !v.is_finite()) || (s - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidArgument(
                        "categorical probabilities must be positive, at least 2, and sum to 1".into(),
                    ));
                }
                Ok(p.clone())
            }
        }
    }
}

/// Dependence structure used to generate samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Independent,
    /// `p_ij = p_i p_j (1 + s·u_i v_j / max(−u v))` with `u`, `v` the
    /// alternating sign patterns centered under each marginal. Marginals are
    /// preserved exactly; `s ∈ [0, 1]` is the fraction of the largest strength
    /// keeping every cell nonnegative.
    Checkerboard(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dist_x: Marginal,
    pub dist_y: Marginal,
    pub n: usize,
    pub reps: usize,
    pub stat: Statistic,
    pub seed: u64,
    pub coupling: Coupling,
    /// Compute null weights at the true product marginals instead of the
    /// plug-in estimate.
    pub weights_from_truth: bool,
}

impl SimConfig {
    pub fn new(dist_x: Marginal, dist_y: Marginal, n: usize, reps: usize, stat: Statistic, seed: u64) -> Self {
        Self { dist_x, dist_y, n, reps, stat, seed, coupling: Coupling::Independent, weights_from_truth: false }
    }

    pub fn coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n < 1 || self.reps < 1 {
            return Err(Error::InvalidArgument("n and reps must be >= 1".into()));
        }
        if let Coupling::Checkerboard(s) = self.coupling {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::InvalidArgument(format!("checkerboard strength must lie in [0, 1], got {s}")));
            }
        }
        self.dist_x.pmf()?;
        self.dist_y.pmf()?;
        Ok(())
    }

    /// Joint pmf the replicates are drawn from.
    pub fn joint_pmf(&self) -> Result<DMatrix<f64>> {
        let px = self.dist_x.pmf()?;
        let py = self.dist_y.pmf()?;
        let mut p = DMatrix::from_fn(px.len(), py.len(), |i, j| px[i] * py[j]);
        if let Coupling::Checkerboard(s) = self.coupling {
            let centered = |pm: &[f64]| -> Vec<f64> {
                let mean: f64 = pm.iter().enumerate().map(|(k, &w)| if k % 2 == 0 { w } else { -w }).sum();
                (0..pm.len()).map(|k| if k % 2 == 0 { 1.0 - mean } else { -1.0 - mean }).collect()
            };
            let (u, v) = (centered(&px), centered(&py));
            // Largest negative product: at s = 1 that cell hits zero.
            let scale = u.iter().flat_map(|a| v.iter().map(move |b| -(a * b))).fold(0.0, f64::max);
            if scale > 0.0 {
                for i in 0..px.len() {
                    for j in 0..py.len() {
                        p[(i, j)] *= (1.0 + s * u[i] * v[j] / scale).max(0.0);
                    }
                }
                let total: f64 = p.iter().sum();
                p /= total;
            }
        }
        Ok(p)
    }
}

/// A sampled table and the number of discarded draws that had a zero
/// marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub table: JointTable,
    pub resamples: usize,
}

fn draw_counts<R: Rng>(cfg: &SimConfig, joint: &DMatrix<f64>, rng: &mut R) -> Result<DMatrix<u64>> {
    let (rows, cols) = joint.shape();
    let mut counts = DMatrix::<u64>::zeros(rows, cols);
    let bad = |e| Error::InvalidArgument(format!("invalid sampling weights: {e}"));
    match cfg.coupling {
        Coupling::Independent => {
            let wx = WeightedIndex::new(cfg.dist_x.pmf()?).map_err(bad)?;
            let wy = WeightedIndex::new(cfg.dist_y.pmf()?).map_err(bad)?;
            for _ in 0..cfg.n {
                let i = wx.sample(rng);
                let j = wy.sample(rng);
                counts[(i, j)] += 1;
            }
        }
        Coupling::Checkerboard(_) => {
            let wc = WeightedIndex::new(joint.iter().copied()).map_err(bad)?;
            for _ in 0..cfg.n {
                let k = wc.sample(rng);
                counts[(k % rows, k / rows)] += 1;
            }
        }
    }
    Ok(counts)
}

/// Draws replicate `rep_index`. Tables with an empty row or column are
/// redrawn from an escalated sub-seed so the full `I×J` shape is kept.
pub fn sample_pairs(cfg: &SimConfig, rep_index: u64) -> Result<Replicate> {
    cfg.validate()?;
    let joint = cfg.joint_pmf()?;
    sample_with(cfg, &joint, rep_index)
}

fn sample_with(cfg: &SimConfig, joint: &DMatrix<f64>, rep_index: u64) -> Result<Replicate> {
    for attempt in 0..MAX_RESAMPLES {
        let mut rng = stream_rng(derive_seed(cfg.seed, attempt as u64), rep_index);
        let counts = draw_counts(cfg, joint, &mut rng)?;
        let full_rows = (0..counts.nrows()).all(|i| counts.row(i).iter().any(|&c| c > 0));
        let full_cols = (0..counts.ncols()).all(|j| counts.column(j).iter().any(|&c| c > 0));
        if full_rows && full_cols {
            return Ok(Replicate { table: JointTable::from_matrix(counts)?, resamples: attempt });
        }
    }
    Err(Error::InvalidArgument(format!(
        "replicate {rep_index}: no table with all marginals positive after {MAX_RESAMPLES} attempts"
    )))
}

/// Statistic values of a replicate study.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateStudy {
    pub values: Vec<f64>,
    pub resamples: usize,
}

pub fn replicate_study(cfg: &SimConfig) -> Result<ReplicateStudy> {
    cfg.validate()?;
    let joint = cfg.joint_pmf()?;
    let out: Vec<(f64, usize)> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|r| {
            let rep = sample_with(cfg, &joint, r)?;
            Ok((cfg.stat.compute::<f64>(&rep.table)?, rep.resamples))
        })
        .collect::<Result<_>>()?;
    Ok(ReplicateStudy {
        resamples: out.iter().map(|v| v.1).sum(),
        values: out.into_iter().map(|v| v.0).collect(),
    })
}

/// `reps` statistic values in replicate order.
pub fn replicate_statistics(cfg: &SimConfig) -> Result<Vec<f64>> {
    Ok(replicate_study(cfg)?.values)
}

/// Weights of the limiting law at the true joint pmf of `cfg` (which is a
/// product table for independent coupling).
pub fn true_null_weights(cfg: &SimConfig) -> Result<ChiBarWeights<f64>> {
    let px = cfg.dist_x.pmf()?;
    let py = cfg.dist_y.pmf()?;
    let p0 = ProbTable::from_marginals(&px, &py)?;
    nulldist::chi_bar_weights(&crate::calculus::mi_hessian(&p0)?, &crate::calculus::multinomial_cov(&p0)?)
}

/// Kolmogorov–Smirnov distance `sup |F̂ − F|` between `samples` and `χ²_λ`.
///
/// With negative weights the series CDF is unavailable; the two-sample
/// distance against Monte Carlo draws (seeded by `seed`) is returned instead.
pub fn ks_distance(samples: &[f64], w: &ChiBarWeights<f64>, seed: Option<u64>) -> Result<f64> {
    if samples.len() < 100 {
        return Err(Error::InvalidArgument(format!("KS distance needs >= 100 samples, got {}", samples.len())));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("samples must be finite".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    if w.has_negative() {
        let seed = seed.ok_or(Error::MissingSeed)?;
        let mut reference = nulldist::sample(w, DEFAULT_MC_DRAWS.max(10 * xs.len()), seed);
        reference.sort_by(f64::total_cmp);
        return Ok(two_sample_ks(&xs, &reference));
    }
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        // Step over ties so the empirical CDF is evaluated at its jumps.
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(w, xs[i], DEFAULT_SERIES_TOL)?;
        d = d.max((f - i as f64 / m).abs()).max(((j + 1) as f64 / m - f).abs());
        i = j + 1;
    }
    Ok(d)
}

fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Outcome of [`estimate_size_power`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionRate {
    pub rate: f64,
    pub rejections: usize,
    pub reps: usize,
    pub resamples: usize,
}

/// Fraction of replicates with `p < alpha`. `alpha` may be 1.
pub fn estimate_size_power(cfg: &SimConfig, alpha: f64, method: PValueMethod) -> Result<RejectionRate> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    cfg.validate()?;
    let joint = cfg.joint_pmf()?;
    let truth = if cfg.weights_from_truth {
        Some((cfg.dist_x.pmf()?, cfg.dist_y.pmf()?))
    } else {
        None
    };
    let out: Vec<(bool, usize)> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|r| {
            let rep = sample_with(cfg, &joint, r)?;
            let mut opts = TestOptions::new(cfg.stat, method).seed(derive_seed(cfg.seed ^ 0x5eed, r));
            if let Some((px, py)) = &truth {
                opts = opts.null_marginals(px.clone(), py.clone());
            }
            let res = independence_test::<f64>(&rep.table, &opts)?;
            Ok((res.p_value < alpha, rep.resamples))
        })
        .collect::<Result<_>>()?;
    let rejections = out.iter().filter(|v| v.0).count();
    Ok(RejectionRate {
        rate: rejections as f64 / cfg.reps as f64,
        rejections,
        reps: cfg.reps,
        resamples: out.iter().map(|v| v.1).sum(),
    })
}

/// Relative gap `|T2 − χ²| / χ²` on one table (absolute when `χ² = 0`).
pub fn identity_gap(t: &JointTable) -> Result<f64> {
    let t2: f64 = t2_statistic(t)?;
    let x2: f64 = pearson_chi2(t)?;
    Ok(if x2 == 0.0 { t2.abs() } else { (t2 - x2).abs() / x2 })
}

/// Largest [`identity_gap`] over `trials` random `rows×cols` tables with
/// cell counts uniform on `0..=30` (redrawn until every marginal is
/// positive).
pub fn verify_t2_chi2_identity(dims: (usize, usize), trials: usize, seed: u64) -> Result<f64> {
    let (rows, cols) = dims;
    if rows < 2 || cols < 2 {
        return Err(Error::DimensionTooSmall { rows, cols });
    }
    if trials < 1 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let gaps: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k);
            loop {
                let counts = DMatrix::from_fn(rows, cols, |_, _| rng.random_range(0..=30u64));
                let ok = (0..rows).all(|i| counts.row(i).sum() > 0) && (0..cols).all(|j| counts.column(j).sum() > 0);
                if ok {
                    return identity_gap(&JointTable::from_matrix(counts)?);
                }
            }
        })
        .collect::<Result<_>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

/// The 2×2 family `[[p11, 1/4], [1/4, 1/2 − p11]]`.
pub fn curve_table(p11: f64) -> Result<ProbTable<f64>> {
    if !(0.0..=0.5).contains(&p11) {
        return Err(Error::InvalidArgument(format!("p11 must lie in [0, 0.5], got {p11}")));
    }
    ProbTable::from_rows(&[vec![p11, 0.25], vec![0.25, 0.5 - p11]])
}

/// `(p11, MI)` along the one-parameter 2×2 family of [`curve_table`].
pub fn mi_curve_2x2(p11_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    p11_grid.iter().map(|&p| Ok((p, mutual_information(&curve_table(p)?)))).collect()
}

/// `[p11, p21, p12, MI]` on the simplex grid with spacing `1/resolution`
/// (`p22 = 1 − p11 − p21 − p12 ≥ 0`).
pub fn mi_surface_2x2(resolution: usize) -> Result<Vec<[f64; 4]>> {
    if resolution < 1 {
        return Err(Error::InvalidArgument("resolution must be >= 1".into()));
    }
    let r = resolution as f64;
    let mut out = Vec::new();
    for a in 0..=resolution {
        for b in 0..=(resolution - a) {
            for c in 0..=(resolution - a - b) {
                let (p11, p21, p12) = (a as f64 / r, b as f64 / r, c as f64 / r);
                let p22 = (resolution - a - b - c) as f64 / r;
                let p = ProbTable::from_rows(&[vec![p11, p12], vec![p21, p22]])?;
                out.push([p11, p21, p12, mutual_information(&p)]);
            }
        }
    }
    Ok(out)
}

/// Equal-width histogram of `values` over `[min, max]`: `(lower, upper,
/// count)` per bin, last bin closed.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<(f64, f64, usize)>> {
    if bins < 1 || values.is_empty() {
        return Err(Error::InvalidArgument("histogram needs values and >= 1 bin".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((v - lo) / width).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (lo + k as f64 * width, lo + (k + 1) as f64 * width, c))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u5() -> Marginal {
        Marginal::Uniform(5)
    }

    #[test]
    fn binomial_pmf() {
        let p = Marginal::Binomial(4, 0.5).pmf().unwrap();
        let expected = [1.0, 4.0, 6.0, 4.0, 1.0].map(|v| v / 16.0);
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(Marginal::Binomial(4, 1.0).pmf().is_err());
        assert!(Marginal::Uniform(1).pmf().is_err());
        assert!(Marginal::Categorical(vec![0.5, 0.6]).pmf().is_err());
    }

    #[test]
    fn uniform_marginal_counts_concentrate() {
        let cfg = SimConfig::new(u5(), u5(), 1000, 1, Statistic::T1, 17);
        let rep = sample_pairs(&cfg, 0).unwrap();
        assert_eq!(rep.table.n(), 1000);
        let sd = (1000.0f64 * 0.2 * 0.8).sqrt();
        for c in rep.table.row_totals().into_iter().chain(rep.table.col_totals()) {
            assert!((c as f64 - 200.0).abs() < 5.0 * sd);
        }
    }

    #[test]
    fn binomial_marginal_is_recovered() {
        let cfg = SimConfig::new(Marginal::Binomial(4, 0.5), u5(), 20_000, 1, Statistic::T1, 3);
        let rep = sample_pairs(&cfg, 0).unwrap();
        let pmf = Marginal::Binomial(4, 0.5).pmf().unwrap();
        for (c, p) in rep.table.row_totals().into_iter().zip(pmf) {
            let sd = (20_000.0 * p * (1.0 - p)).sqrt();
            assert!((c as f64 - 20_000.0 * p).abs() < 5.0 * sd);
        }
    }

    #[test]
    fn checkerboard_zero_is_the_product_law() {
        let base = SimConfig::new(Marginal::Binomial(4, 0.5), u5(), 10, 1, Statistic::T1, 1);
        let ind = base.joint_pmf().unwrap();
        let cb = base.clone().coupling(Coupling::Checkerboard(0.0)).joint_pmf().unwrap();
        for (a, b) in ind.iter().zip(cb.iter()) {
            assert!((a - b).abs() < 1e-16);
        }
    }

    #[test]
    fn checkerboard_preserves_marginals() {
        let cfg = SimConfig::new(Marginal::Binomial(4, 0.3), u5(), 10, 1, Statistic::T1, 1)
            .coupling(Coupling::Checkerboard(1.0));
        let p = cfg.joint_pmf().unwrap();
        let px = cfg.dist_x.pmf().unwrap();
        for (i, &m) in px.iter().enumerate() {
            assert!((p.row(i).sum() - m).abs() < 1e-14);
        }
        assert!(p.iter().all(|&v| v >= 0.0));
        assert!(p.iter().any(|&v| v < 1e-15));
        assert!(mutual_information(&ProbTable::new(p).unwrap()) > 0.01);
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = SimConfig::new(u5(), u5(), 100, 1, Statistic::T1, 99);
        assert_eq!(sample_pairs(&cfg, 4).unwrap(), sample_pairs(&cfg, 4).unwrap());
        assert_ne!(sample_pairs(&cfg, 4).unwrap(), sample_pairs(&cfg, 5).unwrap());
    }

    #[test]
    fn zero_marginals_trigger_resampling() {
        // P(some category unseen) is large at n = 12 with 5x5 binomial marginals.
        let cfg = SimConfig::new(Marginal::Binomial(4, 0.5), Marginal::Binomial(4, 0.5), 30, 50, Statistic::T1, 8);
        let study = replicate_study(&cfg).unwrap();
        assert!(study.resamples > 0);
        for r in 0..5 {
            assert_eq!(sample_pairs(&cfg, r).unwrap().table.dims(), (5, 5));
        }
    }

    #[test]
    fn single_replicate_matches_direct_test() {
        let cfg = SimConfig::new(u5(), u5(), 500, 1, Statistic::T2, 21);
        let v = replicate_statistics(&cfg).unwrap();
        let t = sample_pairs(&cfg, 0).unwrap().table;
        let r = independence_test::<f64>(&t, &TestOptions::new(Statistic::T2, PValueMethod::ClassicalDof)).unwrap();
        assert_eq!(v, vec![r.value]);
    }

    #[test]
    fn ks_against_own_draws_is_small() {
        let w = ChiBarWeights::new(vec![1.0, 0.0, 0.0]).unwrap();
        let xs = nulldist::sample(&w, 1_000_000, 2);
        assert!(ks_distance(&xs, &w, None).unwrap() <= 0.002);
    }

    #[test]
    fn ks_of_constant_samples() {
        let w = ChiBarWeights::<f64>::unit(3);
        let x = 2.0;
        let f = cdf(&w, x, 1e-12).unwrap();
        let d = ks_distance(&[x; 200], &w, None).unwrap();
        assert!((d - f.max(1.0 - f)).abs() < 1e-12);
        assert!(ks_distance(&[1.0; 10], &w, None).is_err());
    }

    #[test]
    fn ks_with_negative_weights_uses_two_sample_route() {
        let w = ChiBarWeights::new(vec![1.0, -0.5]).unwrap();
        let xs = nulldist::sample(&w, 5000, 77);
        assert_eq!(ks_distance(&xs, &w, None), Err(Error::MissingSeed));
        assert!(ks_distance(&xs, &w, Some(78)).unwrap() < 0.03);
    }

    #[test]
    fn alpha_one_rejects_everything() {
        let cfg = SimConfig::new(u5(), u5(), 200, 50, Statistic::T2, 5);
        let r = estimate_size_power(&cfg, 1.0, PValueMethod::ClassicalDof).unwrap();
        assert_eq!(r.rate, 1.0);
        assert!(estimate_size_power(&cfg, 0.0, PValueMethod::ClassicalDof).is_err());
    }

    #[test]
    fn identity_verifier() {
        assert!(verify_t2_chi2_identity((2, 2), 100, 1).unwrap() <= 1e-8);
        assert!(verify_t2_chi2_identity((6, 6), 100, 2).unwrap() <= 1e-8);
        let flat = JointTable::from_counts(&[vec![5, 5], vec![5, 5]]).unwrap();
        assert_eq!(identity_gap(&flat).unwrap(), 0.0);
    }

    #[test]
    fn curve_examples() {
        let c = mi_curve_2x2(&[0.25, 0.0]).unwrap();
        assert_eq!(c[0].1, 0.0);
        let expected = 0.5 * (4.0f64 / 3.0).ln() + 0.5 * (8.0f64 / 9.0).ln();
        assert!((c[1].1 - expected).abs() < 1e-15);
        assert!((expected - 0.08495).abs() < 1e-5);
        assert!(mi_curve_2x2(&[0.6]).is_err());
    }

    #[test]
    fn surface_covers_simplex() {
        let s = mi_surface_2x2(4).unwrap();
        // Number of (a, b, c) with a + b + c <= 4.
        assert_eq!(s.len(), 35);
        assert!(s.iter().all(|v| v[3] >= 0.0));
    }

    #[test]
    fn histogram_counts_everything() {
        let h = histogram(&[0.0, 0.5, 1.0, 1.0, 2.0], 2).unwrap();
        assert_eq!(h.iter().map(|b| b.2).sum::<usize>(), 5);
        assert_eq!(h[1].2, 3);
    }
}
