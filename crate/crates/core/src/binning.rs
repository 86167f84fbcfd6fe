//! Discretization of paired continuous observations into a contingency
//! table, so the discrete test applies to continuous data.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::table::JointTable;

/// Bin-count heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountRule {
    /// `⌈√n⌉`
    Sqrt,
    /// `⌈2·n^{1/3}⌉`
    Rice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinRule {
    Sqrt,
    Rice,
    /// Explicit bin counts per axis.
    Fixed(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Equal-width bins over the data (or given) range.
    EqualWidth,
    /// Empirical-quantile edges; ties are merged.
    #[default]
    EqualFrequency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinningSpec {
    pub rule: BinRule,
    pub strategy: Strategy,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
}

impl Default for BinningSpec {
    fn default() -> Self {
        Self { rule: BinRule::Rice, strategy: Strategy::EqualFrequency, x_range: None, y_range: None }
    }
}

impl BinningSpec {
    pub fn new(rule: BinRule, strategy: Strategy) -> Self {
        Self { rule, strategy, ..Self::default() }
    }

    /// Requested `(kx, ky)` for `n` observations.
    pub fn bin_counts(&self, n: usize) -> Result<(usize, usize)> {
        match self.rule {
            BinRule::Sqrt => bin_count_rule(n, CountRule::Sqrt).map(|k| (k, k)),
            BinRule::Rice => bin_count_rule(n, CountRule::Rice).map(|k| (k, k)),
            BinRule::Fixed(kx, ky) if kx >= 2 && ky >= 2 => Ok((kx, ky)),
            BinRule::Fixed(kx, ky) => {
                Err(Error::InvalidArgument(format!("fixed bin counts must be >= 2, got {kx}x{ky}")))
            }
        }
    }
}

/// Number of bins prescribed by `rule` for `n` observations, at least 2.
///
/// Computed in integers: the smallest `k` with `k² ≥ n` (square root) or
/// `k³ ≥ 8n` (Rice).
pub fn bin_count_rule(n: usize, rule: CountRule) -> Result<usize> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("bin-count rules need n >= 4, got {n}")));
    }
    let n = n as u128;
    let fits = |k: u128| match rule {
        CountRule::Sqrt => k * k >= n,
        CountRule::Rice => k * k * k >= 8 * n,
    };
    let mut k: u128 = match rule {
        CountRule::Sqrt => (n as f64).sqrt() as u128,
        CountRule::Rice => (2.0 * (n as f64).cbrt()) as u128,
    }
    .saturating_sub(2);
    while !fits(k) {
        k += 1;
    }
    Ok((k as usize).max(2))
}

/// Bin assignment along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBins {
    /// `bins + 1` edges from the lower to the upper bound.
    pub edges: Vec<f64>,
    /// Bin of every input value.
    pub index: Vec<usize>,
    pub bins: usize,
    pub warnings: Vec<String>,
}

/// Assigns each value to one of (at most) `k` bins.
pub fn bin_axis(values: &[f64], k: usize, strategy: Strategy, range: Option<(f64, f64)>) -> Result<AxisBins> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bins, got {k}")));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("value {i} is not finite")));
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument("no values to bin".into()));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    match strategy {
        Strategy::EqualWidth => {
            let (lo, hi) = range.unwrap_or((min, max));
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidArgument("range must be finite".into()));
            }
            if !(hi > lo) {
                return Err(Error::InvalidArgument("all values identical; cannot form 2 bins".into()));
            }
            if min < lo || max > hi {
                return Err(Error::InvalidArgument(format!("values fall outside the range [{lo}, {hi}]")));
            }
            let width = (hi - lo) / k as f64;
            let index = values
                .iter()
                .map(|&v| (((v - lo) / width).floor() as usize).min(k - 1))
                .collect();
            let mut edges: Vec<f64> = (0..k).map(|i| lo + i as f64 * width).collect();
            edges.push(hi);
            Ok(AxisBins { edges, index, bins: k, warnings: Vec::new() })
        }
        Strategy::EqualFrequency => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len();
            let mut interior: Vec<f64> = (1..k).map(|i| sorted[i * n / k]).collect();
            interior.dedup();
            // An edge at the minimum would leave the first bin empty.
            interior.retain(|&e| e > min);
            let bins = interior.len() + 1;
            if bins < 2 {
                return Err(Error::InvalidArgument("all values identical; cannot form 2 bins".into()));
            }
            let mut warnings = Vec::new();
            if bins < k {
                warnings.push(format!("tied quantile edges merged: {k} bins requested, {bins} formed"));
            }
            let index = values.iter().map(|&v| interior.partition_point(|&e| e <= v)).collect();
            let mut edges = Vec::with_capacity(bins + 1);
            edges.push(min);
            edges.extend(interior);
            edges.push(max);
            Ok(AxisBins { edges, index, bins, warnings })
        }
    }
}

/// A binned sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretized {
    pub table: JointTable,
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Counts pairs over a `kx×ky` grid. Equal-width bins are half-open
/// `[e_i, e_{i+1})` except the last, which is closed.
pub fn discretize(pairs: &[(f64, f64)], spec: &BinningSpec) -> Result<Discretized> {
    if pairs.len() < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 pairs, got {}", pairs.len())));
    }
    let (kx, ky) = spec.bin_counts(pairs.len())?;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let bx = bin_axis(&xs, kx, spec.strategy, spec.x_range).map_err(|e| axis_error("x", e))?;
    let by = bin_axis(&ys, ky, spec.strategy, spec.y_range).map_err(|e| axis_error("y", e))?;
    let mut counts = DMatrix::<u64>::zeros(bx.bins, by.bins);
    for (&i, &j) in bx.index.iter().zip(&by.index) {
        counts[(i, j)] += 1;
    }
    let table = JointTable::from_matrix(counts)?;
    let mut warnings: Vec<String> = bx.warnings.iter().map(|w| format!("x: {w}")).collect();
    warnings.extend(by.warnings.iter().map(|w| format!("y: {w}")));
    if table.was_pruned() {
        warnings.push(format!(
            "dropped {} empty row bin(s) and {} empty column bin(s)",
            table.pruned_rows().len(),
            table.pruned_cols().len()
        ));
    }
    Ok(Discretized { table, x_edges: bx.edges, y_edges: by.edges, warnings })
}

fn axis_error(axis: &str, e: Error) -> Error {
    match e {
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("{axis} axis: {m}")),
        other => other,
    }
}
