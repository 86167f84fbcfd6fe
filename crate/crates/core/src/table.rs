//! Contingency-table data model.
//!
//! Cell `(i, j)` of an `I×J` table is stored column-major, which is also the
//! order of the restricted coordinate vector ([`RestrictedVector`]): cells
//! `(1,1), (2,1), …, (I,1), (1,2), …` with the last cell `(I,J)` dropped.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Absolute tolerance within which a probability table is accepted as-is.
pub const SUM_TOL: f64 = 1e-12;
/// Tables whose sum is off by more than [`SUM_TOL`] but at most this much are
/// renormalized; anything further off is rejected.
pub const RENORM_TOL: f64 = 1e-9;

/// Column-major index of cell `(i, j)` in a table with `rows` rows.
#[inline]
pub fn cell_index(i: usize, j: usize, rows: usize) -> usize {
    i + j * rows
}

/// Observed integer counts of an `I×J` contingency table.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    counts: DMatrix<u64>,
    n: u64,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
    pruned_rows: Vec<usize>,
    pruned_cols: Vec<usize>,
}

impl JointTable {
    /// Builds a table from row-major nested counts.
    ///
    /// All-zero rows and columns are dropped; their original indices are kept
    /// in [`pruned_rows`](Self::pruned_rows) / [`pruned_cols`](Self::pruned_cols).
    pub fn from_counts(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_counts_labeled(rows, None, None)
    }

    pub fn from_counts_labeled(
        rows: &[Vec<i64>],
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Ragged { row: r, expected: ncols, found: row.len() });
            }
            if let Some(c) = row.iter().position(|&v| v < 0) {
                return Err(Error::InvalidEntry { row: r, col: c });
            }
        }
        let m = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j] as u64);
        Self::build(m, row_labels, col_labels)
    }

    /// Builds a table from a count matrix.
    pub fn from_matrix(counts: DMatrix<u64>) -> Result<Self> {
        Self::build(counts, None, None)
    }

    fn build(
        counts: DMatrix<u64>,
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let (nrows, ncols) = counts.shape();
        if let Some(l) = &row_labels {
            if l.len() != nrows {
                return Err(Error::DimensionMismatch(format!(
                    "{} row labels for {nrows} rows",
                    l.len()
                )));
            }
        }
        if let Some(l) = &col_labels {
            if l.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "{} column labels for {ncols} columns",
                    l.len()
                )));
            }
        }
        if nrows < 2 || ncols < 2 {
            return Err(Error::DimensionTooSmall { rows: nrows, cols: ncols });
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::EmptyTable);
        }

        let keep_rows: Vec<usize> = (0..nrows).filter(|&i| counts.row(i).iter().any(|&c| c > 0)).collect();
        let keep_cols: Vec<usize> = (0..ncols).filter(|&j| counts.column(j).iter().any(|&c| c > 0)).collect();
        if keep_rows.len() < 2 || keep_cols.len() < 2 {
            return Err(Error::DimensionTooSmall { rows: keep_rows.len(), cols: keep_cols.len() });
        }
        let pruned_rows = (0..nrows).filter(|i| !keep_rows.contains(i)).collect();
        let pruned_cols = (0..ncols).filter(|j| !keep_cols.contains(j)).collect();
        let counts = DMatrix::from_fn(keep_rows.len(), keep_cols.len(), |i, j| {
            counts[(keep_rows[i], keep_cols[j])]
        });
        let row_labels = row_labels.map(|l| keep_rows.iter().map(|&i| l[i].clone()).collect());
        let col_labels = col_labels.map(|l| keep_cols.iter().map(|&j| l[j].clone()).collect());

        Ok(Self { counts, n, row_labels, col_labels, pruned_rows, pruned_cols })
    }

    pub fn rows(&self) -> usize {
        self.counts.nrows()
    }

    pub fn cols(&self) -> usize {
        self.counts.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.counts.shape()
    }

    /// Total count `n`.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[(i, j)]
    }

    pub fn counts(&self) -> &DMatrix<u64> {
        &self.counts
    }

    /// Row totals `n_i*`.
    pub fn row_totals(&self) -> Vec<u64> {
        (0..self.rows()).map(|i| self.counts.row(i).iter().sum()).collect()
    }

    /// Column totals `n_*j`.
    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.cols()).map(|j| self.counts.column(j).iter().sum()).collect()
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    /// Original indices of rows removed because they were all zero.
    pub fn pruned_rows(&self) -> &[usize] {
        &self.pruned_rows
    }

    pub fn pruned_cols(&self) -> &[usize] {
        &self.pruned_cols
    }

    pub fn was_pruned(&self) -> bool {
        !self.pruned_rows.is_empty() || !self.pruned_cols.is_empty()
    }

    /// Row-major nested counts.
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows()).map(|i| self.counts.row(i).iter().copied().collect()).collect()
    }
}

/// A probability mass function on an `I×J` grid with its marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable<T: Real> {
    p: DMatrix<T>,
    row: Vec<T>,
    col: Vec<T>,
}

impl<T: Real> ProbTable<T> {
    /// Validates and wraps a probability matrix.
    ///
    /// Entries must be finite and nonnegative. A total within `1e−12` of one
    /// is accepted unchanged, within `1e−9` it is renormalized, otherwise the
    /// matrix is rejected.
    pub fn new(p: DMatrix<T>) -> Result<Self> {
        let (rows, cols) = p.shape();
        if rows < 2 || cols < 2 {
            return Err(Error::DimensionTooSmall { rows, cols });
        }
        for j in 0..cols {
            for i in 0..rows {
                let v = p[(i, j)];
                if !(v >= T::zero()) || !v.is_finite() {
                    return Err(Error::InvalidEntry { row: i, col: j });
                }
            }
        }
        let sum: T = p.iter().copied().sum();
        let dev = (sum - T::one()).abs();
        // Single precision cannot resolve 1e-12; scale the windows by epsilon.
        let eps = T::epsilon() * T::of_usize(rows * cols);
        let sum_tol = T::of(SUM_TOL).max(eps);
        let renorm_tol = T::of(RENORM_TOL).max(eps * T::of(1e3));
        let p = if dev <= sum_tol {
            p
        } else if dev <= renorm_tol {
            p.map(|v| v / sum)
        } else {
            return Err(Error::NotNormalized { sum: sum.to_f64_lossy() });
        };
        Ok(Self::with_marginals(p))
    }

    /// Row-major nested probabilities.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Ragged { row: r, expected: ncols, found: row.len() });
            }
        }
        Self::new(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }

    /// Empirical distribution `p̂_ij = n_ij / n`.
    pub fn empirical(table: &JointTable) -> Self {
        let n = T::of(table.n() as f64);
        let p = table.counts().map(|c| T::of(c as f64) / n);
        Self::with_marginals(p)
    }

    /// Outer product of two marginal vectors. Each is normalized first.
    pub fn from_marginals(row: &[T], col: &[T]) -> Result<Self> {
        let rs: T = row.iter().copied().sum();
        let cs: T = col.iter().copied().sum();
        if row.iter().chain(col).any(|&v| !(v >= T::zero()) || !v.is_finite())
            || !(rs > T::zero())
            || !(cs > T::zero())
        {
            return Err(Error::InvalidArgument("marginals must be nonnegative with positive sum".into()));
        }
        let p = DMatrix::from_fn(row.len(), col.len(), |i, j| (row[i] / rs) * (col[j] / cs));
        Self::new(p)
    }

    /// Rebuilds a table from restricted coordinates, setting the last cell to
    /// `1 − Σ values`.
    pub fn from_restricted(v: &RestrictedVector<T>) -> Result<Self> {
        let (rows, cols) = v.dims();
        let last = T::one() - v.values().iter().copied().sum::<T>();
        let p = DMatrix::from_fn(rows, cols, |i, j| {
            let k = cell_index(i, j, rows);
            if k == rows * cols - 1 {
                last
            } else {
                v.values()[k]
            }
        });
        Self::new(p)
    }

    /// Wraps `p` without validation other than computing marginals; used
    /// where a caller already guarantees the simplex constraints.
    pub(crate) fn with_marginals(p: DMatrix<T>) -> Self {
        let (rows, cols) = p.shape();
        let mut row = vec![T::zero(); rows];
        let mut col = vec![T::zero(); cols];
        for j in 0..cols {
            for i in 0..rows {
                row[i] = row[i] + p[(i, j)];
            }
        }
        for (j, c) in col.iter_mut().enumerate() {
            *c = p.column(j).iter().copied().sum();
        }
        Self { p, row, col }
    }

    pub fn rows(&self) -> usize {
        self.p.nrows()
    }

    pub fn cols(&self) -> usize {
        self.p.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.p.shape()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.p[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.p
    }

    /// `p_i*`
    pub fn row_marginals(&self) -> &[T] {
        &self.row
    }

    /// `p_*j`
    pub fn col_marginals(&self) -> &[T] {
        &self.col
    }

    /// Smallest cell probability.
    pub fn min_cell(&self) -> T {
        self.p.iter().copied().fold(T::infinity(), T::min)
    }

    /// First zero cell in column-major order, if any.
    pub fn first_zero_cell(&self) -> Option<(usize, usize)> {
        let rows = self.rows();
        self.p.iter().position(|&v| v <= T::zero()).map(|k| (k % rows, k / rows))
    }

    /// Fails with [`Error::ZeroCell`] unless every cell is strictly positive.
    pub fn require_positive(&self) -> Result<()> {
        match self.first_zero_cell() {
            Some((row, col)) => Err(Error::ZeroCell { row, col }),
            None => Ok(()),
        }
    }

    /// The independence table `p_i* · p_*j` built from this table's marginals.
    pub fn product_of_marginals(&self) -> Self {
        let p = DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.row[i] * self.col[j]);
        Self::with_marginals(p)
    }

    /// Column-major flattening with the last cell dropped.
    pub fn vec2(&self) -> RestrictedVector<T> {
        let len = self.rows() * self.cols() - 1;
        RestrictedVector { values: self.p.iter().take(len).copied().collect(), dims: self.dims() }
    }

    /// Row-major nested probabilities.
    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows()).map(|i| self.p.row(i).iter().copied().collect()).collect()
    }
}

/// Restricted coordinates of an `I×J` table: the `IJ − 1` free cells in
/// column-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedVector<T: Real> {
    values: Vec<T>,
    dims: (usize, usize),
}

impl<T: Real> RestrictedVector<T> {
    pub fn new(values: Vec<T>, dims: (usize, usize)) -> Result<Self> {
        if dims.0 < 2 || dims.1 < 2 {
            return Err(Error::DimensionTooSmall { rows: dims.0, cols: dims.1 });
        }
        if values.len() != dims.0 * dims.1 - 1 {
            return Err(Error::DimensionMismatch(format!(
                "restricted vector for {}x{} needs {} values, got {}",
                dims.0,
                dims.1,
                dims.0 * dims.1 - 1,
                values.len()
            )));
        }
        Ok(Self { values, dims })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(row, col)` of restricted coordinate `k`.
    pub fn cell_of(&self, k: usize) -> (usize, usize) {
        (k % self.dims.0, k / self.dims.0)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}
