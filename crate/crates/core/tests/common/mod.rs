//! Reference implementations used as test oracles. They work on plain
//! row-major `Vec<Vec<f64>>` tables and share no code with the library.

#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn marginals(p: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let r: Vec<f64> = p.iter().map(|row| row.iter().sum()).collect();
    let c: Vec<f64> = (0..p[0].len()).map(|j| p.iter().map(|row| row[j]).sum()).collect();
    (r, c)
}

/// `Σ p ln(p / (p_i p_j))` by direct summation.
pub fn mi(p: &[Vec<f64>]) -> f64 {
    let (r, c) = marginals(p);
    let mut s = 0.0;
    for (i, row) in p.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > 0.0 {
                s += v * (v / (r[i] * c[j])).ln();
            }
        }
    }
    s
}

/// Column-major vector without the last cell.
pub fn vec2(p: &[Vec<f64>]) -> Vec<f64> {
    let (rows, cols) = (p.len(), p[0].len());
    let mut v = Vec::new();
    for j in 0..cols {
        for i in 0..rows {
            v.push(p[i][j]);
        }
    }
    v.truncate(rows * cols - 1);
    v
}

pub fn unvec2(v: &[f64], rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let mut p = vec![vec![0.0; cols]; rows];
    for (k, &x) in v.iter().enumerate() {
        p[k % rows][k / rows] = x;
    }
    p[rows - 1][cols - 1] = 1.0 - v.iter().sum::<f64>();
    p
}

fn mi_restricted(v: &[f64], rows: usize, cols: usize) -> f64 {
    mi(&unvec2(v, rows, cols))
}

/// Five-point-stencil gradient of MI in restricted coordinates.
pub fn fd_gradient(p: &[Vec<f64>], h: f64) -> Vec<f64> {
    let (rows, cols) = (p.len(), p[0].len());
    let base = vec2(p);
    (0..base.len())
        .map(|k| {
            let at = |t: f64| {
                let mut v = base.clone();
                v[k] += t;
                mi_restricted(&v, rows, cols)
            };
            (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
        })
        .collect()
}

/// Fourth-order mixed-difference Hessian of MI in restricted coordinates.
pub fn fd_hessian(p: &[Vec<f64>], h: f64) -> DMatrix<f64> {
    let (rows, cols) = (p.len(), p[0].len());
    let base = vec2(p);
    let d = base.len();
    let f = |a: usize, sa: f64, b: usize, sb: f64| {
        let mut v = base.clone();
        v[a] += sa;
        v[b] += sb;
        mi_restricted(&v, rows, cols)
    };
    // Richardson combination of the standard 4-point mixed stencil at h and 2h.
    let stencil = |a: usize, b: usize, h: f64| {
        (f(a, h, b, h) - f(a, h, b, -h) - f(a, -h, b, h) + f(a, -h, b, -h)) / (4.0 * h * h)
    };
    DMatrix::from_fn(d, d, |a, b| (4.0 * stencil(a, b, h) - stencil(a, b, 2.0 * h)) / 3.0)
}

pub fn cov(p: &[Vec<f64>]) -> DMatrix<f64> {
    let q = vec2(p);
    let d = q.len();
    DMatrix::from_fn(d, d, |a, b| if a == b { q[a] } else { 0.0 } - q[a] * q[b])
}

/// Eigenvalues of `Σ^{1/2} H Σ^{1/2}` through the symmetric square root.
pub fn weights(h: &DMatrix<f64>, sigma: &DMatrix<f64>) -> Vec<f64> {
    let e = SymmetricEigen::new(sigma.clone());
    let sqrt = &e.eigenvectors
        * DMatrix::from_diagonal(&e.eigenvalues.map(|v| v.max(0.0).sqrt()))
        * e.eigenvectors.transpose();
    let m = &sqrt * h * &sqrt;
    let m = (&m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Independent Hessian route: the unrestricted `(IJ)×(IJ)` second derivative
/// pulled back through the Jacobian of `p_IJ = 1 − Σ`.
pub fn hessian_pullback(p: &[Vec<f64>]) -> DMatrix<f64> {
    let (rows, cols) = (p.len(), p[0].len());
    let (r, c) = marginals(p);
    let cells = rows * cols;
    // Hessian of MI(p) with p free: ∂²/∂p_a∂p_b of Σ p ln p − Σ r ln r − Σ c ln c.
    let full = DMatrix::from_fn(cells, cells, |a, b| {
        let (ia, ja) = (a % rows, a / rows);
        let (ib, jb) = (b % rows, b / rows);
        let mut v = 0.0;
        if a == b {
            v += 1.0 / p[ia][ja];
        }
        if ia == ib {
            v -= 1.0 / r[ia];
        }
        if ja == jb {
            v -= 1.0 / c[ja];
        }
        v
    });
    let jac = DMatrix::from_fn(cells, cells - 1, |a, b| {
        if a == cells - 1 {
            -1.0
        } else if a == b {
            1.0
        } else {
            0.0
        }
    });
    jac.transpose() * full * jac
}

pub fn gradient_direct(p: &[Vec<f64>]) -> Vec<f64> {
    let (rows, cols) = (p.len(), p[0].len());
    let (r, c) = marginals(p);
    let l = |i: usize, j: usize| (p[i][j] / (r[i] * c[j])).ln();
    let last = l(rows - 1, cols - 1);
    (0..rows * cols - 1).map(|k| l(k % rows, k / rows) - last).collect()
}

/// Random table with every cell at least `floor` before normalization.
pub fn random_interior<R: Rng>(rng: &mut R, rows: usize, cols: usize, floor: f64) -> Vec<Vec<f64>> {
    let raw: Vec<Vec<f64>> =
        (0..rows).map(|_| (0..cols).map(|_| floor + rng.random::<f64>()).collect()).collect();
    let s: f64 = raw.iter().flatten().sum();
    raw.into_iter().map(|row| row.into_iter().map(|v| v / s).collect()).collect()
}

pub fn random_marginal<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| 0.05 + rng.random::<f64>()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

pub fn product(r: &[f64], c: &[f64]) -> Vec<Vec<f64>> {
    r.iter().map(|&a| c.iter().map(|&b| a * b).collect()).collect()
}

pub fn g2(counts: &[Vec<u64>]) -> f64 {
    let n: f64 = counts.iter().flatten().sum::<u64>() as f64;
    let r: Vec<f64> = counts.iter().map(|row| row.iter().sum::<u64>() as f64).collect();
    let c: Vec<f64> = (0..counts[0].len()).map(|j| counts.iter().map(|row| row[j]).sum::<u64>() as f64).collect();
    let mut s = 0.0;
    for (i, row) in counts.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            if o > 0 {
                let (num, den) = (o as f64 * n, r[i] * c[j]);
                s += o as f64 * ((num - den) / den).ln_1p();
            }
        }
    }
    2.0 * s
}

pub fn pearson(counts: &[Vec<u64>]) -> f64 {
    let n: f64 = counts.iter().flatten().sum::<u64>() as f64;
    let r: Vec<f64> = counts.iter().map(|row| row.iter().sum::<u64>() as f64).collect();
    let c: Vec<f64> = (0..counts[0].len()).map(|j| counts.iter().map(|row| row[j]).sum::<u64>() as f64).collect();
    let mut s = 0.0;
    for (i, row) in counts.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            let e = r[i] * c[j] / n;
            s += (o as f64 - e).powi(2) / e;
        }
    }
    s
}

/// Random counts in `0..=max` with no empty row or column.
pub fn random_counts<R: Rng>(rng: &mut R, rows: usize, cols: usize, max: u64) -> Vec<Vec<u64>> {
    loop {
        let t: Vec<Vec<u64>> = (0..rows).map(|_| (0..cols).map(|_| rng.random_range(0..=max)).collect()).collect();
        let rows_ok = t.iter().all(|row| row.iter().any(|&v| v > 0));
        let cols_ok = (0..cols).all(|j| t.iter().any(|row| row[j] > 0));
        if rows_ok && cols_ok {
            return t;
        }
    }
}

pub fn to_i64(t: &[Vec<u64>]) -> Vec<Vec<i64>> {
    t.iter().map(|row| row.iter().map(|&v| v as i64).collect()).collect()
}

/// Kolmogorov–Smirnov distance of `samples` to a CDF.
pub fn ks(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / m).abs()).max(((i + 1) as f64 / m - f).abs());
    }
    d
}
