//! Dense linear algebra on top of faer.

use faer::{c64, Mat};
use num_complex::Complex64;

/// Truncated-SVD least-squares solution.
#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub x: Vec<f64>,
    /// Singular directions kept after truncation.
    pub rank: usize,
    /// Singular values of the column-equilibrated matrix, descending.
    pub singular_values: Vec<f64>,
}

/// Minimizes `‖A x - b‖₂` after scaling every column to unit norm and
/// discarding singular directions below `rel_cut · σ_max`.
///
/// Returns `None` when every column is zero or nothing survives truncation.
pub fn lstsq_truncated(a: &Mat<f64>, b: &[f64], rel_cut: f64) -> Option<LstsqSolution> {
    let (m, n) = (a.nrows(), a.ncols());
    assert_eq!(b.len(), m);
    let scales: Vec<f64> = (0..n)
        .map(|j| {
            let norm = (0..m).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>().sqrt();
            if norm > 0.0 {
                1.0 / norm
            } else {
                0.0
            }
        })
        .collect();
    if scales.iter().all(|&s| s == 0.0) {
        return None;
    }
    let scaled = Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)] * scales[j]);

    // Reduce a tall system to its triangular factor before the SVD.
    let (core, rhs) = if m > n {
        let qr = scaled.qr();
        let q = qr.compute_thin_Q();
        let rhs: Vec<f64> = (0..n)
            .map(|j| (0..m).map(|i| q[(i, j)] * b[i]).sum())
            .collect();
        (qr.thin_R().to_owned(), rhs)
    } else {
        (scaled, b.to_vec())
    };
    let svd = core.thin_svd().ok()?;
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let k = s.dim();
    let sigma: Vec<f64> = (0..k).map(|i| s[i]).collect();
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return None;
    }
    let mut y = vec![0.0; n];
    let mut rank = 0;
    for i in 0..k {
        if sigma[i] < rel_cut * smax {
            continue;
        }
        rank += 1;
        let coef = (0..rhs.len()).map(|r| u[(r, i)] * rhs[r]).sum::<f64>() / sigma[i];
        for (j, yj) in y.iter_mut().enumerate() {
            *yj += coef * v[(j, i)];
        }
    }
    if rank == 0 {
        return None;
    }
    let mut singular_values = sigma;
    singular_values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Some(LstsqSolution {
        x: y.iter().zip(&scales).map(|(y, s)| y * s).collect(),
        rank,
        singular_values,
    })
}

/// Right singular vector of the smallest singular value of a complex matrix
/// with at least as many rows as columns, and that singular value.
pub fn smallest_right_singular(rows: usize, cols: usize, entry: impl Fn(usize, usize) -> Complex64) -> (Vec<Complex64>, f64) {
    let a = Mat::<c64>::from_fn(rows, cols, |i, j| entry(i, j));
    let core = if rows > cols {
        a.qr().thin_R().to_owned()
    } else {
        a
    };
    let svd = core.thin_svd().expect("svd converges");
    let s = svd.S();
    let v = svd.V();
    let k = s.dim();
    let mut best = 0;
    for i in 1..k {
        if s[i].re < s[best].re {
            best = i;
        }
    }
    if k < cols {
        // wide matrix: a null vector exists outside the thin factorization
        let full = core.svd().expect("svd converges");
        let fv = full.V();
        return ((0..cols).map(|j| fv[(j, cols - 1)]).collect(), 0.0);
    }
    ((0..cols).map(|j| v[(j, best)]).collect(), s[best].re)
}

/// Eigenvalues of a dense complex matrix.
pub fn eigenvalues(n: usize, entry: impl Fn(usize, usize) -> Complex64) -> Vec<Complex64> {
    if n == 0 {
        return Vec::new();
    }
    let a = Mat::<c64>::from_fn(n, n, |i, j| entry(i, j));
    a.eigenvalues().expect("eigenvalues converge")
}
