use super::Matrix;
use crate::{Error, Result};

const RANK_RATIO: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub x: Vec<f64>,
    /// `A x − b` at the minimizer.
    pub residual: Vec<f64>,
    /// Euclidean norm of `residual`.
    pub residual_norm: f64,
}

/// Minimizes `‖A x − b‖₂` with Householder QR (rows ≥ columns).
pub fn least_squares(a: &Matrix, b: &[f64]) -> Result<LeastSquares> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::Dimension(format!(
            "matrix has {m} rows but rhs has {} entries",
            b.len()
        )));
    }
    if m < n {
        return Err(Error::Dimension(format!(
            "least squares needs rows >= columns, got {m}x{n}"
        )));
    }
    let mut r = a.clone();
    let mut qtb = b.to_vec();
    let mut diag = vec![0.0; n];
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            diag[k] = 0.0;
            continue;
        }
        let alpha = if r[(k, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            diag[k] = alpha;
            continue;
        }
        for j in k..n {
            let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * r[(k + i, j)]).sum();
            let s = 2.0 * dot / vnorm2;
            for (i, vi) in v.iter().enumerate() {
                r[(k + i, j)] -= s * vi;
            }
        }
        let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * qtb[k + i]).sum();
        let s = 2.0 * dot / vnorm2;
        for (i, vi) in v.iter().enumerate() {
            qtb[k + i] -= s * vi;
        }
        diag[k] = r[(k, k)];
    }
    let dmax = diag.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let rank = diag
        .iter()
        .filter(|d| d.abs() > RANK_RATIO * dmax && d.abs() > 0.0)
        .count();
    if rank < n {
        let dmin = diag.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
        return Err(Error::RankDeficient {
            rank,
            cols: n,
            condition: if dmin > 0.0 { dmax / dmin } else { f64::INFINITY },
        });
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| r[(i, j)] * x[j]).sum();
        x[i] = (qtb[i] - s) / r[(i, i)];
    }
    let residual: Vec<f64> = a.mul_vec(&x).iter().zip(b).map(|(ax, bi)| ax - bi).collect();
    let residual_norm = residual.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(LeastSquares {
        x,
        residual,
        residual_norm,
    })
}
