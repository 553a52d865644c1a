use super::Matrix;
use crate::{Error, Result};

const PIVOT_RATIO: f64 = 1e-14;

/// Square linear system `A x = b`.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    pub matrix: Matrix,
    pub rhs: Vec<f64>,
}

impl DenseSystem {
    pub fn new(matrix: Matrix, rhs: Vec<f64>) -> Result<Self> {
        if matrix.rows() != rhs.len() {
            return Err(Error::Dimension(format!(
                "matrix has {} rows but rhs has {} entries",
                matrix.rows(),
                rhs.len()
            )));
        }
        Ok(Self { matrix, rhs })
    }

    /// `‖A x − b‖∞`.
    pub fn residual_inf(&self, x: &[f64]) -> f64 {
        self.matrix
            .mul_vec(x)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct LuSolution {
    pub x: Vec<f64>,
    /// Estimate of the 1-norm condition number.
    pub condition: f64,
}

/// Partial-pivoting LU factorization `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactor {
    n: usize,
    lu: Matrix,
    perm: Vec<usize>,
    norm1: f64,
}

impl LuFactor {
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                n,
                a.cols()
            )));
        }
        let norm1 = a.norm1();
        let threshold = PIVOT_RATIO * norm1;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, max) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if max <= threshold || max == 0.0 {
                return Err(Error::Singular {
                    column: k,
                    pivot: max,
                    threshold,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            let cols = n;
            let data = lu.as_mut_slice();
            let (head, tail) = data.split_at_mut((k + 1) * cols);
            let pivot_row = &head[k * cols..(k + 1) * cols];
            for row in tail.chunks_exact_mut(cols) {
                let factor = row[k] / pivot;
                row[k] = factor;
                if factor != 0.0 {
                    for (r, p) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                        *r -= factor * p;
                    }
                }
            }
        }
        Ok(Self { n, lu, perm, norm1 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.lu[(k, i)] * z[k];
            }
            z[i] = s / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in i + 1..n {
                s -= self.lu[(k, i)] * z[k];
            }
            z[i] = s;
        }
        let mut x = vec![0.0; n];
        for (pos, &orig) in self.perm.iter().enumerate() {
            x[orig] = z[pos];
        }
        x
    }

    /// Hager's estimate of `‖A‖₁ ‖A⁻¹‖₁`.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut estimate = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            estimate = y.iter().map(|v| v.abs()).sum::<f64>();
            let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.abs()))
                .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
            last_j = j;
        }
        estimate * self.norm1
    }
}

/// Solves a square system by partial-pivoting LU and reports a condition estimate.
pub fn lu_solve(system: &DenseSystem) -> Result<LuSolution> {
    let factor = LuFactor::new(&system.matrix)?;
    let x = factor.solve(&system.rhs);
    let condition = factor.condition_estimate();
    Ok(LuSolution { x, condition })
}
