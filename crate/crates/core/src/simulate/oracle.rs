use crate::crane_solver::{CraneBoundary, CraneParams};
use crate::di_solver::DiProblem;
use crate::flat_model::crane_boundary_to_flat;
use crate::numerics::{lu_solve, DenseSystem, Matrix};
use crate::{Error, Result};

/// Fewest intervals accepted by the oracle.
pub const MIN_INTERVALS: usize = 8;

/// One integrator chain `y⁽ᵏ⁾ = u` with cost `½ Σ_l w_l ∫ (y⁽ˡ⁾)²`,
/// `l = 0..=k`.
#[derive(Debug, Clone)]
pub struct ChainQp {
    pub weights: Vec<f64>,
    pub horizon: f64,
    /// `(y, …, y^{(k−1)})` at the start.
    pub initial: Vec<f64>,
    /// Terminal values; `None` leaves the component free.
    pub terminal: Vec<Option<f64>>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl ChainQp {
    pub fn order(&self) -> usize {
        self.initial.len()
    }

    /// Optimal cost with `u` piecewise constant on `n` equal intervals.
    pub fn solve(&self, n: usize) -> Result<f64> {
        let k = self.order();
        if n < MIN_INTERVALS {
            return Err(Error::InvalidParameter(format!(
                "oracle needs at least {MIN_INTERVALS} intervals, got {n}"
            )));
        }
        if k == 0 || self.weights.len() != k + 1 || self.terminal.len() != k {
            return Err(Error::Dimension("chain data lengths disagree".into()));
        }
        let h = self.horizon / n as f64;
        // Exact one-interval propagation of the nilpotent chain.
        let phi = Matrix::from_fn(k, k, |i, j| {
            if j >= i {
                h.powi((j - i) as i32) / factorial(j - i)
            } else {
                0.0
            }
        });
        let bvec: Vec<f64> = (0..k).map(|i| h.powi((k - i) as i32) / factorial(k - i)).collect();
        // Interval cost ½ zᵀWz for z = (x, u).
        let dim = k + 1;
        let w = Matrix::from_fn(dim, dim, |a, b| {
            let mut s = 0.0;
            for (l, &wl) in self.weights.iter().enumerate() {
                if wl == 0.0 || a < l || b < l {
                    continue;
                }
                let (p, q) = (a - l, b - l);
                s += wl * h.powi((p + q + 1) as i32) / ((p + q + 1) as f64 * factorial(p) * factorial(q));
            }
            s
        });
        // γ_d = (Φᵈ B, 0) for d ≥ 0 and γ_{−1} = e_u, stored at d + 1.
        let mut gamma: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut e_u = vec![0.0; dim];
        e_u[k] = 1.0;
        gamma.push(e_u);
        let mut beta = bvec.clone();
        for _ in 0..n {
            let mut g = beta.clone();
            g.push(0.0);
            gamma.push(g);
            beta = phi.mul_vec(&beta);
        }
        let wg: Vec<Vec<f64>> = gamma.iter().map(|g| w.mul_vec(g)).collect();
        // Free response c_i = (Φⁱ x0, 0).
        let mut free: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut x = self.initial.clone();
        for _ in 0..=n {
            let mut c = x.clone();
            c.push(0.0);
            free.push(c);
            x = phi.mul_vec(&x);
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        // Q[j][m] = Σ_{d=−1}^{n−2−m} γ_{d+δ}ᵀ W γ_d for δ = m − j ≥ 0.
        let rows: Vec<usize> = (0..k).filter(|&i| self.terminal[i].is_some()).collect();
        let size = n + rows.len();
        let mut kkt = Matrix::zeros(size, size);
        for delta in 0..n {
            let mut prefix = Vec::with_capacity(n - delta);
            let mut acc = 0.0;
            for d in 0..(n - delta) {
                acc += dot(&gamma[d + delta], &wg[d]);
                prefix.push(acc);
            }
            for m in delta..n {
                let j = m - delta;
                let v = prefix[n - 1 - m];
                kkt[(j, m)] = v;
                kkt[(m, j)] = v;
            }
        }
        let mut rhs = vec![0.0; size];
        let mut constant = 0.0;
        let wc: Vec<Vec<f64>> = free.iter().map(|c| w.mul_vec(c)).collect();
        for i in 0..n {
            constant += 0.5 * dot(&free[i], &wc[i]);
            for j in 0..=i {
                rhs[j] -= dot(&gamma[i - j], &wc[i]);
            }
        }
        // Terminal rows: x_N = Φᴺ x0 + Σ_j Φ^{N−1−j} B u_j.
        for (r, &comp) in rows.iter().enumerate() {
            for j in 0..n {
                let v = gamma[n - j][comp];
                kkt[(n + r, j)] = v;
                kkt[(j, n + r)] = v;
            }
            rhs[n + r] = self.terminal[comp].expect("fixed component") - free[n][comp];
        }
        let sol = lu_solve(&DenseSystem::new(kkt.clone(), rhs.clone())?)?;
        let u = &sol.x[..n];
        let mut quad = 0.0;
        for j in 0..n {
            let mut row = 0.0;
            for m in 0..n {
                row += kkt[(j, m)] * u[m];
            }
            quad += u[j] * row;
        }
        let linear = -dot(&rhs[..n], u);
        Ok(0.5 * quad + linear + constant)
    }
}

/// Crane cost `½∫ (y⁽³⁾/g)² + (αy⁽⁴⁾)²` with no position bound.
pub fn lq_oracle(params: &CraneParams, boundary: &CraneBoundary, n: usize) -> Result<f64> {
    let flat = crane_boundary_to_flat(boundary, params);
    ChainQp {
        weights: vec![0.0, 0.0, 0.0, 1.0 / (params.g * params.g), params.alpha * params.alpha],
        horizon: boundary.tf - boundary.t0,
        initial: flat.initial.to_vec(),
        terminal: flat.terminal.iter().map(|&v| Some(v)).collect(),
    }
    .solve(n)
}

/// Double-integrator cost `½∫‖u‖²` with free final velocity and no obstacle.
pub fn di_lq_oracle(problem: &DiProblem, n: usize) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..2 {
        total += ChainQp {
            weights: vec![0.0, 0.0, 1.0],
            horizon: problem.horizon(),
            initial: vec![problem.p0[k], problem.v0[k]],
            terminal: vec![Some(problem.pf[k]), None],
        }
        .solve(n)?;
    }
    Ok(total)
}
