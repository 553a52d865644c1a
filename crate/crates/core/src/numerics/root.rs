use super::{least_squares, Matrix};
use crate::{Error, Result};

/// Change of variables between unconstrained solver coordinates `z` and
/// physical parameters `x`.
pub trait Transform {
    /// `None` when `z` maps outside the admissible set.
    fn forward(&self, z: &[f64]) -> Option<Vec<f64>>;
    fn inverse(&self, x: &[f64]) -> Option<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Transform for Identity {
    fn forward(&self, z: &[f64]) -> Option<Vec<f64>> {
        Some(z.to_vec())
    }

    fn inverse(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.to_vec())
    }
}

/// Keeps selected coordinates strictly increasing inside `(origin, upper)`:
/// the i-th listed time is `previous + exp(z_i)`, starting from `origin`.
/// Points whose last time reaches `upper` are rejected.
#[derive(Debug, Clone)]
pub struct ExpGapTransform {
    pub origin: f64,
    pub upper: f64,
    pub time_indices: Vec<usize>,
}

impl ExpGapTransform {
    pub fn new(origin: f64, upper: f64, time_indices: Vec<usize>) -> Self {
        Self {
            origin,
            upper,
            time_indices,
        }
    }
}

impl Transform for ExpGapTransform {
    fn forward(&self, z: &[f64]) -> Option<Vec<f64>> {
        let mut x = z.to_vec();
        let mut t = self.origin;
        for &i in &self.time_indices {
            let gap = z[i].exp();
            if !gap.is_finite() || gap <= 0.0 {
                return None;
            }
            let next = t + gap;
            if next <= t {
                return None;
            }
            t = next;
            x[i] = t;
        }
        if t >= self.upper || !t.is_finite() {
            return None;
        }
        Some(x)
    }

    fn inverse(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut z = x.to_vec();
        let mut prev = self.origin;
        for &i in &self.time_indices {
            let gap = x[i] - prev;
            if gap <= 0.0 {
                return None;
            }
            z[i] = gap.ln();
            prev = x[i];
        }
        if prev >= self.upper {
            return None;
        }
        Some(z)
    }
}

#[derive(Debug, Clone)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Convergence threshold on the residual ∞-norm.
    pub tolerance: f64,
    /// Accept more residuals than unknowns and minimize their 2-norm.
    pub least_squares: bool,
    /// Relative finite-difference step, scaled by `max(1, |z|)`.
    pub fd_step: f64,
}

impl RootOptions {
    pub fn square() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-8,
            least_squares: false,
            fd_step: 1e-6,
        }
    }

    pub fn least_squares() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-6,
            least_squares: true,
            fd_step: 1e-6,
        }
    }
}

impl Default for RootOptions {
    fn default() -> Self {
        Self::square()
    }
}

#[derive(Debug, Clone)]
pub struct RootReport {
    pub x: Vec<f64>,
    pub residual: Vec<f64>,
    /// ∞-norm of `residual`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Physical iterates, starting with the initial point.
    pub trace: Vec<Vec<f64>>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn half_sq(v: &[f64]) -> f64 {
    0.5 * v.iter().map(|x| x * x).sum::<f64>()
}

struct Evaluator<'a, F> {
    residual: F,
    transform: &'a dyn Transform,
    evaluations: usize,
}

impl<F> Evaluator<'_, F>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    fn eval(&mut self, z: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        let x = self.transform.forward(z)?;
        self.evaluations += 1;
        match (self.residual)(&x) {
            Ok(r) if r.iter().all(|v| v.is_finite()) => Some((x, r)),
            _ => None,
        }
    }
}

/// Damped Newton with a Levenberg-Marquardt fallback on a central
/// finite-difference Jacobian, iterating in transformed coordinates.
pub fn newton_root<F>(
    residual: F,
    x0: &[f64],
    transform: &dyn Transform,
    options: &RootOptions,
) -> Result<RootReport>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut ev = Evaluator {
        residual,
        transform,
        evaluations: 0,
    };
    let mut z = transform
        .inverse(x0)
        .ok_or_else(|| Error::InvalidParameter(format!("initial point {x0:?} violates the transform")))?;
    let (mut x, mut r) = ev.eval(&z).ok_or_else(|| {
        Error::InvalidParameter(format!("residual not evaluable at initial point {x0:?}"))
    })?;
    let n = z.len();
    if !options.least_squares && r.len() != n {
        return Err(Error::Dimension(format!(
            "square solve needs {n} residuals, got {}",
            r.len()
        )));
    }
    if r.len() < n {
        return Err(Error::Dimension(format!(
            "{} residuals cannot determine {n} unknowns",
            r.len()
        )));
    }
    let mut trace = vec![x.clone()];
    let mut lambda = 0.0_f64;
    let mut iterations = 0;
    while inf_norm(&r) >= options.tolerance && iterations < options.max_iterations {
        iterations += 1;
        let jac = jacobian(&mut ev, &z, &r, options.fd_step)?;
        let phi = half_sq(&r);
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();

        let mut accepted = None;
        if let Ok(ls) = least_squares(&jac, &neg_r) {
            let mut scale = 1.0;
            for _ in 0..10 {
                let trial: Vec<f64> = z.iter().zip(&ls.x).map(|(a, d)| a + scale * d).collect();
                if let Some((xt, rt)) = ev.eval(&trial) {
                    if half_sq(&rt) < phi {
                        accepted = Some((trial, xt, rt));
                        break;
                    }
                }
                scale *= 0.5;
            }
        }

        if accepted.is_none() {
            let diag: Vec<f64> = (0..n)
                .map(|j| {
                    let s: f64 = (0..jac.rows()).map(|i| jac[(i, j)] * jac[(i, j)]).sum();
                    if s > 0.0 {
                        s
                    } else {
                        1.0
                    }
                })
                .collect();
            lambda = if lambda > 0.0 { lambda } else { 1e-3 };
            while lambda < 1e12 {
                let rows = jac.rows();
                let mut aug = Matrix::zeros(rows + n, n);
                for i in 0..rows {
                    for j in 0..n {
                        aug[(i, j)] = jac[(i, j)];
                    }
                }
                for j in 0..n {
                    aug[(rows + j, j)] = (lambda * diag[j]).sqrt();
                }
                let mut rhs = neg_r.clone();
                rhs.extend(std::iter::repeat(0.0).take(n));
                if let Ok(ls) = least_squares(&aug, &rhs) {
                    let trial: Vec<f64> = z.iter().zip(&ls.x).map(|(a, d)| a + d).collect();
                    if let Some((xt, rt)) = ev.eval(&trial) {
                        if half_sq(&rt) < phi {
                            accepted = Some((trial, xt, rt));
                            lambda *= 0.1;
                            break;
                        }
                    }
                }
                lambda *= 10.0;
            }
        } else {
            lambda *= 0.1;
        }

        match accepted {
            Some((zt, xt, rt)) => {
                let small_step = zt
                    .iter()
                    .zip(&z)
                    .all(|(a, b)| (a - b).abs() <= 1e-15 * b.abs().max(1.0));
                z = zt;
                x = xt;
                r = rt;
                trace.push(x.clone());
                if small_step {
                    break;
                }
            }
            None => break,
        }
    }
    let residual_norm = inf_norm(&r);
    if residual_norm >= options.tolerance {
        return Err(Error::NotConverged {
            iterations,
            residual: residual_norm,
            point: x,
        });
    }
    Ok(RootReport {
        x,
        residual: r,
        residual_norm,
        iterations,
        evaluations: ev.evaluations,
        trace,
    })
}

fn jacobian<F>(ev: &mut Evaluator<'_, F>, z: &[f64], r0: &[f64], rel_step: f64) -> Result<Matrix>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = z.len();
    let m = r0.len();
    let mut jac = Matrix::zeros(m, n);
    for j in 0..n {
        let h = rel_step * z[j].abs().max(1.0);
        let mut zp = z.to_vec();
        zp[j] += h;
        let mut zm = z.to_vec();
        zm[j] -= h;
        let plus = ev.eval(&zp).map(|(_, r)| r);
        let minus = ev.eval(&zm).map(|(_, r)| r);
        let column: Vec<f64> = match (plus, minus) {
            (Some(p), Some(q)) => p.iter().zip(&q).map(|(a, b)| (a - b) / (2.0 * h)).collect(),
            (Some(p), None) => p.iter().zip(r0).map(|(a, b)| (a - b) / h).collect(),
            (None, Some(q)) => r0.iter().zip(&q).map(|(a, b)| (a - b) / h).collect(),
            (None, None) => {
                return Err(Error::InvalidParameter(format!(
                    "residual not evaluable around coordinate {j}"
                )))
            }
        };
        if column.len() != m {
            return Err(Error::Dimension("residual length changed between evaluations".into()));
        }
        for i in 0..m {
            jac[(i, j)] = column[i];
        }
    }
    Ok(jac)
}
