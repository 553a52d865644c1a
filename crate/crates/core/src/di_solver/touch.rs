use std::time::Instant;

use super::cubic::{di_unconstrained, Cubic};
use super::problem::DiProblem;
use super::solution::{DiCase, DiSolution, Piece};
use crate::numerics::{least_squares, newton_root, ExpGapTransform, Matrix, RootOptions};
use crate::{Error, Result};

pub const TOUCH_UNKNOWNS: usize = 17;
pub const TOUCH_EQUATIONS: usize = 19;

/// Linear rows in the two cubics (8 coefficients each, `x` then `y`) and
/// the entry multiplier `π`, for a contact at angle `θ` and time `t₁`.
pub fn touch_system(problem: &DiProblem, theta: f64, t1: f64) -> (Matrix, Vec<f64>) {
    let mut a = Matrix::zeros(TOUCH_EQUATIONS, TOUCH_UNKNOWNS);
    let mut b = vec![0.0; TOUCH_EQUATIONS];
    let s = t1 - problem.t0;
    let r = problem.tf - t1;
    let d = problem.obstacle.clearance;
    let ph = [d * theta.cos(), d * theta.sin()];
    let c1 = |axis: usize, n: usize| 4 * axis + n;
    let c2 = |axis: usize, n: usize| 8 + 4 * axis + n;
    let pos = [1.0, s, s * s, s * s * s];
    let vel = [0.0, 1.0, 2.0 * s, 3.0 * s * s];
    let acc = [0.0, 0.0, 2.0, 6.0 * s];
    let mut row = 0;
    for k in 0..2 {
        a[(row, c1(k, 0))] = 1.0;
        b[row] = problem.p0[k];
        row += 1;
        a[(row, c1(k, 1))] = 1.0;
        b[row] = problem.v0[k];
        row += 1;
        for (n, w) in [1.0, r, r * r, r * r * r].iter().enumerate() {
            a[(row, c2(k, n))] = *w;
        }
        b[row] = problem.pf[k];
        row += 1;
        a[(row, c2(k, 2))] = 2.0;
        a[(row, c2(k, 3))] = 6.0 * r;
        row += 1;
    }
    for k in 0..2 {
        for n in 0..4 {
            a[(row, c1(k, n))] = pos[n];
        }
        b[row] = problem.obstacle.center[k] + ph[k];
        row += 1;
    }
    for k in 0..2 {
        for n in 0..4 {
            a[(row, c1(k, n))] = ph[k] * vel[n];
        }
    }
    row += 1;
    for k in 0..2 {
        for (weights, order) in [(pos, 0), (vel, 1), (acc, 2)] {
            for n in 0..4 {
                a[(row, c1(k, n))] = weights[n];
            }
            a[(row, c2(k, order))] = -match order {
                0 => 1.0,
                1 => 1.0,
                _ => 2.0,
            };
            row += 1;
        }
        a[(row, c2(k, 3))] = 6.0;
        a[(row, c1(k, 3))] = -6.0;
        a[(row, 16)] = -2.0 * ph[k];
        row += 1;
    }
    debug_assert_eq!(row, TOUCH_EQUATIONS);
    (a, b)
}

/// Least-squares coefficients and residual for a candidate contact.
pub fn touch_inner(problem: &DiProblem, theta: f64, t1: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (a, b) = touch_system(problem, theta, t1);
    let ls = least_squares(&a, &b)?;
    Ok((ls.x, ls.residual))
}

/// Angle of `p − O` and time at the deepest point of the unconstrained
/// cubic, used to seed the contact search.
pub fn violation_seed(problem: &DiProblem) -> Result<(f64, f64)> {
    let sol = DiSolution::assemble(
        problem,
        DiCase::Unconstrained,
        vec![Piece::Cubic(problem.t0, problem.tf, di_unconstrained(problem)?)],
    )?;
    let t = sol.min_clearance_time;
    let p = sol.position(t)?;
    let o = problem.obstacle.center;
    Ok(((p[1] - o[1]).atan2(p[0] - o[0]), t))
}

/// Residual targeted beyond the acceptance tolerance.
const POLISH_TOL: f64 = 1e-11;

pub(crate) fn touch_from(problem: &DiProblem, theta: f64, t1: f64, options: &RootOptions) -> Result<DiSolution> {
    let start = Instant::now();
    let transform = ExpGapTransform::new(problem.t0, problem.tf, vec![1]);
    // Iterate past the acceptance tolerance so the contact sits on the
    // circle to round-off; fall back to the accepted point otherwise.
    let polish = RootOptions {
        tolerance: options.tolerance.min(POLISH_TOL),
        ..options.clone()
    };
    let (point, residual_norm, iterations) = match newton_root(
        |x: &[f64]| Ok(touch_inner(problem, x[0], x[1])?.1),
        &[theta, t1],
        &transform,
        &polish,
    ) {
        Ok(r) => (r.x, r.residual_norm, r.iterations),
        Err(Error::NotConverged {
            iterations,
            residual,
            point,
        }) if residual < options.tolerance => (point, residual, iterations),
        Err(e) => return Err(e),
    };
    let (theta, t1) = (point[0], point[1]);
    let (x, _) = touch_inner(problem, theta, t1)?;
    let split = |o: usize| -> [Cubic; 2] { [0, 1].map(|k| [0, 1, 2, 3].map(|n| x[o + 4 * k + n])) };
    let mut sol = DiSolution::assemble(
        problem,
        DiCase::Touch,
        vec![
            Piece::Cubic(problem.t0, t1, split(0)),
            Piece::Cubic(t1, problem.tf, split(8)),
        ],
    )?;
    sol.theta = Some(theta.rem_euclid(std::f64::consts::TAU));
    sol.t1 = Some(t1);
    sol.pi = Some(x[16]);
    sol.diagnostics.solver_residual = residual_norm;
    sol.diagnostics.iterations = iterations;
    sol.diagnostics.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(sol)
}

/// Instantaneous-contact solve seeded from the unconstrained violation.
pub fn di_touch_solve(problem: &DiProblem) -> Result<DiSolution> {
    let (theta, t1) = violation_seed(problem)?;
    touch_from(problem, theta, t1, &RootOptions::least_squares())
}
