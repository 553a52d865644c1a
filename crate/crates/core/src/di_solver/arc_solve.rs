use std::time::Instant;

use super::arc::{arc_step, integrate_arc, ArcSamples};
use super::cubic::{eval, hermite_cubic, Cubic};
use super::problem::DiProblem;
use super::solution::{DiCase, DiSolution, Piece};
use super::touch::violation_seed;
use crate::numerics::{newton_root, ExpGapTransform, RootOptions};
use crate::{Error, Result};

/// Largest RK4 step on the arc.
pub const ARC_MAX_STEP: f64 = 1e-3;

/// Unknowns of the arc closure: contact angle, entry and exit times,
/// signed tangential speed at entry, radial jerk jump at exit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcParameters {
    pub theta: f64,
    pub t1: f64,
    pub t2: f64,
    pub speed: f64,
    pub exit_jump: f64,
}

impl ArcParameters {
    fn to_vec(self) -> Vec<f64> {
        vec![self.theta, self.t1, self.t2, self.speed, self.exit_jump]
    }

    fn from_slice(x: &[f64]) -> Self {
        Self {
            theta: x[0],
            t1: x[1],
            t2: x[2],
            speed: x[3],
            exit_jump: x[4],
        }
    }
}

pub(crate) struct ArcBuild {
    pub entry: [Cubic; 2],
    pub samples: ArcSamples,
    pub exit: [Cubic; 2],
    /// `p(tf) − pf`, `u(tf)` and the radial entry consistency
    /// `u⁻·p̂ + ‖v‖²`.
    pub residual: [f64; 5],
}

/// Builds entry cubic, arc and exit cubic for given parameters.
pub(crate) fn build_arc(problem: &DiProblem, x: &ArcParameters) -> Result<ArcBuild> {
    let (t0, tf) = (problem.t0, problem.tf);
    if !(t0 < x.t1 && x.t1 < x.t2 && x.t2 < tf) {
        return Err(Error::DegenerateJunctions(format!(
            "need t0 < t1 < t2 < tf, got {} {} {} {}",
            t0, x.t1, x.t2, tf
        )));
    }
    let d = problem.obstacle.clearance;
    let o = problem.obstacle.center;
    let (sn, cs) = x.theta.sin_cos();
    let r_hat = [cs, sn];
    let t_hat = [-sn, cs];
    let s1 = x.t1 - t0;
    let entry: [Cubic; 2] = [0, 1].map(|k| {
        hermite_cubic(
            problem.p0[k],
            problem.v0[k],
            o[k] + d * r_hat[k],
            x.speed * t_hat[k],
            s1,
        )
    });
    let u = [eval(&entry[0], s1, 2), eval(&entry[1], s1, 2)];
    let j = [eval(&entry[0], s1, 3), eval(&entry[1], s1, 3)];
    let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
    let radial = d * dot(u, r_hat) + x.speed * x.speed;
    let rate = x.speed / d;
    let state = [
        x.theta,
        rate,
        dot(u, t_hat) / d,
        dot(j, t_hat) / d + rate * rate * rate,
    ];
    let duration = x.t2 - x.t1;
    let samples = integrate_arc(problem.obstacle, x.t1, state, duration, arc_step(duration, ARC_MAX_STEP))?;
    let jet = samples.position_jet(samples.t_end(), 3);
    let phi = samples.exit()[0];
    let r2 = [phi.cos(), phi.sin()];
    let comp = |z: num_complex::Complex64| [z.re, z.im];
    let (p2, v2, u2, j2) = (comp(jet[0]), comp(jet[1]), comp(jet[2]), comp(jet[3]));
    let exit: [Cubic; 2] = [0, 1].map(|k| {
        [
            p2[k],
            v2[k],
            0.5 * u2[k],
            (j2[k] + x.exit_jump * r2[k]) / 6.0,
        ]
    });
    let s2 = tf - x.t2;
    let residual = [
        eval(&exit[0], s2, 0) - problem.pf[0],
        eval(&exit[1], s2, 0) - problem.pf[1],
        eval(&exit[0], s2, 2),
        eval(&exit[1], s2, 2),
        radial,
    ];
    Ok(ArcBuild {
        entry,
        samples,
        exit,
        residual,
    })
}

pub(crate) fn arc_from(problem: &DiProblem, seed: ArcParameters, options: &RootOptions) -> Result<DiSolution> {
    let start = Instant::now();
    let transform = ExpGapTransform::new(problem.t0, problem.tf, vec![1, 2]);
    let report = newton_root(
        |x: &[f64]| Ok(build_arc(problem, &ArcParameters::from_slice(x))?.residual.to_vec()),
        &seed.to_vec(),
        &transform,
        options,
    )?;
    let x = ArcParameters::from_slice(&report.x);
    let built = build_arc(problem, &x)?;
    let mut sol = DiSolution::assemble(
        problem,
        DiCase::Arc,
        vec![
            Piece::Cubic(problem.t0, x.t1, built.entry),
            Piece::Arc(built.samples),
            Piece::Cubic(x.t2, problem.tf, built.exit),
        ],
    )?;
    sol.theta = Some(x.theta.rem_euclid(std::f64::consts::TAU));
    sol.t1 = Some(x.t1);
    sol.t2 = Some(x.t2);
    sol.exit_jump = Some(x.exit_jump);
    let o = problem.obstacle.center;
    let d = problem.obstacle.clearance;
    let jm = [eval(&built.entry[0], x.t1 - problem.t0, 3), eval(&built.entry[1], x.t1 - problem.t0, 3)];
    let jp = {
        let z = sol.arc.as_ref().expect("arc case").position_jet(x.t1, 3)[3];
        [z.re, z.im]
    };
    let p1 = sol.position(x.t1)?;
    let ph = [p1[0] - o[0], p1[1] - o[1]];
    sol.pi = Some(((jp[0] - jm[0]) * ph[0] + (jp[1] - jm[1]) * ph[1]) / (2.0 * d * d));
    sol.diagnostics.solver_residual = report.residual_norm;
    sol.diagnostics.iterations = report.iterations;
    sol.diagnostics.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(sol)
}

/// Seed for the arc search from a contact angle and time.
pub fn arc_seed(problem: &DiProblem, theta: f64, t1: f64, t2: Option<f64>) -> Result<ArcParameters> {
    let (t0, tf) = (problem.t0, problem.tf);
    let t1 = t1.clamp(t0 + 1e-3 * (tf - t0), tf - 2e-3 * (tf - t0));
    let t2 = match t2 {
        Some(t) if t > t1 && t < tf => t,
        _ => t1 + 0.05 * (tf - t1),
    };
    // Speed from the unconstrained velocity projected on the tangent.
    let cubic = super::cubic::di_unconstrained(problem)?;
    let tau = t1 - t0;
    let v = [eval(&cubic[0], tau, 1), eval(&cubic[1], tau, 1)];
    let speed = -theta.sin() * v[0] + theta.cos() * v[1];
    Ok(ArcParameters {
        theta,
        t1,
        t2,
        speed,
        exit_jump: 0.0,
    })
}

/// Constrained-arc solve seeded from the unconstrained violation: entry
/// and exit at the crossings, angle at the deepest point.
pub fn di_arc_solve(problem: &DiProblem) -> Result<DiSolution> {
    let (theta, t_deep) = violation_seed(problem)?;
    let (t1, t2) = violation_interval(problem)?.unwrap_or((t_deep, t_deep));
    let wide = arc_seed(problem, theta, t1, if t2 > t1 { Some(t2) } else { None })?;
    let short = arc_seed(problem, theta, t_deep - 0.02 * problem.horizon(), Some(t_deep + 0.02 * problem.horizon()))?;
    match di_arc_solve_from(problem, wide) {
        Ok(sol) => Ok(sol),
        Err(first) => di_arc_solve_from(problem, short).map_err(|_| first),
    }
}

pub fn di_arc_solve_from(problem: &DiProblem, seed: ArcParameters) -> Result<DiSolution> {
    arc_from(problem, seed, &RootOptions::square())
}

/// First and last time the unconstrained cubic is inside the clearance.
pub fn violation_interval(problem: &DiProblem) -> Result<Option<(f64, f64)>> {
    let c = super::cubic::di_unconstrained(problem)?;
    let n = super::solution::CLEARANCE_SAMPLES;
    let h = problem.horizon() / (n - 1) as f64;
    let inside: Vec<f64> = (0..n)
        .map(|i| i as f64 * h)
        .filter(|&tau| problem.clearance_at([eval(&c[0], tau, 0), eval(&c[1], tau, 0)]) < 0.0)
        .collect();
    Ok(match (inside.first(), inside.last()) {
        (Some(&a), Some(&b)) => Some((problem.t0 + a, problem.t0 + b)),
        _ => None,
    })
}
