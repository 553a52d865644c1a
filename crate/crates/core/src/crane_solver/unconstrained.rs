use std::time::Instant;

use super::solution::{CraneDiagnostics, CraneSolution};
use super::{CraneBoundary, CraneParams};
use crate::flat_model::{
    crane_boundary_to_flat, AnalyticSegment, Basis, FlatBoundary, IntegratorChainSpec,
    PiecewiseTrajectory, Term,
};
use crate::numerics::{lu_solve, DenseSystem, Matrix};
use crate::Result;

/// Basis of unconstrained crane segments: `1, τ, …, τ⁵, e^{rτ}, e^{−rτ}`.
pub fn unconstrained_basis(params: &CraneParams) -> [Basis; 8] {
    let r = params.rate();
    [
        Basis::Monomial(0),
        Basis::Monomial(1),
        Basis::Monomial(2),
        Basis::Monomial(3),
        Basis::Monomial(4),
        Basis::Monomial(5),
        Basis::Exp(r),
        Basis::Exp(-r),
    ]
}

pub(crate) fn unconstrained_segment(
    params: &CraneParams,
    t_start: f64,
    t_end: f64,
    t_ref: f64,
    coefficients: &[f64],
) -> Result<AnalyticSegment> {
    let terms = unconstrained_basis(params)
        .iter()
        .zip(coefficients)
        .map(|(b, c)| Term::new(*b, *c))
        .collect();
    AnalyticSegment::new(t_start, t_end, t_ref, terms)
}

/// Largest mismatch of `(y, ẏ, ÿ, y⁽³⁾)` against the flat boundary values.
pub(crate) fn boundary_residual(traj: &PiecewiseTrajectory, flat: &FlatBoundary) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for order in 0..4 {
        let a = traj.eval_chain(0, traj.t0(), order)? - flat.initial[order];
        let b = traj.eval_chain(0, traj.tf(), order)? - flat.terminal[order];
        worst = worst.max(a.abs()).max(b.abs());
    }
    Ok(worst)
}

/// Unconstrained optimum: one segment whose eight constants match
/// `(y, ẏ, ÿ, y⁽³⁾)` at both ends.
pub fn solve_unconstrained(params: &CraneParams, boundary: &CraneBoundary) -> Result<CraneSolution> {
    let start = Instant::now();
    params.validate()?;
    boundary.validate(params)?;
    let flat = crane_boundary_to_flat(boundary, params);
    let (t0, tf) = (boundary.t0, boundary.tf);
    let t_ref = 0.5 * (t0 + tf);
    let basis = unconstrained_basis(params);
    let mut a = Matrix::zeros(8, 8);
    let mut rhs = vec![0.0; 8];
    for order in 0..4 {
        for (j, b) in basis.iter().enumerate() {
            a[(order, j)] = b.derivative(t0 - t_ref, order);
            a[(4 + order, j)] = b.derivative(tf - t_ref, order);
        }
        rhs[order] = flat.initial[order];
        rhs[4 + order] = flat.terminal[order];
    }
    let sol = lu_solve(&DenseSystem::new(a, rhs)?)?;
    let seg = unconstrained_segment(params, t0, tf, t_ref, &sol.x)?;
    let trajectory = PiecewiseTrajectory::new(IntegratorChainSpec::single(4, "y")?, vec![vec![seg.into()]])?;
    let boundary_residual = boundary_residual(&trajectory, &flat)?;
    let diagnostics = CraneDiagnostics {
        boundary_residual,
        condition_estimate: sol.condition,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        ..CraneDiagnostics::default()
    };
    Ok(CraneSolution {
        params: *params,
        boundary: *boundary,
        trajectory,
        junctions: None,
        active_bound: None,
        diagnostics,
    })
}
