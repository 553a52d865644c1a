use std::time::Instant;

use super::junction::{assemble_junction_system, junction_residual, ConstrainedCoefficients};
use super::solution::{BoundSide, CraneDiagnostics, CraneSolution};
use super::unconstrained::{boundary_residual, solve_unconstrained};
use super::violation::{constraint_violation, max_constraint_excess, Violation};
use super::{CraneBoundary, CraneParams};
use crate::flat_model::{crane_boundary_to_flat, IntegratorChainSpec, PiecewiseTrajectory, Segment};
use crate::numerics::{newton_root, ExpGapTransform, RootOptions};
use crate::{Error, Result};

/// Excess over the bound tolerated in the final audit.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ConstrainedOptions {
    pub root: RootOptions,
}

impl Default for ConstrainedOptions {
    fn default() -> Self {
        Self {
            root: RootOptions::square(),
        }
    }
}

/// Coefficients and snap residual for fixed junction times.
pub fn junction_solve(
    t1: f64,
    t2: f64,
    params: &CraneParams,
    boundary: &CraneBoundary,
    side: BoundSide,
) -> Result<(ConstrainedCoefficients, [f64; 2], f64)> {
    let sys = assemble_junction_system(t1, t2, params, boundary, side)?;
    let (coefficients, condition) = sys.solve()?;
    let residual = junction_residual(&coefficients, t1, t2, params);
    Ok((coefficients, residual, condition))
}

/// Single-arc solve: returns the unconstrained optimum when it is already
/// feasible, otherwise root-finds the junction times of an
/// unconstrained–arc–unconstrained trajectory.
pub fn solve_constrained(params: &CraneParams, boundary: &CraneBoundary) -> Result<CraneSolution> {
    solve_constrained_with(params, boundary, &ConstrainedOptions::default())
}

pub fn solve_constrained_with(
    params: &CraneParams,
    boundary: &CraneBoundary,
    options: &ConstrainedOptions,
) -> Result<CraneSolution> {
    let start = Instant::now();
    let mut unconstrained = solve_unconstrained(params, boundary)?;
    let violations = constraint_violation(&unconstrained, params)?;
    let Some(worst) = violations
        .iter()
        .copied()
        .max_by(|a, b| a.duration().total_cmp(&b.duration()))
    else {
        unconstrained.diagnostics.max_constraint_excess = max_constraint_excess(&unconstrained, params);
        unconstrained.diagnostics.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        return Ok(unconstrained);
    };
    let mut sol = solve_from_seed(params, boundary, worst, options)?;
    sol.diagnostics.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(sol)
}

/// Root-find from an explicit violation interval.
pub fn solve_from_seed(
    params: &CraneParams,
    boundary: &CraneBoundary,
    seed: Violation,
    options: &ConstrainedOptions,
) -> Result<CraneSolution> {
    let side = seed.side;
    let transform = ExpGapTransform::new(boundary.t0, boundary.tf, vec![0, 1]);
    let report = newton_root(
        |x: &[f64]| {
            let (_, r, _) = junction_solve(x[0], x[1], params, boundary, side)?;
            Ok(r.to_vec())
        },
        &[seed.start, seed.end],
        &transform,
        &options.root,
    )?;
    let (t1, t2) = (report.x[0], report.x[1]);
    let (coefficients, residual, condition) = junction_solve(t1, t2, params, boundary, side)?;
    let segs = coefficients.segments(params, boundary.t0, t1, t2, boundary.tf)?;
    let trajectory = PiecewiseTrajectory::new(
        IntegratorChainSpec::single(4, "y")?,
        vec![segs.iter().cloned().map(Segment::from).collect()],
    )?;
    let flat = crane_boundary_to_flat(boundary, params);
    let state_continuity = (0..4)
        .map(|k| trajectory.max_jump(k)[0])
        .fold(0.0, f64::max);
    let snap_continuity = trajectory.max_jump(4)[0];
    let (l, g) = (params.l, params.g);
    let entry = &segs[0];
    let tangency_residual = (entry.derivative(t1, 0) + l / g * entry.derivative(t1, 2) - coefficients.bound)
        .abs()
        .max((entry.derivative(t1, 1) + l / g * entry.derivative(t1, 3)).abs());
    let mut sol = CraneSolution {
        params: *params,
        boundary: *boundary,
        trajectory,
        junctions: Some((t1, t2)),
        active_bound: Some(side),
        diagnostics: CraneDiagnostics {
            boundary_residual: 0.0,
            junction_residual: residual[0].abs().max(residual[1].abs()),
            tangency_residual,
            state_continuity,
            snap_continuity,
            max_constraint_excess: 0.0,
            condition_estimate: condition,
            iterations: report.iterations,
            wall_time_ms: 0.0,
        },
    };
    sol.diagnostics.boundary_residual = boundary_residual(&sol.trajectory, &flat)?;
    sol.diagnostics.max_constraint_excess = max_constraint_excess(&sol, params);
    for v in constraint_violation(&sol, params)? {
        if v.max_excess <= FEASIBILITY_TOL {
            continue;
        }
        if v.side != side {
            return Err(Error::Unsupported(format!(
                "solution violates the opposite bound by {:.3e} on [{:.4}, {:.4}]",
                v.max_excess, v.start, v.end
            )));
        }
        return Err(Error::Infeasible(format!(
            "single-arc solution still exceeds the bound by {:.3e} on [{:.4}, {:.4}]",
            v.max_excess, v.start, v.end
        )));
    }
    Ok(sol)
}
