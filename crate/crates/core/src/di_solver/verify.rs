use std::sync::Arc;

use super::solution::{DiCase, DiSolution};
use crate::flat_model::sample_times;
use crate::optimality::{
    build_tangency, double_integrator_cost, el_residual_analytic, free_boundary_residual,
    interior_jump_residual, junction_continuity_check, reconstruct_costates, BoundaryCondition,
    BoundaryEnd, CircularObstacle, ConstraintStack, JunctionRecord, Tolerances,
    TransversalitySpec, VerificationReport,
};
use crate::Result;

pub fn di_tolerances() -> Tolerances {
    Tolerances::with_defaults(&[
        ("boundary", 1e-6),
        ("clearance", 1e-9),
        ("control_jump", 1e-8),
        ("radial_velocity", 1e-8),
        ("tangential_jerk_jump", 1e-6),
        ("jump_condition", 1e-6),
        ("junction_continuity", 1e-6),
        ("transversality", 1e-6),
        ("el_exact", 1e-10),
        ("costate", 1e-8),
        ("first_integral", 1e-6),
    ])
}

/// Optimality certificate of a double-integrator solution.
pub fn verify_di(sol: &DiSolution, tol: &Tolerances) -> Result<VerificationReport> {
    let cost = double_integrator_cost();
    let traj = &sol.trajectory;
    let d = &sol.diagnostics;
    let arc = if sol.case == DiCase::Arc { Some(1usize) } else { None };
    let free = |seg: usize| Some(seg) != arc;
    let mut report = VerificationReport::new();
    report.push("boundary", d.boundary_residual, tol.get("boundary"));
    report.push("clearance", (-sol.min_clearance).max(0.0), tol.get("clearance"));
    if !traj.junction_times().is_empty() {
        report.push("control_jump", d.control_jump, tol.get("control_jump"));
        report.push("radial_velocity", d.radial_velocity, tol.get("radial_velocity"));
        report.push("tangential_jerk_jump", d.tangential_jerk_jump, tol.get("tangential_jerk_jump"));
        let mut cont = 0.0_f64;
        for i in 0..traj.junction_times().len() {
            let rec = JunctionRecord::from_trajectory(traj, i, &[], None, 1e-6)?;
            cont = cont.max(junction_continuity_check(&rec, &cost));
        }
        report.push("junction_continuity", cont, tol.get("junction_continuity"));
    }
    if sol.case == DiCase::Touch {
        let obstacle = CircularObstacle {
            center: sol.problem.obstacle.center,
            clearance: sol.problem.obstacle.clearance,
        };
        let tangency = build_tangency(&ConstraintStack::inactive(Arc::new(obstacle)))?;
        let pi = vec![sol.pi.unwrap_or(0.0), 0.0];
        let rec = JunctionRecord::from_trajectory(traj, 0, std::slice::from_ref(&tangency), Some(pi), 1e-6)?;
        let (r1, r2) = interior_jump_residual(&rec, &cost, std::slice::from_ref(&tangency))?;
        report.push("jump_condition", r1.abs().max(r2.abs()), tol.get("jump_condition"));
    }
    let mut spec = TransversalitySpec::fixed_from(traj)?;
    for chain in 0..2 {
        spec = spec.with_condition(BoundaryEnd::Terminal, chain, 1, BoundaryCondition::Free);
    }
    let mut trans = 0.0_f64;
    for chain in 0..2 {
        trans = trans.max(free_boundary_residual(traj, &cost, &[], &spec, chain, 1, BoundaryEnd::Terminal)?.abs());
    }
    report.push("transversality", trans, tol.get("transversality"));

    let (t0, tf) = (sol.problem.t0, sol.problem.tf);
    let grid = sample_times(t0, tf, 1001);
    let el = el_residual_analytic_on(sol, &grid, &free)?;
    report.push("el_exact", el, tol.get("el_exact"));
    // λ^p = u̇ on the cubic segments.
    let lam = reconstruct_costates(traj, &cost, &[], &grid)?;
    let mut worst = 0.0_f64;
    for (i, &t) in grid.iter().enumerate() {
        let seg = traj.segment_index(t, crate::flat_model::Side::Left)?;
        if !free(seg) {
            continue;
        }
        for chain in 0..2 {
            let jerk = traj.eval_segment(seg, chain, t, 3)?;
            let u = traj.eval_segment(seg, chain, t, 2)?;
            worst = worst
                .max((lam.values[chain][0][i] - jerk).abs())
                .max((lam.values[chain][1][i] + u).abs());
        }
    }
    report.push("costate", worst, tol.get("costate"));
    if sol.case == DiCase::Arc {
        report.push("first_integral", d.first_integral_drift, tol.get("first_integral"));
    }
    Ok(report)
}

fn el_residual_analytic_on(
    sol: &DiSolution,
    grid: &[f64],
    keep: &dyn Fn(usize) -> bool,
) -> Result<f64> {
    if sol.case == DiCase::Arc {
        // Only the cubic pieces carry closed forms; evaluate them directly.
        let mut worst = 0.0_f64;
        for &t in grid {
            let seg = sol.trajectory.segment_index(t, crate::flat_model::Side::Left)?;
            if keep(seg) {
                for chain in 0..2 {
                    worst = worst.max(sol.trajectory.eval_segment(seg, chain, t, 4)?.abs());
                }
            }
        }
        return Ok(worst);
    }
    let el = el_residual_analytic(&sol.trajectory, &double_integrator_cost(), grid)?;
    Ok((0..2).map(|c| el.relative_sup_on(c, keep)).fold(0.0, f64::max))
}
