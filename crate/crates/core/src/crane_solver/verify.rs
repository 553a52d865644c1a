use super::CraneSolution;
use crate::flat_model::sample_times;
use crate::optimality::{
    costate_ode_residual, crane_cost, el_residual, el_residual_analytic, reconstruct_costates,
    JunctionRecord, junction_continuity_check, Tolerances, VerificationReport,
};
use crate::Result;

/// Grid spacing for the finite-difference Euler-Lagrange residual.
pub const EL_GRID_STEP: f64 = 0.1;
/// Grid spacing for costate reconstruction.
pub const COSTATE_GRID_STEP: f64 = 0.01;
/// Interior points checked on the constrained arc.
pub const ARC_SAMPLES: usize = 100;

pub fn crane_tolerances() -> Tolerances {
    Tolerances::with_defaults(&[
        ("boundary", 1e-8),
        ("el_fd", 1e-6),
        ("el_exact", 1e-10),
        ("costate_ode", 1e-4),
        ("costate_top", 1e-12),
        ("state_continuity", 1e-8),
        ("snap_continuity", 1e-6),
        ("junction_continuity", 1e-6),
        ("arc_bound", 1e-9),
        ("tangency", 1e-9),
        ("constraint_excess", 1e-6),
    ])
}

pub(crate) fn uniform_grid(t0: f64, tf: f64, step: f64) -> Vec<f64> {
    let n = ((tf - t0) / step).round().max(8.0) as usize + 1;
    sample_times(t0, tf, n)
}

/// Optimality certificate of a crane solution. Euler-Lagrange and costate
/// checks cover the unconstrained segments; on the arc the bound itself
/// and the tangency rows are checked.
pub fn verify_crane(sol: &CraneSolution, tol: &Tolerances) -> Result<VerificationReport> {
    let p = sol.params;
    let (t0, tf) = (sol.boundary.t0, sol.boundary.tf);
    let cost = crane_cost(p.g, p.alpha);
    let traj = &sol.trajectory;
    let arc = sol.junctions.map(|_| 1usize);
    let free = |seg: usize| Some(seg) != arc;
    let mut report = VerificationReport::new();

    report.push("boundary", sol.diagnostics.boundary_residual, tol.get("boundary"));

    let el = el_residual(traj, &cost, &[], &uniform_grid(t0, tf, EL_GRID_STEP))?;
    report.push("el_fd", el.relative_sup_on(0, &free), tol.get("el_fd"));
    let grid = uniform_grid(t0, tf, COSTATE_GRID_STEP);
    let exact = el_residual_analytic(traj, &cost, &grid)?;
    report.push("el_exact", exact.relative_sup_on(0, &free), tol.get("el_exact"));

    let lam = reconstruct_costates(traj, &cost, &[], &grid)?;
    let ode = costate_ode_residual(traj, &cost, &[], &lam, &free)?;
    let worst = ode[0].iter().copied().fold(0.0, f64::max);
    report.push("costate_ode", worst, tol.get("costate_ode"));
    let mut top = 0.0_f64;
    for (i, &t) in grid.iter().enumerate() {
        let expected = -p.alpha * p.alpha * sol.y(t, 4)?;
        top = top.max((lam.values[0][3][i] - expected).abs());
    }
    report.push("costate_top", top, tol.get("costate_top"));

    if let (Some((t1, t2)), Some(side)) = (sol.junctions, sol.active_bound) {
        report.push("state_continuity", sol.diagnostics.state_continuity, tol.get("state_continuity"));
        report.push("snap_continuity", sol.diagnostics.snap_continuity, tol.get("snap_continuity"));
        let mut jc = 0.0_f64;
        for index in 0..2 {
            let rec = JunctionRecord::from_trajectory(traj, index, &[], None, 1e-6)?;
            jc = jc.max(junction_continuity_check(&rec, &cost));
        }
        report.push("junction_continuity", jc, tol.get("junction_continuity"));
        let bound = match side {
            super::BoundSide::Upper => p.p_max,
            super::BoundSide::Lower => p.p_min,
        };
        let mut on_arc = 0.0_f64;
        for i in 1..=ARC_SAMPLES {
            let t = t1 + (t2 - t1) * i as f64 / (ARC_SAMPLES + 1) as f64;
            on_arc = on_arc.max((sol.position(t)? - bound).abs());
        }
        report.push("arc_bound", on_arc, tol.get("arc_bound"));
        report.push("tangency", sol.diagnostics.tangency_residual, tol.get("tangency"));
    }
    report.push("constraint_excess", sol.diagnostics.max_constraint_excess.max(0.0), tol.get("constraint_excess"));
    Ok(report)
}
