//! Planar double integrator around a circular obstacle: zero-snap cubics,
//! instantaneous contact, and a constrained arc on the clearance circle.

mod arc;
mod arc_solve;
mod cubic;
mod io;
mod problem;
mod solution;
mod strategy;
mod touch;
mod verify;

pub use arc::{arc_step, integrate_arc, ArcCurve, ArcSamples, ArcState};
pub use arc_solve::{
    arc_seed, di_arc_solve, di_arc_solve_from, violation_interval, ArcParameters, ARC_MAX_STEP,
};
pub use cubic::{cubic_cost, cubic_segment, di_unconstrained, Cubic};
pub use io::{write_di_csv, DiSummary};
pub use problem::{DiProblem, Obstacle};
pub use solution::{DiCase, DiDiagnostics, DiSolution, CLEARANCE_SAMPLES};
pub use strategy::{
    default_strategies, di_escalate, di_escalate_with, is_feasible, strategy_by_name,
    ArcStrategy, Escalation, PrimitiveStrategy, StepReport, TouchStrategy, UnconstrainedStrategy,
    WarmStart, BOUNDARY_TOL, CLEARANCE_TOL,
};
pub use touch::{di_touch_solve, touch_inner, touch_system, violation_seed, TOUCH_EQUATIONS, TOUCH_UNKNOWNS};
pub use verify::{di_tolerances, verify_di};
