//! Overhead crane: unconstrained closed-form solve and the single-arc
//! position-bound solve.

mod constrained;
mod io;
mod junction;
mod params;
mod solution;
mod unconstrained;
mod verify;
mod violation;

pub use constrained::{
    junction_solve, solve_constrained, solve_constrained_with, solve_from_seed, ConstrainedOptions,
    FEASIBILITY_TOL,
};
pub use junction::{
    arc_segment, assemble_junction_system, assemble_junction_system_with_refs, junction_residual, ConstrainedCoefficients,
    JunctionSystem, CLOSING_ORDER,
};
pub use params::{CraneBoundary, CraneParams};
pub use solution::{BoundSide, CraneDiagnostics, CraneSolution};
pub use unconstrained::{solve_unconstrained, unconstrained_basis};
pub use violation::{constraint_violation, max_constraint_excess, scan_violations, Violation, TOUCH_TOL, VIOLATION_SAMPLES};
pub use io::{write_crane_csv, CraneConfig, CraneSummary};
pub use verify::{crane_tolerances, verify_crane, ARC_SAMPLES, COSTATE_GRID_STEP, EL_GRID_STEP};
