//! Optimality certification: costates from state and control, the
//! costate-free Euler-Lagrange residual, tangency stacks, junction jump
//! conditions and boundary transversality.

mod boundary;
mod constraint;
mod cost;
mod costate;
mod junction;
mod report;

pub use boundary::{
    free_boundary_residual, free_time_residual, BoundaryCondition, BoundaryEnd,
    TerminalFunction, TransversalitySpec,
};
pub use constraint::{
    build_tangency, CircularObstacle, ConstraintStack, ControlBound, CranePositionBound,
    MultiplierFn, StateConstraint, Tangency,
};
pub use cost::{
    check_partials, crane_cost, double_integrator_cost, FnCost, Jet, QuadraticCost, RunningCost,
    TerminalCost,
};
pub use costate::{
    costate_ode_residual, el_residual, el_residual_analytic, reconstruct_costates,
    CostateTrajectory, ElResidual,
};
pub use junction::{interior_jump_residual, junction_continuity_check, JunctionRecord};
pub use report::{Check, Tolerances, VerificationReport};
