//! Flat-space trajectories as piecewise closed-form segments, plus the
//! flat ↔ original maps of the unicycle and the crane.

mod io;
mod maps;
mod segment;
mod trajectory;

pub use io::{sample_times, segments_json, write_trajectory_csv};
pub use maps::{
    crane_boundary_to_flat, crane_flat_from_state, crane_force, crane_from_flat,
    crane_state_from_flat, unicycle_from_flat, CraneMap, CraneOriginal, FlatBoundary, FlatMap,
    UnicycleMap, UnicycleState,
};
pub use segment::{AnalyticSegment, Basis, ChainCurve, Segment, Term, MAX_ORDER};
pub use trajectory::{IntegratorChainSpec, PiecewiseTrajectory, Side, CONTINUITY_TOL};
