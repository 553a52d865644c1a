//! Open-loop crane rollouts under the flat force, and a discrete LQ cost
//! oracle for integrator chains.

mod compare;
mod dynamics;
mod oracle;
mod rollout;

pub use compare::{compare, SegmentSwing, TrackingMetrics};
pub use dynamics::{
    crane_energy, crane_model, crane_models, crane_rhs_full, crane_rhs_smallangle, CraneDynamics,
    CraneState, FullDynamics, SmallAngleDynamics,
};
pub use oracle::{di_lq_oracle, lq_oracle, ChainQp, MIN_INTERVALS};
pub use rollout::{open_loop_force, rollout, write_sim_csv, SimConfig, SimDiagnostics, SimResult};
