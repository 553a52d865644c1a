use serde::{Deserialize, Serialize};

use super::{CraneBoundary, CraneParams};
use crate::flat_model::{crane_from_flat, AnalyticSegment, PiecewiseTrajectory, Segment};
use crate::numerics::integrate_composite;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSide {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CraneDiagnostics {
    /// Largest mismatch over the eight flat boundary conditions.
    pub boundary_residual: f64,
    /// ∞-norm of the snap jump at the junctions.
    pub junction_residual: f64,
    /// ∞-norm of the tangency rows at entry, evaluated on the first segment.
    pub tangency_residual: f64,
    /// Largest jump of orders 0..=3 across junctions.
    pub state_continuity: f64,
    /// Largest jump of the snap y⁽⁴⁾ across junctions.
    pub snap_continuity: f64,
    pub max_constraint_excess: f64,
    pub condition_estimate: f64,
    pub iterations: usize,
    pub wall_time_ms: f64,
}

/// Result of a crane solve: one unconstrained segment, or
/// unconstrained–arc–unconstrained.
#[derive(Debug, Clone)]
pub struct CraneSolution {
    pub params: CraneParams,
    pub boundary: CraneBoundary,
    pub trajectory: PiecewiseTrajectory,
    pub junctions: Option<(f64, f64)>,
    pub active_bound: Option<BoundSide>,
    pub diagnostics: CraneDiagnostics,
}

impl CraneSolution {
    pub fn segments(&self) -> Vec<&AnalyticSegment> {
        self.trajectory
            .segments(0)
            .iter()
            .filter_map(Segment::as_analytic)
            .collect()
    }

    /// Integration constants of each segment in basis order.
    pub fn constants(&self) -> Vec<Vec<f64>> {
        self.segments()
            .iter()
            .map(|s| s.terms.iter().map(|t| t.coefficient).collect())
            .collect()
    }

    pub fn y(&self, t: f64, order: usize) -> Result<f64> {
        self.trajectory.eval_chain(0, t, order)
    }

    /// Trolley reference position `y + (l/g)ÿ`.
    pub fn position(&self, t: f64) -> Result<f64> {
        Ok(self.y(t, 0)? + self.params.l / self.params.g * self.y(t, 2)?)
    }

    /// `½∫ (y⁽³⁾/g)² + (α y⁽⁴⁾)² dt`.
    pub fn cost(&self) -> f64 {
        let p = self.params;
        let mut total = 0.0;
        for seg in self.trajectory.segments(0) {
            let f = |t: f64| {
                let j = seg.derivative(t, 3) / p.g;
                let s = p.alpha * seg.derivative(t, 4);
                0.5 * (j * j + s * s)
            };
            total += integrate_composite(f, seg.t_start(), seg.t_end(), 32, 12);
        }
        total
    }

    /// Trolley position, cable angle and force at `t`.
    pub fn original(&self, t: f64) -> Result<crate::flat_model::CraneOriginal> {
        Ok(crane_from_flat(
            self.y(t, 0)?,
            self.y(t, 2)?,
            self.y(t, 3)?,
            self.y(t, 4)?,
            &self.params,
        ))
    }
}
