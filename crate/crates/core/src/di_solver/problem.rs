use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub center: [f64; 2],
    /// Obstacle radius plus agent radius.
    pub clearance: f64,
}

/// Planar double integrator `p̈ = u` around one circular obstacle, with
/// free final velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiProblem {
    pub p0: [f64; 2],
    pub v0: [f64; 2],
    pub pf: [f64; 2],
    pub t0: f64,
    pub tf: f64,
    pub obstacle: Obstacle,
}

pub(crate) fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

pub(crate) fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

impl DiProblem {
    /// The reference obstacle-avoidance instance.
    pub fn reference() -> Self {
        Self {
            p0: [-2.0, -2.0],
            v0: [0.0, 0.0],
            pf: [1.0, 2.0],
            t0: 0.0,
            tf: 10.0,
            obstacle: Obstacle {
                center: [0.0, 0.0],
                clearance: 1.25,
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn horizon(&self) -> f64 {
        self.tf - self.t0
    }

    pub fn validate(&self) -> Result<()> {
        let values = [
            self.p0[0], self.p0[1], self.v0[0], self.v0[1], self.pf[0], self.pf[1], self.t0,
            self.tf, self.obstacle.center[0], self.obstacle.center[1], self.obstacle.clearance,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite problem data".into()));
        }
        if !(self.tf > self.t0) {
            return Err(Error::InvalidParameter(format!(
                "horizon [{}, {}] is empty",
                self.t0, self.tf
            )));
        }
        if !(self.obstacle.clearance > 0.0) {
            return Err(Error::InvalidParameter("clearance must be positive".into()));
        }
        let d = self.obstacle.clearance;
        for (name, p) in [("p0", self.p0), ("pf", self.pf)] {
            let dist = norm(sub(p, self.obstacle.center));
            if dist <= d {
                return Err(Error::InvalidParameter(format!(
                    "{name} lies within the clearance ({dist:.4} <= {d})"
                )));
            }
        }
        Ok(())
    }

    /// Signed distance to the clearance circle: positive outside.
    pub fn clearance_at(&self, p: [f64; 2]) -> f64 {
        norm(sub(p, self.obstacle.center)) - self.obstacle.clearance
    }
}
