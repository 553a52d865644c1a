use serde::{Deserialize, Serialize};

use super::trajectory::IntegratorChainSpec;
use crate::crane_solver::{CraneBoundary, CraneParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnicycleState {
    pub px: f64,
    pub py: f64,
    pub theta: f64,
    /// Forward speed.
    pub u1: f64,
    /// Turn rate.
    pub u2: f64,
}

/// Unicycle pose and inputs from the planar position outputs.
pub fn unicycle_from_flat(y: [f64; 2], dy: [f64; 2], d2y: [f64; 2]) -> Result<UnicycleState> {
    let speed2 = dy[0] * dy[0] + dy[1] * dy[1];
    if speed2 == 0.0 {
        return Err(Error::FlatnessSingularity(
            "unicycle heading undefined at zero speed".into(),
        ));
    }
    Ok(UnicycleState {
        px: y[0],
        py: y[1],
        theta: dy[1].atan2(dy[0]),
        u1: speed2.sqrt(),
        u2: (d2y[1] * dy[0] - dy[1] * d2y[0]) / speed2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CraneOriginal {
    pub p: f64,
    pub theta: f64,
    pub force: f64,
}

/// Trolley position, cable angle and force from the flat output jet.
pub fn crane_from_flat(y: f64, d2y: f64, d3y: f64, d4y: f64, params: &CraneParams) -> CraneOriginal {
    let (g, l) = (params.g, params.l);
    CraneOriginal {
        p: y + (l / g) * d2y,
        theta: -d2y / g,
        force: crane_force(d2y, d3y, d4y, params),
    }
}

pub fn crane_force(d2y: f64, d3y: f64, d4y: f64, params: &CraneParams) -> f64 {
    let CraneParams { big_m, m, g, l, .. } = *params;
    (big_m + m) * (d2y + (l / g) * d4y) + m * l * (-d4y / g + (d2y / g) * (d3y / g).powi(2))
}

/// Original state `(p, ṗ, θ, θ̇)` from `(y, ẏ, ÿ, y⁽³⁾)`.
pub fn crane_state_from_flat(s: [f64; 4], params: &CraneParams) -> [f64; 4] {
    let (g, l) = (params.g, params.l);
    [
        s[0] + (l / g) * s[2],
        s[1] + (l / g) * s[3],
        -s[2] / g,
        -s[3] / g,
    ]
}

/// Flat state `(y, ẏ, ÿ, y⁽³⁾)` from `(p, ṗ, θ, θ̇)`.
pub fn crane_flat_from_state(x: [f64; 4], params: &CraneParams) -> [f64; 4] {
    let (g, l) = (params.g, params.l);
    [x[0] + l * x[2], x[1] + l * x[3], -g * x[2], -g * x[3]]
}

/// Flat boundary values: `(y, ẏ, ÿ, y⁽³⁾)` at `t0` and at `tf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatBoundary {
    pub initial: [f64; 4],
    pub terminal: [f64; 4],
}

pub fn crane_boundary_to_flat(boundary: &CraneBoundary, params: &CraneParams) -> FlatBoundary {
    let initial = crane_flat_from_state(
        [boundary.p0, boundary.pdot0, boundary.theta0, boundary.thetadot0],
        params,
    );
    FlatBoundary {
        initial,
        terminal: [boundary.pf, 0.0, 0.0, 0.0],
    }
}

/// Flat ↔ original coordinate maps of one system.
pub trait FlatMap {
    fn name(&self) -> &str;
    fn chains(&self) -> IntegratorChainSpec;
    /// Flat state from original state and input.
    fn flat_state(&self, state: &[f64], input: &[f64]) -> Vec<f64>;
    fn state_from_flat(&self, s: &[f64]) -> Result<Vec<f64>>;
    fn input_from_flat(&self, s: &[f64], a: &[f64]) -> Result<Vec<f64>>;
    /// Whether the backward maps are defined at `s`.
    fn in_domain(&self, s: &[f64]) -> bool;
}

/// Unicycle with flat state `(y₁, ẏ₁, y₂, ẏ₂)`, state `(p_x, p_y, θ)`
/// and input `(u₁, u₂)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnicycleMap;

impl FlatMap for UnicycleMap {
    fn name(&self) -> &str {
        "unicycle"
    }

    fn chains(&self) -> IntegratorChainSpec {
        IntegratorChainSpec::new(vec![2, 2], vec!["x".into(), "y".into()]).expect("static spec")
    }

    fn flat_state(&self, state: &[f64], input: &[f64]) -> Vec<f64> {
        let (c, s) = (state[2].cos(), state[2].sin());
        vec![state[0], input[0] * c, state[1], input[0] * s]
    }

    fn state_from_flat(&self, s: &[f64]) -> Result<Vec<f64>> {
        let u = unicycle_from_flat([s[0], s[2]], [s[1], s[3]], [0.0, 0.0])?;
        Ok(vec![u.px, u.py, u.theta])
    }

    fn input_from_flat(&self, s: &[f64], a: &[f64]) -> Result<Vec<f64>> {
        let u = unicycle_from_flat([s[0], s[2]], [s[1], s[3]], [a[0], a[1]])?;
        Ok(vec![u.u1, u.u2])
    }

    fn in_domain(&self, s: &[f64]) -> bool {
        s[1] != 0.0 || s[3] != 0.0
    }
}

/// Small-angle crane with flat state `(y, ẏ, ÿ, y⁽³⁾)`, state
/// `(p, ṗ, θ, θ̇)` and input `F`.
#[derive(Debug, Clone, Copy)]
pub struct CraneMap {
    pub params: CraneParams,
}

impl FlatMap for CraneMap {
    fn name(&self) -> &str {
        "crane"
    }

    fn chains(&self) -> IntegratorChainSpec {
        IntegratorChainSpec::single(4, "y").expect("static spec")
    }

    fn flat_state(&self, state: &[f64], _input: &[f64]) -> Vec<f64> {
        crane_flat_from_state([state[0], state[1], state[2], state[3]], &self.params).to_vec()
    }

    fn state_from_flat(&self, s: &[f64]) -> Result<Vec<f64>> {
        Ok(crane_state_from_flat([s[0], s[1], s[2], s[3]], &self.params).to_vec())
    }

    fn input_from_flat(&self, s: &[f64], a: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![crane_force(s[2], s[3], a[0], &self.params)])
    }

    fn in_domain(&self, _s: &[f64]) -> bool {
        true
    }
}
