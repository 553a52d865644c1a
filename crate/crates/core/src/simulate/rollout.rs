use serde::{Deserialize, Serialize};

use super::dynamics::{crane_energy, CraneDynamics, CraneState};
use crate::crane_solver::{CraneParams, CraneSolution};
use crate::flat_model::crane_force;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t0: f64,
    pub dt: f64,
    pub horizon: f64,
    pub initial: CraneState,
}

impl SimConfig {
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !(self.horizon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt and horizon must be positive (got {}, {})",
                self.dt, self.horizon
            )));
        }
        let ratio = self.horizon / self.dt;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon {} is not a multiple of dt {}",
                self.horizon, self.dt
            )));
        }
        Ok(n as usize)
    }

    /// Rollout over a solution's horizon from its boundary state.
    pub fn for_solution(sol: &CraneSolution, dt: f64) -> Self {
        let b = sol.boundary;
        Self {
            t0: b.t0,
            dt,
            horizon: b.tf - b.t0,
            initial: [b.p0, b.pdot0, b.theta0, b.thetadot0],
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SimDiagnostics {
    pub peak_theta: f64,
    /// `max |E(t) − E(t0)| / max(|E(t0)|, 1)`.
    pub energy_drift: f64,
    pub max_position_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub model: String,
    pub times: Vec<f64>,
    pub states: Vec<CraneState>,
    pub forces: Vec<f64>,
    pub diagnostics: SimDiagnostics,
}

/// Classical fixed-step RK4 with the force evaluated at each stage time.
pub fn rollout(
    dynamics: &dyn CraneDynamics,
    force: &dyn Fn(f64) -> f64,
    config: &SimConfig,
    params: &CraneParams,
) -> Result<SimResult> {
    let n = config.steps()?;
    let h = config.dt;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut forces = Vec::with_capacity(n + 1);
    let mut x = config.initial;
    let e0 = crane_energy(&x, params);
    let mut drift = 0.0_f64;
    let mut peak = x[2].abs();
    let add = |a: &CraneState, k: &CraneState, f: f64| [0, 1, 2, 3].map(|i| a[i] + f * k[i]);
    for i in 0..=n {
        let t = config.t0 + i as f64 * h;
        times.push(t);
        states.push(x);
        forces.push(force(t));
        if i == n {
            break;
        }
        let fm = force(t + 0.5 * h);
        let k1 = dynamics.rhs(&x, forces[i], params);
        let k2 = dynamics.rhs(&add(&x, &k1, 0.5 * h), fm, params);
        let k3 = dynamics.rhs(&add(&x, &k2, 0.5 * h), fm, params);
        let k4 = dynamics.rhs(&add(&x, &k3, h), force(t + h), params);
        x = [0, 1, 2, 3].map(|j| x[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        peak = peak.max(x[2].abs());
        drift = drift.max((crane_energy(&x, params) - e0).abs());
    }
    Ok(SimResult {
        model: dynamics.name().to_string(),
        times,
        states,
        forces,
        diagnostics: SimDiagnostics {
            peak_theta: peak,
            energy_drift: drift / e0.abs().max(1.0),
            max_position_error: None,
        },
    })
}

/// Cart force from the flat reference, evaluated in closed form.
pub fn open_loop_force(sol: &CraneSolution) -> impl Fn(f64) -> f64 + '_ {
    move |t| {
        let t = t.clamp(sol.boundary.t0, sol.boundary.tf);
        let d = |k| sol.y(t, k).unwrap_or(f64::NAN);
        crane_force(d(2), d(3), d(4), &sol.params)
    }
}

pub fn write_sim_csv<W: std::io::Write>(sim: &SimResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "p", "pdot", "theta", "thetadot", "F"])?;
    for ((t, x), f) in sim.times.iter().zip(&sim.states).zip(&sim.forces) {
        w.write_record([t, &x[0], &x[1], &x[2], &x[3], f].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
