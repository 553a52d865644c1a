use std::sync::Arc;

use num_complex::Complex64;
use serde_json::json;

use super::problem::Obstacle;
use crate::flat_model::{ChainCurve, MAX_ORDER};
use crate::{Error, Result};

/// `(φ, φ̇, φ̈, φ‴)` of the contact angle.
pub type ArcState = [f64; 4];

fn rhs(s: &ArcState) -> ArcState {
    [s[1], s[2], s[3], 6.0 * s[1] * s[1] * s[2]]
}

fn rk4_step(s: &ArcState, h: f64) -> ArcState {
    let add = |a: &ArcState, k: &ArcState, f: f64| [0, 1, 2, 3].map(|i| a[i] + f * k[i]);
    let k1 = rhs(s);
    let k2 = rhs(&add(s, &k1, 0.5 * h));
    let k3 = rhs(&add(s, &k2, 0.5 * h));
    let k4 = rhs(&add(s, &k3, h));
    [0, 1, 2, 3].map(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Fixed-step RK4 samples of `φ⁗ = 6φ̇²φ̈` on the clearance circle.
#[derive(Debug, Clone)]
pub struct ArcSamples {
    pub obstacle: Obstacle,
    pub t_start: f64,
    pub step: f64,
    pub states: Vec<ArcState>,
}

/// Integrates the arc from `entry` over `duration`; `step` must divide the
/// duration.
pub fn integrate_arc(
    obstacle: Obstacle,
    t_start: f64,
    entry: ArcState,
    duration: f64,
    step: f64,
) -> Result<ArcSamples> {
    if !(duration > 0.0) || !(step > 0.0) || entry.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "arc needs positive duration and step (got {duration}, {step})"
        )));
    }
    let ratio = duration / step;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * n.max(1.0) || n < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "step {step} does not divide duration {duration}"
        )));
    }
    let n = n as usize;
    let mut states = Vec::with_capacity(n + 1);
    states.push(entry);
    for i in 0..n {
        let next = rk4_step(&states[i], step);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("arc integration diverged".into()));
        }
        states.push(next);
    }
    Ok(ArcSamples {
        obstacle,
        t_start,
        step,
        states,
    })
}

/// Step for a duration: the largest `duration / n` not above `max_step`.
pub fn arc_step(duration: f64, max_step: f64) -> f64 {
    duration / (duration / max_step).ceil().max(1.0)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl ArcSamples {
    pub fn t_end(&self) -> f64 {
        self.t_start + self.step * (self.states.len() - 1) as f64
    }

    pub fn duration(&self) -> f64 {
        self.t_end() - self.t_start
    }

    pub fn entry(&self) -> ArcState {
        self.states[0]
    }

    pub fn exit(&self) -> ArcState {
        *self.states.last().expect("at least one sample")
    }

    /// State at `t` by one partial RK4 step from the nearest earlier sample.
    pub fn state_at(&self, t: f64) -> ArcState {
        let last = self.states.len() - 1;
        let x = (t - self.t_start) / self.step;
        let i = (x.floor().max(0.0) as usize).min(last);
        let dt = t - (self.t_start + i as f64 * self.step);
        if dt.abs() <= 1e-12 * self.step {
            return self.states[i];
        }
        rk4_step(&self.states[i], dt)
    }

    /// `φ̇, φ̈, …` up to `count` entries, extending the state through the
    /// differentiated arc equation.
    fn rate_derivatives(s: &ArcState, count: usize) -> Vec<f64> {
        let mut psi = vec![s[1], s[2], s[3]];
        let mut sq: Vec<f64> = Vec::new();
        while psi.len() < count {
            let m = psi.len() - 3;
            while sq.len() <= m {
                let j = sq.len();
                sq.push((0..=j).map(|i| binomial(j, i) * psi[i] * psi[j - i]).sum());
            }
            let next: f64 = (0..=m).map(|j| binomial(m, j) * sq[j] * psi[m - j + 1]).sum();
            psi.push(6.0 * next);
        }
        psi.truncate(count);
        psi
    }

    /// Position derivatives `p^{(n)}`, `n = 0..=max_order`, as complex numbers.
    pub fn position_jet(&self, t: f64, max_order: usize) -> Vec<Complex64> {
        let s = self.state_at(t);
        let psi = Self::rate_derivatives(&s, max_order.max(1));
        let mut w = vec![Complex64::from_polar(1.0, s[0])];
        for n in 1..=max_order {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += binomial(n - 1, k) * psi[k] * w[n - 1 - k];
            }
            w.push(Complex64::i() * acc);
        }
        let d = self.obstacle.clearance;
        let c = Complex64::new(self.obstacle.center[0], self.obstacle.center[1]);
        w.iter()
            .enumerate()
            .map(|(n, z)| if n == 0 { c + d * z } else { d * z })
            .collect()
    }

    /// `u̇·v − ½‖u‖²` at `t`.
    pub fn first_integral(&self, t: f64) -> f64 {
        let j = self.position_jet(t, 3);
        let dot = |a: Complex64, b: Complex64| a.re * b.re + a.im * b.im;
        dot(j[3], j[1]) - 0.5 * dot(j[2], j[2])
    }
}

/// One axis of an arc as a chain segment.
#[derive(Debug, Clone)]
pub struct ArcCurve {
    pub samples: Arc<ArcSamples>,
    pub axis: usize,
}

impl ArcCurve {
    pub fn pair(samples: ArcSamples) -> (Self, Self) {
        let samples = Arc::new(samples);
        (
            Self {
                samples: samples.clone(),
                axis: 0,
            },
            Self { samples, axis: 1 },
        )
    }
}

impl ChainCurve for ArcCurve {
    fn t_start(&self) -> f64 {
        self.samples.t_start
    }

    fn t_end(&self) -> f64 {
        self.samples.t_end()
    }

    fn derivative(&self, t: f64, order: usize) -> f64 {
        if order > MAX_ORDER {
            return f64::NAN;
        }
        let z = self.samples.position_jet(t, order)[order];
        if self.axis == 0 {
            z.re
        } else {
            z.im
        }
    }

    fn describe(&self) -> serde_json::Value {
        let s = &self.samples;
        json!({
            "kind": "circular_arc",
            "axis": self.axis,
            "center": s.obstacle.center,
            "clearance": s.obstacle.clearance,
            "step": s.step,
            "entry": s.entry(),
            "exit": s.exit(),
        })
    }
}
