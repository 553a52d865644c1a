use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical crane constants and the payload position bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CraneParams {
    /// Trolley mass, kg.
    pub big_m: f64,
    /// Payload mass, kg.
    pub m: f64,
    pub g: f64,
    /// Cable length, m.
    pub l: f64,
    /// Weight of the snap term in the running cost.
    pub alpha: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl Default for CraneParams {
    fn default() -> Self {
        Self {
            big_m: 200.0,
            m: 50.0,
            g: 9.81,
            l: 5.0,
            alpha: 0.5,
            p_min: -10.0,
            p_max: 10.0,
        }
    }
}

impl CraneParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("M", self.big_m),
            ("m", self.m),
            ("g", self.g),
            ("l", self.l),
            ("alpha", self.alpha),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.p_min < self.p_max) {
            return Err(Error::InvalidParameter(format!(
                "p_min {} must be below p_max {}",
                self.p_min, self.p_max
            )));
        }
        Ok(())
    }

    /// Exponential rate `1/(αg)` of the unconstrained basis.
    pub fn rate(&self) -> f64 {
        1.0 / (self.alpha * self.g)
    }

    /// Pendulum frequency `√(g/l)` of the constrained arc.
    pub fn omega(&self) -> f64 {
        (self.g / self.l).sqrt()
    }
}

/// Rest-to-rest style boundary data in original coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CraneBoundary {
    pub t0: f64,
    pub tf: f64,
    pub p0: f64,
    pub pdot0: f64,
    /// Initial cable angle, rad.
    pub theta0: f64,
    pub thetadot0: f64,
    pub pf: f64,
}

impl CraneBoundary {
    pub fn rest_to_rest(p0: f64, pf: f64, t0: f64, tf: f64) -> Self {
        Self {
            t0,
            tf,
            p0,
            pdot0: 0.0,
            theta0: 0.0,
            thetadot0: 0.0,
            pf,
        }
    }

    pub fn validate(&self, params: &CraneParams) -> Result<()> {
        if !(self.t0 < self.tf) {
            return Err(Error::InvalidParameter(format!(
                "horizon needs t0 < tf, got [{}, {}]",
                self.t0, self.tf
            )));
        }
        for (name, p) in [("p0", self.p0), ("pf", self.pf)] {
            if !(params.p_min < p && p < params.p_max) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {p} must lie strictly inside ({}, {})",
                    params.p_min, params.p_max
                )));
            }
        }
        Ok(())
    }
}
