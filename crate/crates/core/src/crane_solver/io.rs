use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BoundSide, CraneBoundary, CraneDiagnostics, CraneParams, CraneSolution};
use crate::flat_model::{sample_times, segments_json, Side};
use crate::Result;

/// Crane problem as read from JSON; every field is required.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CraneConfig {
    #[serde(rename = "M")]
    pub big_m: f64,
    pub m: f64,
    pub g: f64,
    pub l: f64,
    pub alpha: f64,
    pub t0: f64,
    pub tf: f64,
    pub p0: f64,
    pub pdot0: f64,
    pub theta0_deg: f64,
    pub thetadot0: f64,
    pub pf: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl CraneConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Validated parameters and boundary.
    pub fn problem(&self) -> Result<(CraneParams, CraneBoundary)> {
        let params = CraneParams {
            big_m: self.big_m,
            m: self.m,
            g: self.g,
            l: self.l,
            alpha: self.alpha,
            p_min: self.p_min,
            p_max: self.p_max,
        };
        params.validate()?;
        let boundary = CraneBoundary {
            t0: self.t0,
            tf: self.tf,
            p0: self.p0,
            pdot0: self.pdot0,
            theta0: self.theta0_deg.to_radians(),
            thetadot0: self.thetadot0,
            pf: self.pf,
        };
        boundary.validate(&params)?;
        Ok((params, boundary))
    }

    pub fn from_problem(params: &CraneParams, boundary: &CraneBoundary) -> Self {
        Self {
            big_m: params.big_m,
            m: params.m,
            g: params.g,
            l: params.l,
            alpha: params.alpha,
            t0: boundary.t0,
            tf: boundary.tf,
            p0: boundary.p0,
            pdot0: boundary.pdot0,
            theta0_deg: boundary.theta0.to_degrees(),
            thetadot0: boundary.thetadot0,
            pf: boundary.pf,
            p_min: params.p_min,
            p_max: params.p_max,
        }
    }
}

/// CSV with columns `t, y, dy, d2y, d3y, d4y, p_ref, theta_ref, F, segment_id`.
pub fn write_crane_csv<W: Write>(sol: &CraneSolution, samples: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "y", "dy", "d2y", "d3y", "d4y", "p_ref", "theta_ref", "F", "segment_id"])?;
    for t in sample_times(sol.boundary.t0, sol.boundary.tf, samples) {
        let mut row: Vec<String> = Vec::with_capacity(10);
        row.push(t.to_string());
        for order in 0..=4 {
            row.push(sol.y(t, order)?.to_string());
        }
        let orig = sol.original(t)?;
        row.push(orig.p.to_string());
        row.push(orig.theta.to_string());
        row.push(orig.force.to_string());
        row.push(sol.trajectory.segment_index(t, Side::Left)?.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CraneSummary {
    pub case: &'static str,
    pub junction_times: Option<(f64, f64)>,
    pub active_bound: Option<BoundSide>,
    pub cost: f64,
    pub constants: Vec<Vec<f64>>,
    pub diagnostics: CraneDiagnostics,
    pub segments: serde_json::Value,
}

impl CraneSummary {
    pub fn new(sol: &CraneSolution) -> Self {
        Self {
            case: if sol.junctions.is_some() {
                "constrained"
            } else {
                "unconstrained"
            },
            junction_times: sol.junctions,
            active_bound: sol.active_bound,
            cost: sol.cost(),
            constants: sol.constants(),
            diagnostics: sol.diagnostics.clone(),
            segments: segments_json(&sol.trajectory),
        }
    }
}
