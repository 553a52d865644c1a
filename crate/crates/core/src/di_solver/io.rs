use std::io::Write;

use serde::Serialize;

use super::solution::{DiCase, DiDiagnostics, DiSolution};
use crate::flat_model::{sample_times, Side};
use crate::Result;

/// CSV with columns `t, px, py, vx, vy, ux, uy, segment_id, clearance`.
pub fn write_di_csv<W: Write>(sol: &DiSolution, samples: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "px", "py", "vx", "vy", "ux", "uy", "segment_id", "clearance"])?;
    for t in sample_times(sol.problem.t0, sol.problem.tf, samples) {
        let p = sol.position(t)?;
        let v = sol.velocity(t)?;
        let u = sol.control(t)?;
        let seg = sol.trajectory.segment_index(t, Side::Left)?;
        let row = [
            t, p[0], p[1], v[0], v[1], u[0], u[1],
        ]
        .iter()
        .map(f64::to_string)
        .chain([seg.to_string(), sol.problem.clearance_at(p).to_string()])
        .collect::<Vec<_>>();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct DiSummary {
    pub case: DiCase,
    pub theta: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub cost: f64,
    pub pi: Option<f64>,
    pub exit_jump: Option<f64>,
    pub min_clearance: f64,
    pub min_clearance_time: f64,
    pub cubics: Vec<[[f64; 4]; 2]>,
    pub diagnostics: DiDiagnostics,
}

impl DiSummary {
    pub fn new(sol: &DiSolution) -> Self {
        Self {
            case: sol.case,
            theta: sol.theta,
            t1: sol.t1,
            t2: sol.t2,
            cost: sol.cost,
            pi: sol.pi,
            exit_jump: sol.exit_jump,
            min_clearance: sol.min_clearance,
            min_clearance_time: sol.min_clearance_time,
            cubics: sol.cubics.clone(),
            diagnostics: sol.diagnostics.clone(),
        }
    }
}
