use serde::Serialize;

use super::rollout::SimResult;
use crate::crane_solver::CraneSolution;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SegmentSwing {
    pub t_start: f64,
    pub t_end: f64,
    pub peak_theta_deg: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrackingMetrics {
    pub max_position_error: f64,
    /// `|p(tf) − pf|` of the simulation.
    pub terminal_miss: f64,
    /// `|p_sim(tf) − p_ref(tf)|`.
    pub terminal_position_error: f64,
    pub peak_theta_deg: f64,
    pub segments: Vec<SegmentSwing>,
}

/// Position tracking and swing of a rollout against its flat reference.
pub fn compare(sim: &SimResult, sol: &CraneSolution) -> Result<TrackingMetrics> {
    let (t0, tf) = (sol.boundary.t0, sol.boundary.tf);
    let (Some(&a), Some(&b)) = (sim.times.first(), sim.times.last()) else {
        return Err(Error::Dimension("empty simulation".into()));
    };
    let slack = 1e-9 * tf.abs().max(1.0);
    if (a - t0).abs() > slack || (b - tf).abs() > slack {
        return Err(Error::Dimension(format!(
            "simulation covers [{a}, {b}], reference [{t0}, {tf}]"
        )));
    }
    let bounds: Vec<(f64, f64)> = (0..sol.trajectory.num_segments())
        .map(|i| sol.trajectory.segment_bounds(i))
        .collect();
    let mut peaks = vec![0.0_f64; bounds.len()];
    let mut max_err = 0.0_f64;
    for (t, x) in sim.times.iter().zip(&sim.states) {
        let t = t.clamp(t0, tf);
        max_err = max_err.max((x[0] - sol.position(t)?).abs());
        for (k, &(s, e)) in bounds.iter().enumerate() {
            if t >= s && t <= e {
                peaks[k] = peaks[k].max(x[2].abs());
            }
        }
    }
    let last = sim.states.last().expect("non-empty");
    Ok(TrackingMetrics {
        max_position_error: max_err,
        terminal_miss: (last[0] - sol.boundary.pf).abs(),
        terminal_position_error: (last[0] - sol.position(tf)?).abs(),
        peak_theta_deg: peaks.iter().copied().fold(0.0, f64::max).to_degrees(),
        segments: bounds
            .iter()
            .zip(&peaks)
            .map(|(&(s, e), &p)| SegmentSwing {
                t_start: s,
                t_end: e,
                peak_theta_deg: p.to_degrees(),
            })
            .collect(),
    })
}
