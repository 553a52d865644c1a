use serde_json::{json, Value};
use std::io::Write;

use super::segment::Segment;
use super::trajectory::PiecewiseTrajectory;
use crate::Result;

/// `n ≥ 2` equally spaced times covering `[t0, tf]`, endpoints exact.
pub fn sample_times(t0: f64, tf: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let h = (tf - t0) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { tf } else { t0 + i as f64 * h })
        .collect()
}

/// Long-format CSV with columns `t, chain, order, value`.
pub fn write_trajectory_csv<W: Write>(
    traj: &PiecewiseTrajectory,
    times: &[f64],
    max_order: usize,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "chain", "order", "value"])?;
    for &t in times {
        for order in 0..=max_order {
            let values = traj.eval(t, order)?;
            for (label, v) in traj.spec().labels.iter().zip(values) {
                w.write_record([t.to_string(), label.clone(), order.to_string(), v.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Segment listing: per chain, each segment's interval, origin and terms.
pub fn segments_json(traj: &PiecewiseTrajectory) -> Value {
    let chains: Vec<Value> = traj
        .spec()
        .labels
        .iter()
        .enumerate()
        .map(|(c, label)| {
            let segs: Vec<Value> = traj
                .segments(c)
                .iter()
                .map(|s| match s {
                    Segment::Analytic(a) => json!({
                        "t_start": a.t_start,
                        "t_end": a.t_end,
                        "t_ref": a.t_ref,
                        "terms": a.terms,
                    }),
                    Segment::Curve(curve) => json!({
                        "t_start": curve.t_start(),
                        "t_end": curve.t_end(),
                        "curve": curve.describe(),
                    }),
                })
                .collect();
            json!({ "label": label, "segments": segs })
        })
        .collect();
    json!({
        "junction_times": traj.junction_times(),
        "chains": chains,
    })
}
