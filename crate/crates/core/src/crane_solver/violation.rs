use serde::{Deserialize, Serialize};

use super::solution::{BoundSide, CraneSolution};
use super::CraneParams;
use crate::numerics::golden_section_max;
use crate::Result;

/// Samples used to scan the horizon for bound violations.
pub const VIOLATION_SAMPLES: usize = 4001;
/// Excess at or below this is treated as touching, not violating.
pub const TOUCH_TOL: f64 = 1e-9;
const REFINE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub start: f64,
    pub end: f64,
    pub side: BoundSide,
    pub max_excess: f64,
    pub t_peak: f64,
}

impl Violation {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Intervals where the trolley reference leaves `[p_min, p_max]`.
pub fn constraint_violation(sol: &CraneSolution, params: &CraneParams) -> Result<Vec<Violation>> {
    let p = |t: f64| sol.position(t).unwrap_or(f64::NAN);
    Ok(scan_violations(
        p,
        sol.boundary.t0,
        sol.boundary.tf,
        params.p_min,
        params.p_max,
        VIOLATION_SAMPLES,
    ))
}

/// Largest excess over either bound (negative when strictly inside).
pub fn max_constraint_excess(sol: &CraneSolution, params: &CraneParams) -> f64 {
    let p = |t: f64| sol.position(t).unwrap_or(f64::NAN);
    let (t0, tf) = (sol.boundary.t0, sol.boundary.tf);
    let upper = refined_extreme(&p, t0, tf, VIOLATION_SAMPLES, true).1 - params.p_max;
    let lower = params.p_min - refined_extreme(&p, t0, tf, VIOLATION_SAMPLES, false).1;
    upper.max(lower)
}

fn refined_extreme(p: &impl Fn(f64) -> f64, t0: f64, tf: f64, n: usize, max: bool) -> (f64, f64) {
    let sign = if max { 1.0 } else { -1.0 };
    let h = (tf - t0) / (n - 1) as f64;
    let vals: Vec<f64> = (0..n).map(|i| sign * p(t0 + i as f64 * h)).collect();
    let mut best = (t0, vals[0]);
    if vals[n - 1] > best.1 {
        best = (tf, vals[n - 1]);
    }
    for i in 1..n - 1 {
        if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] {
            let (a, b) = (t0 + (i - 1) as f64 * h, t0 + (i + 1) as f64 * h);
            let (t, v) = golden_section_max(|t| sign * p(t), a, b, REFINE_TOL);
            if v > best.1 {
                best = (t, v);
            }
        }
    }
    (best.0, sign * best.1)
}

pub fn scan_violations(
    p: impl Fn(f64) -> f64,
    t0: f64,
    tf: f64,
    p_min: f64,
    p_max: f64,
    n: usize,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for side in [BoundSide::Upper, BoundSide::Lower] {
        let excess = |t: f64| match side {
            BoundSide::Upper => p(t) - p_max,
            BoundSide::Lower => p_min - p(t),
        };
        let h = (tf - t0) / (n - 1) as f64;
        let ts: Vec<f64> = (0..n).map(|i| if i == n - 1 { tf } else { t0 + i as f64 * h }).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| excess(t)).collect();
        let mut found: Vec<Violation> = Vec::new();
        for i in 1..n - 1 {
            if !(vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1]) {
                continue;
            }
            let (t_peak, peak) = golden_section_max(&excess, ts[i - 1], ts[i + 1], REFINE_TOL);
            if peak <= TOUCH_TOL {
                continue;
            }
            if found.iter().any(|v| v.start <= t_peak && t_peak <= v.end) {
                if let Some(v) = found.iter_mut().find(|v| v.start <= t_peak && t_peak <= v.end) {
                    if peak > v.max_excess {
                        v.max_excess = peak;
                        v.t_peak = t_peak;
                    }
                }
                continue;
            }
            let start = crossing(&excess, &ts, &vals, i, t_peak, false);
            let end = crossing(&excess, &ts, &vals, i, t_peak, true);
            found.push(Violation {
                start,
                end,
                side,
                max_excess: peak,
                t_peak,
            });
        }
        out.extend(found);
    }
    out.sort_by(|a, b| a.start.total_cmp(&b.start));
    out
}

/// Zero of `excess` on the given side of a peak, by bisection between the
/// last positive sample and the first non-positive one.
fn crossing(excess: &impl Fn(f64) -> f64, ts: &[f64], vals: &[f64], i: usize, t_peak: f64, forward: bool) -> f64 {
    let n = ts.len();
    let mut inside = t_peak;
    let mut outside = None;
    if forward {
        for j in i..n {
            if ts[j] > t_peak && vals[j] <= 0.0 {
                outside = Some(ts[j]);
                break;
            }
        }
    } else {
        for j in (0..=i).rev() {
            if ts[j] < t_peak && vals[j] <= 0.0 {
                outside = Some(ts[j]);
                break;
            }
        }
    }
    let Some(mut out) = outside else {
        return if forward { ts[n - 1] } else { ts[0] };
    };
    for _ in 0..200 {
        let mid = 0.5 * (inside + out);
        if excess(mid) > 0.0 {
            inside = mid;
        } else {
            out = mid;
        }
        if (out - inside).abs() < 1e-12 {
            break;
        }
    }
    0.5 * (inside + out)
}
