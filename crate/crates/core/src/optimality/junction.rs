use super::constraint::Tangency;
use super::cost::{Jet, RunningCost};
use super::costate::segment_jet;
use crate::flat_model::{PiecewiseTrajectory, Side};
use crate::{Error, Result};

/// Quantities on both sides of a junction. The state part of both jets is
/// shared; only the top derivative (the control) may jump.
#[derive(Debug, Clone)]
pub struct JunctionRecord {
    pub t: f64,
    pub jet_minus: Jet,
    pub jet_plus: Jet,
    /// Constant multipliers, one per tangency row across all tangencies.
    pub pi: Option<Vec<f64>>,
    /// Stacked tangency values at the junction, evaluated from the left.
    pub tangency_values: Vec<f64>,
}

impl JunctionRecord {
    /// Builds the record for junction `index` of a trajectory. Fails if the
    /// state differs between the two sides beyond `tol`.
    pub fn from_trajectory(
        traj: &PiecewiseTrajectory,
        index: usize,
        tangencies: &[Tangency],
        pi: Option<Vec<f64>>,
        tol: f64,
    ) -> Result<Self> {
        let t = *traj.junction_times().get(index).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "junction {index} out of range ({} junctions)",
                traj.junction_times().len()
            ))
        })?;
        let jet_minus = segment_jet(traj, index, t);
        let jet_plus = segment_jet(traj, index + 1, t);
        for (c, &k) in traj.spec().chain_lengths.iter().enumerate() {
            for n in 0..k {
                let jump = (jet_plus[c][n] - jet_minus[c][n]).abs();
                if jump > tol * (1.0 + jet_minus[c][n].abs()) {
                    return Err(Error::Discontinuous {
                        t,
                        chain: c,
                        order: n,
                        jump,
                    });
                }
            }
        }
        let tangency_values = tangencies
            .iter()
            .flat_map(|tg| tg.n(&jet_minus, t))
            .collect();
        let record = Self {
            t,
            jet_minus,
            jet_plus,
            pi,
            tangency_values,
        };
        Ok(record)
    }

    fn control_jump(&self) -> Vec<f64> {
        self.jet_plus
            .iter()
            .zip(&self.jet_minus)
            .map(|(p, m)| p[p.len() - 1] - m[m.len() - 1])
            .collect()
    }
}

/// `(Ψ_a + μᵀg_a)` per chain on one side.
fn control_gradient(
    jet: &Jet,
    t: f64,
    cost: &dyn RunningCost,
    tangencies: &[Tangency],
    side: Side,
) -> Result<Vec<f64>> {
    let mut grad: Vec<f64> = jet
        .iter()
        .enumerate()
        .map(|(c, levels)| cost.partial(jet, t, c, levels.len() - 1))
        .collect();
    for tg in tangencies {
        let mu = tg.mu(t, side)?;
        if mu != 0.0 {
            for (c, levels) in jet.iter().enumerate() {
                grad[c] += mu * tg.g_partial(jet, t, c, levels.len() - 1);
            }
        }
    }
    Ok(grad)
}

fn pi_dot_rate(
    record: &JunctionRecord,
    jet: &Jet,
    tangencies: &[Tangency],
) -> Result<f64> {
    let rows: usize = tangencies.iter().map(Tangency::rows).sum();
    if rows == 0 {
        return Ok(0.0);
    }
    let pi = record.pi.as_ref().ok_or_else(|| {
        Error::MissingMultiplier(format!("junction at t = {} has {rows} tangency rows but no π", record.t))
    })?;
    if pi.len() != rows {
        return Err(Error::Dimension(format!("π has {} entries, tangency has {rows} rows", pi.len())));
    }
    let rate: Vec<f64> = tangencies.iter().flat_map(|tg| tg.rate(jet, record.t)).collect();
    Ok(pi.iter().zip(&rate).map(|(p, r)| p * r).sum())
}

/// Reduced jump conditions at an interior junction:
/// `r₁ = (Ψ⁺ − Ψ⁻) − (Ψ_a + μᵀg_a)⁻·(a⁺ − a⁻) − πᵀ(N_t + N_s I⁺)` and
/// `r₂ = (Ψ⁺ − Ψ⁻) − (Ψ_a + μᵀg_a)⁺·(a⁺ − a⁻) − πᵀ(N_t + N_s I⁻)`.
pub fn interior_jump_residual(
    record: &JunctionRecord,
    cost: &dyn RunningCost,
    tangencies: &[Tangency],
) -> Result<(f64, f64)> {
    let t = record.t;
    let dpsi = cost.value(&record.jet_plus, t) - cost.value(&record.jet_minus, t);
    let da = record.control_jump();
    let gm = control_gradient(&record.jet_minus, t, cost, tangencies, Side::Left)?;
    let gp = control_gradient(&record.jet_plus, t, cost, tangencies, Side::Right)?;
    let dot = |g: &[f64]| g.iter().zip(&da).map(|(a, b)| a * b).sum::<f64>();
    let r1 = dpsi - dot(&gm) - pi_dot_rate(record, &record.jet_plus, tangencies)?;
    let r2 = dpsi - dot(&gp) - pi_dot_rate(record, &record.jet_minus, tangencies)?;
    Ok((r1, r2))
}

/// For costs quadratic in the control, `‖a⁺ − a⁻‖²`; otherwise
/// `|(Ψ_a⁺ − Ψ_a⁻)·(a⁺ − a⁻)|`, which is zero iff the jump is trivial for
/// strictly convex costs.
pub fn junction_continuity_check(record: &JunctionRecord, cost: &dyn RunningCost) -> f64 {
    let da = record.control_jump();
    if cost.quadratic_in_control() {
        return da.iter().map(|d| d * d).sum();
    }
    let t = record.t;
    da.iter()
        .enumerate()
        .map(|(c, d)| {
            let k = record.jet_plus[c].len() - 1;
            (cost.partial(&record.jet_plus, t, c, k) - cost.partial(&record.jet_minus, t, c, k)) * d
        })
        .sum::<f64>()
        .abs()
}
