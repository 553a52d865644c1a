use std::fmt::Debug;
use std::sync::Arc;

use super::constraint::ConstraintStack;
use super::cost::{RunningCost, TerminalCost};
use super::costate::segment_jet;
use crate::flat_model::{PiecewiseTrajectory, Side};
use crate::numerics::CentralStencil;
use crate::{Error, Result};

/// How one state component is treated at a boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Fixed(f64),
    Free,
    /// Enters through the terminal function `B`.
    Functional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryEnd {
    Initial,
    Terminal,
}

/// Terminal function `B(s, t) = 0` with partials. The state is ordered chain
/// by chain, levels `0..k_i` within each chain.
pub trait TerminalFunction: Debug + Send + Sync {
    fn value(&self, s: &[f64], t: f64) -> Vec<f64>;
    fn partial_t(&self, s: &[f64], t: f64) -> Vec<f64>;
    /// One row per component of `B`.
    fn partial_s(&self, s: &[f64], t: f64) -> Vec<Vec<f64>>;
}

#[derive(Debug, Clone)]
pub struct TransversalitySpec {
    /// `initial[i][j]` for chain `i`, level `j < k_i`.
    pub initial: Vec<Vec<BoundaryCondition>>,
    pub terminal: Vec<Vec<BoundaryCondition>>,
    pub terminal_cost: Option<Arc<dyn TerminalCost>>,
    pub terminal_function: Option<Arc<dyn TerminalFunction>>,
    pub nu: Option<Vec<f64>>,
    pub free_final_time: bool,
}

impl TransversalitySpec {
    /// Every component fixed to the trajectory's own boundary values.
    pub fn fixed_from(traj: &PiecewiseTrajectory) -> Result<Self> {
        let grab = |t: f64, side: Side| -> Result<Vec<Vec<BoundaryCondition>>> {
            traj.spec()
                .chain_lengths
                .iter()
                .enumerate()
                .map(|(c, &k)| {
                    (0..k)
                        .map(|j| Ok(BoundaryCondition::Fixed(traj.eval_chain_side(c, t, j, side)?)))
                        .collect()
                })
                .collect()
        };
        Ok(Self {
            initial: grab(traj.t0(), Side::Right)?,
            terminal: grab(traj.tf(), Side::Left)?,
            terminal_cost: None,
            terminal_function: None,
            nu: None,
            free_final_time: false,
        })
    }

    pub fn with_condition(
        mut self,
        end: BoundaryEnd,
        chain: usize,
        level: usize,
        condition: BoundaryCondition,
    ) -> Self {
        match end {
            BoundaryEnd::Initial => self.initial[chain][level] = condition,
            BoundaryEnd::Terminal => self.terminal[chain][level] = condition,
        }
        self
    }

    pub fn condition(&self, end: BoundaryEnd, chain: usize, level: usize) -> Option<BoundaryCondition> {
        let table = match end {
            BoundaryEnd::Initial => &self.initial,
            BoundaryEnd::Terminal => &self.terminal,
        };
        table.get(chain).and_then(|c| c.get(level)).copied()
    }
}

/// Step for outer derivatives when partials are not linear.
const BOUNDARY_FD_STEP: f64 = 1e-3;

/// `Σ_{n=1}^{k_i−j} (−1)^n d^{n−1}/dt^{n−1}(Ψ_{y^{(j+n)}} + μᵀg_{y^{(j+n)}})`
/// at the chosen end; this is the costate of the freed component, which
/// must vanish at the optimum.
pub fn free_boundary_residual(
    traj: &PiecewiseTrajectory,
    cost: &dyn RunningCost,
    constraints: &[ConstraintStack],
    spec: &TransversalitySpec,
    chain: usize,
    level: usize,
    end: BoundaryEnd,
) -> Result<f64> {
    if spec.condition(end, chain, level) != Some(BoundaryCondition::Free) {
        return Err(Error::NotFree(format!("chain {chain}, level {level} at {end:?} end")));
    }
    let k = traj.spec().chain_lengths[chain];
    let (t, seg) = match end {
        BoundaryEnd::Initial => (traj.t0(), 0),
        BoundaryEnd::Terminal => (traj.tf(), traj.num_segments() - 1),
    };
    let (a, b) = traj.segment_bounds(seg);
    let mid = 0.5 * (a + b);
    let active: Vec<&ConstraintStack> = constraints
        .iter()
        .filter(|c| c.active.iter().any(|&(lo, hi)| lo <= mid && mid <= hi))
        .collect();
    let inner = |tau: f64, m: usize| -> Result<f64> {
        let jet = segment_jet(traj, seg, tau);
        let mut v = cost.partial(&jet, tau, chain, m);
        for stack in &active {
            let mu = stack.multiplier.as_ref().ok_or_else(|| {
                Error::MissingMultiplier(format!("constraint {} active at boundary", stack.constraint.name()))
            })?;
            v += mu(tau) * stack.constraint.g_partial(&jet, tau, chain, m);
        }
        Ok(v)
    };
    let mut total = 0.0;
    for n in 1..=(k - level) {
        let m = level + n;
        let d = n - 1;
        let term = match (active.is_empty(), cost.linear_partial(chain, m)) {
            (true, Some(lin)) => lin
                .iter()
                .map(|&(order, w)| w * traj.segments(chain)[seg].derivative(t, order + d))
                .sum(),
            _ if d == 0 => inner(t, m)?,
            _ => {
                let st = CentralStencil::new(d);
                let mut samples = Vec::with_capacity(st.offsets().len());
                for &o in st.offsets() {
                    samples.push(inner(t + o as f64 * BOUNDARY_FD_STEP, m)?);
                }
                st.apply_samples(&samples, BOUNDARY_FD_STEP)
            }
        };
        total += if n % 2 == 0 { term } else { -term };
    }
    Ok(total)
}

/// `Ω = Φ_t + νᵀB_t + (Φ_s + νᵀB_s)·ṡ + Ψ` at the final time.
pub fn free_time_residual(
    traj: &PiecewiseTrajectory,
    cost: &dyn RunningCost,
    spec: &TransversalitySpec,
) -> Result<f64> {
    let tf = traj.tf();
    let jet = segment_jet(traj, traj.num_segments() - 1, tf);
    let mut s = Vec::new();
    let mut sdot = Vec::new();
    for levels in &jet {
        let k = levels.len() - 1;
        s.extend_from_slice(&levels[..k]);
        sdot.extend_from_slice(&levels[1..=k]);
    }
    let mut omega = cost.value(&jet, tf);
    if let Some(phi) = &spec.terminal_cost {
        omega += phi.partial_t(&s, tf);
        let ps = phi.partial_s(&s, tf);
        omega += ps.iter().zip(&sdot).map(|(a, b)| a * b).sum::<f64>();
    }
    if let Some(bf) = &spec.terminal_function {
        let nu = spec
            .nu
            .as_ref()
            .ok_or_else(|| Error::MissingMultiplier("ν is required when B is present".into()))?;
        let bt = bf.partial_t(&s, tf);
        let bs = bf.partial_s(&s, tf);
        if nu.len() != bt.len() || bs.len() != bt.len() {
            return Err(Error::Dimension(format!(
                "ν has {} entries, B has {} components",
                nu.len(),
                bt.len()
            )));
        }
        for ((n, t_part), row) in nu.iter().zip(&bt).zip(&bs) {
            omega += n * (t_part + row.iter().zip(&sdot).map(|(a, b)| a * b).sum::<f64>());
        }
    }
    Ok(omega)
}
