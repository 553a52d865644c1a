use std::fmt::Debug;
use std::sync::Arc;

use super::cost::Jet;
use crate::flat_model::Side;
use crate::{Error, Result};

/// Inequality constraint `h(s, t) ≤ 0` with its derivative chain through
/// the relative degree `q`.
pub trait StateConstraint: Debug + Send + Sync {
    fn name(&self) -> &str;

    /// Derivatives needed before the control appears.
    fn relative_degree(&self) -> usize;

    fn value(&self, jet: &Jet, t: f64) -> f64;

    /// Tangency rows `[h, h⁽¹⁾, …, h^{(q−1)}]` (any row may be rescaled).
    fn tangency(&self, jet: &Jet, t: f64) -> Vec<f64>;

    /// Total time derivative of each tangency row along the jet.
    fn tangency_rate(&self, jet: &Jet, t: f64) -> Vec<f64>;

    /// `g = h^{(q)}` (with the same scaling as the last tangency row).
    fn g(&self, jet: &Jet, t: f64) -> f64;

    /// `∂g/∂y_i^{(n)}`.
    fn g_partial(&self, jet: &Jet, t: f64, chain: usize, n: usize) -> f64;
}

pub type MultiplierFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A constraint together with where it is active and its multiplier.
#[derive(Clone)]
pub struct ConstraintStack {
    pub constraint: Arc<dyn StateConstraint>,
    /// Closed intervals where the constraint holds with equality.
    pub active: Vec<(f64, f64)>,
    /// `μ(t)` on the active intervals.
    pub multiplier: Option<MultiplierFn>,
    /// Known activation time of an interior-point constraint.
    pub interior_time: Option<f64>,
}

impl Debug for ConstraintStack {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConstraintStack")
            .field("constraint", &self.constraint.name())
            .field("active", &self.active)
            .field("has_multiplier", &self.multiplier.is_some())
            .field("interior_time", &self.interior_time)
            .finish()
    }
}

impl ConstraintStack {
    pub fn inactive(constraint: Arc<dyn StateConstraint>) -> Self {
        Self {
            constraint,
            active: vec![],
            multiplier: None,
            interior_time: None,
        }
    }

    pub fn with_active(mut self, interval: (f64, f64), multiplier: MultiplierFn) -> Self {
        self.active.push(interval);
        self.multiplier = Some(multiplier);
        self
    }

    pub fn with_interior_time(mut self, t: f64) -> Self {
        self.interior_time = Some(t);
        self
    }

    /// `μ(t)`, zero off the active set; at an interval end the side picks
    /// the limit.
    pub fn mu(&self, t: f64, side: Side) -> Result<f64> {
        let inside = self.active.iter().any(|&(a, b)| match side {
            Side::Left => a < t && t <= b,
            Side::Right => a <= t && t < b,
        });
        if !inside {
            return Ok(0.0);
        }
        let mu = self.multiplier.as_ref().ok_or_else(|| {
            Error::MissingMultiplier(format!(
                "constraint {} is active at t = {t} without a multiplier trace",
                self.constraint.name()
            ))
        })?;
        Ok(mu(t))
    }
}

/// Tangency vector `N` (plus a `t − t₁` row for interior points at a known
/// time) and the appended constraint `g`.
#[derive(Debug, Clone)]
pub struct Tangency {
    stack: ConstraintStack,
}

impl Tangency {
    pub fn rows(&self) -> usize {
        self.stack.constraint.relative_degree() + usize::from(self.stack.interior_time.is_some())
    }

    pub fn n(&self, jet: &Jet, t: f64) -> Vec<f64> {
        let mut v = self.stack.constraint.tangency(jet, t);
        if let Some(t1) = self.stack.interior_time {
            v.push(t - t1);
        }
        v
    }

    /// `N_t + N_s·I` evaluated with the jet's control.
    pub fn rate(&self, jet: &Jet, t: f64) -> Vec<f64> {
        let mut v = self.stack.constraint.tangency_rate(jet, t);
        if self.stack.interior_time.is_some() {
            v.push(1.0);
        }
        v
    }

    pub fn g(&self, jet: &Jet, t: f64) -> f64 {
        self.stack.constraint.g(jet, t)
    }

    pub fn g_partial(&self, jet: &Jet, t: f64, chain: usize, n: usize) -> f64 {
        self.stack.constraint.g_partial(jet, t, chain, n)
    }

    pub fn mu(&self, t: f64, side: Side) -> Result<f64> {
        self.stack.mu(t, side)
    }

    pub fn stack(&self) -> &ConstraintStack {
        &self.stack
    }
}

pub fn build_tangency(stack: &ConstraintStack) -> Result<Tangency> {
    if stack.constraint.relative_degree() == 0 && stack.interior_time.is_some() {
        return Err(Error::InvalidParameter(format!(
            "constraint {} has relative degree 0; no tangency rows exist",
            stack.constraint.name()
        )));
    }
    Ok(Tangency {
        stack: stack.clone(),
    })
}

/// Trolley position bound on the crane: `y + (l/g)ÿ ≤ p_max` or
/// `p_min ≤ y + (l/g)ÿ`.
#[derive(Debug, Clone, Copy)]
pub struct CranePositionBound {
    pub bound: f64,
    pub l_over_g: f64,
    /// `+1` for an upper bound, `−1` for a lower bound.
    pub sign: f64,
}

impl CranePositionBound {
    pub fn upper(p_max: f64, l: f64, g: f64) -> Self {
        Self {
            bound: p_max,
            l_over_g: l / g,
            sign: 1.0,
        }
    }

    pub fn lower(p_min: f64, l: f64, g: f64) -> Self {
        Self {
            bound: p_min,
            l_over_g: l / g,
            sign: -1.0,
        }
    }
}

impl StateConstraint for CranePositionBound {
    fn name(&self) -> &str {
        "crane_position_bound"
    }

    fn relative_degree(&self) -> usize {
        2
    }

    fn value(&self, jet: &Jet, _t: f64) -> f64 {
        self.sign * (jet[0][0] + self.l_over_g * jet[0][2] - self.bound)
    }

    fn tangency(&self, jet: &Jet, t: f64) -> Vec<f64> {
        vec![
            self.value(jet, t),
            self.sign * (jet[0][1] + self.l_over_g * jet[0][3]),
        ]
    }

    fn tangency_rate(&self, jet: &Jet, t: f64) -> Vec<f64> {
        vec![
            self.sign * (jet[0][1] + self.l_over_g * jet[0][3]),
            self.g(jet, t),
        ]
    }

    fn g(&self, jet: &Jet, _t: f64) -> f64 {
        self.sign * (jet[0][2] + self.l_over_g * jet[0][4])
    }

    fn g_partial(&self, _jet: &Jet, _t: f64, _chain: usize, n: usize) -> f64 {
        match n {
            2 => self.sign,
            4 => self.sign * self.l_over_g,
            _ => 0.0,
        }
    }
}

/// Circular keep-out zone for the planar double integrator:
/// `D² − ‖p − O‖² ≤ 0`, with tangency rows `[D² − p̂·p̂, v·p̂]` and
/// `g = u·p̂ + v·v`.
#[derive(Debug, Clone, Copy)]
pub struct CircularObstacle {
    pub center: [f64; 2],
    pub clearance: f64,
}

impl CircularObstacle {
    fn parts(&self, jet: &Jet) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let ph = [jet[0][0] - self.center[0], jet[1][0] - self.center[1]];
        (ph, [jet[0][1], jet[1][1]], [jet[0][2], jet[1][2]])
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl StateConstraint for CircularObstacle {
    fn name(&self) -> &str {
        "circular_obstacle"
    }

    fn relative_degree(&self) -> usize {
        2
    }

    fn value(&self, jet: &Jet, _t: f64) -> f64 {
        let (ph, _, _) = self.parts(jet);
        self.clearance * self.clearance - dot(ph, ph)
    }

    fn tangency(&self, jet: &Jet, t: f64) -> Vec<f64> {
        let (ph, v, _) = self.parts(jet);
        vec![self.value(jet, t), dot(v, ph)]
    }

    fn tangency_rate(&self, jet: &Jet, t: f64) -> Vec<f64> {
        let (ph, v, _) = self.parts(jet);
        vec![-2.0 * dot(v, ph), self.g(jet, t)]
    }

    fn g(&self, jet: &Jet, _t: f64) -> f64 {
        let (ph, v, u) = self.parts(jet);
        dot(u, ph) + dot(v, v)
    }

    fn g_partial(&self, jet: &Jet, _t: f64, chain: usize, n: usize) -> f64 {
        let (ph, v, u) = self.parts(jet);
        match n {
            0 => u[chain],
            1 => 2.0 * v[chain],
            2 => ph[chain],
            _ => 0.0,
        }
    }
}

/// Bound on a control component, `a_i − a_max ≤ 0` (relative degree 0).
#[derive(Debug, Clone, Copy)]
pub struct ControlBound {
    pub chain: usize,
    pub level: usize,
    pub limit: f64,
}

impl StateConstraint for ControlBound {
    fn name(&self) -> &str {
        "control_bound"
    }

    fn relative_degree(&self) -> usize {
        0
    }

    fn value(&self, jet: &Jet, _t: f64) -> f64 {
        jet[self.chain][self.level] - self.limit
    }

    fn tangency(&self, _jet: &Jet, _t: f64) -> Vec<f64> {
        vec![]
    }

    fn tangency_rate(&self, _jet: &Jet, _t: f64) -> Vec<f64> {
        vec![]
    }

    fn g(&self, jet: &Jet, t: f64) -> f64 {
        self.value(jet, t)
    }

    fn g_partial(&self, _jet: &Jet, _t: f64, chain: usize, n: usize) -> f64 {
        if chain == self.chain && n == self.level {
            1.0
        } else {
            0.0
        }
    }
}
