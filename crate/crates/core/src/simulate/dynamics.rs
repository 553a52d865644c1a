use crate::crane_solver::CraneParams;

/// Crane state `(p, ṗ, θ, θ̇)`.
pub type CraneState = [f64; 4];

/// Right-hand side of a crane model driven by the cart force.
pub trait CraneDynamics: Send + Sync {
    fn name(&self) -> &'static str;
    fn rhs(&self, x: &CraneState, force: f64, params: &CraneParams) -> CraneState;
}

/// Rigid pendulum on a cart.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullDynamics;

/// Small-angle model used to derive the flat output.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmallAngleDynamics;

fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> [f64; 2] {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        (b[0] * a[1][1] - a[0][1] * b[1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ]
}

pub fn crane_rhs_full(x: &CraneState, force: f64, params: &CraneParams) -> CraneState {
    let CraneParams { big_m, m, g, l, .. } = *params;
    let (s, c) = x[2].sin_cos();
    let [pdd, thdd] = solve2(
        [[big_m + m, m * l * c], [m * l * c, m * l * l]],
        [force + m * l * x[3] * x[3] * s, -m * g * l * s],
    );
    [x[1], pdd, x[3], thdd]
}

pub fn crane_rhs_smallangle(x: &CraneState, force: f64, params: &CraneParams) -> CraneState {
    let CraneParams { big_m, m, g, l, .. } = *params;
    let [pdd, thdd] = solve2(
        [[big_m + m, m * l], [1.0, l]],
        [force + m * l * x[3] * x[3] * x[2], -g * x[2]],
    );
    [x[1], pdd, x[3], thdd]
}

impl CraneDynamics for FullDynamics {
    fn name(&self) -> &'static str {
        "full"
    }

    fn rhs(&self, x: &CraneState, force: f64, params: &CraneParams) -> CraneState {
        crane_rhs_full(x, force, params)
    }
}

impl CraneDynamics for SmallAngleDynamics {
    fn name(&self) -> &'static str {
        "small-angle"
    }

    fn rhs(&self, x: &CraneState, force: f64, params: &CraneParams) -> CraneState {
        crane_rhs_smallangle(x, force, params)
    }
}

pub fn crane_models() -> Vec<Box<dyn CraneDynamics>> {
    vec![Box::new(FullDynamics), Box::new(SmallAngleDynamics)]
}

pub fn crane_model(name: &str) -> Option<Box<dyn CraneDynamics>> {
    crane_models().into_iter().find(|d| d.name() == name)
}

/// `½(M+m)ṗ² + ½ml²θ̇² + mlṗθ̇cosθ + mgl(1 − cosθ)`.
pub fn crane_energy(x: &CraneState, params: &CraneParams) -> f64 {
    let CraneParams { big_m, m, g, l, .. } = *params;
    let c = x[2].cos();
    0.5 * (big_m + m) * x[1] * x[1]
        + 0.5 * m * l * l * x[3] * x[3]
        + m * l * x[1] * x[3] * c
        + m * g * l * (1.0 - c)
}
