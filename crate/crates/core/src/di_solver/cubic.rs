use super::problem::DiProblem;
use crate::flat_model::{AnalyticSegment, Basis, Term};
use crate::Result;

/// `a + bτ + cτ² + dτ³` with `τ = t − t_start`.
pub type Cubic = [f64; 4];

pub fn cubic_segment(t_start: f64, t_end: f64, c: Cubic) -> Result<AnalyticSegment> {
    AnalyticSegment::new(
        t_start,
        t_end,
        t_start,
        (0..4).map(|n| Term::new(Basis::Monomial(n as u32), c[n])).collect(),
    )
}

/// `½∫₀ᵀ ü² dτ` for one axis.
pub fn cubic_cost(c: Cubic, duration: f64) -> f64 {
    let (cc, d, t) = (c[2], c[3], duration);
    2.0 * cc * cc * t + 6.0 * cc * d * t * t + 6.0 * d * d * t * t * t
}

/// Cubic through `p(0) = p0`, `v(0) = v0`, `p(T) = pf` with `ü(T) = 0`.
fn free_velocity_cubic(p0: f64, v0: f64, pf: f64, t: f64) -> Cubic {
    let d = -(pf - p0 - v0 * t) / (2.0 * t * t * t);
    [p0, v0, -3.0 * d * t, d]
}

/// Per-axis coefficients of the unconstrained optimum.
pub fn di_unconstrained(problem: &DiProblem) -> Result<[Cubic; 2]> {
    problem.validate()?;
    let t = problem.horizon();
    Ok([0, 1].map(|k| free_velocity_cubic(problem.p0[k], problem.v0[k], problem.pf[k], t)))
}

/// Cubic per axis matching position and velocity at both ends.
pub(crate) fn hermite_cubic(p0: f64, v0: f64, p1: f64, v1: f64, t: f64) -> Cubic {
    let a = p1 - p0 - v0 * t;
    let b = v1 - v0;
    let d = (b * t - 2.0 * a) / (t * t * t);
    let c = (3.0 * a - b * t) / (t * t);
    [p0, v0, c, d]
}

pub(crate) fn eval(c: &Cubic, tau: f64, order: usize) -> f64 {
    match order {
        0 => c[0] + tau * (c[1] + tau * (c[2] + tau * c[3])),
        1 => c[1] + tau * (2.0 * c[2] + 3.0 * tau * c[3]),
        2 => 2.0 * c[2] + 6.0 * c[3] * tau,
        3 => 6.0 * c[3],
        _ => 0.0,
    }
}
