use super::arc_solve::{arc_from, arc_seed};
use super::cubic::di_unconstrained;
use super::problem::DiProblem;
use super::solution::{DiCase, DiSolution, Piece};
use super::touch::{touch_from, violation_seed};
use crate::numerics::RootOptions;
use crate::{Error, Result};

/// Smallest clearance accepted as feasible.
pub const CLEARANCE_TOL: f64 = 1e-9;
/// Largest boundary mismatch accepted.
pub const BOUNDARY_TOL: f64 = 1e-6;

/// Contact guesses handed from one escalation step to the next.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WarmStart {
    pub theta: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

/// One motion-primitive pattern the escalation can try.
pub trait PrimitiveStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn case(&self) -> DiCase;
    fn solve(&self, problem: &DiProblem, warm: &WarmStart) -> Result<DiSolution>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UnconstrainedStrategy;

impl PrimitiveStrategy for UnconstrainedStrategy {
    fn name(&self) -> &'static str {
        "unconstrained"
    }

    fn case(&self) -> DiCase {
        DiCase::Unconstrained
    }

    fn solve(&self, problem: &DiProblem, _warm: &WarmStart) -> Result<DiSolution> {
        let start = std::time::Instant::now();
        let mut sol = DiSolution::assemble(
            problem,
            DiCase::Unconstrained,
            vec![Piece::Cubic(problem.t0, problem.tf, di_unconstrained(problem)?)],
        )?;
        sol.diagnostics.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(sol)
    }
}

#[derive(Debug, Clone)]
pub struct TouchStrategy {
    pub options: RootOptions,
}

impl Default for TouchStrategy {
    fn default() -> Self {
        Self {
            options: RootOptions::least_squares(),
        }
    }
}

impl PrimitiveStrategy for TouchStrategy {
    fn name(&self) -> &'static str {
        "touch"
    }

    fn case(&self) -> DiCase {
        DiCase::Touch
    }

    fn solve(&self, problem: &DiProblem, warm: &WarmStart) -> Result<DiSolution> {
        let (theta, t1) = match (warm.theta, warm.t1) {
            (Some(a), Some(b)) => (a, b),
            _ => violation_seed(problem)?,
        };
        touch_from(problem, theta, t1, &self.options)
    }
}

#[derive(Debug, Clone)]
pub struct ArcStrategy {
    pub options: RootOptions,
}

impl Default for ArcStrategy {
    fn default() -> Self {
        Self {
            options: RootOptions::square(),
        }
    }
}

impl PrimitiveStrategy for ArcStrategy {
    fn name(&self) -> &'static str {
        "arc"
    }

    fn case(&self) -> DiCase {
        DiCase::Arc
    }

    fn solve(&self, problem: &DiProblem, warm: &WarmStart) -> Result<DiSolution> {
        let (theta, t1) = match (warm.theta, warm.t1) {
            (Some(a), Some(b)) => (a, b),
            _ => violation_seed(problem)?,
        };
        arc_from(problem, arc_seed(problem, theta, t1, warm.t2)?, &self.options)
    }
}

/// Unconstrained, touch and arc, in escalation order.
pub fn default_strategies() -> Vec<Box<dyn PrimitiveStrategy>> {
    vec![
        Box::new(UnconstrainedStrategy),
        Box::new(TouchStrategy::default()),
        Box::new(ArcStrategy::default()),
    ]
}

pub fn strategy_by_name(name: &str) -> Option<Box<dyn PrimitiveStrategy>> {
    default_strategies().into_iter().find(|s| s.name() == name)
}

#[derive(Debug, Clone)]
pub struct StepReport {
    pub strategy: &'static str,
    pub outcome: String,
}

#[derive(Debug, Clone)]
pub struct Escalation {
    pub solution: DiSolution,
    pub steps: Vec<StepReport>,
}

pub fn is_feasible(sol: &DiSolution) -> bool {
    sol.min_clearance >= -CLEARANCE_TOL && sol.diagnostics.boundary_residual < BOUNDARY_TOL
}

/// Earliest sampled time inside the clearance.
fn earliest_violation(sol: &DiSolution) -> Option<f64> {
    let p = &sol.problem;
    let n = super::solution::CLEARANCE_SAMPLES;
    let h = p.horizon() / (n - 1) as f64;
    (0..n)
        .map(|i| p.t0 + i as f64 * h)
        .find(|&t| sol.clearance(t).map_or(false, |c| c < -CLEARANCE_TOL))
}

/// Tries each strategy in turn and returns the first feasible solution.
pub fn di_escalate_with(problem: &DiProblem, strategies: &[Box<dyn PrimitiveStrategy>]) -> Result<Escalation> {
    problem.validate()?;
    let start = std::time::Instant::now();
    let mut warm = WarmStart::default();
    let mut steps = Vec::new();
    for strategy in strategies {
        match strategy.solve(problem, &warm) {
            Ok(mut sol) if is_feasible(&sol) => {
                steps.push(StepReport {
                    strategy: strategy.name(),
                    outcome: format!("feasible, cost {:.6}", sol.cost),
                });
                sol.diagnostics.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
                return Ok(Escalation { solution: sol, steps });
            }
            Ok(sol) => {
                steps.push(StepReport {
                    strategy: strategy.name(),
                    outcome: format!(
                        "infeasible: min clearance {:.3e}, boundary residual {:.3e}",
                        sol.min_clearance, sol.diagnostics.boundary_residual
                    ),
                });
                match sol.case {
                    DiCase::Unconstrained => {
                        let (theta, t1) = violation_seed(problem)?;
                        warm = WarmStart {
                            theta: Some(theta),
                            t1: Some(t1),
                            t2: None,
                        };
                    }
                    _ => {
                        warm = WarmStart {
                            theta: sol.theta.or(warm.theta),
                            t1: sol.t1.or(warm.t1),
                            t2: earliest_violation(&sol),
                        };
                    }
                }
            }
            Err(err) => {
                if let Error::NotConverged { point, .. } = &err {
                    if point.len() >= 2 {
                        warm.theta = Some(point[0]);
                        warm.t1 = Some(point[1]);
                    }
                }
                steps.push(StepReport {
                    strategy: strategy.name(),
                    outcome: format!("failed: {err}"),
                });
            }
        }
    }
    let detail: Vec<String> = steps.iter().map(|s| format!("{}: {}", s.strategy, s.outcome)).collect();
    Err(Error::EscalationFailed(detail.join("; ")))
}

pub fn di_escalate(problem: &DiProblem) -> Result<DiSolution> {
    Ok(di_escalate_with(problem, &default_strategies())?.solution)
}
