use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::arc::{ArcCurve, ArcSamples};
use super::cubic::{cubic_cost, cubic_segment, Cubic};
use super::problem::{norm, sub, DiProblem};
use crate::flat_model::{IntegratorChainSpec, PiecewiseTrajectory, Segment, Side};
use crate::numerics::{golden_section_min, integrate_composite};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiCase {
    Unconstrained,
    Touch,
    Arc,
}

impl DiCase {
    pub fn name(self) -> &'static str {
        match self {
            DiCase::Unconstrained => "unconstrained",
            DiCase::Touch => "touch",
            DiCase::Arc => "arc",
        }
    }
}

/// Samples used to locate the closest approach before refinement.
pub const CLEARANCE_SAMPLES: usize = 4001;

#[derive(Debug, Clone, Default, Serialize)]
pub struct DiDiagnostics {
    /// Largest mismatch over `p(t0), v(t0), p(tf), u(tf)`.
    pub boundary_residual: f64,
    /// Final residual norm of the outer solve.
    pub solver_residual: f64,
    /// `‖u⁺ − u⁻‖` over junctions.
    pub control_jump: f64,
    /// `|p̂·v|` at the junctions.
    pub radial_velocity: f64,
    /// `|u̇⁺·v − u̇⁻·v|` over junctions.
    pub tangential_jerk_jump: f64,
    /// Drift of `u̇·v − ½‖u‖²` along the arc.
    pub first_integral_drift: f64,
    pub iterations: usize,
    pub wall_time_ms: f64,
}

/// Solved trajectory with its motion-primitive pattern.
#[derive(Debug, Clone)]
pub struct DiSolution {
    pub problem: DiProblem,
    pub case: DiCase,
    pub trajectory: PiecewiseTrajectory,
    /// Coefficients per axis of each cubic segment, `τ` from segment start.
    pub cubics: Vec<[Cubic; 2]>,
    pub theta: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub arc: Option<Arc<ArcSamples>>,
    /// Entry jump multiplier.
    pub pi: Option<f64>,
    /// Radial jerk jump at the arc exit.
    pub exit_jump: Option<f64>,
    pub cost: f64,
    pub min_clearance: f64,
    pub min_clearance_time: f64,
    pub diagnostics: DiDiagnostics,
}

pub(crate) enum Piece {
    Cubic(f64, f64, [Cubic; 2]),
    Arc(ArcSamples),
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl DiSolution {
    pub(crate) fn assemble(problem: &DiProblem, case: DiCase, pieces: Vec<Piece>) -> Result<Self> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut cubics = Vec::new();
        let mut arc = None;
        let mut cost = 0.0;
        for piece in pieces {
            match piece {
                Piece::Cubic(a, b, c) => {
                    xs.push(Segment::from(cubic_segment(a, b, c[0])?));
                    ys.push(Segment::from(cubic_segment(a, b, c[1])?));
                    cost += cubic_cost(c[0], b - a) + cubic_cost(c[1], b - a);
                    cubics.push(c);
                }
                Piece::Arc(samples) => {
                    let (cx, cy) = ArcCurve::pair(samples);
                    let s = cx.samples.clone();
                    let panels = ((s.duration() / 0.05).ceil() as usize).max(4);
                    cost += integrate_composite(
                        |t| {
                            let j = s.position_jet(t, 2);
                            0.5 * j[2].norm_sqr()
                        },
                        s.t_start,
                        s.t_end(),
                        panels,
                        8,
                    );
                    arc = Some(s);
                    xs.push(Segment::Curve(Arc::new(cx)));
                    ys.push(Segment::Curve(Arc::new(cy)));
                }
            }
        }
        let trajectory = PiecewiseTrajectory::new(
            IntegratorChainSpec::new(vec![2, 2], vec!["px".into(), "py".into()])?,
            vec![xs, ys],
        )?;
        let mut sol = Self {
            problem: *problem,
            case,
            trajectory,
            cubics,
            theta: None,
            t1: None,
            t2: None,
            arc,
            pi: None,
            exit_jump: None,
            cost,
            min_clearance: 0.0,
            min_clearance_time: problem.t0,
            diagnostics: DiDiagnostics::default(),
        };
        let (t, c) = sol.closest_approach()?;
        sol.min_clearance = c;
        sol.min_clearance_time = t;
        sol.diagnostics.boundary_residual = sol.boundary_residual()?;
        sol.audit_junctions()?;
        Ok(sol)
    }

    fn vec2(&self, t: f64, order: usize, side: Side) -> Result<[f64; 2]> {
        let v = self.trajectory.eval_side(t, order, side)?;
        Ok([v[0], v[1]])
    }

    pub fn position(&self, t: f64) -> Result<[f64; 2]> {
        self.vec2(t, 0, Side::Left)
    }

    pub fn velocity(&self, t: f64) -> Result<[f64; 2]> {
        self.vec2(t, 1, Side::Left)
    }

    pub fn control(&self, t: f64) -> Result<[f64; 2]> {
        self.vec2(t, 2, Side::Left)
    }

    pub fn clearance(&self, t: f64) -> Result<f64> {
        Ok(self.problem.clearance_at(self.position(t)?))
    }

    pub fn junction_times(&self) -> &[f64] {
        self.trajectory.junction_times()
    }

    fn boundary_residual(&self) -> Result<f64> {
        let p = &self.problem;
        let start = [
            sub(self.vec2(p.t0, 0, Side::Right)?, p.p0),
            sub(self.vec2(p.t0, 1, Side::Right)?, p.v0),
        ];
        let end = [sub(self.position(p.tf)?, p.pf), self.control(p.tf)?];
        Ok(start
            .iter()
            .chain(end.iter())
            .flat_map(|v| v.iter())
            .fold(0.0_f64, |m, x| m.max(x.abs())))
    }

    /// Time and value of the smallest clearance, by sampling each segment
    /// and refining the best bracket with golden-section search.
    fn closest_approach(&self) -> Result<(f64, f64)> {
        let (t0, tf) = (self.problem.t0, self.problem.tf);
        let n = CLEARANCE_SAMPLES;
        let h = (tf - t0) / (n - 1) as f64;
        let mut probes: Vec<f64> = (0..n).map(|i| t0 + i as f64 * h).collect();
        probes.extend_from_slice(self.trajectory.junction_times());
        let mut best = (t0, f64::INFINITY);
        for &t in &probes {
            let c = self.clearance(t)?;
            if c < best.1 {
                best = (t, c);
            }
        }
        let (a, b) = ((best.0 - h).max(t0), (best.0 + h).min(tf));
        let (t, c) = golden_section_min(|t| self.clearance(t).unwrap_or(f64::INFINITY), a, b, 1e-10);
        Ok(if c < best.1 { (t, c) } else { best })
    }

    fn audit_junctions(&mut self) -> Result<()> {
        let center = self.problem.obstacle.center;
        let mut d = DiDiagnostics {
            boundary_residual: self.diagnostics.boundary_residual,
            ..DiDiagnostics::default()
        };
        for &t in self.trajectory.junction_times().to_vec().iter() {
            let um = self.vec2(t, 2, Side::Left)?;
            let up = self.vec2(t, 2, Side::Right)?;
            let jm = self.vec2(t, 3, Side::Left)?;
            let jp = self.vec2(t, 3, Side::Right)?;
            let v = self.vec2(t, 1, Side::Left)?;
            let ph = sub(self.position(t)?, center);
            d.control_jump = d.control_jump.max(norm(sub(up, um)));
            d.radial_velocity = d.radial_velocity.max(dot(ph, v).abs());
            d.tangential_jerk_jump = d.tangential_jerk_jump.max((dot(jp, v) - dot(jm, v)).abs());
        }
        if let Some(arc) = &self.arc {
            let base = arc.first_integral(arc.t_start);
            let mut drift = 0.0_f64;
            for (i, _) in arc.states.iter().enumerate() {
                let t = arc.t_start + i as f64 * arc.step;
                drift = drift.max((arc.first_integral(t) - base).abs());
            }
            d.first_integral_drift = drift;
        }
        self.diagnostics = d;
        Ok(())
    }
}
