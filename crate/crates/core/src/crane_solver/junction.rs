use super::solution::BoundSide;
use super::unconstrained::{unconstrained_basis, unconstrained_segment};
use super::{CraneBoundary, CraneParams};
use crate::flat_model::{crane_boundary_to_flat, AnalyticSegment, Basis, Term};
use crate::numerics::{DenseSystem, LuFactor, Matrix};
use crate::{Error, Result};

/// Derivative order matched at each junction in addition to the state
/// orders 0..=3. Snap continuity is then driven to zero by the outer
/// root-find on [`junction_residual`].
pub const CLOSING_ORDER: usize = 5;

/// Integration constants of an unconstrained–arc–unconstrained solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstrainedCoefficients {
    /// `c₀…c₇` of the entry segment.
    pub entry: [f64; 8],
    /// `c₈, c₉` of the arc.
    pub arc: [f64; 2],
    /// Constants of the exit segment.
    pub exit: [f64; 8],
    /// Local time origins of the three segments.
    pub refs: [f64; 3],
    pub bound: f64,
}

impl ConstrainedCoefficients {
    pub fn segments(
        &self,
        params: &CraneParams,
        t0: f64,
        t1: f64,
        t2: f64,
        tf: f64,
    ) -> Result<[AnalyticSegment; 3]> {
        Ok([
            unconstrained_segment(params, t0, t1, self.refs[0], &self.entry)?,
            arc_segment(params, t1, t2, self.refs[1], self.bound, self.arc)?,
            unconstrained_segment(params, t2, tf, self.refs[2], &self.exit)?,
        ])
    }
}

/// Arc on the bound: `y = bound + c₈ cos(ωτ) + c₉ sin(ωτ)`, which keeps
/// `y + (l/g)ÿ` equal to the bound.
pub fn arc_segment(
    params: &CraneParams,
    t_start: f64,
    t_end: f64,
    t_ref: f64,
    bound: f64,
    c: [f64; 2],
) -> Result<AnalyticSegment> {
    let w = params.omega();
    AnalyticSegment::new(
        t_start,
        t_end,
        t_ref,
        vec![
            Term::new(Basis::Monomial(0), bound),
            Term::new(Basis::Cos(w), c[0]),
            Term::new(Basis::Sin(w), c[1]),
        ],
    )
}

/// The 18×18 linear system for fixed junction times.
#[derive(Debug, Clone)]
pub struct JunctionSystem {
    pub system: DenseSystem,
    pub t1: f64,
    pub t2: f64,
    pub refs: [f64; 3],
    pub bound: f64,
}

impl JunctionSystem {
    pub fn solve(&self) -> Result<(ConstrainedCoefficients, f64)> {
        let lu = LuFactor::new(&self.system.matrix).map_err(|e| match e {
            Error::Singular { .. } => Error::RankDeficient {
                rank: 17,
                cols: 18,
                condition: f64::INFINITY,
            },
            other => other,
        })?;
        let condition = lu.condition_estimate();
        if condition > 1e14 {
            return Err(Error::RankDeficient {
                rank: 17,
                cols: 18,
                condition,
            });
        }
        let x = lu.solve(&self.system.rhs);
        let mut entry = [0.0; 8];
        let mut exit = [0.0; 8];
        entry.copy_from_slice(&x[0..8]);
        exit.copy_from_slice(&x[10..18]);
        Ok((
            ConstrainedCoefficients {
                entry,
                arc: [x[8], x[9]],
                exit,
                refs: self.refs,
                bound: self.bound,
            },
            condition,
        ))
    }
}

pub(crate) fn default_refs(t0: f64, t1: f64, t2: f64, tf: f64) -> [f64; 3] {
    [0.5 * (t0 + t1), t1, 0.5 * (t2 + tf)]
}

/// Assembles boundary rows, state continuity at both junctions and the
/// closing-order continuity rows, all linear in the 18 constants.
pub fn assemble_junction_system(
    t1: f64,
    t2: f64,
    params: &CraneParams,
    boundary: &CraneBoundary,
    side: BoundSide,
) -> Result<JunctionSystem> {
    let refs = default_refs(boundary.t0, t1, t2, boundary.tf);
    assemble_with(t1, t2, params, boundary, side, refs, CLOSING_ORDER)
}

/// As [`assemble_junction_system`] with explicit reference times for the
/// three segments.
pub fn assemble_junction_system_with_refs(
    t1: f64,
    t2: f64,
    params: &CraneParams,
    boundary: &CraneBoundary,
    side: BoundSide,
    refs: [f64; 3],
) -> Result<JunctionSystem> {
    assemble_with(t1, t2, params, boundary, side, refs, CLOSING_ORDER)
}

pub(crate) fn assemble_with(
    t1: f64,
    t2: f64,
    params: &CraneParams,
    boundary: &CraneBoundary,
    side: BoundSide,
    refs: [f64; 3],
    closing_order: usize,
) -> Result<JunctionSystem> {
    let (t0, tf) = (boundary.t0, boundary.tf);
    if !(t0 < t1 && t1 < t2 && t2 < tf) {
        return Err(Error::DegenerateJunctions(format!(
            "need t0 < t1 < t2 < tf, got {t0} < {t1} < {t2} < {tf}"
        )));
    }
    let bound = match side {
        BoundSide::Upper => params.p_max,
        BoundSide::Lower => params.p_min,
    };
    let flat = crane_boundary_to_flat(boundary, params);
    let basis = unconstrained_basis(params);
    let w = params.omega();
    let arc_basis = [Basis::Cos(w), Basis::Sin(w)];
    let mut a = Matrix::zeros(18, 18);
    let mut rhs = vec![0.0; 18];
    let mut row = 0;
    for order in 0..4 {
        for (j, b) in basis.iter().enumerate() {
            a[(row, j)] = b.derivative(t0 - refs[0], order);
        }
        rhs[row] = flat.initial[order];
        row += 1;
    }
    for order in 0..4 {
        for (j, b) in basis.iter().enumerate() {
            a[(row, 10 + j)] = b.derivative(tf - refs[2], order);
        }
        rhs[row] = flat.terminal[order];
        row += 1;
    }
    let orders = [0, 1, 2, 3, closing_order];
    // Entry junction: unconstrained − arc = 0; the arc's constant goes right.
    for &order in &orders {
        for (j, b) in basis.iter().enumerate() {
            a[(row, j)] = b.derivative(t1 - refs[0], order);
        }
        for (j, b) in arc_basis.iter().enumerate() {
            a[(row, 8 + j)] = -b.derivative(t1 - refs[1], order);
        }
        rhs[row] = if order == 0 { bound } else { 0.0 };
        row += 1;
    }
    // Exit junction: arc − unconstrained = 0.
    for &order in &orders {
        for (j, b) in arc_basis.iter().enumerate() {
            a[(row, 8 + j)] = b.derivative(t2 - refs[1], order);
        }
        for (j, b) in basis.iter().enumerate() {
            a[(row, 10 + j)] = -b.derivative(t2 - refs[2], order);
        }
        rhs[row] = if order == 0 { -bound } else { 0.0 };
        row += 1;
    }
    debug_assert_eq!(row, 18);
    Ok(JunctionSystem {
        system: DenseSystem::new(a, rhs)?,
        t1,
        t2,
        refs,
        bound,
    })
}

/// Snap mismatch (unconstrained minus arc) at the entry and exit junctions.
pub fn junction_residual(
    coefficients: &ConstrainedCoefficients,
    t1: f64,
    t2: f64,
    params: &CraneParams,
) -> [f64; 2] {
    let r = params.rate();
    let w = params.omega();
    let snap_unconstrained = |c: &[f64; 8], tau: f64| {
        c[6] * r.powi(4) * (r * tau).exp()
            + c[7] * r.powi(4) * (-r * tau).exp()
            + 24.0 * c[4]
            + 120.0 * c[5] * tau
    };
    let snap_arc = |tau: f64| {
        let c = coefficients.arc;
        (params.g / params.l).powi(2) * (c[0] * (w * tau).cos() + c[1] * (w * tau).sin())
    };
    let refs = coefficients.refs;
    [
        snap_unconstrained(&coefficients.entry, t1 - refs[0]) - snap_arc(t1 - refs[1]),
        snap_unconstrained(&coefficients.exit, t2 - refs[2]) - snap_arc(t2 - refs[1]),
    ]
}
