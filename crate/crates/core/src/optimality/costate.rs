use super::constraint::ConstraintStack;
use super::cost::{Jet, RunningCost};
use crate::flat_model::{PiecewiseTrajectory, Side, MAX_ORDER};
use crate::numerics::CentralStencil;
use crate::{Error, Result};

/// `λ^{y_i^{(j)}}` samples: `values[i][j][p]` at `grid[p]`.
#[derive(Debug, Clone)]
pub struct CostateTrajectory {
    pub grid: Vec<f64>,
    pub values: Vec<Vec<Vec<f64>>>,
}

/// Euler-Lagrange residual samples per chain; `None` inside guard bands.
#[derive(Debug, Clone)]
pub struct ElResidual {
    pub grid: Vec<f64>,
    /// Segment containing each grid point.
    pub segment: Vec<usize>,
    pub values: Vec<Vec<Option<f64>>>,
    /// Largest magnitude among the individual terms at each point.
    pub term_scale: Vec<Vec<f64>>,
}

impl ElResidual {
    fn select(&self, chain: usize, keep: &dyn Fn(usize) -> bool) -> (f64, f64) {
        let mut sup = 0.0_f64;
        let mut scale = 0.0_f64;
        for (p, v) in self.values[chain].iter().enumerate() {
            if let Some(r) = v {
                if keep(self.segment[p]) {
                    sup = sup.max(r.abs());
                    scale = scale.max(self.term_scale[chain][p]);
                }
            }
        }
        (sup, scale)
    }

    pub fn sup(&self, chain: usize) -> f64 {
        self.select(chain, &|_| true).0
    }

    /// Sup-norm relative to the largest term magnitude.
    pub fn relative_sup(&self, chain: usize) -> f64 {
        self.relative_sup_on(chain, &|_| true)
    }

    /// As [`relative_sup`](Self::relative_sup), restricted to the segments
    /// accepted by `keep`.
    pub fn relative_sup_on(&self, chain: usize, keep: &dyn Fn(usize) -> bool) -> f64 {
        let (sup, scale) = self.select(chain, keep);
        if scale == 0.0 {
            sup
        } else {
            sup / scale
        }
    }

    pub fn evaluated_points(&self, chain: usize) -> usize {
        self.values[chain].iter().flatten().count()
    }
}

fn grid_step(grid: &[f64], needed: usize) -> Result<f64> {
    if grid.len() < needed.max(2) {
        return Err(Error::StencilUnderflow(format!(
            "grid has {} points, stencil needs {needed}",
            grid.len()
        )));
    }
    let h = grid[1] - grid[0];
    if !(h > 0.0) {
        return Err(Error::StencilUnderflow("grid must be strictly increasing".into()));
    }
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1e-300) + 1e-12 {
            return Err(Error::StencilUnderflow("grid must be uniformly spaced".into()));
        }
    }
    Ok(h)
}

pub(crate) fn segment_jet(traj: &PiecewiseTrajectory, seg: usize, t: f64) -> Jet {
    traj.spec()
        .chain_lengths
        .iter()
        .enumerate()
        .map(|(c, &k)| {
            (0..=k)
                .map(|n| traj.segments(c)[seg].derivative(t, n))
                .collect()
        })
        .collect()
}

/// `Ψ_{y_i^{(m)}} + μᵀ g_{y_i^{(m)}}` evaluated from one segment's closed form.
struct Inner<'a> {
    traj: &'a PiecewiseTrajectory,
    cost: &'a dyn RunningCost,
    constraints: &'a [ConstraintStack],
}

impl Inner<'_> {
    fn active_on(&self, stack: &ConstraintStack, seg: usize) -> bool {
        let (a, b) = self.traj.segment_bounds(seg);
        let mid = 0.5 * (a + b);
        stack.active.iter().any(|&(lo, hi)| lo <= mid && mid <= hi)
    }

    fn eval(&self, seg: usize, t: f64, chain: usize, m: usize) -> Result<f64> {
        let jet = segment_jet(self.traj, seg, t);
        let mut v = self.cost.partial(&jet, t, chain, m);
        for stack in self.constraints {
            if self.active_on(stack, seg) {
                let mu = stack.multiplier.as_ref().ok_or_else(|| {
                    Error::MissingMultiplier(format!(
                        "constraint {} active on segment {seg}",
                        stack.constraint.name()
                    ))
                })?;
                v += mu(t) * stack.constraint.g_partial(&jet, t, chain, m);
            }
        }
        Ok(v)
    }

    /// `d^d/dt^d` of the inner function by a central stencil with step `h`.
    fn derivative(&self, seg: usize, t: f64, chain: usize, m: usize, d: usize, h: f64) -> Result<f64> {
        if d == 0 {
            return self.eval(seg, t, chain, m);
        }
        let st = CentralStencil::new(d);
        let mut samples = Vec::with_capacity(st.offsets().len());
        for &o in st.offsets() {
            samples.push(self.eval(seg, t + o as f64 * h, chain, m)?);
        }
        Ok(st.apply_samples(&samples, h))
    }
}

/// Costates from state and control: `λ^{y_i^{(j)}} = Σ_{n=1}^{k_i−j} (−1)^n
/// d^{n−1}/dt^{n−1}(Ψ_{y_i^{(j+n)}} + μᵀg_{y_i^{(j+n)}})`. Outer derivatives
/// are central differences with the grid spacing, taken on the closed form
/// of the segment containing each grid point.
pub fn reconstruct_costates(
    traj: &PiecewiseTrajectory,
    cost: &dyn RunningCost,
    constraints: &[ConstraintStack],
    grid: &[f64],
) -> Result<CostateTrajectory> {
    let kmax = *traj.spec().chain_lengths.iter().max().unwrap_or(&1);
    let width = if kmax >= 2 {
        2 * CentralStencil::new(kmax - 1).half_width() + 1
    } else {
        1
    };
    let h = grid_step(grid, width)?;
    let inner = Inner {
        traj,
        cost,
        constraints,
    };
    let mut values: Vec<Vec<Vec<f64>>> = traj
        .spec()
        .chain_lengths
        .iter()
        .map(|&k| vec![Vec::with_capacity(grid.len()); k])
        .collect();
    for &t in grid {
        let seg = traj.segment_index(t, Side::Left)?;
        for (i, &k) in traj.spec().chain_lengths.iter().enumerate() {
            for j in 0..k {
                let mut lam = 0.0;
                for n in 1..=(k - j) {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    lam += sign * inner.derivative(seg, t, i, j + n, n - 1, h)?;
                }
                values[i][j].push(lam);
            }
        }
    }
    Ok(CostateTrajectory {
        grid: grid.to_vec(),
        values,
    })
}

fn near_junction(traj: &PiecewiseTrajectory, t: f64, band: f64) -> bool {
    traj.junction_times().iter().any(|&j| (t - j).abs() <= band)
}

/// `Σ_{n=0}^{k_i} (−1)^n dⁿ/dtⁿ(Ψ_{y_i^{(n)}} + μᵀg_{y_i^{(n)}})` by central
/// differences; points within two stencil widths of a junction are skipped.
pub fn el_residual(
    traj: &PiecewiseTrajectory,
    cost: &dyn RunningCost,
    constraints: &[ConstraintStack],
    grid: &[f64],
) -> Result<ElResidual> {
    let kmax = *traj.spec().chain_lengths.iter().max().unwrap_or(&1);
    let hw = CentralStencil::new(kmax).half_width();
    let h = grid_step(grid, 2 * hw + 1)?;
    let band = 2.0 * (2 * hw + 1) as f64 * h;
    let inner = Inner {
        traj,
        cost,
        constraints,
    };
    let m = traj.spec().num_chains();
    let mut values = vec![Vec::with_capacity(grid.len()); m];
    let mut term_scale = vec![Vec::with_capacity(grid.len()); m];
    let mut segment = Vec::with_capacity(grid.len());
    for &t in grid {
        let skip = near_junction(traj, t, band);
        let seg = traj.segment_index(t, Side::Left)?;
        segment.push(seg);
        for (i, &k) in traj.spec().chain_lengths.iter().enumerate() {
            if skip {
                values[i].push(None);
                term_scale[i].push(0.0);
                continue;
            }
            let mut r = 0.0;
            let mut big = 0.0_f64;
            for n in 0..=k {
                let term = inner.derivative(seg, t, i, n, n, h)?;
                big = big.max(term.abs());
                r += if n % 2 == 0 { term } else { -term };
            }
            values[i].push(Some(r));
            term_scale[i].push(big);
        }
    }
    Ok(ElResidual {
        grid: grid.to_vec(),
        segment,
        values,
        term_scale,
    })
}

/// Exact Euler-Lagrange residual for costs whose partials are linear in the
/// derivatives, with no active constraints: every term is a closed-form
/// derivative of the flat output.
pub fn el_residual_analytic(
    traj: &PiecewiseTrajectory,
    cost: &dyn RunningCost,
    grid: &[f64],
) -> Result<ElResidual> {
    let m = traj.spec().num_chains();
    let mut plan: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
    for (i, &k) in traj.spec().chain_lengths.iter().enumerate() {
        let mut terms = Vec::new();
        for n in 0..=k {
            let lin = cost.linear_partial(i, n).ok_or_else(|| {
                Error::InvalidParameter("cost partials are not linear in the derivatives".into())
            })?;
            for (order, w) in lin {
                let total = order + n;
                if total > MAX_ORDER {
                    return Err(Error::OrderTooHigh {
                        order: total,
                        max: MAX_ORDER,
                    });
                }
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                terms.push((total, sign * w));
            }
        }
        plan.push(terms);
    }
    let mut values = vec![Vec::with_capacity(grid.len()); m];
    let mut term_scale = vec![Vec::with_capacity(grid.len()); m];
    let mut segment = Vec::with_capacity(grid.len());
    for &t in grid {
        let seg = traj.segment_index(t, Side::Left)?;
        segment.push(seg);
        for (i, terms) in plan.iter().enumerate() {
            let mut r = 0.0;
            let mut big = 0.0_f64;
            for &(order, w) in terms {
                let term = w * traj.segments(i)[seg].derivative(t, order);
                big = big.max(term.abs());
                r += term;
            }
            values[i].push(Some(r));
            term_scale[i].push(big);
        }
    }
    Ok(ElResidual {
        grid: grid.to_vec(),
        segment,
        values,
        term_scale,
    })
}

/// Costate-equation consistency: the central-difference rate of each
/// reconstructed costate against `−(Ψ + μᵀg)_{y^{(j)}} − λ^{y^{(j−1)}}`.
/// Returns, per chain and level, the largest mismatch relative to the
/// largest rate magnitude on that chain, over grid points whose segment is
/// accepted by `keep`.
pub fn costate_ode_residual(
    traj: &PiecewiseTrajectory,
    cost: &dyn RunningCost,
    constraints: &[ConstraintStack],
    costates: &CostateTrajectory,
    keep: &dyn Fn(usize) -> bool,
) -> Result<Vec<Vec<f64>>> {
    let grid = &costates.grid;
    let st = CentralStencil::new(1);
    let hw = st.half_width();
    let h = grid_step(grid, 2 * hw + 1)?;
    let kmax = *traj.spec().chain_lengths.iter().max().unwrap_or(&1);
    let band = 2.0 * (2 * CentralStencil::new(kmax).half_width() + 1) as f64 * h;
    let inner = Inner {
        traj,
        cost,
        constraints,
    };
    let mut out = Vec::new();
    for (i, &k) in traj.spec().chain_lengths.iter().enumerate() {
        let mut worst = vec![0.0_f64; k];
        let mut scale = 0.0_f64;
        for p in hw..grid.len() - hw {
            let t = grid[p];
            if near_junction(traj, t, band) {
                continue;
            }
            let seg = traj.segment_index(t, Side::Left)?;
            if !keep(seg) {
                continue;
            }
            for j in 0..k {
                let window = &costates.values[i][j][p - hw..=p + hw];
                let rate = st.apply_samples(window, h);
                let mut expected = -inner.eval(seg, t, i, j)?;
                if j > 0 {
                    expected -= costates.values[i][j - 1][p];
                }
                scale = scale.max(rate.abs()).max(expected.abs());
                worst[j] = worst[j].max((rate - expected).abs());
            }
        }
        if scale > 0.0 {
            for w in &mut worst {
                *w /= scale;
            }
        }
        out.push(worst);
    }
    Ok(out)
}
