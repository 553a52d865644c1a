use serde::{Deserialize, Serialize};

use super::segment::{Segment, MAX_ORDER};
use crate::{Error, Result};

/// Default tolerance for the junction continuity audit.
pub const CONTINUITY_TOL: f64 = 1e-6;

const TIME_SLACK: f64 = 1e-12;

/// Grouping of flat outputs into integrator chains of length `k_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorChainSpec {
    pub chain_lengths: Vec<usize>,
    pub labels: Vec<String>,
}

impl IntegratorChainSpec {
    pub fn new(chain_lengths: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if chain_lengths.is_empty() || chain_lengths.iter().any(|&k| k == 0) {
            return Err(Error::InvalidParameter(
                "every chain length must be at least 1".into(),
            ));
        }
        if labels.len() != chain_lengths.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} chains",
                labels.len(),
                chain_lengths.len()
            )));
        }
        Ok(Self {
            chain_lengths,
            labels,
        })
    }

    pub fn single(length: usize, label: &str) -> Result<Self> {
        Self::new(vec![length], vec![label.to_string()])
    }

    /// Number of chains, which is also the control dimension.
    pub fn num_chains(&self) -> usize {
        self.chain_lengths.len()
    }

    pub fn state_dim(&self) -> usize {
        self.chain_lengths.iter().sum()
    }

    pub fn control_dim(&self) -> usize {
        self.num_chains()
    }
}

/// Which limit to take at a junction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    #[default]
    Left,
    Right,
}

/// Contiguous segments per chain over a common set of breakpoints.
#[derive(Debug, Clone)]
pub struct PiecewiseTrajectory {
    spec: IntegratorChainSpec,
    chains: Vec<Vec<Segment>>,
    junctions: Vec<f64>,
}

impl PiecewiseTrajectory {
    pub fn new(spec: IntegratorChainSpec, chains: Vec<Vec<Segment>>) -> Result<Self> {
        Self::with_tolerance(spec, chains, CONTINUITY_TOL)
    }

    /// Builds the trajectory, rejecting gaps, overlaps and state
    /// discontinuities larger than `tol` at interior junctions.
    pub fn with_tolerance(
        spec: IntegratorChainSpec,
        chains: Vec<Vec<Segment>>,
        tol: f64,
    ) -> Result<Self> {
        if chains.len() != spec.num_chains() {
            return Err(Error::Dimension(format!(
                "{} segment lists for {} chains",
                chains.len(),
                spec.num_chains()
            )));
        }
        let first = &chains[0];
        if first.is_empty() {
            return Err(Error::InvalidParameter("chain without segments".into()));
        }
        for (c, segs) in chains.iter().enumerate() {
            if segs.len() != first.len() {
                return Err(Error::Dimension(format!(
                    "chain {c} has {} segments, chain 0 has {}",
                    segs.len(),
                    first.len()
                )));
            }
            for (k, seg) in segs.iter().enumerate() {
                let (a, b) = (seg.t_start(), first[k].t_start());
                let (c_end, d_end) = (seg.t_end(), first[k].t_end());
                if (a - b).abs() > TIME_SLACK * b.abs().max(1.0)
                    || (c_end - d_end).abs() > TIME_SLACK * d_end.abs().max(1.0)
                {
                    return Err(Error::InvalidParameter(format!(
                        "chain {c} segment {k} breakpoints differ from chain 0"
                    )));
                }
            }
        }
        for w in first.windows(2) {
            let (end, start) = (w[0].t_end(), w[1].t_start());
            if (end - start).abs() > TIME_SLACK * end.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "segments are not contiguous: {end} then {start}"
                )));
            }
        }
        let junctions: Vec<f64> = first.iter().skip(1).map(|s| s.t_start()).collect();
        for (chain, segs) in chains.iter().enumerate() {
            let k = spec.chain_lengths[chain];
            for (j, w) in segs.windows(2).enumerate() {
                let t = junctions[j];
                for order in 0..k {
                    let jump = w[1].derivative(t, order) - w[0].derivative(t, order);
                    if jump.abs() > tol {
                        return Err(Error::Discontinuous {
                            t,
                            chain,
                            order,
                            jump,
                        });
                    }
                }
            }
        }
        Ok(Self {
            spec,
            chains,
            junctions,
        })
    }

    pub fn spec(&self) -> &IntegratorChainSpec {
        &self.spec
    }

    pub fn t0(&self) -> f64 {
        self.chains[0][0].t_start()
    }

    pub fn tf(&self) -> f64 {
        self.chains[0].last().map(|s| s.t_end()).unwrap_or(f64::NAN)
    }

    pub fn junction_times(&self) -> &[f64] {
        &self.junctions
    }

    pub fn num_segments(&self) -> usize {
        self.chains[0].len()
    }

    pub fn segments(&self, chain: usize) -> &[Segment] {
        &self.chains[chain]
    }

    pub fn segment_bounds(&self, index: usize) -> (f64, f64) {
        let s = &self.chains[0][index];
        (s.t_start(), s.t_end())
    }

    /// Index of the segment containing `t`; at a junction the side picks
    /// the left or right neighbour.
    pub fn segment_index(&self, t: f64, side: Side) -> Result<usize> {
        self.check_time(t)?;
        let idx = match side {
            Side::Left => self.junctions.iter().filter(|&&j| t > j).count(),
            Side::Right => self.junctions.iter().filter(|&&j| t >= j).count(),
        };
        Ok(idx)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let (t0, tf) = (self.t0(), self.tf());
        let slack = TIME_SLACK * t0.abs().max(tf.abs()).max(1.0);
        if !(t >= t0 - slack && t <= tf + slack) {
            return Err(Error::OutsideHorizon { t, t0, tf });
        }
        Ok(())
    }

    fn check_order(order: usize) -> Result<()> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh {
                order,
                max: MAX_ORDER,
            });
        }
        Ok(())
    }

    /// Derivative of one chain with the default left-limit convention.
    pub fn eval_chain(&self, chain: usize, t: f64, order: usize) -> Result<f64> {
        self.eval_chain_side(chain, t, order, Side::Left)
    }

    pub fn eval_chain_side(&self, chain: usize, t: f64, order: usize, side: Side) -> Result<f64> {
        Self::check_order(order)?;
        let idx = self.segment_index(t, side)?;
        Ok(self.chains[chain][idx].derivative(t, order))
    }

    /// `order`-th derivative of every chain at `t` (left limit at junctions).
    pub fn eval(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        self.eval_side(t, order, Side::Left)
    }

    pub fn eval_side(&self, t: f64, order: usize, side: Side) -> Result<Vec<f64>> {
        Self::check_order(order)?;
        let idx = self.segment_index(t, side)?;
        Ok(self.chains.iter().map(|c| c[idx].derivative(t, order)).collect())
    }

    /// Closed-form value of a given segment at any `t`, including points
    /// beyond its interval.
    pub fn eval_segment(&self, segment: usize, chain: usize, t: f64, order: usize) -> Result<f64> {
        Self::check_order(order)?;
        Ok(self.chains[chain][segment].derivative(t, order))
    }

    /// Flat state `s` (orders `0..k_i` per chain, stacked) at `t`.
    pub fn state(&self, t: f64, side: Side) -> Result<Vec<f64>> {
        let idx = self.segment_index(t, side)?;
        let mut s = Vec::with_capacity(self.spec.state_dim());
        for (c, &k) in self.spec.chain_lengths.iter().enumerate() {
            for order in 0..k {
                s.push(self.chains[c][idx].derivative(t, order));
            }
        }
        Ok(s)
    }

    /// Flat control `a` (order `k_i` per chain) at `t`.
    pub fn control(&self, t: f64, side: Side) -> Result<Vec<f64>> {
        let idx = self.segment_index(t, side)?;
        Ok(self
            .spec
            .chain_lengths
            .iter()
            .enumerate()
            .map(|(c, &k)| self.chains[c][idx].derivative(t, k))
            .collect())
    }

    /// Largest jump of the given order across interior junctions, per chain.
    pub fn max_jump(&self, order: usize) -> Vec<f64> {
        self.chains
            .iter()
            .map(|segs| {
                segs.windows(2)
                    .zip(&self.junctions)
                    .map(|(w, &t)| (w[1].derivative(t, order) - w[0].derivative(t, order)).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}
