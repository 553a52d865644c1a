use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::sync::Arc;

use crate::{Error, Result};

/// Highest time derivative any segment evaluates.
pub const MAX_ORDER: usize = 8;

/// Closed-form basis function of local time `τ = t − t_ref`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameter", rename_all = "snake_case")]
pub enum Basis {
    Monomial(u32),
    Exp(f64),
    Cos(f64),
    Sin(f64),
}

impl Basis {
    pub fn derivative(&self, tau: f64, order: usize) -> f64 {
        match *self {
            Basis::Monomial(d) => {
                let d = d as usize;
                if order > d {
                    return 0.0;
                }
                let falling: f64 = ((d - order + 1)..=d).map(|k| k as f64).product();
                falling * tau.powi((d - order) as i32)
            }
            Basis::Exp(r) => r.powi(order as i32) * (r * tau).exp(),
            Basis::Cos(w) => w.powi(order as i32) * quarter_shift(w * tau, order, true),
            Basis::Sin(w) => w.powi(order as i32) * quarter_shift(w * tau, order, false),
        }
    }

    fn same_kind(&self, other: &Basis) -> bool {
        match (self, other) {
            (Basis::Monomial(a), Basis::Monomial(b)) => a == b,
            (Basis::Exp(a), Basis::Exp(b)) => a == b,
            (Basis::Cos(a), Basis::Cos(b)) => a == b,
            (Basis::Sin(a), Basis::Sin(b)) => a == b,
            _ => false,
        }
    }
}

/// `cos` or `sin` of `x + order·π/2`, without rounding the shift.
fn quarter_shift(x: f64, order: usize, cosine: bool) -> f64 {
    let k = (order + if cosine { 0 } else { 3 }) % 4;
    match k {
        0 => x.cos(),
        1 => -x.sin(),
        2 => -x.cos(),
        _ => x.sin(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(flatten)]
    pub basis: Basis,
    pub coefficient: f64,
}

impl Term {
    pub fn new(basis: Basis, coefficient: f64) -> Self {
        Self { basis, coefficient }
    }
}

/// One flat-output piece `Σ cᵢ bᵢ(t − t_ref)` on `[t_start, t_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub t_ref: f64,
    pub terms: Vec<Term>,
}

impl AnalyticSegment {
    pub fn new(t_start: f64, t_end: f64, t_ref: f64, terms: Vec<Term>) -> Result<Self> {
        if !(t_start < t_end) {
            return Err(Error::InvalidParameter(format!(
                "segment needs t_start < t_end, got [{t_start}, {t_end}]"
            )));
        }
        Ok(Self {
            t_start,
            t_end,
            t_ref,
            terms,
        })
    }

    /// `order`-th derivative at `t`; `t` may lie outside the segment, in
    /// which case the closed form is extended.
    pub fn derivative(&self, t: f64, order: usize) -> f64 {
        let tau = t - self.t_ref;
        self.terms
            .iter()
            .map(|term| term.coefficient * term.basis.derivative(tau, order))
            .sum()
    }

    /// Same function expressed about a new origin `t_ref`.
    pub fn reparametrize(&self, t_ref: f64) -> AnalyticSegment {
        let delta = t_ref - self.t_ref;
        let mut out: Vec<Term> = Vec::new();
        let mut push = |basis: Basis, c: f64| {
            if let Some(t) = out.iter_mut().find(|t| t.basis.same_kind(&basis)) {
                t.coefficient += c;
            } else {
                out.push(Term::new(basis, c));
            }
        };
        for term in &self.terms {
            let c = term.coefficient;
            match term.basis {
                Basis::Monomial(d) => {
                    // (τ' + δ)^d = Σ C(d, j) δ^(d−j) τ'^j
                    let mut binom = 1.0;
                    for j in 0..=d {
                        push(Basis::Monomial(j), c * binom * delta.powi((d - j) as i32));
                        binom = binom * (d - j) as f64 / (j + 1) as f64;
                    }
                }
                Basis::Exp(r) => push(Basis::Exp(r), c * (r * delta).exp()),
                Basis::Cos(w) => {
                    let (s, co) = (w * delta).sin_cos();
                    push(Basis::Cos(w), c * co);
                    push(Basis::Sin(w), -c * s);
                }
                Basis::Sin(w) => {
                    let (s, co) = (w * delta).sin_cos();
                    push(Basis::Sin(w), c * co);
                    push(Basis::Cos(w), c * s);
                }
            }
        }
        AnalyticSegment {
            t_start: self.t_start,
            t_end: self.t_end,
            t_ref,
            terms: out,
        }
    }
}

/// A numerically represented flat-output piece.
pub trait ChainCurve: Debug + Send + Sync {
    fn t_start(&self) -> f64;
    fn t_end(&self) -> f64;
    fn derivative(&self, t: f64, order: usize) -> f64;
    /// Short description used in segment serialization.
    fn describe(&self) -> serde_json::Value;
}

#[derive(Debug, Clone)]
pub enum Segment {
    Analytic(AnalyticSegment),
    Curve(Arc<dyn ChainCurve>),
}

impl Segment {
    pub fn t_start(&self) -> f64 {
        match self {
            Segment::Analytic(s) => s.t_start,
            Segment::Curve(c) => c.t_start(),
        }
    }

    pub fn t_end(&self) -> f64 {
        match self {
            Segment::Analytic(s) => s.t_end,
            Segment::Curve(c) => c.t_end(),
        }
    }

    pub fn derivative(&self, t: f64, order: usize) -> f64 {
        match self {
            Segment::Analytic(s) => s.derivative(t, order),
            Segment::Curve(c) => c.derivative(t, order),
        }
    }

    pub fn as_analytic(&self) -> Option<&AnalyticSegment> {
        match self {
            Segment::Analytic(s) => Some(s),
            Segment::Curve(_) => None,
        }
    }
}

impl From<AnalyticSegment> for Segment {
    fn from(s: AnalyticSegment) -> Self {
        Segment::Analytic(s)
    }
}
