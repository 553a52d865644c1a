use std::fmt::Debug;
use std::sync::Arc;

use crate::flat_model::IntegratorChainSpec;

/// Flat jet: `jet[i][n]` is `y_i^{(n)}` for `n = 0..=k_i`.
pub type Jet = Vec<Vec<f64>>;

/// Running cost `Ψ(s, a, t)` with partials per derivative level.
pub trait RunningCost: Debug + Send + Sync {
    fn chains(&self) -> &IntegratorChainSpec;

    fn value(&self, jet: &Jet, t: f64) -> f64;

    /// `∂Ψ/∂y_i^{(n)}` for `n = 0..=k_i`.
    fn partial(&self, jet: &Jet, t: f64, chain: usize, n: usize) -> f64;

    /// When `∂Ψ/∂y_i^{(n)} = Σ w_m y_i^{(m)}`, the `(m, w_m)` pairs. Enables
    /// exact time derivatives of the partials from closed-form segments.
    fn linear_partial(&self, _chain: usize, _n: usize) -> Option<Vec<(usize, f64)>> {
        None
    }

    /// Whether `Ψ = f(s) + c‖a‖²` with `c > 0`.
    fn quadratic_in_control(&self) -> bool {
        false
    }
}

/// `Ψ = ½ Σ_i Σ_n w_{i,n} (y_i^{(n)})²`.
#[derive(Debug, Clone)]
pub struct QuadraticCost {
    chains: IntegratorChainSpec,
    weights: Vec<Vec<f64>>,
}

impl QuadraticCost {
    /// `weights[i]` has one entry per level `0..=k_i`.
    pub fn new(chains: IntegratorChainSpec, weights: Vec<Vec<f64>>) -> Self {
        assert_eq!(weights.len(), chains.num_chains());
        for (w, &k) in weights.iter().zip(&chains.chain_lengths) {
            assert_eq!(w.len(), k + 1, "one weight per level 0..=k");
        }
        Self { chains, weights }
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }
}

impl RunningCost for QuadraticCost {
    fn chains(&self) -> &IntegratorChainSpec {
        &self.chains
    }

    fn value(&self, jet: &Jet, _t: f64) -> f64 {
        self.weights
            .iter()
            .zip(jet)
            .map(|(w, y)| w.iter().zip(y).map(|(wi, yi)| 0.5 * wi * yi * yi).sum::<f64>())
            .sum()
    }

    fn partial(&self, jet: &Jet, _t: f64, chain: usize, n: usize) -> f64 {
        self.weights[chain][n] * jet[chain][n]
    }

    fn linear_partial(&self, chain: usize, n: usize) -> Option<Vec<(usize, f64)>> {
        let w = self.weights[chain][n];
        Some(if w == 0.0 { vec![] } else { vec![(n, w)] })
    }

    fn quadratic_in_control(&self) -> bool {
        self.weights
            .iter()
            .zip(&self.chains.chain_lengths)
            .all(|(w, &k)| w[k] > 0.0 && w[k] == self.weights[0][self.chains.chain_lengths[0]])
    }
}

type ValueFn = Arc<dyn Fn(&Jet, f64) -> f64 + Send + Sync>;
type PartialFn = Arc<dyn Fn(&Jet, f64, usize, usize) -> f64 + Send + Sync>;

/// Running cost from closures, for costs outside the quadratic family.
#[derive(Clone)]
pub struct FnCost {
    chains: IntegratorChainSpec,
    value: ValueFn,
    partial: PartialFn,
    quadratic_in_control: bool,
}

impl FnCost {
    pub fn new(
        chains: IntegratorChainSpec,
        value: impl Fn(&Jet, f64) -> f64 + Send + Sync + 'static,
        partial: impl Fn(&Jet, f64, usize, usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            chains,
            value: Arc::new(value),
            partial: Arc::new(partial),
            quadratic_in_control: false,
        }
    }

    pub fn with_quadratic_control(mut self, flag: bool) -> Self {
        self.quadratic_in_control = flag;
        self
    }
}

impl Debug for FnCost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnCost").field("chains", &self.chains).finish()
    }
}

impl RunningCost for FnCost {
    fn chains(&self) -> &IntegratorChainSpec {
        &self.chains
    }

    fn value(&self, jet: &Jet, t: f64) -> f64 {
        (self.value)(jet, t)
    }

    fn partial(&self, jet: &Jet, t: f64, chain: usize, n: usize) -> f64 {
        (self.partial)(jet, t, chain, n)
    }

    fn quadratic_in_control(&self) -> bool {
        self.quadratic_in_control
    }
}

/// Terminal cost `Φ(s, t)`.
pub trait TerminalCost: Debug + Send + Sync {
    fn value(&self, s: &[f64], t: f64) -> f64;
    fn partial_t(&self, s: &[f64], t: f64) -> f64;
    fn partial_s(&self, s: &[f64], t: f64) -> Vec<f64>;
}

/// Largest relative disagreement between supplied partials and central
/// differences of `Ψ` at one probe jet.
pub fn check_partials(cost: &dyn RunningCost, jet: &Jet, t: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, levels) in jet.iter().enumerate() {
        for n in 0..levels.len() {
            let h = 1e-6 * levels[n].abs().max(1.0);
            let mut plus = jet.clone();
            plus[i][n] += h;
            let mut minus = jet.clone();
            minus[i][n] -= h;
            let fd = (cost.value(&plus, t) - cost.value(&minus, t)) / (2.0 * h);
            let exact = cost.partial(jet, t, i, n);
            let scale = exact.abs().max(fd.abs()).max(1.0);
            worst = worst.max((fd - exact).abs() / scale);
        }
    }
    worst
}

/// Crane running cost `½(y⁽³⁾/g)² + ½(α y⁽⁴⁾)²`.
pub fn crane_cost(g: f64, alpha: f64) -> QuadraticCost {
    QuadraticCost::new(
        IntegratorChainSpec::single(4, "y").expect("static spec"),
        vec![vec![0.0, 0.0, 0.0, 1.0 / (g * g), alpha * alpha]],
    )
}

/// Planar double-integrator running cost `½‖u‖²`.
pub fn double_integrator_cost() -> QuadraticCost {
    QuadraticCost::new(
        IntegratorChainSpec::new(vec![2, 2], vec!["x".into(), "y".into()]).expect("static spec"),
        vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0]],
    )
}
