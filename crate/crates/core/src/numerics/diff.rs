/// Fornberg's recursion: weights for derivatives `0..=max_order` at `x0`
/// from values at nodes `xs`. Returns `w[order][node]`.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    if n == 0 {
        return c;
    }
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Weights of the fourth-order accurate central stencil for the given
/// derivative order on a unit grid, with offsets `-p..=p`.
pub fn central_weights(order: usize) -> (Vec<i32>, Vec<f64>) {
    let p = if order == 0 { 0 } else { (order + 1) / 2 + 1 } as i32;
    let offsets: Vec<i32> = (-p..=p).collect();
    let xs: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    let w = fornberg_weights(0.0, &xs, order);
    (offsets, w[order].clone())
}

/// Fourth-order central finite-difference stencil.
#[derive(Debug, Clone)]
pub struct CentralStencil {
    order: usize,
    offsets: Vec<i32>,
    weights: Vec<f64>,
}

impl CentralStencil {
    pub fn new(order: usize) -> Self {
        let (offsets, weights) = central_weights(order);
        Self {
            order,
            offsets,
            weights,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of grid steps the stencil reaches on each side.
    pub fn half_width(&self) -> usize {
        self.offsets.last().map_or(0, |&o| o as usize)
    }

    pub fn offsets(&self) -> &[i32] {
        &self.offsets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Derivative of `f` at `t` using step `h`.
    pub fn apply(&self, f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
        let s: f64 = self
            .offsets
            .iter()
            .zip(&self.weights)
            .map(|(&o, w)| w * f(t + o as f64 * h))
            .sum();
        s / h.powi(self.order as i32)
    }

    /// Derivative at the centre of `samples`, which must hold exactly
    /// `2 * half_width + 1` equally spaced values.
    pub fn apply_samples(&self, samples: &[f64], h: f64) -> f64 {
        assert_eq!(samples.len(), self.weights.len());
        let s: f64 = samples.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
        s / h.powi(self.order as i32)
    }
}
