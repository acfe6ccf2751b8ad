//! Quadrature rules on the base interval `[0, 2π]`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    /// Composite Gauss–Legendre: `panels` equal panels, `order` points each.
    GaussComposite,
    /// Uniform rectangle rule on `panels` nodes starting at 0; spectrally
    /// accurate for smooth 2π-periodic integrands.
    TrapezoidPeriodic,
}

/// Nodes and positive weights on `[0, 2π]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub panels: usize,
    pub order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

pub const DEFAULT_PANELS: usize = 64;
pub const DEFAULT_ORDER: usize = 8;

impl QuadratureRule {
    pub fn new(kind: QuadratureKind, panels: usize, order: usize) -> Result<Self> {
        if panels < 1 {
            return Err(Error::Parameter(format!("panels must be >= 1, got {panels}")));
        }
        if order < 2 {
            return Err(Error::Parameter(format!("order must be >= 2, got {order}")));
        }
        let (nodes, weights) = match kind {
            QuadratureKind::GaussComposite => composite_gauss(0.0, TAU, panels, order),
            QuadratureKind::TrapezoidPeriodic => {
                let h = TAU / panels as f64;
                let nodes = (0..panels).map(|k| k as f64 * h).collect();
                (nodes, vec![h; panels])
            }
        };
        Ok(Self { kind, panels, order, nodes, weights })
    }

    /// Composite Gauss–Legendre with enough panels for integrands that
    /// oscillate like `cos(2·n_max·x)`.
    pub fn resolving(n_max: usize) -> Self {
        let panels = DEFAULT_PANELS.max(4 * n_max);
        Self::new(QuadratureKind::GaussComposite, panels, DEFAULT_ORDER)
            .expect("static sizes are valid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Polynomial degree integrated exactly on each panel.
    pub fn exactness_degree(&self) -> usize {
        match self.kind {
            QuadratureKind::GaussComposite => 2 * self.order - 1,
            QuadratureKind::TrapezoidPeriodic => 1,
        }
    }

    /// Weighted sum of a scalar integrand.
    pub fn integrate_scalar(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::new(QuadratureKind::GaussComposite, DEFAULT_PANELS, DEFAULT_ORDER)
            .expect("static sizes are valid")
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Newton iteration on the three-term recurrence, seeded with the
/// Tricomi approximation `cos(π(i - 1/4)/(n + 1/2))`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule over `[a, b]` split into `panels` equal panels.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (ref_nodes, ref_weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (&t, &w) in ref_nodes.iter().zip(&ref_weights) {
            nodes.push(lo + 0.5 * h * (t + 1.0));
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

/// Gauss–Legendre rule over the panels delimited by consecutive `breaks`.
pub fn gauss_on_breaks(breaks: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let (ref_nodes, ref_weights) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(breaks.len().saturating_sub(1) * order);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let h = hi - lo;
        for (&t, &w) in ref_nodes.iter().zip(&ref_weights) {
            nodes.push(lo + 0.5 * h * (t + 1.0));
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trapezoid_four_nodes() {
        let rule = QuadratureRule::new(QuadratureKind::TrapezoidPeriodic, 4, 2).unwrap();
        assert_eq!(rule.len(), 4);
        for (k, (x, w)) in rule.iter().enumerate() {
            assert_relative_eq!(w, PI / 2.0, max_relative = 1e-15);
            assert_relative_eq!(x, k as f64 * PI / 2.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn gauss_cubic_exact() {
        let rule = QuadratureRule::new(QuadratureKind::GaussComposite, 8, 8).unwrap();
        let got = rule.integrate_scalar(|x| x.powi(3));
        let want = 4.0 * PI.powi(4);
        assert!((got - want).abs() / want < 1e-12);
    }

    #[test]
    fn gauss_cos_squared() {
        let rule = QuadratureRule::new(QuadratureKind::GaussComposite, 16, 8).unwrap();
        let got = rule.integrate_scalar(|x| (2.0 * x).cos().powi(2));
        assert!((got - PI).abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_period() {
        for (kind, panels, order) in [
            (QuadratureKind::GaussComposite, 1, 2),
            (QuadratureKind::GaussComposite, 7, 5),
            (QuadratureKind::GaussComposite, 64, 8),
            (QuadratureKind::GaussComposite, 3, 20),
            (QuadratureKind::TrapezoidPeriodic, 17, 2),
        ] {
            let rule = QuadratureRule::new(kind, panels, order).unwrap();
            let total: f64 = rule.weights().iter().sum();
            assert!((total - TAU).abs() / TAU < 1e-12, "{kind:?} {panels}x{order}");
            assert!(rule.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn exact_up_to_stated_degree() {
        for order in 2..=12 {
            let rule = QuadratureRule::new(QuadratureKind::GaussComposite, 3, order).unwrap();
            // x^k on [0, 2π] is piecewise a degree-k polynomial on every panel
            for k in 0..=rule.exactness_degree() as i32 {
                let want = TAU.powi(k + 1) / (k + 1) as f64;
                let got = rule.integrate_scalar(|x| x.powi(k));
                assert!((got - want).abs() / want < 1e-12, "order {order} degree {k}");
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(
            QuadratureRule::new(QuadratureKind::GaussComposite, 0, 8),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            QuadratureRule::new(QuadratureKind::TrapezoidPeriodic, 4, 1),
            Err(Error::Parameter(_))
        ));
    }
}
