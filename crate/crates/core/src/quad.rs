//! Gauss-Legendre quadrature, including a rational map for semi-infinite
//! integrals and a node-doubling convergence loop.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Gauss-Legendre rule of fixed degree on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Legendre polynomial P_n and its derivative at x (three-term recurrence).
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    /// Build an n-point rule. Nodes are the roots of P_n found by Newton
    /// iteration from the Chebyshev initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "need at least 2 nodes");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_pair(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x.abs();
            nodes[n - 1 - i] = x.abs();
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate f over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        half * acc
    }

    /// Integrate f over [0, inf) through the rational substitution
    /// `w = scale * t / (1 - t)`, t in [0, 1). `scale` should sit near the
    /// bulk of the integrand's mass.
    pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(&self, scale: f64, f: F) -> f64 {
        self.integrate(0.0, 1.0, |t| {
            let om = 1.0 - t;
            let w = scale * t / om;
            let jac = scale / (om * om);
            let v = f(w) * jac;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        })
    }
}

/// Integrate f over [0, inf), doubling the node count from `start_nodes`
/// until two successive evaluations agree to `rel_tol` (relative, with an
/// absolute floor for near-zero integrals).
pub fn integrate_semi_infinite_adaptive<F: Fn(f64) -> f64>(
    scale: f64,
    rel_tol: f64,
    start_nodes: usize,
    f: F,
) -> Result<f64> {
    let mut n = start_nodes.max(16);
    let mut prev = GaussLegendre::new(n).integrate_semi_infinite(scale, &f);
    loop {
        n *= 2;
        if n > 25_600 {
            return Err(Error::Numeric(format!(
                "semi-infinite quadrature did not converge to {rel_tol} within {n} nodes (last value {prev})"
            )));
        }
        let cur = GaussLegendre::new(n).integrate_semi_infinite(scale, &f);
        let denom = cur.abs().max(1e-300);
        if ((cur - prev) / denom).abs() <= rel_tol {
            return Ok(cur);
        }
        prev = cur;
    }
}
