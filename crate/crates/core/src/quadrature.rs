//! Gauss-Legendre rules on the reference interval `[-1, 1]`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

pub const MAX_POINTS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterate `(node, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integral of `f` over `[-1, 1]`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Integral of `f` over `[a, b]` using the affine map from the reference interval.
    pub fn integrate_on(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self.integrate(|x| f(mid + half * x))
    }
}

/// Legendre polynomial `P_q` and its derivative at `x` (unnormalised).
fn legendre_with_derivative(q: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if q == 0 {
        return (1.0, 0.0);
    }
    for n in 1..q {
        let nf = n as f64;
        let p2 = ((2.0 * nf + 1.0) * x * p1 - nf * p0) / (nf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let qf = q as f64;
    // Valid away from the endpoints, which Gauss nodes never touch.
    let dp = qf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre rule with `q` points, exact for polynomials of degree `2q - 1`.
pub fn gauss_rule(q: usize) -> Result<QuadRule> {
    if q == 0 || q > MAX_POINTS {
        return Err(Error::QuadratureOutOfRange(q));
    }
    let mut nodes = alloc::vec![0.0; q];
    let mut weights = alloc::vec![0.0; q];
    let qf = q as f64;
    // Roots come in +/- pairs; solve for the positive half by Newton.
    for i in 0..q.div_ceil(2) {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (qf + 0.5));
        if q % 2 == 1 && i == q / 2 {
            x = 0.0;
        } else {
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(q, x);
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) < 1e-16 {
                    break;
                }
            }
        }
        let dp = legendre_with_derivative(q, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[q - 1 - i] = x;
        weights[q - 1 - i] = w;
    }
    Ok(QuadRule { nodes, weights })
}
