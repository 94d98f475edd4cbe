//! Orthonormal Legendre modes on `[-1, 1]` and the tensor basis built from them.
//!
//! Mode `a` is `sqrt((2a+1)/2) P_a`, so the reference mass matrix is the
//! identity. On a cell of width `h` the tensor mode `phi_a(xi) phi_b(eta)` has
//! mass `h^2/4`, which makes the global mass operator a multiple of the identity.
//!
//! Besides point evaluation the basis carries the small 1D reference matrices
//! that every LDG operator is assembled from:
//!
//! * `derivative[c][a] = int phi_c phi_a'`
//! * `weighted[c][a]   = int xi phi_c phi_a`
//! * `trace_left[a] = phi_a(-1)`, `trace_right[a] = phi_a(1)`
//!
//! Row index is always the test mode, column the trial mode.

use alloc::vec::Vec;

use crate::quadrature::{gauss_rule, QuadRule};
use crate::{Error, Result};

/// Value of the orthonormal Legendre polynomial of the given degree at `xi`.
pub fn legendre_eval(degree: usize, xi: f64) -> f64 {
    debug_assert!(libm::fabs(xi) <= 1.0 + 1e-12, "xi={xi} outside [-1, 1]");
    legendre_eval_with_derivative(degree, xi).0
}

/// Orthonormal Legendre value and derivative at `xi`.
pub fn legendre_eval_with_derivative(degree: usize, xi: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for n in 0..degree {
        let nf = n as f64;
        let p_next = ((2.0 * nf + 1.0) * xi * p - nf * p_prev) / (nf + 1.0);
        let d_next = ((2.0 * nf + 1.0) * (p + xi * d) - nf * d_prev) / (nf + 1.0);
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    let scale = libm::sqrt((2.0 * degree as f64 + 1.0) / 2.0);
    (scale * p, scale * d)
}

/// Tensor-product Legendre basis of degree `k` in each direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    degree: usize,
    quad: QuadRule,
    derivative: Vec<f64>,
    weighted: Vec<f64>,
    trace_left: Vec<f64>,
    trace_right: Vec<f64>,
    /// Inverse of `V[i][a] = phi_a(node_i)` at the equispaced nodes.
    nodal_to_modal: Vec<f64>,
}

impl Basis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidDegree { degree, min: 1 });
        }
        let m = degree + 1;
        // Integrands here are at most degree 2k + 1; k + 2 points cover them.
        let quad = gauss_rule(degree + 2)?;
        let mut derivative = alloc::vec![0.0; m * m];
        let mut weighted = alloc::vec![0.0; m * m];
        for c in 0..m {
            for a in 0..m {
                derivative[c * m + a] = quad.integrate(|x| {
                    legendre_eval(c, x) * legendre_eval_with_derivative(a, x).1
                });
                weighted[c * m + a] =
                    quad.integrate(|x| x * legendre_eval(c, x) * legendre_eval(a, x));
            }
        }
        let trace_left = (0..m).map(|a| legendre_eval(a, -1.0)).collect();
        let trace_right = (0..m).map(|a| legendre_eval(a, 1.0)).collect();
        let nodes = equispaced_nodes(degree);
        let mut vandermonde = alloc::vec![0.0; m * m];
        for (i, &x) in nodes.iter().enumerate() {
            for a in 0..m {
                vandermonde[i * m + a] = legendre_eval(a, x);
            }
        }
        let nodal_to_modal = invert(m, vandermonde);
        Ok(Self { degree, quad, derivative, weighted, trace_left, trace_right, nodal_to_modal })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Modes per direction, `k + 1`.
    pub fn modes_1d(&self) -> usize {
        self.degree + 1
    }

    /// Modes per cell, `(k + 1)^2`.
    pub fn modes(&self) -> usize {
        self.modes_1d() * self.modes_1d()
    }

    /// Assembly rule (`k + 2` points).
    pub fn quad(&self) -> &QuadRule {
        &self.quad
    }

    pub fn derivative(&self) -> &[f64] {
        &self.derivative
    }

    pub fn weighted(&self) -> &[f64] {
        &self.weighted
    }

    pub fn trace_left(&self) -> &[f64] {
        &self.trace_left
    }

    pub fn trace_right(&self) -> &[f64] {
        &self.trace_right
    }

    /// Interpolation nodes `-1 + 2i/k`, cell vertices included.
    pub fn interpolation_nodes(&self) -> Vec<f64> {
        equispaced_nodes(self.degree)
    }

    /// Maps nodal values at [`Basis::interpolation_nodes`] to modal
    /// coefficients; row-major `[a * m + i]`.
    pub fn nodal_to_modal(&self) -> &[f64] {
        &self.nodal_to_modal
    }

    /// All 1D modes at `xi`.
    pub fn eval_1d(&self, xi: f64) -> Vec<f64> {
        (0..self.modes_1d()).map(|a| legendre_eval(a, xi)).collect()
    }

    /// Tabulate all 1D modes at the nodes of `rule`; entry `[p * m + a]`.
    pub fn tabulate(&self, rule: &QuadRule) -> Vec<f64> {
        let m = self.modes_1d();
        let mut out = Vec::with_capacity(rule.len() * m);
        for &x in rule.nodes() {
            out.extend((0..m).map(|a| legendre_eval(a, x)));
        }
        out
    }
}

fn equispaced_nodes(degree: usize) -> Vec<f64> {
    (0..=degree).map(|i| -1.0 + 2.0 * i as f64 / degree as f64).collect()
}

/// Gauss-Jordan inverse with partial pivoting; only used on the small,
/// well-conditioned Vandermonde matrices above.
fn invert(m: usize, mut a: Vec<f64>) -> Vec<f64> {
    let mut inv = alloc::vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&r, &s| libm::fabs(a[r * m + col]).total_cmp(&libm::fabs(a[s * m + col])))
            .expect("non-empty range");
        for j in 0..m {
            a.swap(col * m + j, pivot * m + j);
            inv.swap(col * m + j, pivot * m + j);
        }
        let d = a[col * m + col];
        for j in 0..m {
            a[col * m + j] /= d;
            inv[col * m + j] /= d;
        }
        for r in 0..m {
            if r != col {
                let f = a[r * m + col];
                for j in 0..m {
                    a[r * m + j] -= f * a[col * m + j];
                    inv[r * m + j] -= f * inv[col * m + j];
                }
            }
        }
    }
    inv
}
