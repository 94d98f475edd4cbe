//! Backward-Euler convolution quadrature weights.
//!
//! The weights `d_j` are the power-series coefficients of `((1 - z) / tau)^alpha`.
//! With them the fractional difference of a sequence reads
//! `sum_{j=0}^{n-1} d_j (g^{n-j} - g^0)`.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Weights `d_0..=d_L` for a fixed order and step, with partial sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CqWeights {
    alpha: f64,
    tau: f64,
    weights: Vec<f64>,
    partial_sums: Vec<f64>,
}

impl CqWeights {
    /// Compute `d_0..=d_L`. `alpha = 1` is accepted and reproduces backward Euler.
    pub fn new(alpha: f64, tau: f64, steps: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::OrderOutOfRange(alpha));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::NonPositiveStep(tau));
        }
        let scale = libm::pow(tau, -alpha);
        let mut weights = Vec::with_capacity(steps + 1);
        let mut partial_sums = Vec::with_capacity(steps + 1);
        // d_j = d_{j-1} (j - 1 - alpha) / j, and the partial sums are the
        // coefficients of (1 - z)^(alpha - 1): s_j = s_{j-1} (j - alpha) / j.
        // Taking the sums from their own recurrence avoids the cancellation
        // of accumulating d_j directly.
        let (mut d, mut s) = (1.0, 1.0);
        weights.push(scale);
        partial_sums.push(scale);
        for j in 1..=steps {
            let jf = j as f64;
            d *= (jf - 1.0 - alpha) / jf;
            s *= (jf - alpha) / jf;
            weights.push(scale * d);
            partial_sums.push(scale * s);
        }
        Ok(Self { alpha, tau, weights, partial_sums })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Largest index `L` available.
    pub fn steps(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `d_j`.
    pub fn get(&self, j: usize) -> f64 {
        self.weights[j]
    }

    /// `S_n = sum_{j=0}^{n} d_j`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        self.partial_sums[n]
    }

    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    /// CQ approximation of the Caputo derivative of a scalar sequence at step `n`.
    pub fn apply_scalar(&self, values: &[f64], n: usize) -> f64 {
        (0..n).map(|j| self.weights[j] * (values[n - j] - values[0])).sum()
    }
}

/// Same as [`CqWeights::new`].
pub fn cq_weights(alpha: f64, tau: f64, steps: usize) -> Result<CqWeights> {
    CqWeights::new(alpha, tau, steps)
}

/// History part of step `n`:
/// `r = -sum_{j=1}^{n-1} d_j g^{n-j} + S_{n-1} g^0`.
///
/// `history[m]` holds `g^m` for `m = 0..n`; only `g^0..g^{n-1}` are read.
/// The step equation is then `d_0 g^n + (spatial terms) = r + (load)`.
pub fn history_combination<V: AsRef<[f64]>>(
    weights: &CqWeights,
    history: &[V],
    n: usize,
) -> Result<Vec<f64>> {
    if n == 0 || n > weights.steps() {
        return Err(Error::StepOutOfRange { step: n, available: weights.steps() });
    }
    if history.len() < n {
        return Err(Error::StepOutOfRange { step: n, available: history.len() });
    }
    let g0 = history[0].as_ref();
    let len = g0.len();
    let s = weights.partial_sum(n - 1);
    let mut out: Vec<f64> = g0.iter().map(|&g| s * g).collect();
    for j in 1..n {
        let past = history[n - j].as_ref();
        if past.len() != len {
            return Err(Error::ShapeMismatch { expected: len, found: past.len() });
        }
        let d = weights.get(j);
        for (o, &g) in out.iter_mut().zip(past) {
            *o -= d * g;
        }
    }
    Ok(out)
}
