//! Numerical Caputo derivative for manufactured-solution checks.

use fkk_core::gauss_rule;
use std::f64::consts::PI;

/// Composite Gauss-Legendre on `[0, b]`: `panels` panels of 10 points.
pub fn composite(f: impl Fn(f64) -> f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_rule(10).unwrap();
    let h = b / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = (p as f64 + 0.5) * h;
            rule.iter().map(|(s, w)| w * 0.5 * h * f(mid + 0.5 * h * s)).sum::<f64>()
        })
        .sum()
}

/// Caputo derivative of `phi` at `t`, given `phi'`, with 10^4 nodes.
///
/// The kernel singularity at `s = t` and the `s^(alpha - 1)` behaviour of
/// `phi'` at `s = 0` are removed by `s = w^(1/alpha)` on `[0, t/2]` and
/// `t - s = z^(1/(1 - alpha))` on `[t/2, t]`.
pub fn caputo(dphi: impl Fn(f64) -> f64, alpha: f64, t: f64) -> f64 {
    let lower = composite(
        |w: f64| {
            let s = w.powf(1.0 / alpha);
            let jac = if w > 0.0 { w.powf(1.0 / alpha - 1.0) / alpha } else { 0.0 };
            dphi(s) * jac * (t - s).powf(-alpha)
        },
        (0.5 * t).powf(alpha),
        500,
    );
    let upper = composite(
        |z: f64| {
            let s = t - z.powf(1.0 / (1.0 - alpha));
            dphi(s) / (1.0 - alpha)
        },
        (0.5 * t).powf(1.0 - alpha),
        500,
    );
    (lower + upper) / libm::tgamma(1.0 - alpha)
}

/// Source implied by G = phi(t) sin(pi x) sin(pi v) for a given time factor.
pub fn implied_source(alpha: f64, phi: impl Fn(f64) -> f64, dphi: impl Fn(f64) -> f64, x: f64, v: f64, t: f64) -> f64 {
    let (sx, cx, sv, cv) = ((PI * x).sin(), (PI * x).cos(), (PI * v).sin(), (PI * v).cos());
    let g = sx * sv;
    let g_x = PI * cx * sv;
    let g_v = PI * sx * cv;
    let g_vv = -PI * PI * g;
    let p = phi(t);
    // D^alpha G + v G_x - (G + v G_v) - G_vv
    caputo(dphi, alpha, t) * g + p * (v * g_x - g - v * g_v - g_vv)
}
