//! One-dimensional L2 and Gauss-Radau type projections and their tensor
//! products, used for error splitting and the superconvergence identities.
//!
//! In the orthonormal Legendre basis the defining conditions are triangular:
//! the first `k` moments are plain L2 moments and the last coefficient is fixed
//! by the endpoint match, so no linear solve is needed.

use alloc::vec::Vec;

use crate::basis::{legendre_eval, legendre_eval_with_derivative};
use crate::field::{DgField, FieldLayout};
use crate::mesh::Mesh2D;
use crate::quadrature::{gauss_rule, QuadRule};
use crate::{Error, Result};

/// Which 1D projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProjectionKind {
    /// L2 projection onto degree `k`.
    Plain,
    /// Moments up to `k - 1`, value matched at the left endpoint.
    Plus,
    /// Moments up to `k - 1`, value matched at the right endpoint.
    Minus,
}

/// Tensor products used in the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TensorProjection {
    /// Minus in `x`, plus in `v`.
    Pi,
    /// Plain in both directions.
    PiX,
    /// Plain in `x`, minus in `v`.
    PiVMinus,
}

impl TensorProjection {
    pub fn kinds(self) -> (ProjectionKind, ProjectionKind) {
        match self {
            TensorProjection::Pi => (ProjectionKind::Minus, ProjectionKind::Plus),
            TensorProjection::PiX => (ProjectionKind::Plain, ProjectionKind::Plain),
            TensorProjection::PiVMinus => (ProjectionKind::Plain, ProjectionKind::Minus),
        }
    }
}

fn check_kind(kind: ProjectionKind, degree: usize) -> Result<()> {
    if degree == 0 && kind != ProjectionKind::Plain {
        return Err(Error::InvalidDegree { degree, min: 1 });
    }
    Ok(())
}

fn rule_for(degree: usize) -> QuadRule {
    gauss_rule(degree + 4).expect("degree kept small")
}

/// Modal coefficients from reference-cell moments and the endpoint value.
fn finish_1d(kind: ProjectionKind, degree: usize, mut moments: Vec<f64>, left: f64, right: f64) -> Vec<f64> {
    let (xi, target) = match kind {
        ProjectionKind::Plain => return moments,
        ProjectionKind::Plus => (-1.0, left),
        ProjectionKind::Minus => (1.0, right),
    };
    let partial: f64 = (0..degree).map(|a| moments[a] * legendre_eval(a, xi)).sum();
    moments[degree] = (target - partial) / legendre_eval(degree, xi);
    moments
}

/// Project `u` on `[a, b]` onto polynomials of degree `degree`; returns the
/// coefficients of the orthonormal Legendre modes mapped to the interval.
pub fn project_1d(
    kind: ProjectionKind,
    u: impl Fn(f64) -> f64,
    interval: (f64, f64),
    degree: usize,
) -> Result<Vec<f64>> {
    check_kind(kind, degree)?;
    let (a, b) = interval;
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let rule = rule_for(degree);
    let values: Vec<f64> = rule.nodes().iter().map(|&xi| u(mid + half * xi)).collect();
    let moments = (0..=degree)
        .map(|m| {
            rule.iter()
                .zip(&values)
                .map(|((xi, w), val)| w * val * legendre_eval(m, xi))
                .sum()
        })
        .collect();
    Ok(finish_1d(kind, degree, moments, u(a), u(b)))
}

/// Evaluate 1D modal coefficients on `[a, b]` at `x`.
pub fn eval_1d(coeffs: &[f64], interval: (f64, f64), x: f64) -> f64 {
    let (a, b) = interval;
    let xi = ((2.0 * x - a - b) / (b - a)).clamp(-1.0, 1.0);
    coeffs.iter().enumerate().map(|(m, c)| c * legendre_eval(m, xi)).sum()
}

/// Tensor projection on one cell; result is laid out `[a * (k + 1) + b]`.
pub fn project_cell(
    kinds: (ProjectionKind, ProjectionKind),
    u: &impl Fn(f64, f64) -> f64,
    xs: (f64, f64),
    vs: (f64, f64),
    degree: usize,
) -> Result<Vec<f64>> {
    check_kind(kinds.0, degree)?;
    check_kind(kinds.1, degree)?;
    let m = degree + 1;
    let rule = rule_for(degree);
    let (xm, xh) = (0.5 * (xs.0 + xs.1), 0.5 * (xs.1 - xs.0));
    // v-projection along each x line needed by the x-projection.
    let along_v = |x: f64| project_1d(kinds.1, |v| u(x, v), vs, degree);
    let at_nodes: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&xi| along_v(xm + xh * xi))
        .collect::<Result<_>>()?;
    let left = along_v(xs.0)?;
    let right = along_v(xs.1)?;
    let mut out = alloc::vec![0.0; m * m];
    for b in 0..m {
        let moments = (0..m)
            .map(|a| {
                rule.iter()
                    .zip(&at_nodes)
                    .map(|((xi, w), g)| w * g[b] * legendre_eval(a, xi))
                    .sum()
            })
            .collect();
        let coeffs = finish_1d(kinds.0, degree, moments, left[b], right[b]);
        for a in 0..m {
            out[a * m + b] = coeffs[a];
        }
    }
    Ok(out)
}

/// Cell-wise tensor projection of `u` over the whole mesh.
pub fn project_tensor(
    which: TensorProjection,
    u: impl Fn(f64, f64) -> f64,
    mesh: &Mesh2D,
    degree: usize,
) -> Result<DgField> {
    let n = mesh.cells_per_dir();
    let layout = FieldLayout::new(n, degree);
    let mut coeffs = Vec::with_capacity(layout.len());
    for i in 0..n {
        for j in 0..n {
            let (xs, vs) = mesh.cell_bounds(i, j);
            coeffs.extend(project_cell(which.kinds(), &u, xs, vs, degree)?);
        }
    }
    DgField::from_coeffs(layout, coeffs)
}

/// Polynomial in `(x, v)` stored by monomial coefficients `c[p][q] x^p v^q`
/// with total degree `p + q <= degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    degree: usize,
    /// Row-major `(degree + 1)^2`; entries with `p + q > degree` are zero.
    coeffs: Vec<f64>,
}

impl Poly2 {
    /// `coeff(p, q)` supplies the coefficient of `x^p v^q` for `p + q <= degree`.
    pub fn from_fn(degree: usize, mut coeff: impl FnMut(usize, usize) -> f64) -> Self {
        let m = degree + 1;
        let mut coeffs = alloc::vec![0.0; m * m];
        for p in 0..m {
            for q in 0..m - p {
                coeffs[p * m + q] = coeff(p, q);
            }
        }
        Self { degree, coeffs }
    }

    /// Declared degree bound.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Actual total degree (largest `p + q` with a nonzero coefficient).
    pub fn total_degree(&self) -> usize {
        let m = self.degree + 1;
        let mut d = 0;
        for p in 0..m {
            for q in 0..m - p {
                if self.coeffs[p * m + q] != 0.0 {
                    d = d.max(p + q);
                }
            }
        }
        d
    }

    pub fn eval(&self, x: f64, v: f64) -> f64 {
        let m = self.degree + 1;
        let mut s = 0.0;
        for p in (0..m).rev() {
            let mut row = 0.0;
            for q in (0..m - p).rev() {
                row = row * v + self.coeffs[p * m + q];
            }
            s = s * x + row;
        }
        s
    }
}

/// Residuals of the two superconvergence identities for `Pi` on cell `(i, j)`.
///
/// With hats taken like the scheme's `G^` (from the left in `x`, from above in
/// `v`), and hats on a face read off the neighbouring cell's projection of the
/// same polynomial:
///
/// ```text
/// r_x = (u - Pi u, d_x nu) - int (u - hat)(x_i, v) nu(x_i^-, v) dv
///                          + int (u - hat)(x_{i-1}, v) nu(x_{i-1}^+, v) dv
/// r_v = (u - Pi u, d_v nu) - int (u - hat)(x, v_j) nu(x, v_j^-) dx
///                          + int (u - hat)(x, v_{j-1}) nu(x, v_{j-1}^+) dx
/// ```
///
/// `nu` holds the modal coefficients of a `Q_k` function on the cell. Cells
/// on the boundary use a virtual neighbour of the same width.
pub fn lemma_identity_residuals(
    u: &Poly2,
    nu: &[f64],
    mesh: &Mesh2D,
    degree: usize,
    cell: (usize, usize),
) -> Result<(f64, f64)> {
    if degree < 1 {
        return Err(Error::InvalidDegree { degree, min: 1 });
    }
    if u.total_degree() > degree + 1 {
        return Err(Error::DegreeTooHigh { degree: u.total_degree(), max: degree + 1 });
    }
    let m = degree + 1;
    if nu.len() != m * m {
        return Err(Error::ShapeMismatch { expected: m * m, found: nu.len() });
    }
    let (i, j) = cell;
    let h = mesh.h();
    let (xs, vs) = mesh.cell_bounds(i, j);
    let kinds = TensorProjection::Pi.kinds();
    let f = |x: f64, v: f64| u.eval(x, v);
    let own = project_cell(kinds, &f, xs, vs, degree)?;
    let left = project_cell(kinds, &f, (xs.0 - h, xs.0), vs, degree)?;
    let above = project_cell(kinds, &f, xs, (vs.1, vs.1 + h), degree)?;

    let eval_local = |c: &[f64], xi: f64, eta: f64| -> f64 {
        let mut s = 0.0;
        for a in 0..m {
            let pa = legendre_eval(a, xi);
            for b in 0..m {
                s += c[a * m + b] * pa * legendre_eval(b, eta);
            }
        }
        s
    };
    let grad_local = |c: &[f64], xi: f64, eta: f64| -> (f64, f64) {
        let (mut gx, mut gv) = (0.0, 0.0);
        for a in 0..m {
            let (pa, da) = legendre_eval_with_derivative(a, xi);
            for b in 0..m {
                let (pb, db) = legendre_eval_with_derivative(b, eta);
                gx += c[a * m + b] * da * pb;
                gv += c[a * m + b] * pa * db;
            }
        }
        (gx * 2.0 / h, gv * 2.0 / h)
    };

    let rule = gauss_rule(degree + 3)?;
    let half = 0.5 * h;
    let (xm, vm) = (0.5 * (xs.0 + xs.1), 0.5 * (vs.0 + vs.1));
    let (mut volume_x, mut volume_v) = (0.0, 0.0);
    for (xi, wx) in rule.iter() {
        for (eta, wv) in rule.iter() {
            let (x, v) = (xm + half * xi, vm + half * eta);
            let diff = f(x, v) - eval_local(&own, xi, eta);
            let (dx, dv) = grad_local(nu, xi, eta);
            let w = wx * wv * half * half;
            volume_x += w * diff * dx;
            volume_v += w * diff * dv;
        }
    }
    let (mut face_x, mut face_v) = (0.0, 0.0);
    for (s, w) in rule.iter() {
        let w = w * half;
        // x faces: hats from the cell on the left of each face, at its xi = +1.
        let v = vm + half * s;
        let right_hat = eval_local(&own, 1.0, s);
        let left_hat = eval_local(&left, 1.0, s);
        face_x += w * (-(f(xs.1, v) - right_hat) * eval_local(nu, 1.0, s)
            + (f(xs.0, v) - left_hat) * eval_local(nu, -1.0, s));
        // v faces: hats from the cell above each face, at its eta = -1.
        let x = xm + half * s;
        let top_hat = eval_local(&above, s, -1.0);
        let bottom_hat = eval_local(&own, s, -1.0);
        face_v += w * (-(f(x, vs.1) - top_hat) * eval_local(nu, s, 1.0)
            + (f(x, vs.0) - bottom_hat) * eval_local(nu, s, -1.0));
    }
    Ok((volume_x + face_x, volume_v + face_v))
}
