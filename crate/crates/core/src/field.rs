use alloc::vec::Vec;

use crate::basis::{legendre_eval, Basis};
use crate::mesh::Mesh2D;
use crate::quadrature::QuadRule;
use crate::{Error, Result};

/// Shape of a piecewise-polynomial field: mesh resolution and degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldLayout {
    pub cells_per_dir: usize,
    pub degree: usize,
}

impl FieldLayout {
    pub fn new(cells_per_dir: usize, degree: usize) -> Self {
        Self { cells_per_dir, degree }
    }

    pub fn modes_1d(&self) -> usize {
        self.degree + 1
    }

    pub fn modes(&self) -> usize {
        self.modes_1d() * self.modes_1d()
    }

    pub fn len(&self) -> usize {
        self.cells_per_dir * self.cells_per_dir * self.modes()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn h(&self) -> f64 {
        1.0 / self.cells_per_dir as f64
    }

    /// Flat index of mode `(a, b)` (x-mode, v-mode) in cell `(i, j)`.
    #[inline]
    pub fn index(&self, i: usize, j: usize, a: usize, b: usize) -> usize {
        let m = self.modes_1d();
        ((i * self.cells_per_dir + j) * m + a) * m + b
    }
}

/// Modal coefficients of a function in the discontinuous tensor space.
#[derive(Debug, Clone, PartialEq)]
pub struct DgField {
    layout: FieldLayout,
    coeffs: Vec<f64>,
}

impl DgField {
    pub fn zeros(layout: FieldLayout) -> Self {
        Self { layout, coeffs: alloc::vec![0.0; layout.len()] }
    }

    pub fn from_coeffs(layout: FieldLayout, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != layout.len() {
            return Err(Error::ShapeMismatch { expected: layout.len(), found: coeffs.len() });
        }
        Ok(Self { layout, coeffs })
    }

    pub fn layout(&self) -> FieldLayout {
        self.layout
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        self.coeffs[self.layout.index(i, j, a, b)]
    }

    /// Exact L2 norm over the unit square; the basis is orthonormal up to the
    /// cell factor `h^2 / 4`.
    pub fn l2_norm(&self) -> f64 {
        let h = self.layout.h();
        let sq: f64 = self.coeffs.iter().map(|c| c * c).sum();
        libm::sqrt(0.25 * h * h * sq)
    }

    /// Exact L2 distance to another field on the same layout.
    pub fn l2_distance(&self, other: &DgField) -> Result<f64> {
        self.check_same(other)?;
        let h = self.layout.h();
        let sq: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(libm::sqrt(0.25 * h * h * sq))
    }

    pub fn check_same(&self, other: &DgField) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::ShapeMismatch {
                expected: self.layout.len(),
                found: other.layout.len(),
            });
        }
        Ok(())
    }

    /// Value in cell `(i, j)` at reference coordinates `(xi, eta)`.
    pub fn eval_local(&self, i: usize, j: usize, xi: f64, eta: f64) -> f64 {
        let m = self.layout.modes_1d();
        let px: Vec<f64> = (0..m).map(|a| legendre_eval(a, xi)).collect();
        let pv: Vec<f64> = (0..m).map(|b| legendre_eval(b, eta)).collect();
        let base = self.layout.index(i, j, 0, 0);
        let mut s = 0.0;
        for a in 0..m {
            for b in 0..m {
                s += self.coeffs[base + a * m + b] * px[a] * pv[b];
            }
        }
        s
    }

    /// Point value; points on a cell face take the value from the cell above/right.
    pub fn eval(&self, x: f64, v: f64) -> f64 {
        let mesh = Mesh2D::new(self.layout.cells_per_dir).expect("layout has N >= 1");
        let (i, j) = (mesh.locate(x), mesh.locate(v));
        let (cx, cv) = mesh.cell_center(i, j);
        let half = 0.5 * mesh.h();
        let xi = ((x - cx) / half).clamp(-1.0, 1.0);
        let eta = ((v - cv) / half).clamp(-1.0, 1.0);
        self.eval_local(i, j, xi, eta)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &DgField, b: f64) -> Result<DgField> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(DgField { layout: self.layout, coeffs })
    }
}

/// Reference-cell moments `sum_pq w_p w_q f(x_p, v_q) phi_a(xi_p) phi_b(eta_q)`
/// of `f` in every cell, laid out like [`DgField`] coefficients.
///
/// These are the L2-projection coefficients of `f`; multiplying by `h^2 / 4`
/// gives the load `(f, psi_ab)`.
pub fn quadrature_moments(
    mesh: &Mesh2D,
    basis: &Basis,
    rule: &QuadRule,
    f: impl Fn(f64, f64) -> f64,
) -> Vec<f64> {
    let n = mesh.cells_per_dir();
    let m = basis.modes_1d();
    let layout = FieldLayout::new(n, basis.degree());
    let table = basis.tabulate(rule);
    let q = rule.len();
    let half = 0.5 * mesh.h();
    let mut out = alloc::vec![0.0; layout.len()];
    let mut values = alloc::vec![0.0; q * q];
    for i in 0..n {
        for j in 0..n {
            let (cx, cv) = mesh.cell_center(i, j);
            for (p, &xi) in rule.nodes().iter().enumerate() {
                for (r, &eta) in rule.nodes().iter().enumerate() {
                    values[p * q + r] =
                        rule.weights()[p] * rule.weights()[r] * f(cx + half * xi, cv + half * eta);
                }
            }
            let base = layout.index(i, j, 0, 0);
            for a in 0..m {
                for b in 0..m {
                    let mut s = 0.0;
                    for p in 0..q {
                        for r in 0..q {
                            s += values[p * q + r] * table[p * m + a] * table[r * m + b];
                        }
                    }
                    out[base + a * m + b] = s;
                }
            }
        }
    }
    out
}

/// Modal coefficients of the cell-wise `Q_k` interpolant of `f` at the
/// equispaced nodes of each cell (vertices included).
///
/// Nodes on a cell face are sampled exactly there, so data that jumps across
/// a mesh line contributes its value on the line to both neighbours.
pub fn nodal_interpolation(mesh: &Mesh2D, basis: &Basis, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let n = mesh.cells_per_dir();
    let m = basis.modes_1d();
    let layout = FieldLayout::new(n, basis.degree());
    let nodes = basis.interpolation_nodes();
    let inv = basis.nodal_to_modal();
    let half = 0.5 * mesh.h();
    let mut out = alloc::vec![0.0; layout.len()];
    let mut values = alloc::vec![0.0; m * m];
    let mut tmp = alloc::vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let (cx, cv) = mesh.cell_center(i, j);
            for (p, &xi) in nodes.iter().enumerate() {
                for (q, &eta) in nodes.iter().enumerate() {
                    values[p * m + q] = f(cx + half * xi, cv + half * eta);
                }
            }
            // coefficients = inv * values * inv^T
            for a in 0..m {
                for q in 0..m {
                    tmp[a * m + q] = (0..m).map(|p| inv[a * m + p] * values[p * m + q]).sum();
                }
            }
            let base = layout.index(i, j, 0, 0);
            for a in 0..m {
                for b in 0..m {
                    out[base + a * m + b] = (0..m).map(|q| tmp[a * m + q] * inv[b * m + q]).sum();
                }
            }
        }
    }
    out
}

impl AsRef<[f64]> for DgField {
    fn as_ref(&self) -> &[f64] {
        &self.coeffs
    }
}
