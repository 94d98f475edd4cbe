//! Dense reference assembly straight from the weak forms, by quadrature.
//!
//! Nothing here reuses the crate's reference matrices or Kronecker blocks: the
//! Legendre modes are re-derived below and every face term is written out
//! with its own trace choice.
#![allow(dead_code)]

pub mod caputo;

use fkk_core::sparse::BlockSparse;
use fkk_core::{gauss_rule, FieldLayout};
use nalgebra::DMatrix;

/// Orthonormal Legendre value and derivative by Bonnet's recurrence.
pub fn leg(a: usize, x: f64) -> (f64, f64) {
    let mut p = [1.0, x];
    let mut d = [0.0, 1.0];
    if a == 0 {
        return ((0.5f64).sqrt(), 0.0);
    }
    for n in 1..a {
        let nf = n as f64;
        let pn = ((2.0 * nf + 1.0) * x * p[1] - nf * p[0]) / (nf + 1.0);
        let dn = d[0] + (2.0 * nf + 1.0) * p[1];
        p = [p[1], pn];
        d = [d[1], dn];
    }
    let s = ((2 * a + 1) as f64 / 2.0).sqrt();
    (s * p[1], s * d[1])
}

pub fn dense(b: &BlockSparse) -> DMatrix<f64> {
    let n = b.dim();
    DMatrix::from_row_slice(n, n, &b.to_dense())
}

pub struct Oracle {
    pub n: usize,
    pub k: usize,
    pub h: f64,
    pub mass: DMatrix<f64>,
    pub dx: DMatrix<f64>,
    pub dv: DMatrix<f64>,
    pub vmass: DMatrix<f64>,
    pub flux: DMatrix<f64>,
    pub penalty: DMatrix<f64>,
}

impl Oracle {
    pub fn new(n: usize, k: usize, theta: f64) -> Self {
        let layout = FieldLayout::new(n, k);
        let m = k + 1;
        let h = 1.0 / n as f64;
        let dim = layout.len();
        let rule = gauss_rule(k + 3).unwrap();
        let q: Vec<(f64, f64)> = rule.iter().collect();
        let half = h / 2.0;
        let mut mass = DMatrix::zeros(dim, dim);
        let mut dx = DMatrix::zeros(dim, dim);
        let mut dv = DMatrix::zeros(dim, dim);
        let mut vmass = DMatrix::zeros(dim, dim);
        let mut flux = DMatrix::zeros(dim, dim);
        let mut penalty = DMatrix::zeros(dim, dim);
        let idx = |i: usize, j: usize, a: usize, b: usize| layout.index(i, j, a, b);
        for i in 0..n {
            for j in 0..n {
                let vc = (j as f64 + 0.5) * h;
                for (ta, tb) in (0..m).flat_map(|a| (0..m).map(move |b| (a, b))) {
                    let row = idx(i, j, ta, tb);
                    let test = |xi: f64, eta: f64| leg(ta, xi).0 * leg(tb, eta).0;
                    // Volume terms with trial functions of the same cell.
                    for (sa, sb) in (0..m).flat_map(|a| (0..m).map(move |b| (a, b))) {
                        let col = idx(i, j, sa, sb);
                        let (mut mm, mut gx, mut gv, mut vm, mut dvv) = (0.0, 0.0, 0.0, 0.0, 0.0);
                        for &(xi, wx) in &q {
                            for &(eta, wv) in &q {
                                let w = wx * wv * half * half;
                                let (px, dpx) = leg(sa, xi);
                                let (pv, dpv) = leg(sb, eta);
                                let t = test(xi, eta);
                                let v = vc + half * eta;
                                mm += w * px * pv * t;
                                gx += w * dpx / half * pv * t;
                                gv += w * px * dpv / half * t;
                                vm += w * v * px * pv * t;
                                dvv += w * px * dpv / half * t;
                            }
                        }
                        mass[(row, col)] += mm;
                        dx[(row, col)] += gx;
                        dv[(row, col)] += gv;
                        vmass[(row, col)] += vm;
                        flux[(row, col)] -= dvv;
                    }
                    // Face terms, one trial cell at a time.
                    for (sa, sb) in (0..m).flat_map(|a| (0..m).map(move |b| (a, b))) {
                        for &(s, w) in &q {
                            let w = w * half;
                            let tv = |xi: f64, eta: f64| leg(sa, xi).0 * leg(sb, eta).0;
                            // D_x, left face: + [g(x_i^+) - g(x_i^-)] psi(x_i^+).
                            let own = tv(-1.0, s);
                            dx[(row, idx(i, j, sa, sb))] += w * own * test(-1.0, s);
                            if i > 0 {
                                dx[(row, idx(i - 1, j, sa, sb))] -= w * tv(1.0, s) * test(-1.0, s);
                            }
                            // D_v, top face: - [g(v^-) - g^] psi(v^-), g^ from above (0 on top).
                            dv[(row, idx(i, j, sa, sb))] -= w * tv(s, 1.0) * test(s, 1.0);
                            if j + 1 < n {
                                dv[(row, idx(i, j + 1, sa, sb))] += w * tv(s, -1.0) * test(s, 1.0);
                            }
                            // D_v, bottom face of the first row: g^ = 0.
                            if j == 0 {
                                dv[(row, idx(i, j, sa, sb))] += w * tv(s, -1.0) * test(s, -1.0);
                            }
                            // Diffusion flux, bottom face: -(p(v_j^+) - p(v_j^-)) mu(v_j^+).
                            if j > 0 {
                                flux[(row, idx(i, j, sa, sb))] -= w * tv(s, -1.0) * test(s, -1.0);
                                flux[(row, idx(i, j - 1, sa, sb))] += w * tv(s, 1.0) * test(s, -1.0);
                            } else {
                                penalty[(row, idx(i, j, sa, sb))] +=
                                    theta / h * w * tv(s, -1.0) * test(s, -1.0);
                            }
                        }
                    }
                }
            }
        }
        Self { n, k, h, mass, dx, dv, vmass, flux, penalty }
    }

    /// `L_h` from the pieces.
    pub fn spatial(&self) -> DMatrix<f64> {
        let minv = self.mass.clone().try_inverse().unwrap();
        let px = &minv * &self.dx;
        let pv = &minv * &self.dv;
        &self.vmass * &px - &self.vmass * &pv + &self.flux * &pv + &self.penalty - &self.mass
    }
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
