//! LDG discretisation of the kinetic operator and the CQ time-stepping loop.
//!
//! Unknowns are `G_h` together with the auxiliary gradient `(P_x, P_v)`. The
//! gradient equation is mass-against-gradient, so both components are
//! eliminated cell by cell through the (diagonal) mass matrix and only `G_h`
//! is solved for:
//!
//! ```text
//! P_x = M^{-1} D_x g,  P_v = M^{-1} D_v g
//! L_h = V M^{-1} D_x - V M^{-1} D_v + K M^{-1} D_v + (penalty) - M
//! A   = d_0 M + L_h
//! ```
//!
//! `V` is the `v`-weighted mass matrix and `K` collects `-(d_v P_v, mu)` with
//! its face terms. Flux choices:
//!
//! * `G^` in `x`: trace from the left (`x_i^-`), zero on the inflow face `x = 0`.
//! * `G^` in `v`: trace from above (`v_j^+`), zero on `v = 0` and `v = 1`.
//! * `P_v^`: trace from below (`v_j^-`); on `v = 0` the inner trace plus
//!   `theta / h` times `G(v_0^+)`.
//!
//! The `-M` shift is the `+(G, mu)` term of the right-hand side moved left.

use alloc::vec::Vec;

use crate::basis::Basis;
use crate::cq::{history_combination, CqWeights};
use crate::field::{quadrature_moments, DgField, FieldLayout};
use crate::mesh::Mesh2D;
use crate::problems::{initial_coefficients, load_with, DataTransfer, ProblemSpec};
use crate::sparse::{BandedLu, BlockSparse};
use crate::{Error, Result};

/// Kronecker product of two `m x m` matrices: x-direction first, v second.
fn kron(m: usize, x: &[f64], v: &[f64]) -> Vec<f64> {
    let mm = m * m;
    let mut out = alloc::vec![0.0; mm * mm];
    for a in 0..m {
        for b in 0..m {
            for a2 in 0..m {
                for b2 in 0..m {
                    out[(a * m + b) * mm + a2 * m + b2] = x[a * m + a2] * v[b * m + b2];
                }
            }
        }
    }
    out
}

fn outer(u: &[f64], w: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.len() * w.len());
    for &a in u {
        out.extend(w.iter().map(|&b| a * b));
    }
    out
}

fn identity(m: usize) -> Vec<f64> {
    let mut out = alloc::vec![0.0; m * m];
    for a in 0..m {
        out[a * m + a] = 1.0;
    }
    out
}

fn lin(terms: &[(f64, &[f64])]) -> Vec<f64> {
    let len = terms[0].1.len();
    let mut out = alloc::vec![0.0; len];
    for (s, t) in terms {
        for (o, v) in out.iter_mut().zip(t.iter()) {
            *o += s * v;
        }
    }
    out
}

/// Scalar value of the mass operator: every tensor mode has mass `h^2 / 4`.
pub fn mass_scale(mesh: &Mesh2D) -> f64 {
    0.25 * mesh.h() * mesh.h()
}

/// Discrete gradient operators `(D_x, D_v)` such that the modal vectors of
/// `P_x` and `P_v` are `M^{-1} D_x g` and `M^{-1} D_v g`.
pub fn assemble_gradient(mesh: &Mesh2D, basis: &Basis) -> (BlockSparse, BlockSparse) {
    let n = mesh.cells_per_dir();
    let m = basis.modes_1d();
    let half = 0.5 * mesh.h();
    let (s, el, er) = (basis.derivative(), basis.trace_left(), basis.trace_right());
    let id = identity(m);
    let ll = outer(el, el);
    let rr = outer(er, er);
    let lr = outer(el, er);
    let rl = outer(er, el);

    let dx_own = kron(m, &lin(&[(half, s), (half, &ll)]), &id);
    let dx_left = kron(m, &lin(&[(-half, &lr)]), &id);
    let dv_own_inner = kron(m, &id, &lin(&[(half, s), (-half, &rr)]));
    let dv_own_bottom = kron(m, &id, &lin(&[(half, s), (-half, &rr), (half, &ll)]));
    let dv_up = kron(m, &id, &lin(&[(half, &rl)]));

    let mut dx = BlockSparse::zeros(mesh.cell_count(), m * m);
    let mut dv = BlockSparse::zeros(mesh.cell_count(), m * m);
    for i in 0..n {
        for j in 0..n {
            let c = mesh.cell_index(i, j);
            dx.add_block(c, c, &dx_own);
            if i > 0 {
                dx.add_block(c, mesh.cell_index(i - 1, j), &dx_left);
            }
            dv.add_block(c, c, if j == 0 { &dv_own_bottom } else { &dv_own_inner });
            if j + 1 < n {
                dv.add_block(c, mesh.cell_index(i, j + 1), &dv_up);
            }
        }
    }
    (dx, dv)
}

/// Spatial operator `L_h` acting on the modal vector of `G_h`.
pub fn assemble_spatial(mesh: &Mesh2D, basis: &Basis, theta: f64) -> Result<BlockSparse> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::NonPositivePenalty(theta));
    }
    let (dx, dv) = assemble_gradient(mesh, basis);
    Ok(spatial_from_gradient(mesh, basis, theta, &dx, &dv))
}

fn spatial_from_gradient(
    mesh: &Mesh2D,
    basis: &Basis,
    theta: f64,
    dx: &BlockSparse,
    dv: &BlockSparse,
) -> BlockSparse {
    let parts = assemble_parts(mesh, basis, theta);
    let mass = mass_scale(mesh);
    let inv_mass = 1.0 / mass;
    let px = dx.scale(inv_mass);
    let pv = dv.scale(inv_mass);
    let convection_x = parts.weighted_mass.mul(&px);
    let convection_v = parts.weighted_mass.mul(&pv);
    let diffusion = parts.diffusion_flux.mul(&pv);
    convection_x
        .add_scaled(-1.0, &convection_v)
        .add_scaled(1.0, &diffusion)
        .add_scaled(1.0, &parts.penalty)
        .add_scaled(-mass, &BlockSparse::scaled_identity(dx.cells(), dx.block_size(), 1.0))
}

/// The pieces of `L_h` that act on the auxiliary variables or on `G_h` directly.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialParts {
    /// `(v p, mu)`.
    pub weighted_mass: BlockSparse,
    /// `-(d_v p, mu)` plus the face terms with `P_v^` from below.
    pub diffusion_flux: BlockSparse,
    /// `(theta / h) int g(v_0^+) mu(v_0^+) dx`.
    pub penalty: BlockSparse,
}

/// Weighted mass, diffusion-flux and penalty operators.
pub fn assemble_parts(mesh: &Mesh2D, basis: &Basis, theta: f64) -> SpatialParts {
    let n = mesh.cells_per_dir();
    let m = basis.modes_1d();
    let h = mesh.h();
    let half = 0.5 * h;
    let (s, el, er, w) = (basis.derivative(), basis.trace_left(), basis.trace_right(), basis.weighted());
    let id = identity(m);
    let ll = outer(el, el);
    let lr = outer(el, er);
    let mut vmass = BlockSparse::zeros(mesh.cell_count(), m * m);
    let mut flux = BlockSparse::zeros(mesh.cell_count(), m * m);
    let mut penalty = BlockSparse::zeros(mesh.cell_count(), m * m);
    let k_inner = kron(m, &id, &lin(&[(-half, s), (-half, &ll)]));
    let k_bottom = kron(m, &id, &lin(&[(-half, s)]));
    let k_below = kron(m, &id, &lin(&[(half, &lr)]));
    let pen = kron(m, &id, &lin(&[(0.5 * theta, &ll)]));
    for i in 0..n {
        for j in 0..n {
            let c = mesh.cell_index(i, j);
            let (_, vc) = mesh.cell_center(i, j);
            // int v phi phi over the cell: (h/2) delta in x, (h/2)(v_c I + (h/2) W) in v
            let vblock = kron(m, &lin(&[(half, &id)]), &lin(&[(half * vc, &id), (half * half, w)]));
            vmass.add_block(c, c, &vblock);
            if j == 0 {
                flux.add_block(c, c, &k_bottom);
                penalty.add_block(c, c, &pen);
            } else {
                flux.add_block(c, c, &k_inner);
                flux.add_block(c, mesh.cell_index(i, j - 1), &k_below);
            }
        }
    }
    SpatialParts { weighted_mass: vmass, diffusion_flux: flux, penalty }
}

/// Assembled operators and the factorised step matrix for one `(alpha, tau, N, k, theta)`.
#[derive(Debug, Clone)]
pub struct LdgSystem {
    mesh: Mesh2D,
    basis: Basis,
    theta: f64,
    d0: f64,
    mass: f64,
    dx: BlockSparse,
    dv: BlockSparse,
    spatial: BlockSparse,
    system: BlockSparse,
    lu: BandedLu,
}

impl LdgSystem {
    pub fn new(mesh: Mesh2D, basis: Basis, theta: f64, d0: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::NonPositivePenalty(theta));
        }
        let (dx, dv) = assemble_gradient(&mesh, &basis);
        let spatial = spatial_from_gradient(&mesh, &basis, theta, &dx, &dv);
        let mass = mass_scale(&mesh);
        let (system, lu) = factor_system(&spatial, mass, d0)?;
        Ok(Self { mesh, basis, theta, d0, mass, dx, dv, spatial, system, lu })
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn layout(&self) -> FieldLayout {
        FieldLayout::new(self.mesh.cells_per_dir(), self.basis.degree())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    /// Scalar mass `h^2 / 4`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn gradient_x(&self) -> &BlockSparse {
        &self.dx
    }

    pub fn gradient_v(&self) -> &BlockSparse {
        &self.dv
    }

    pub fn spatial(&self) -> &BlockSparse {
        &self.spatial
    }

    /// `A = d_0 M + L_h`.
    pub fn matrix(&self) -> &BlockSparse {
        &self.system
    }

    /// Solve `A x = b`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.lu.solve(rhs)
    }

    /// Auxiliary variables `(P_x, P_v)` for a given `G_h`.
    pub fn gradient(&self, g: &DgField) -> Result<(DgField, DgField)> {
        let layout = self.layout();
        if g.layout() != layout {
            return Err(Error::ShapeMismatch { expected: layout.len(), found: g.layout().len() });
        }
        let inv = 1.0 / self.mass;
        let px = self.dx.mul_vec(g.coeffs()).into_iter().map(|v| v * inv).collect();
        let pv = self.dv.mul_vec(g.coeffs()).into_iter().map(|v| v * inv).collect();
        Ok((DgField::from_coeffs(layout, px)?, DgField::from_coeffs(layout, pv)?))
    }
}

fn factor_system(spatial: &BlockSparse, mass: f64, d0: f64) -> Result<(BlockSparse, BandedLu)> {
    if !(d0 > 0.0) || !d0.is_finite() {
        return Err(Error::NonPositiveShift(d0));
    }
    let identity = BlockSparse::scaled_identity(spatial.cells(), spatial.block_size(), 1.0);
    let system = spatial.add_scaled(d0 * mass, &identity);
    let lu = BandedLu::factor(&system)?;
    Ok((system, lu))
}

/// Form and factorise `A = d_0 M + L_h`; `mass` is the scalar of `M = mass * I`.
pub fn assemble_system(spatial: &BlockSparse, mass: f64, d0: f64) -> Result<(BlockSparse, BandedLu)> {
    factor_system(spatial, mass, d0)
}

/// Cell-wise L2 projection of a function, by `(k + 2)`-point quadrature.
pub fn project_function(f: impl Fn(f64, f64) -> f64, mesh: &Mesh2D, basis: &Basis) -> DgField {
    let layout = FieldLayout::new(mesh.cells_per_dir(), basis.degree());
    let coeffs = quadrature_moments(mesh, basis, basis.quad(), f);
    DgField::from_coeffs(layout, coeffs).expect("moments match layout")
}

/// `G_h^0`: projection of the problem's initial datum.
pub fn project_initial(problem: &ProblemSpec, mesh: &Mesh2D, basis: &Basis) -> Result<DgField> {
    problem.check_alignment(mesh)?;
    Ok(project_function(|x, v| problem.initial_at(x, v), mesh, basis))
}

/// `G_h^0` for the chosen data transfer.
pub fn initial_field(
    problem: &ProblemSpec,
    mesh: &Mesh2D,
    basis: &Basis,
    transfer: DataTransfer,
) -> Result<DgField> {
    let layout = FieldLayout::new(mesh.cells_per_dir(), basis.degree());
    DgField::from_coeffs(layout, initial_coefficients(problem, mesh, basis, transfer)?)
}

/// One CQ step: `A g^n = M r + F^n` with `r` the history combination.
///
/// `history` holds `g^0..g^{n-1}`; the new step index is `history.len()`.
pub fn step(
    system: &LdgSystem,
    weights: &CqWeights,
    history: &[DgField],
    load: Option<&[f64]>,
) -> Result<DgField> {
    let n = history.len();
    let layout = system.layout();
    let mut rhs = history_combination(weights, history, n)?;
    if rhs.len() != layout.len() {
        return Err(Error::ShapeMismatch { expected: layout.len(), found: rhs.len() });
    }
    rhs.iter_mut().for_each(|r| *r *= system.mass());
    if let Some(load) = load {
        if load.len() != rhs.len() {
            return Err(Error::ShapeMismatch { expected: rhs.len(), found: load.len() });
        }
        for (r, l) in rhs.iter_mut().zip(load) {
            *r += l;
        }
    }
    system.lu.solve_in_place(&mut rhs)?;
    DgField::from_coeffs(layout, rhs)
}

/// Fields `g^0..g^L` at `t_n = n tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    tau: f64,
    fields: Vec<DgField>,
}

impl Trajectory {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.fields.len() - 1
    }

    pub fn fields(&self) -> &[DgField] {
        &self.fields
    }

    pub fn get(&self, n: usize) -> Option<&DgField> {
        self.fields.get(n)
    }

    pub fn first(&self) -> &DgField {
        &self.fields[0]
    }

    pub fn last(&self) -> &DgField {
        self.fields.last().expect("trajectory holds g^0")
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.tau
    }

    pub fn into_fields(self) -> Vec<DgField> {
        self.fields
    }
}

/// Number of steps `T / tau`, which must be a whole number.
pub fn step_count(t_final: f64, tau: f64) -> Result<usize> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::NonPositiveStep(tau));
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::NonIntegralSteps { t_final, tau });
    }
    let ratio = t_final / tau;
    let steps = libm::round(ratio);
    if libm::fabs(ratio - steps) > 1e-9 * steps.max(1.0) {
        return Err(Error::NonIntegralSteps { t_final, tau });
    }
    Ok(steps as usize)
}

/// A reusable marcher for one `(alpha, tau, N, k, theta)` and step count.
#[derive(Debug, Clone)]
pub struct Solver {
    weights: CqWeights,
    system: LdgSystem,
    transfer: DataTransfer,
}

impl Solver {
    pub fn new(alpha: f64, n: usize, degree: usize, tau: f64, steps: usize, theta: f64) -> Result<Self> {
        let mesh = Mesh2D::new(n)?;
        let basis = Basis::new(degree)?;
        let weights = CqWeights::new(alpha, tau, steps)?;
        let system = LdgSystem::new(mesh, basis, theta, weights.get(0))?;
        Ok(Self { weights, system, transfer: DataTransfer::default() })
    }

    /// Use `transfer` for the source term (and in [`run_with`], for `G_0`).
    pub fn with_transfer(mut self, transfer: DataTransfer) -> Self {
        self.transfer = transfer;
        self
    }

    pub fn transfer(&self) -> DataTransfer {
        self.transfer
    }

    pub fn weights(&self) -> &CqWeights {
        &self.weights
    }

    pub fn system(&self) -> &LdgSystem {
        &self.system
    }

    /// March `initial` through all steps; `source` supplies `f` (none means `f = 0`).
    pub fn march(&self, initial: DgField, source: Option<&ProblemSpec>) -> Result<Trajectory> {
        let layout = self.system.layout();
        if initial.layout() != layout {
            return Err(Error::ShapeMismatch { expected: layout.len(), found: initial.layout().len() });
        }
        let tau = self.weights.tau();
        let steps = self.weights.steps();
        let mut fields = Vec::with_capacity(steps + 1);
        fields.push(initial);
        for n in 1..=steps {
            let load = match source {
                Some(p) => Some(load_with(
                    p,
                    n as f64 * tau,
                    self.system.mesh(),
                    self.system.basis(),
                    self.transfer,
                )?),
                None => None,
            };
            let next = step(&self.system, &self.weights, &fields, load.as_deref())?;
            fields.push(next);
        }
        Ok(Trajectory { tau, fields })
    }
}

/// Solve `problem` up to its final time with `N` cells per direction, degree
/// `k`, step `tau` and penalty `theta`, interpolating the data.
pub fn run(problem: &ProblemSpec, n: usize, degree: usize, tau: f64, theta: f64) -> Result<Trajectory> {
    run_with(problem, n, degree, tau, theta, DataTransfer::default())
}

/// [`run`] with an explicit choice of data transfer.
pub fn run_with(
    problem: &ProblemSpec,
    n: usize,
    degree: usize,
    tau: f64,
    theta: f64,
    transfer: DataTransfer,
) -> Result<Trajectory> {
    let steps = step_count(problem.t_final(), tau)?;
    let solver = Solver::new(problem.alpha(), n, degree, tau, steps, theta)?.with_transfer(transfer);
    let g0 = initial_field(problem, solver.system.mesh(), solver.system.basis(), transfer)?;
    solver.march(g0, Some(problem))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{example1, example2, Example1Case};

    #[test]
    fn zero_data_stays_zero() {
        let p = ProblemSpec::new(0.5, 0.5, |_, _| 0.0, |_, _, _| 0.0).unwrap();
        let traj = run(&p, 4, 1, 0.1, 1.0).unwrap();
        assert_eq!(traj.steps(), 5);
        assert!(traj.fields().iter().all(|f| f.coeffs().iter().all(|&c| c == 0.0)));
    }

    #[test]
    fn zero_final_time_returns_projection() {
        let p = example1(Example1Case::A, 0.5).unwrap().with_t_final(0.0);
        let mesh = Mesh2D::new(4).unwrap();
        let basis = Basis::new(1).unwrap();
        let traj = run_with(&p, 4, 1, 0.1, 1.0, DataTransfer::Projection).unwrap();
        assert_eq!(traj.steps(), 0);
        assert_eq!(traj.first(), &project_initial(&p, &mesh, &basis).unwrap());
        let traj = run(&p, 4, 1, 0.1, 1.0).unwrap();
        assert_eq!(
            traj.first(),
            &initial_field(&p, &mesh, &basis, DataTransfer::Interpolation).unwrap()
        );
    }

    #[test]
    fn non_integral_step_count_rejected() {
        let p = example2(0.5).unwrap();
        assert_eq!(
            run(&p, 4, 1, 0.3, 1.0).unwrap_err(),
            Error::NonIntegralSteps { t_final: 1.0, tau: 0.3 }
        );
        assert_eq!(step_count(1.0, 1.0 / 160.0), Ok(160));
    }

    #[test]
    fn penalty_must_be_positive() {
        let mesh = Mesh2D::new(2).unwrap();
        let basis = Basis::new(1).unwrap();
        assert_eq!(assemble_spatial(&mesh, &basis, 0.0).unwrap_err(), Error::NonPositivePenalty(0.0));
        assert!(LdgSystem::new(mesh, basis, -1.0, 1.0).is_err());
    }

    #[test]
    fn zero_field_has_zero_gradient_and_image() {
        let mesh = Mesh2D::new(3).unwrap();
        let basis = Basis::new(2).unwrap();
        let sys = LdgSystem::new(mesh, basis, 1.0, 2.0).unwrap();
        let g = DgField::zeros(sys.layout());
        let (px, pv) = sys.gradient(&g).unwrap();
        assert!(px.coeffs().iter().chain(pv.coeffs()).all(|&c| c == 0.0));
        assert!(sys.spatial().mul_vec(g.coeffs()).iter().all(|&c| c == 0.0));
    }

    #[test]
    fn constant_initial_data_projects_to_constant_mode() {
        let mesh = Mesh2D::new(3).unwrap();
        let basis = Basis::new(2).unwrap();
        let g = project_function(|_, _| 1.5, &mesh, &basis);
        let layout = g.layout();
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..3 {
                    for b in 0..3 {
                        let expect = if a == 0 && b == 0 { 3.0 } else { 0.0 };
                        assert!((g.coeff(i, j, a, b) - expect).abs() < 1e-14);
                    }
                }
            }
        }
        assert_eq!(layout.len(), 81);
    }

    #[test]
    fn doubling_leading_weight_adds_mass() {
        let mesh = Mesh2D::new(3).unwrap();
        let basis = Basis::new(1).unwrap();
        let spatial = assemble_spatial(&mesh, &basis, 1.0).unwrap();
        let mass = mass_scale(&mesh);
        let (a1, _) = assemble_system(&spatial, mass, 1.5).unwrap();
        let (a2, _) = assemble_system(&spatial, mass, 3.0).unwrap();
        let diff = a2.add_scaled(-1.0, &a1);
        let expect = BlockSparse::scaled_identity(9, 4, 1.5 * mass);
        let (d, e) = (diff.to_dense(), expect.to_dense());
        for (x, y) in d.iter().zip(&e) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn solve_recovers_random_vector() {
        use rand::{Rng, SeedableRng};
        let mesh = Mesh2D::new(6).unwrap();
        let basis = Basis::new(2).unwrap();
        let sys = LdgSystem::new(mesh, basis, 1.0, 10f64.powf(0.5)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..sys.layout().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = sys.matrix().mul_vec(&x);
        let y = sys.solve(&b).unwrap();
        let err: f64 = x.iter().zip(&y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = x.iter().map(|p| p * p).sum::<f64>().sqrt();
        assert!(err <= 1e-10 * norm);
        let r = sys.matrix().mul_vec(&y);
        let res: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|p| p * p).sum::<f64>().sqrt();
        assert!(res <= 1e-10 * bn);
    }
}
