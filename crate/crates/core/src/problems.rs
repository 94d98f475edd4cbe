//! Problem instances: initial data, source and (when known) the exact solution.
//!
//! All problems use unit physical constants, the homogeneous boundary data
//! `G(x, 0) = G(x, 1) = G(0, v) = 0`, and are posed in the Caputo form
//! `D^alpha (G - G_0) + v G_x - d_v (v G) - G_vv = f`.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::basis::Basis;
use crate::field::{nodal_interpolation, quadrature_moments};
use crate::mesh::Mesh2D;
use crate::{Error, Result};

pub type SpatialFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Box<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Built-in problems, addressed by short string ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    /// Smooth initial data `x sin(pi v)`, no source.
    Ex1a,
    /// Indicator initial data on `(0.5, 1) x (0, 0.5)`, no source.
    Ex1b,
    /// Zero initial data, indicator source growing like `t^0.8`.
    Ex1c,
    /// Manufactured solution `(t^alpha + 1) sin(pi x) sin(pi v)`.
    Ex2,
}

impl ProblemId {
    pub const ALL: [ProblemId; 4] = [ProblemId::Ex1a, ProblemId::Ex1b, ProblemId::Ex1c, ProblemId::Ex2];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::Ex1a => "ex1a",
            ProblemId::Ex1b => "ex1b",
            ProblemId::Ex1c => "ex1c",
            ProblemId::Ex2 => "ex2",
        }
    }

    pub fn build(self, alpha: f64) -> Result<ProblemSpec> {
        match self {
            ProblemId::Ex1a => example1(Example1Case::A, alpha),
            ProblemId::Ex1b => example1(Example1Case::B, alpha),
            ProblemId::Ex1c => example1(Example1Case::C, alpha),
            ProblemId::Ex2 => example2(alpha),
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownProblem;

impl fmt::Display for UnknownProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown problem id (expected ex1a, ex1b, ex1c or ex2)")
    }
}

impl FromStr for ProblemId {
    type Err = UnknownProblem;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or(UnknownProblem)
    }
}

/// A line across the square where data may jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Discontinuity {
    /// `x = c`
    X(f64),
    /// `v = c`
    V(f64),
}

impl Discontinuity {
    pub fn coordinate(self) -> f64 {
        match self {
            Discontinuity::X(c) | Discontinuity::V(c) => c,
        }
    }
}

pub struct ProblemSpec {
    id: Option<ProblemId>,
    alpha: f64,
    t_final: f64,
    initial: SpatialFn,
    source: SpaceTimeFn,
    exact: Option<SpaceTimeFn>,
    discontinuities: Vec<Discontinuity>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("alpha", &self.alpha)
            .field("t_final", &self.t_final)
            .field("has_exact", &self.exact.is_some())
            .field("discontinuities", &self.discontinuities)
            .finish()
    }
}

impl ProblemSpec {
    pub fn new(
        alpha: f64,
        t_final: f64,
        initial: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        source: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::OrderOutOfRange(alpha));
        }
        Ok(Self {
            id: None,
            alpha,
            t_final,
            initial: Box::new(initial),
            source: Box::new(source),
            exact: None,
            discontinuities: Vec::new(),
        })
    }

    pub fn with_exact(mut self, exact: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Box::new(exact));
        self
    }

    pub fn with_discontinuity(mut self, line: Discontinuity) -> Self {
        self.discontinuities.push(line);
        self
    }

    pub fn with_t_final(mut self, t_final: f64) -> Self {
        self.t_final = t_final;
        self
    }

    fn with_id(mut self, id: ProblemId) -> Self {
        self.id = Some(id);
        self
    }

    pub fn id(&self) -> Option<ProblemId> {
        self.id
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn initial_at(&self, x: f64, v: f64) -> f64 {
        (self.initial)(x, v)
    }

    pub fn source_at(&self, x: f64, v: f64, t: f64) -> f64 {
        (self.source)(x, v, t)
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_at(&self, x: f64, v: f64, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|e| e(x, v, t))
    }

    pub fn discontinuities(&self) -> &[Discontinuity] {
        &self.discontinuities
    }

    /// Reject meshes on which a data discontinuity would cut through cells.
    pub fn check_alignment(&self, mesh: &Mesh2D) -> Result<()> {
        match self.discontinuities.iter().find(|d| !mesh.is_grid_line(d.coordinate())) {
            Some(d) => Err(Error::MisalignedDiscontinuity { coordinate: d.coordinate() }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example1Case {
    A,
    B,
    C,
}

/// `chi_(0.5,1)(x) chi_(0,0.5)(v)` on the closed square: open on the interior
/// lines, but equal to one on the boundary pieces `x = 1` and `v = 0`, which
/// matters once data is sampled at cell vertices.
fn indicator(x: f64, v: f64) -> f64 {
    if x > 0.5 && v < 0.5 {
        1.0
    } else {
        0.0
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange(alpha))
    }
}

/// Temporal-convergence problems on `T = 1`.
pub fn example1(case: Example1Case, alpha: f64) -> Result<ProblemSpec> {
    check_order(alpha)?;
    let spec = match case {
        Example1Case::A => {
            ProblemSpec::new(alpha, 1.0, |x, v| x * libm::sin(PI * v), |_, _, _| 0.0)?
                .with_id(ProblemId::Ex1a)
        }
        Example1Case::B => ProblemSpec::new(alpha, 1.0, indicator, |_, _, _| 0.0)?
            .with_id(ProblemId::Ex1b)
            .with_discontinuity(Discontinuity::X(0.5))
            .with_discontinuity(Discontinuity::V(0.5)),
        // The source exponent is 0.8 for every alpha.
        Example1Case::C => ProblemSpec::new(alpha, 1.0, |_, _| 0.0, |x, v, t| {
            indicator(x, v) * libm::pow(t, 0.8)
        })?
        .with_id(ProblemId::Ex1c)
        .with_discontinuity(Discontinuity::X(0.5))
        .with_discontinuity(Discontinuity::V(0.5)),
    };
    Ok(spec)
}

/// Manufactured solution `G = (t^alpha + 1) sin(pi x) sin(pi v)` on `T = 1`.
///
/// The source multiplies the spatial residual by `t^alpha + 1`, the factor
/// that makes `G` an exact solution.
pub fn example2(alpha: f64) -> Result<ProblemSpec> {
    check_order(alpha)?;
    let gamma = libm::tgamma(alpha + 1.0);
    let source = move |x: f64, v: f64, t: f64| {
        let (sx, cx) = (libm::sin(PI * x), libm::cos(PI * x));
        let (sv, cv) = (libm::sin(PI * v), libm::cos(PI * v));
        let time = libm::pow(t, alpha) + 1.0;
        gamma * sx * sv
            + time * (PI * PI * sx * sv + v * PI * cx * sv - v * PI * sx * cv - sx * sv)
    };
    let exact = move |x: f64, v: f64, t: f64| {
        (libm::pow(t, alpha) + 1.0) * libm::sin(PI * x) * libm::sin(PI * v)
    };
    Ok(ProblemSpec::new(alpha, 1.0, |x, v| libm::sin(PI * x) * libm::sin(PI * v), source)?
        .with_exact(exact)
        .with_id(ProblemId::Ex2))
}

/// How continuous data (initial datum, source) enters the discrete space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DataTransfer {
    /// Cell-wise `Q_k` interpolation at equispaced nodes; the load is
    /// `(I_h f, psi_ab)`. This is what the published tables were produced with.
    #[default]
    Interpolation,
    /// Cell-wise L2 projection by quadrature; the load is `(f, psi_ab)`.
    Projection,
}

impl DataTransfer {
    pub fn as_str(self) -> &'static str {
        match self {
            DataTransfer::Interpolation => "interpolation",
            DataTransfer::Projection => "projection",
        }
    }
}

impl FromStr for DataTransfer {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        match s {
            "interpolation" => Ok(DataTransfer::Interpolation),
            "projection" => Ok(DataTransfer::Projection),
            _ => Err(()),
        }
    }
}

/// Modal coefficients of `G_0` in the discrete space.
pub fn initial_coefficients(
    problem: &ProblemSpec,
    mesh: &Mesh2D,
    basis: &Basis,
    transfer: DataTransfer,
) -> Result<Vec<f64>> {
    problem.check_alignment(mesh)?;
    let f = |x, v| problem.initial_at(x, v);
    Ok(match transfer {
        DataTransfer::Interpolation => nodal_interpolation(mesh, basis, f),
        DataTransfer::Projection => quadrature_moments(mesh, basis, basis.quad(), f),
    })
}

/// Load vector of `f(., ., t)` for the chosen data transfer.
pub fn load_with(
    problem: &ProblemSpec,
    t: f64,
    mesh: &Mesh2D,
    basis: &Basis,
    transfer: DataTransfer,
) -> Result<Vec<f64>> {
    match transfer {
        DataTransfer::Projection => load_vector(problem, t, mesh, basis),
        DataTransfer::Interpolation => {
            problem.check_alignment(mesh)?;
            let h = mesh.h();
            let mut load = nodal_interpolation(mesh, basis, |x, v| problem.source_at(x, v, t));
            load.iter_mut().for_each(|l| *l *= 0.25 * h * h);
            Ok(load)
        }
    }
}

/// Modal load `(f(., ., t), psi_ab)` on every cell, using the basis assembly rule.
pub fn load_vector(problem: &ProblemSpec, t: f64, mesh: &Mesh2D, basis: &Basis) -> Result<Vec<f64>> {
    problem.check_alignment(mesh)?;
    let h = mesh.h();
    let mut load = quadrature_moments(mesh, basis, basis.quad(), |x, v| problem.source_at(x, v, t));
    load.iter_mut().for_each(|l| *l *= 0.25 * h * h);
    Ok(load)
}
