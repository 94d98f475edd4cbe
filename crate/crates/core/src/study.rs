//! Error norms, convergence tables, the stability probe and the regularity
//! diagnostic.
//!
//! Everything here is sequential. Callers that want parallel rows (the CLI
//! does) run independent studies on separate threads; nothing is shared.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::legendre_eval;
use crate::field::{DgField, FieldLayout};
use crate::ldg::{run, step_count, Solver, Trajectory};
use crate::mesh::Mesh2D;
use crate::problems::ProblemSpec;
use crate::quadrature::gauss_rule;
use crate::Result;

/// Exact L2 distance between two fields on the same discretisation.
pub fn l2_error(a: &DgField, b: &DgField) -> Result<f64> {
    a.l2_distance(b)
}

/// L2 distance between a field and a function, by `(k + 3)`-point Gauss
/// quadrature per direction in every cell.
pub fn l2_error_exact(field: &DgField, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let layout = field.layout();
    let n = layout.cells_per_dir;
    let m = layout.modes_1d();
    let mesh = Mesh2D::new(n).expect("layout has N >= 1");
    let rule = gauss_rule(layout.degree + 3).expect("degree kept small");
    let q = rule.len();
    let mut table = alloc::vec![0.0; q * m];
    for (p, &xi) in rule.nodes().iter().enumerate() {
        for a in 0..m {
            table[p * m + a] = legendre_eval(a, xi);
        }
    }
    let half = 0.5 * mesh.h();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (cx, cv) = mesh.cell_center(i, j);
            let base = layout.index(i, j, 0, 0);
            let c = &field.coeffs()[base..base + m * m];
            let mut cell = 0.0;
            for p in 0..q {
                for r in 0..q {
                    let mut g = 0.0;
                    for a in 0..m {
                        for b in 0..m {
                            g += c[a * m + b] * table[p * m + a] * table[r * m + b];
                        }
                    }
                    let x = cx + half * rule.nodes()[p];
                    let v = cv + half * rule.nodes()[r];
                    let d = g - exact(x, v);
                    cell += rule.weights()[p] * rule.weights()[r] * d * d;
                }
            }
            sum += cell;
        }
    }
    libm::sqrt(half * half * sum)
}

/// Observed order between two refinement levels: `ln(e0 / e1) / ln(s0 / s1)`,
/// where `s` is the step size (`tau` or `h`) at each level.
pub fn rate(e0: f64, e1: f64, s0: f64, s1: f64) -> f64 {
    libm::log(e0 / e1) / libm::log(s0 / s1)
}

/// Refinement variable of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Time step; rows store `tau`.
    Tau,
    /// Mesh size; rows store `N` (so `h = 1 / N`).
    Cells,
}

impl Axis {
    /// Step size for a stored resolution value.
    pub fn step_size(self, resolution: f64) -> f64 {
        match self {
            Axis::Tau => resolution,
            Axis::Cells => 1.0 / resolution,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::Tau => "tau",
            Axis::Cells => "N",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub resolution: f64,
    pub error: f64,
    /// Rate against the previous row; `None` on the first row.
    pub rate: Option<f64>,
}

/// Errors and observed rates along a refinement sequence for one `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub axis: Axis,
    pub alpha: f64,
    pub degree: usize,
    /// Fixed parameters of the study, e.g. `("N", 16.0)` or `("tau", 0.01)`.
    pub fixed: Vec<(String, f64)>,
    pub rows: Vec<TableRow>,
}

impl ConvergenceTable {
    /// Build a table from `(resolution, error)` pairs; rates are recomputed.
    pub fn from_errors(
        axis: Axis,
        alpha: f64,
        degree: usize,
        fixed: Vec<(String, f64)>,
        points: &[(f64, f64)],
    ) -> Self {
        let rows = points
            .iter()
            .enumerate()
            .map(|(idx, &(resolution, error))| {
                let rate = (idx > 0).then(|| {
                    let (r0, e0) = points[idx - 1];
                    rate(e0, error, axis.step_size(r0), axis.step_size(resolution))
                });
                TableRow { resolution, error, rate }
            })
            .collect();
        Self { axis, alpha, degree, fixed, rows }
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    pub fn resolutions(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.resolution).collect()
    }
}

fn same_step(a: f64, b: f64) -> bool {
    libm::fabs(a - b) <= 1e-12 * a.max(b)
}

/// Self-convergence in time: `E_tau = ||G_tau(T) - G_{tau/2}(T)||` for each
/// `tau` in the list, all on the same `N x N` mesh of degree `k`.
pub fn temporal_study(
    problem: &ProblemSpec,
    n: usize,
    degree: usize,
    taus: &[f64],
    theta: f64,
) -> Result<ConvergenceTable> {
    let mut steps: Vec<f64> = Vec::new();
    for &tau in taus {
        for s in [tau, 0.5 * tau] {
            if !steps.iter().any(|&t| same_step(t, s)) {
                steps.push(s);
            }
        }
    }
    let mut finals: Vec<(f64, DgField)> = Vec::with_capacity(steps.len());
    for &tau in &steps {
        let traj = run(problem, n, degree, tau, theta)?;
        finals.push((tau, traj.into_fields().pop().expect("trajectory holds g^0")));
    }
    let find = |tau: f64| &finals.iter().find(|(t, _)| same_step(*t, tau)).expect("computed above").1;
    let mut points = Vec::with_capacity(taus.len());
    for &tau in taus {
        points.push((tau, l2_error(find(tau), find(0.5 * tau))?));
    }
    let fixed = alloc::vec![(String::from("N"), n as f64), (String::from("theta"), theta)];
    Ok(ConvergenceTable::from_errors(Axis::Tau, problem.alpha(), degree, fixed, &points))
}

/// Error against the exact solution at the final time for each `N`.
pub fn spatial_study(
    problem: &ProblemSpec,
    degree: usize,
    tau: f64,
    cells: &[usize],
    theta: f64,
) -> Result<ConvergenceTable> {
    let t = problem.t_final();
    let mut points = Vec::with_capacity(cells.len());
    for &n in cells {
        let traj = run(problem, n, degree, tau, theta)?;
        let err = l2_error_exact(traj.last(), |x, v| {
            problem.exact_at(x, v, t).expect("spatial study needs an exact solution")
        });
        points.push((n as f64, err));
    }
    let fixed = alloc::vec![(String::from("tau"), tau), (String::from("theta"), theta)];
    Ok(ConvergenceTable::from_errors(Axis::Cells, problem.alpha(), degree, fixed, &points))
}

/// `max_n ||g^n|| / ||g^0||` along a trajectory, `0` when `g^0 = 0`.
pub fn growth_ratio(trajectory: &Trajectory) -> f64 {
    let g0 = trajectory.first().l2_norm();
    if g0 == 0.0 {
        return 0.0;
    }
    trajectory
        .fields()
        .iter()
        .map(|g| g.l2_norm() / g0)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// Ratio per trial.
    pub ratios: Vec<f64>,
}

impl StabilityReport {
    /// Observed stability constant: the worst trial.
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// Run `trials` source-free problems from random coefficient vectors
/// (uniform in `[-1, 1]`, seeded) over `steps` steps and record the growth ratio.
#[allow(clippy::too_many_arguments)]
pub fn stability_probe(
    alpha: f64,
    n: usize,
    degree: usize,
    tau: f64,
    steps: usize,
    theta: f64,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport> {
    let solver = Solver::new(alpha, n, degree, tau, steps, theta)?;
    let layout = FieldLayout::new(n, degree);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(trials);
    for _ in 0..trials {
        let coeffs = (0..layout.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let g0 = DgField::from_coeffs(layout, coeffs)?;
        ratios.push(growth_ratio(&solver.march(g0, None)?));
    }
    Ok(StabilityReport { ratios })
}

/// Least-squares fit of `ln ||(g^n - g^{n-1}) / tau||` against `ln t_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityFit {
    /// `(ln t_n, ln q_n)` samples used in the fit.
    pub points: Vec<(f64, f64)>,
    /// Fitted slope; `None` when the fit is degenerate.
    pub slope: Option<f64>,
}

impl RegularityFit {
    pub fn is_degenerate(&self) -> bool {
        self.slope.is_none()
    }
}

/// Fit the decay of the discrete time derivative over `n` in `[2, L/2]`.
///
/// The fit is flagged degenerate if fewer than two steps fall in the window or
/// some difference quotient vanishes.
pub fn regularity_fit(trajectory: &Trajectory) -> Result<RegularityFit> {
    let tau = trajectory.tau();
    let steps = trajectory.steps();
    let fields = trajectory.fields();
    let mut points = Vec::new();
    let mut degenerate = false;
    for n in 2..=steps / 2 {
        let q = fields[n].l2_distance(&fields[n - 1])? / tau;
        if !(q > 0.0) || !q.is_finite() {
            degenerate = true;
            continue;
        }
        points.push((libm::log(n as f64 * tau), libm::log(q)));
    }
    if degenerate || points.len() < 2 {
        return Ok(RegularityFit { points, slope: None });
    }
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(RegularityFit { points, slope: Some(sxy / sxx) })
}

/// Run `problem` and fit the decay rate of its discrete time derivative.
pub fn regularity_diagnostic(
    problem: &ProblemSpec,
    n: usize,
    degree: usize,
    tau: f64,
    theta: f64,
) -> Result<RegularityFit> {
    step_count(problem.t_final(), tau)?;
    regularity_fit(&run(problem, n, degree, tau, theta)?)
}
