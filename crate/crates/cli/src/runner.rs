//! Command execution.

use std::fmt;
use std::thread;

use fkk_core::cq::CqWeights;
use fkk_core::ldg::run_with;
use fkk_core::study::{
    l2_error_exact, regularity_diagnostic, spatial_study, stability_probe, temporal_study, ConvergenceTable,
};
use fkk_core::{Error, ProblemId, ProblemSpec, Trajectory};

use crate::config::{Command, ConfigError, OutputFormat, RunConfig};
use crate::format::{convergence_csv, convergence_markdown, fixed4, sci, Table};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    /// Settings violate a solver precondition.
    Precondition(Error),
    /// The solver failed on settings that passed validation.
    Solver(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
            CliError::Precondition(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Precondition(e) => write!(f, "invalid parameters: {e}"),
            CliError::Solver(e) => write!(f, "solver failed: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn is_precondition(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidResolution(_)
            | Error::InvalidDegree { .. }
            | Error::DegreeTooHigh { .. }
            | Error::OrderOutOfRange(_)
            | Error::NonPositiveStep(_)
            | Error::NonPositivePenalty(_)
            | Error::NonIntegralSteps { .. }
            | Error::MisalignedDiscontinuity { .. }
    )
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if is_precondition(&e) {
            CliError::Precondition(e)
        } else {
            CliError::Solver(e)
        }
    }
}

/// Rendered output plus notes meant for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    pub notes: Vec<String>,
}

pub const EX2_NOTE: &str = "note: ex2 uses the source built from G = (t^alpha + 1) sin(pi x) sin(pi v); \
     a time factor t^(alpha+1) would not match that solution";

/// Run `f` on every item on its own thread; results keep the input order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|x| s.spawn(|| f(x))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Markdown => table.to_markdown(),
    }
}

fn render_convergence(tables: &[ConvergenceTable], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => convergence_csv(tables),
        OutputFormat::Markdown => convergence_markdown(tables),
    }
}

/// Coefficient dump: cell indices 1-based as in the mesh notation, modes 0-based.
pub fn dump_field_rows(traj: &Trajectory, steps: &[usize]) -> Table {
    let mut t = Table::new(&["step", "time", "i", "j", "a", "b", "coeff"]);
    for &n in steps {
        let field = traj.get(n).expect("validated step");
        let layout = field.layout();
        let (cells, m) = (layout.cells_per_dir, layout.modes_1d());
        for i in 0..cells {
            for j in 0..cells {
                for a in 0..m {
                    for b in 0..m {
                        t.push(vec![
                            n.to_string(),
                            traj.time(n).to_string(),
                            (i + 1).to_string(),
                            (j + 1).to_string(),
                            a.to_string(),
                            b.to_string(),
                            format!("{:e}", field.coeff(i, j, a, b)),
                        ]);
                    }
                }
            }
        }
    }
    t
}

fn build(config: &RunConfig, alpha: f64) -> Result<ProblemSpec, CliError> {
    Ok(config.problem.build(alpha)?)
}

fn solve(config: &RunConfig) -> Result<Report, CliError> {
    let alpha = config.alpha[0];
    let problem = build(config, alpha)?.with_t_final(config.t_final);
    let (n, tau) = (config.n[0], config.tau[0]);
    let traj = run_with(&problem, n, config.k, tau, config.theta, config.data)?;
    let steps = if config.dump_steps.is_empty() { vec![traj.steps()] } else { config.dump_steps.clone() };
    let mut notes = Vec::new();
    if config.alpha.len() > 1 || config.n.len() > 1 || config.tau.len() > 1 {
        notes.push("note: solve uses the first alpha, n and tau only".to_string());
    }
    if problem.has_exact() {
        let t = config.t_final;
        let err = l2_error_exact(traj.last(), |x, v| problem.exact_at(x, v, t).expect("has exact"));
        notes.push(format!("L2 error against the exact solution at t = {t}: {}", sci(err)));
    }
    let body = render(&dump_field_rows(&traj, &steps), config.format);
    Ok(Report { body, notes })
}

fn collect<T>(results: Vec<Result<T, Error>>) -> Result<Vec<T>, CliError> {
    results.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

/// Execute a validated configuration.
pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    let mut notes = Vec::new();
    let uses_problem = !matches!(config.command, Command::Stability | Command::CqWeights);
    if uses_problem && config.problem == ProblemId::Ex2 {
        notes.push(EX2_NOTE.to_string());
    }
    let mut report = match config.command {
        Command::Solve => solve(config)?,
        Command::StudyTime => {
            let tables = collect(par_map(&config.alpha, |&a| {
                let p = config.problem.build(a)?;
                temporal_study(&p, config.n[0], config.k, &config.tau, config.theta)
            }))?;
            Report { body: render_convergence(&tables, config.format), notes: vec![] }
        }
        Command::StudySpace => {
            if !build(config, config.alpha[0])?.has_exact() {
                return Err(ConfigError::Unsupported { command: config.command, problem: config.problem }.into());
            }
            let tables = collect(par_map(&config.alpha, |&a| {
                let p = config.problem.build(a)?;
                spatial_study(&p, config.k, config.tau[0], &config.n, config.theta)
            }))?;
            Report { body: render_convergence(&tables, config.format), notes: vec![] }
        }
        Command::Stability => {
            let reports = collect(par_map(&config.alpha, |&a| {
                stability_probe(
                    a,
                    config.n[0],
                    config.k,
                    config.tau[0],
                    config.steps,
                    config.theta,
                    config.trials,
                    config.seed,
                )
            }))?;
            let mut t = Table::new(&["alpha", "n", "k", "tau", "steps", "trials", "max_ratio"]);
            for (&a, r) in config.alpha.iter().zip(&reports) {
                t.push(vec![
                    a.to_string(),
                    config.n[0].to_string(),
                    config.k.to_string(),
                    config.tau[0].to_string(),
                    config.steps.to_string(),
                    config.trials.to_string(),
                    sci(r.max_ratio()),
                ]);
            }
            Report { body: render(&t, config.format), notes: vec![] }
        }
        Command::Regularity => {
            let cases: Vec<(f64, f64)> =
                config.alpha.iter().flat_map(|&a| config.tau.iter().map(move |&t| (a, t))).collect();
            let fits = collect(par_map(&cases, |&(a, tau)| {
                let p = config.problem.build(a)?;
                regularity_diagnostic(&p, config.n[0], config.k, tau, config.theta)
            }))?;
            let mut t = Table::new(&["alpha", "tau", "points", "slope"]);
            for (&(a, tau), fit) in cases.iter().zip(&fits) {
                let slope = fit.slope.map(fixed4).unwrap_or_else(|| "degenerate".into());
                t.push(vec![a.to_string(), tau.to_string(), fit.points.len().to_string(), slope]);
            }
            Report { body: render(&t, config.format), notes: vec![] }
        }
        Command::CqWeights => {
            let mut t = Table::new(&["alpha", "j", "weight", "partial_sum"]);
            for &a in &config.alpha {
                let w = CqWeights::new(a, config.tau[0], config.steps)?;
                for j in 0..=config.steps {
                    t.push(vec![a.to_string(), j.to_string(), sci(w.get(j)), sci(w.partial_sum(j))]);
                }
            }
            Report { body: render(&t, config.format), notes: vec![] }
        }
    };
    notes.append(&mut report.notes);
    report.notes = notes;
    Ok(report)
}
