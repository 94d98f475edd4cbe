//! Run configuration: `key = value` files, command-line flags, defaults and
//! validation.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use fkk_core::ldg::step_count;
use fkk_core::{Basis, DataTransfer, Mesh2D, ProblemId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    StudyTime,
    StudySpace,
    Stability,
    Regularity,
    CqWeights,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Solve,
        Command::StudyTime,
        Command::StudySpace,
        Command::Stability,
        Command::Regularity,
        Command::CqWeights,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::StudyTime => "study-time",
            Command::StudySpace => "study-space",
            Command::Stability => "stability",
            Command::Regularity => "regularity",
            Command::CqWeights => "cq-weights",
        }
    }
}

impl FromStr for Command {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Command::ALL.into_iter().find(|c| c.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "markdown",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            _ => Err(()),
        }
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub problem: ProblemId,
    pub alpha: Vec<f64>,
    pub n: Vec<usize>,
    pub k: usize,
    pub tau: Vec<f64>,
    pub t_final: f64,
    pub theta: f64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: u64,
    pub trials: usize,
    /// Step count for `stability` and `cq-weights`.
    pub steps: usize,
    /// Steps written by `solve`; empty means the final step only.
    pub dump_steps: Vec<usize>,
    pub data: DataTransfer,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    UnknownKey(String),
    Malformed { key: String, token: String },
    ConflictingCommand { file: String, flag: String },
    MissingCommand,
    /// Config file line without `=`.
    BadLine { line: usize, text: String },
    Read { path: PathBuf, reason: String },
    /// The command cannot run with this problem.
    Unsupported { command: Command, problem: ProblemId },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::UnknownKey(k) => write!(f, "unknown key `{k}`"),
            ConfigError::Malformed { key, token } => write!(f, "malformed value `{token}` for `{key}`"),
            ConfigError::ConflictingCommand { file, flag } => {
                write!(f, "conflicting command: config file says `{file}`, command line says `{flag}`")
            }
            ConfigError::MissingCommand => f.write_str("no command given"),
            ConfigError::BadLine { line, text } => write!(f, "line {line}: expected `key = value`, got `{text}`"),
            ConfigError::Read { path, reason } => write!(f, "cannot read {}: {reason}", path.display()),
            ConfigError::Unsupported { command, problem } => {
                write!(f, "`{}` needs an exact solution, `{problem}` has none", command.as_str())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

pub const KEYS: [&str; 15] = [
    "command", "problem", "alpha", "n", "k", "tau", "t-final", "theta", "output", "format", "seed", "trials",
    "steps", "dump-steps", "data",
];

/// Settings as given, before defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Partial {
    pub command: Option<Command>,
    pub problem: Option<ProblemId>,
    pub alpha: Option<Vec<f64>>,
    pub n: Option<Vec<usize>>,
    pub k: Option<usize>,
    pub tau: Option<Vec<f64>>,
    pub t_final: Option<f64>,
    pub theta: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub steps: Option<usize>,
    pub dump_steps: Option<Vec<usize>>,
    pub data: Option<DataTransfer>,
}

fn one<T: FromStr>(key: &str, token: &str) -> Result<T, ConfigError> {
    token
        .trim()
        .parse()
        .map_err(|_| ConfigError::Malformed { key: key.into(), token: token.trim().into() })
}

/// Real number, or a fraction `p/q`.
fn real(key: &str, token: &str) -> Result<f64, ConfigError> {
    let t = token.trim();
    let bad = || ConfigError::Malformed { key: key.into(), token: t.into() };
    let value = match t.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            p / q
        }
        None => t.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn list<T>(key: &str, value: &str, item: impl Fn(&str, &str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    value.split(',').map(|tok| item(key, tok)).collect()
}

impl Partial {
    /// Store one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "command" => self.command = Some(one(key, v)?),
            "problem" => self.problem = Some(one(key, v)?),
            "alpha" => self.alpha = Some(list(key, v, real)?),
            "n" => self.n = Some(list(key, v, one)?),
            "k" => self.k = Some(one(key, v)?),
            "tau" => self.tau = Some(list(key, v, real)?),
            "t-final" => self.t_final = Some(real(key, v)?),
            "theta" => self.theta = Some(real(key, v)?),
            "output" => self.output = Some(PathBuf::from(v)),
            "format" => self.format = Some(one(key, v)?),
            "seed" => self.seed = Some(one(key, v)?),
            "trials" => self.trials = Some(one(key, v)?),
            "steps" => self.steps = Some(one(key, v)?),
            "dump-steps" => self.dump_steps = Some(if v.is_empty() { vec![] } else { list(key, v, one)? }),
            "data" => self.data = Some(one(key, v)?),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Parse a config file body.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut p = Partial::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::BadLine { line: idx + 1, text: line.into() })?;
            p.set(key.trim(), value)?;
        }
        Ok(p)
    }

    /// Settings in `over` win.
    pub fn merge(self, over: Partial) -> Partial {
        Partial {
            command: over.command.or(self.command),
            problem: over.problem.or(self.problem),
            alpha: over.alpha.or(self.alpha),
            n: over.n.or(self.n),
            k: over.k.or(self.k),
            tau: over.tau.or(self.tau),
            t_final: over.t_final.or(self.t_final),
            theta: over.theta.or(self.theta),
            output: over.output.or(self.output),
            format: over.format.or(self.format),
            seed: over.seed.or(self.seed),
            trials: over.trials.or(self.trials),
            steps: over.steps.or(self.steps),
            dump_steps: over.dump_steps.or(self.dump_steps),
            data: over.data.or(self.data),
        }
    }

    /// Fill in defaults. These follow the published experiment settings.
    pub fn resolve(self) -> Result<RunConfig, ConfigError> {
        let command = self.command.ok_or(ConfigError::MissingCommand)?;
        let problem = self.problem.unwrap_or(match command {
            Command::StudySpace => ProblemId::Ex2,
            Command::Regularity => ProblemId::Ex1b,
            _ => ProblemId::Ex1a,
        });
        let k = self.k.unwrap_or(1);
        let alpha = self.alpha.unwrap_or_else(|| match command {
            Command::StudyTime => match problem {
                ProblemId::Ex1b => vec![0.2, 0.4, 0.6],
                ProblemId::Ex1c => vec![0.2, 0.5, 0.7],
                _ => vec![0.3, 0.5, 0.8],
            },
            Command::StudySpace if k >= 2 => vec![0.4, 0.6, 0.8],
            Command::StudySpace => vec![0.3, 0.5, 0.7],
            Command::Stability => vec![0.3, 0.5, 0.8],
            _ => vec![0.5],
        });
        let n = self.n.unwrap_or_else(|| match command {
            Command::StudySpace => vec![4, 8, 12, 16, 20],
            Command::Stability => vec![8],
            _ => vec![16],
        });
        let tau = self.tau.unwrap_or_else(|| match command {
            Command::StudyTime => vec![0.1, 0.05, 0.025, 0.0125, 0.00625],
            Command::StudySpace if k >= 2 => vec![0.005],
            Command::StudySpace | Command::Solve => vec![0.01],
            Command::Stability => vec![0.02],
            Command::Regularity => vec![1.0 / 160.0],
            Command::CqWeights => vec![1.0],
        });
        let steps = self.steps.unwrap_or(match command {
            Command::CqWeights => 10,
            _ => 50,
        });
        Ok(RunConfig {
            command,
            problem,
            alpha,
            n,
            k,
            tau,
            t_final: self.t_final.unwrap_or(1.0),
            theta: self.theta.unwrap_or(1.0),
            output: self.output,
            format: self.format.unwrap_or_default(),
            seed: self.seed.unwrap_or(0),
            trials: self.trials.unwrap_or(10),
            steps,
            dump_steps: self.dump_steps.unwrap_or_default(),
            data: self.data.unwrap_or_default(),
        })
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Config file text that parses back to `config`.
pub fn render(config: &RunConfig) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
    line("command", config.command.as_str().into());
    line("problem", config.problem.as_str().into());
    line("alpha", join(&config.alpha));
    line("n", join(&config.n));
    line("k", config.k.to_string());
    line("tau", join(&config.tau));
    line("t-final", config.t_final.to_string());
    line("theta", config.theta.to_string());
    if let Some(p) = &config.output {
        line("output", p.display().to_string());
    }
    line("format", config.format.as_str().into());
    line("seed", config.seed.to_string());
    line("trials", config.trials.to_string());
    line("steps", config.steps.to_string());
    line("dump-steps", join(&config.dump_steps));
    line("data", config.data.as_str().into());
    out
}

/// Parse a config file body all the way to a [`RunConfig`].
pub fn parse_text(text: &str) -> Result<RunConfig, ConfigError> {
    Partial::from_text(text)?.resolve()
}

/// Fractional Klein-Kramers LDG/CQ solver and convergence studies.
///
/// Lists are comma separated; steps may be written as fractions, e.g. `1/100`.
#[derive(Debug, Parser)]
#[command(name = "fkk", version, arg_required_else_help = true)]
pub struct Cli {
    /// solve | study-time | study-space | stability | regularity | cq-weights
    pub command: Option<String>,
    /// `key = value` file; flags override its settings
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// ex1a | ex1b | ex1c | ex2
    #[arg(long)]
    pub problem: Option<String>,
    /// fractional order(s)
    #[arg(long)]
    pub alpha: Option<String>,
    /// cells per direction
    #[arg(long)]
    pub n: Option<String>,
    /// polynomial degree
    #[arg(long)]
    pub k: Option<String>,
    /// time step(s)
    #[arg(long)]
    pub tau: Option<String>,
    /// final time (solve)
    #[arg(long = "t-final")]
    pub t_final: Option<String>,
    /// penalty parameter
    #[arg(long)]
    pub theta: Option<String>,
    /// output file (stdout if absent)
    #[arg(long)]
    pub output: Option<String>,
    /// csv | markdown
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// random starts per order (stability)
    #[arg(long)]
    pub trials: Option<String>,
    /// step count (stability, cq-weights)
    #[arg(long)]
    pub steps: Option<String>,
    /// steps to write (solve); default is the last one
    #[arg(long = "dump-steps")]
    pub dump_steps: Option<String>,
    /// interpolation | projection (solve)
    #[arg(long)]
    pub data: Option<String>,
}

impl Cli {
    fn flags(&self) -> Result<Partial, ConfigError> {
        let mut p = Partial::default();
        let pairs = [
            ("problem", &self.problem),
            ("alpha", &self.alpha),
            ("n", &self.n),
            ("k", &self.k),
            ("tau", &self.tau),
            ("t-final", &self.t_final),
            ("theta", &self.theta),
            ("output", &self.output),
            ("format", &self.format),
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("steps", &self.steps),
            ("dump-steps", &self.dump_steps),
            ("data", &self.data),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                p.set(key, v)?;
            }
        }
        if let Some(c) = &self.command {
            p.set("command", c)?;
        }
        Ok(p)
    }

    /// Combine the config file (if any) and the flags.
    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError::Read { path: path.clone(), reason: e.to_string() })?;
                Partial::from_text(&text)?
            }
            None => Partial::default(),
        };
        let flags = self.flags()?;
        if let (Some(a), Some(b)) = (file.command, flags.command) {
            if a != b {
                return Err(ConfigError::ConflictingCommand { file: a.as_str().into(), flag: b.as_str().into() });
            }
        }
        file.merge(flags).resolve()
    }
}

/// Check every numeric setting against the solver's preconditions.
pub fn validate(config: &RunConfig) -> Result<(), fkk_core::Error> {
    use fkk_core::Error;
    // alpha = 1 is fine for the weights alone, not for the model problems
    let unit_ok = config.command == Command::CqWeights;
    for &a in &config.alpha {
        if !(a > 0.0 && (a < 1.0 || (unit_ok && a == 1.0))) {
            return Err(Error::OrderOutOfRange(a));
        }
    }
    for &t in &config.tau {
        if !(t > 0.0) {
            return Err(Error::NonPositiveStep(t));
        }
    }
    if config.command == Command::CqWeights {
        return Ok(());
    }
    if !(config.theta > 0.0) {
        return Err(Error::NonPositivePenalty(config.theta));
    }
    Basis::new(config.k)?;
    for &n in &config.n {
        let mesh = Mesh2D::new(n)?;
        if config.command != Command::Stability {
            config.problem.build(config.alpha[0])?.check_alignment(&mesh)?;
        }
    }
    match config.command {
        Command::Solve => {
            for &t in &config.tau {
                let steps = step_count(config.t_final, t)?;
                if let Some(&bad) = config.dump_steps.iter().find(|&&s| s > steps) {
                    return Err(Error::StepOutOfRange { step: bad, available: steps });
                }
            }
        }
        Command::StudyTime | Command::StudySpace | Command::Regularity => {
            for &t in &config.tau {
                step_count(1.0, t)?;
            }
        }
        _ => {}
    }
    Ok(())
}
