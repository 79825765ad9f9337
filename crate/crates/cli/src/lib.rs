//! Command-line front-end for `fracsub-core`: kernel tables, the two
//! solvers, the invariant verification suite and the data behind the six
//! standard figures.
//!
//! Every output carries the full [`output::RunManifest`], so a table can be
//! regenerated from its own header. Exit codes: `0` success, `2` invalid
//! input, `3` a computation did not converge, `4` a verification check failed.

pub mod commands;
pub mod config;
pub mod figures;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fracsub_core::bernstein::BernsteinError;
use fracsub_core::problem::ProblemSpec;
use fracsub_core::solver::{SolverConfig, SolverError};
use fracsub_core::wright::WrightError;
use fracsub_core::{KernelError, MultiTermProblem, ProblemError, QuadratureConfig, QuadratureError};
use thiserror::Error;

use config::{Config, Grid, SolverSection};
use output::{CommandName, Document, Format, OutputTarget, ProblemEntry, RunManifest};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("{failed} of {total} verification checks failed")]
    Verification { failed: usize, total: usize },
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Convergence(_) => EXIT_CONVERGENCE,
            CliError::Verification { .. } => EXIT_VERIFICATION,
            CliError::Io(_) => 1,
        }
    }
}

impl From<ProblemError> for CliError {
    fn from(e: ProblemError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<QuadratureError> for CliError {
    fn from(e: QuadratureError) -> Self {
        match e {
            QuadratureError::InvalidConfig(_) => CliError::Validation(e.to_string()),
            _ => CliError::Convergence(e.to_string()),
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::Quadrature(q) => q.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Kernel(k) => k.into(),
            SolverError::Quadrature(q) => q.into(),
            SolverError::NoConvergence { .. } | SolverError::GridTooCoarse { .. } => {
                CliError::Convergence(e.to_string())
            }
            SolverError::Problem(_) | SolverError::InvalidArgument(_) => CliError::Validation(e.to_string()),
        }
    }
}

impl From<WrightError> for CliError {
    fn from(e: WrightError) -> Self {
        match e {
            WrightError::InvalidArgument(_) => CliError::Validation(e.to_string()),
            WrightError::PrecisionLoss { .. } => CliError::Convergence(e.to_string()),
        }
    }
}

impl From<BernsteinError> for CliError {
    fn from(e: BernsteinError) -> Self {
        match e {
            BernsteinError::InvalidGrid(_) => CliError::Validation(e.to_string()),
            BernsteinError::Evaluation { .. } => CliError::Convergence(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fracsub",
    version,
    about = "Propagation functions, subordination kernels and solvers for multi-term time-fractional diffusion-wave equations"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration file (schema_version = 1).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (standard output if omitted).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Absolute and relative quadrature tolerance.
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
    /// Accept α − α_m > 1 (outside the validated theory).
    #[arg(long, global = true)]
    pub unsafe_allow_spread: bool,
    /// Number of eigenmodes.
    #[arg(long, global = true, value_name = "N")]
    pub modes: Option<usize>,
    /// Leading order α ∈ (1, 2].
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Leading coefficient c > 0.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Lower-order term as ORDER:COEFF (repeatable).
    #[arg(long = "term", global = true, value_name = "ORDER:COEFF")]
    pub terms: Vec<String>,
    /// Named problem: telegraph or classical-wave.
    #[arg(long, global = true)]
    pub preset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagation function w(x,t) on an x × t grid.
    Propagation {
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Subordination density φ(t,τ) or ψ(t,τ).
    Pdf {
        /// phi or psi.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
    },
    /// Fundamental solutions G_c(x,t) or G_s(x,t).
    Fundamental {
        /// G_c or G_s.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Dirichlet eigenmodes u_n(t) on (0,1), n = 1..modes.
    Eigenmodes {
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Cauchy problem on the whole line.
    SolveLine {
        /// indicator:a:b, gaussian:center:width or sine:n.
        #[arg(long, allow_hyphen_values = true)]
        initial: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Dirichlet problem on (0,1) by eigenfunction expansion.
    SolveInterval {
        #[arg(long, allow_hyphen_values = true)]
        initial: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Runs the invariant checks; exits 4 if any fails.
    Verify {
        /// A module (problem, bernstein, quadrature, wright, kernels, solver),
        /// a single check name, or all.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Data behind figure N (1..6).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
        number: u8,
    },
}

/// Configuration after merging the config file with the flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: Config,
    pub problem: Option<ProblemSpec>,
    pub allow_spread: bool,
    pub quadrature: QuadratureConfig,
    pub solver: SolverSection,
    pub output: OutputTarget,
}

impl Settings {
    pub fn from_args(common: &CommonArgs) -> Result<Self, CliError> {
        let config = match &common.config {
            Some(path) => Config::load(path)?,
            None => Config {
                schema_version: config::SCHEMA_VERSION,
                ..Default::default()
            },
        };
        let mut problem = match &common.preset {
            Some(name) => Some(config::preset(name)?),
            None => config.problem.clone(),
        };
        if let Some(alpha) = common.alpha {
            problem.get_or_insert(ProblemSpec {
                alpha,
                c: 1.0,
                terms: Vec::new(),
            });
        }
        if let Some(spec) = problem.as_mut() {
            if let Some(alpha) = common.alpha {
                spec.alpha = alpha;
            }
            if let Some(c) = common.c {
                spec.c = c;
            }
            if !common.terms.is_empty() {
                spec.terms = common.terms.iter().map(|t| config::parse_term(t)).collect::<Result<_, _>>()?;
            }
        } else if common.c.is_some() || !common.terms.is_empty() {
            return Err(CliError::Validation("--c and --term need --alpha or a base problem".into()));
        }
        let mut quadrature = config.quadrature.unwrap_or_default();
        if let Some(tol) = common.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Validation(format!("--tol {tol} must be positive")));
            }
            quadrature = quadrature.with_tol(tol);
        }
        quadrature.validate()?;
        let mut solver = config.solver.unwrap_or_default();
        if common.modes.is_some() {
            solver.modes = common.modes;
        }
        if solver.modes == Some(0) {
            return Err(CliError::Validation("--modes must be at least 1".into()));
        }
        if !(solver.profile_tol > 0.0 && solver.profile_tol.is_finite()) {
            return Err(CliError::Validation("solver.profile_tol must be positive".into()));
        }
        Ok(Settings {
            allow_spread: common.unsafe_allow_spread || config.unsafe_allow_spread,
            problem,
            quadrature,
            solver,
            output: OutputTarget {
                path: common.out.as_ref().map(|p| p.display().to_string()),
                format: common.format.unwrap_or(Format::Csv),
            },
            config,
        })
    }

    /// Defaults for a run without a config file or flags.
    pub fn defaults(format: Format) -> Self {
        Settings {
            config: Config {
                schema_version: config::SCHEMA_VERSION,
                ..Default::default()
            },
            problem: None,
            allow_spread: false,
            quadrature: QuadratureConfig::default(),
            solver: SolverSection::default(),
            output: OutputTarget { path: None, format },
        }
    }

    pub fn problem(&self) -> Result<MultiTermProblem, CliError> {
        let spec = self.problem.as_ref().ok_or_else(|| {
            CliError::Validation("no problem given (use --alpha/--term, --preset or a [problem] section)".into())
        })?;
        config::validate_problem(spec, self.allow_spread)
    }

    pub fn solver_config(&self, modes: usize) -> SolverConfig {
        SolverConfig {
            quadrature: self.quadrature,
            profile_tol: self.solver.profile_tol,
            modes: self.solver.modes.unwrap_or(modes),
            force_kernel_path: self.solver.force_kernel_path,
        }
    }

    /// A flag value, else the config file value, else the default.
    pub fn grid(&self, flag: &Option<String>, name: &str, default: Grid) -> Result<Grid, CliError> {
        if let Some(text) = flag {
            return Grid::parse(text);
        }
        let from_file = match name {
            "x" => &self.config.grids.x,
            "t" => &self.config.grids.t,
            "tau" => &self.config.grids.tau,
            _ => &None,
        };
        Ok(from_file.clone().unwrap_or(default))
    }

    pub fn manifest(&self, command: CommandName) -> RunManifest {
        let mut m = RunManifest::new(command, self.output.clone());
        m.unsafe_allow_spread = self.allow_spread;
        m.quadrature = self.quadrature;
        m.solver = self.solver;
        if let Some(spec) = &self.problem {
            m.problems.push(ProblemEntry {
                label: "problem".into(),
                spec: spec.clone(),
            });
        }
        m
    }
}

/// A finished run: the document and the number of failed checks.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: Document,
    pub failed_checks: usize,
}

pub fn run(command: &Command, settings: &Settings) -> Result<Outcome, CliError> {
    let done = |document| Outcome {
        document,
        failed_checks: 0,
    };
    match command {
        Command::Propagation { x, t } => Ok(done(commands::propagation(settings, x, t)?)),
        Command::Pdf { kind, t, tau } => Ok(done(commands::pdf(settings, kind, t, tau)?)),
        Command::Fundamental { kind, x, t } => Ok(done(commands::fundamental(settings, kind, x, t)?)),
        Command::Eigenmodes { t } => Ok(done(commands::eigenmodes(settings, t)?)),
        Command::SolveLine { initial, x, t } => Ok(done(commands::solve_line(settings, initial, x, t)?)),
        Command::SolveInterval { initial, x, t } => Ok(done(commands::solve_interval(settings, initial, x, t)?)),
        Command::Verify { suite } => {
            let suite = suite.clone().or_else(|| settings.config.suite.clone());
            verify::run(settings, suite.as_deref().unwrap_or("all"))
        }
        Command::Figure { number } => Ok(done(figures::figure(settings, *number)?)),
    }
}

fn write_output(settings: &Settings, document: &Document) -> Result<(), CliError> {
    let text = document.render(settings.output.format)?;
    match &settings.output.path {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{path}: {e}"))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Parses the arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { 0 };
        }
    };
    let result = Settings::from_args(&cli.common).and_then(|settings| {
        let outcome = run(&cli.command, &settings)?;
        write_output(&settings, &outcome.document)?;
        if outcome.failed_checks > 0 {
            return Err(CliError::Verification {
                failed: outcome.failed_checks,
                total: outcome.document.rows.len(),
            });
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fracsub: {e}");
            e.exit_code()
        }
    }
}
