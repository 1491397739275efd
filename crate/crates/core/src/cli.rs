//! The `mdpkit` command line.
//!
//! Exit codes: 0 success, 1 parse or validation failure (including bad
//! flags), 2 non-convergence, 3 enumeration limit exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::algorithms::{policy_iteration, value_iteration, SolveResult};
use crate::dist::Dist;
use crate::envs::turtle_mdp;
use crate::error::Error;
use crate::fixpoint::FixpointConfig;
use crate::horizon::{brute_force_optimal, optimal_finite_value, PolicySequence};
use crate::io::{rule_labels, FileError, HorizonFile, MdpFile, ResultFile};
use crate::mdp::{DecisionRule, DiscountedProblem, Mdp};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_ENUMERATION: i32 = 3;

/// Discount written into `turtle-export` files.
pub const TURTLE_GAMMA: f64 = 0.9;

#[derive(Debug, Parser)]
#[command(
    name = "mdpkit",
    version,
    about = "Solve finite discounted Markov decision processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Vi,
    Pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an MDP file.
    Validate { path: PathBuf },
    /// Solve the infinite-horizon problem.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Vi)]
        algorithm: AlgorithmArg,
        /// Overrides the file's gamma.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        theta: f64,
        #[arg(long, env = "MDPKIT_MAX_ITER", default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
    /// Optimal horizon-N value by backward induction.
    Horizon(HorizonArgs),
    /// Optimal horizon-N value by exhaustive enumeration.
    Oracle(HorizonArgs),
    /// Write the turtle grid world as an MDP file.
    TurtleExport { path: PathBuf },
}

#[derive(Debug, clap::Args)]
pub struct HorizonArgs {
    pub path: PathBuf,
    #[arg(long = "n")]
    pub n: usize,
    /// A state label or `uniform`.
    #[arg(long, default_value = "uniform")]
    pub p0: String,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Self {
            code: EXIT_INVALID,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } => EXIT_NO_CONVERGENCE,
            Error::EnumerationTooLarge { .. } => EXIT_ENUMERATION,
            _ => EXIT_INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: EXIT_INVALID,
            message: e.to_string(),
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Validate { path } => validate(&path, out),
        Command::Solve {
            path,
            algorithm,
            gamma,
            theta,
            max_iter,
            output,
        } => solve(&path, algorithm, gamma, theta, max_iter, output, out),
        Command::Horizon(args) => horizon(&args, false, out),
        Command::Oracle(args) => horizon(&args, true, out),
        Command::TurtleExport { path } => turtle_export(&path, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<(Mdp, Option<f64>), Failure> {
    Ok(MdpFile::read(path)?.to_model()?)
}

fn problem(path: &Path, gamma_flag: Option<f64>) -> Result<DiscountedProblem, Failure> {
    let (mdp, file_gamma) = load(path)?;
    let gamma = gamma_flag.or(file_gamma).ok_or_else(|| Failure {
        code: EXIT_INVALID,
        message: "no discount factor: pass --gamma or set \"gamma\" in the file".into(),
    })?;
    Ok(DiscountedProblem::new(mdp, gamma)?)
}

fn validate(path: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let (mdp, _) = load(path)?;
    let pairs: usize = mdp.action_counts().iter().sum();
    writeln!(out, "ok: {} states, {} state-action pairs", mdp.n_states(), pairs)?;
    Ok(())
}

fn solve(
    path: &Path,
    algorithm: AlgorithmArg,
    gamma: Option<f64>,
    theta: f64,
    max_iter: usize,
    output: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let problem = problem(path, gamma)?;
    let cfg = FixpointConfig::new(theta, max_iter, None)?;
    let result = match algorithm {
        AlgorithmArg::Vi => value_iteration(&problem, &cfg)?,
        AlgorithmArg::Pi => policy_iteration(&problem, &DecisionRule::first_actions(&problem.mdp), &cfg)?,
    };
    match output {
        OutputFormat::Json => {
            let file = ResultFile::new(&problem.mdp, problem.gamma(), theta, &result);
            writeln!(out, "{}", serde_json::to_string_pretty(&file).expect("finite floats"))?;
        }
        OutputFormat::Table => write_solution_table(&problem.mdp, &result, out)?,
    }
    Ok(())
}

fn write_solution_table(mdp: &Mdp, result: &SolveResult, out: &mut dyn Write) -> std::io::Result<()> {
    let width = mdp.state_labels().iter().map(String::len).max().unwrap_or(5).max(5);
    writeln!(out, "{:<width$}  {:>22}  action", "state", "value")?;
    let policy = rule_labels(mdp, &result.policy);
    for (s, label) in mdp.state_labels().iter().enumerate() {
        writeln!(out, "{:<width$}  {:>22.15}  {}", label, result.value[s], policy[label])?;
    }
    writeln!(
        out,
        "algorithm {}  iterations {}  residual {:e}  error_bound {:e}",
        result.algorithm, result.iterations, result.residual, result.error_bound
    )
}

fn initial_distribution(mdp: &Mdp, spec: &str) -> Result<Dist, Failure> {
    if spec == "uniform" {
        return Ok(Dist::uniform(mdp.n_states())?);
    }
    let s = mdp.state_index(spec).ok_or_else(|| Failure {
        code: EXIT_INVALID,
        message: format!("--p0: unknown state {spec:?}"),
    })?;
    Ok(Dist::ret(s, mdp.n_states())?)
}

fn horizon(args: &HorizonArgs, exhaustive: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let problem = problem(&args.path, args.gamma)?;
    let p0 = initial_distribution(&problem.mdp, &args.p0)?;
    let (method, value, seq) = if exhaustive {
        let (value, seq) = brute_force_optimal(&problem, &p0, args.n)?;
        ("enumeration", value, seq)
    } else {
        let sol = optimal_finite_value(&problem, args.n);
        ("backward-induction", sol.pair(&p0)?, sol.sequence)
    };
    match args.output {
        OutputFormat::Json => {
            let file = HorizonFile::new(&problem.mdp, problem.gamma(), method, &args.p0, value, &seq);
            writeln!(out, "{}", serde_json::to_string_pretty(&file).expect("finite floats"))?;
        }
        OutputFormat::Table => write_sequence_table(&problem.mdp, method, value, &seq, out)?,
    }
    Ok(())
}

fn write_sequence_table(
    mdp: &Mdp,
    method: &str,
    value: f64,
    seq: &PolicySequence,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    writeln!(out, "value {value:.15} ({method}, n = {})", seq.len())?;
    for (k, rule) in seq.rules().iter().enumerate() {
        let picks: Vec<String> = rule_labels(mdp, rule)
            .into_iter()
            .map(|(s, a)| format!("{s}:{a}"))
            .collect();
        writeln!(out, "step {k} ({} left): {}", seq.len() - k, picks.join(" "))?;
    }
    Ok(())
}

fn turtle_export(path: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let problem = turtle_mdp(TURTLE_GAMMA)?;
    MdpFile::from_model(&problem.mdp, Some(TURTLE_GAMMA)).write(path)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}
