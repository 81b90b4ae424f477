//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 when flags are rejected (checked before any
//! simulation starts), 1 when a run fails afterwards.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::bounds::{theory_value, BoundId, BoundParams};
use crate::environments::{describe_instance, INSTANCE_IDS};
use crate::error::Error;
use crate::harness::{run_experiment, set_c0, ExperimentConfig};
use crate::learners::{LearnerId, LearnerSpec};

#[derive(Debug, Parser)]
#[command(
    name = "hedgebench",
    version,
    about = "Regret experiments for Hedge, AdaHedge and FTL"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate learners on an instance and print mean regret curves.
    Run(RunArgs),
    /// Regenerate the data behind one panel of the regret-curve figure.
    Reproduce(ReproduceArgs),
    /// Evaluate a closed-form regret bound.
    Bounds(BoundsArgs),
    /// List instance, learner and bound ids.
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Instance id (see `list`).
    #[arg(long)]
    pub instance: Option<String>,
    /// Comma-separated learner ids [default: all].
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Vec<String>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Number of independent trials [default: 1].
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-learner constant, `algo=value`; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    pub c0: Vec<String>,
    /// Write results here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Expert count for the parameterized instances (prop3, t4, prop2).
    #[arg(long)]
    pub experts: Option<usize>,
    /// Gap for t4 and prop2.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Index of the best expert (0-based).
    #[arg(long)]
    pub best: Option<usize>,
    /// Add a checkpoint every N rounds on top of the powers of two.
    #[arg(long)]
    pub checkpoint_every: Option<u64>,
    /// TOML experiment file; flags given on the command line override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Panel {
    A,
    B,
    C,
    D,
}

impl Panel {
    pub fn instance(self) -> &'static str {
        match self {
            Panel::A => "fig-a",
            Panel::B => "fig-b",
            Panel::C => "fig-c",
            Panel::D => "fig-d",
        }
    }

    pub fn letter(self) -> char {
        match self {
            Panel::A => 'a',
            Panel::B => 'b',
            Panel::C => 'c',
            Panel::D => 'd',
        }
    }

    /// fig-d is deterministic, so one trial says everything.
    pub fn default_trials(self) -> usize {
        match self {
            Panel::D => 1,
            _ => 50,
        }
    }
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub panel: Panel,
    #[arg(long, default_value_t = 1 << 14)]
    pub horizon: u64,
    /// [default: 50, or 1 for panel d]
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Bound id (see `list`).
    #[arg(long)]
    pub id: String,
    #[arg(long = "M")]
    pub experts: Option<usize>,
    #[arg(long = "T")]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub tau0: Option<u64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long = "C1")]
    pub second_order_c1: Option<f64>,
    #[arg(long = "C2")]
    pub second_order_c2: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn flag(flag: &str, e: impl std::fmt::Display) -> Self {
        CliError::Usage(format!("--{flag}: {e}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Instance and learner ids with one-line descriptions.
pub fn catalogue() -> String {
    let mut s = String::from("Instances:\n");
    for id in INSTANCE_IDS {
        let _ = writeln!(s, "  {id:<16}{}", describe_instance(id).unwrap_or(""));
    }
    s.push_str("\nLearners:\n");
    for id in LearnerId::ALL {
        let _ = writeln!(s, "  {:<16}{}", id.as_str(), id.describe());
    }
    s
}

fn bound_catalogue() -> String {
    let mut s = String::from("\nBounds:\n");
    for id in BoundId::ALL {
        let _ = writeln!(
            s,
            "  {:<16}{} bound, valid for {}",
            id.as_str(),
            id.direction().as_str(),
            id.validity()
        );
    }
    s
}

pub fn command() -> clap::Command {
    let cat = catalogue();
    Cli::command()
        .after_help(cat.clone())
        .mut_subcommand("run", |c| c.after_help(cat))
}

/// Parses `args` (program name first), executes, and returns the exit code.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out).and_then(|()| out.flush().map_err(CliError::from)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(args, out),
        Command::Reproduce(args) => cmd_reproduce(args, out),
        Command::Bounds(args) => cmd_bounds(args, out),
        Command::List => {
            out.write_all(catalogue().as_bytes())?;
            out.write_all(bound_catalogue().as_bytes())?;
            Ok(())
        }
    }
}

/// Builds and fully validates the experiment described by `args`.
pub fn run_config(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_path(path).map_err(|e| CliError::flag("config", e))?,
        None => {
            let instance = args
                .instance
                .clone()
                .ok_or_else(|| CliError::flag("instance", "required unless --config is given"))?;
            let horizon = args
                .horizon
                .ok_or_else(|| CliError::flag("horizon", "required unless --config is given"))?;
            let learners = LearnerId::ALL.into_iter().map(LearnerSpec::new).collect();
            ExperimentConfig::new(instance, learners, horizon)
        }
    };
    if let Some(instance) = &args.instance {
        cfg.instance = instance.clone();
    }
    if let Some(horizon) = args.horizon {
        cfg.horizon = horizon;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(every) = args.checkpoint_every {
        cfg.checkpoint_every = every;
    }
    if args.experts.is_some() {
        cfg.params.experts = args.experts;
    }
    if args.delta.is_some() {
        cfg.params.delta = args.delta;
    }
    if args.best.is_some() {
        cfg.params.best = args.best;
    }
    if !args.algorithms.is_empty() {
        cfg.learners = args
            .algorithms
            .iter()
            .map(|s| s.trim().parse::<LearnerId>().map(LearnerSpec::new))
            .collect::<crate::Result<_>>()
            .map_err(|e| CliError::flag("algorithms", e))?;
    }
    for item in &args.c0 {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::flag("c0", format!("expected algo=value, got '{item}'")))?;
        let id: LearnerId = name.trim().parse().map_err(|e| CliError::flag("c0", e))?;
        let c0: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::flag("c0", format!("not a number: '{value}'")))?;
        set_c0(&mut cfg.learners, id, c0).map_err(|e| CliError::flag("c0", e))?;
    }
    cfg.validate().map_err(|e| match e {
        Error::InvalidHorizon(_) => CliError::flag("horizon", e),
        Error::InvalidTrials(_) => CliError::flag("trials", e),
        e => CliError::flag("algorithms", e),
    })?;
    let spec = cfg
        .resolve_instance()
        .map_err(|e| CliError::flag("instance", e))?;
    for learner in &cfg.learners {
        learner
            .build(spec.experts(), cfg.horizon)
            .map_err(|e| CliError::flag("c0", e))?;
    }
    Ok(cfg)
}

fn cmd_run(args: RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = run_config(&args)?;
    let result = run_experiment(&cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
    let text = match args.format {
        Format::Csv => result.to_csv(),
        Format::Json => result.to_json(),
    };
    match &args.out {
        Some(path) => write_file(path, &text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

/// Config used by `reproduce`: all five learners at their default constants,
/// with a linear checkpoint stride of about T/256 for smooth curves.
pub fn reproduce_config(
    panel: Panel,
    horizon: u64,
    trials: Option<usize>,
    seed: u64,
) -> ExperimentConfig {
    let learners = LearnerId::ALL.into_iter().map(LearnerSpec::new).collect();
    let mut cfg = ExperimentConfig::new(panel.instance(), learners, horizon);
    cfg.trials = trials.unwrap_or(panel.default_trials());
    cfg.seed = seed;
    cfg.checkpoint_every = (horizon / 256).max(1);
    cfg
}

fn cmd_reproduce(args: ReproduceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = reproduce_config(args.panel, args.horizon, args.trials, args.seed);
    cfg.validate().map_err(|e| match e {
        Error::InvalidTrials(_) => CliError::flag("trials", e),
        e => CliError::flag("horizon", e),
    })?;
    if !args.out_dir.is_dir() {
        return Err(CliError::flag(
            "out-dir",
            format!("not a directory: {}", args.out_dir.display()),
        ));
    }
    let result = run_experiment(&cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
    let path = args
        .out_dir
        .join(format!("figure1_{}.csv", args.panel.letter()));
    write_file(&path, &result.to_csv())?;
    writeln!(out, "{}", path.display())?;
    Ok(())
}

fn cmd_bounds(args: BoundsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let id: BoundId = args.id.parse().map_err(|e| CliError::flag("id", e))?;
    let params = BoundParams {
        experts: args.experts,
        horizon: args.horizon,
        delta: args.delta,
        c0: args.c0,
        c1: args.c1,
        tau0: args.tau0,
        beta: args.beta,
        b: args.b,
        epsilon: args.epsilon,
        second_order_c1: args.second_order_c1,
        second_order_c2: args.second_order_c2,
    };
    // Every failure here is a rejected input: a missing flag or a point
    // outside the bound's validity domain.
    let value = theory_value(id, &params).map_err(|e| CliError::Usage(e.to_string()))?;
    let json = serde_json::to_string(&value).map_err(|e| CliError::Runtime(e.to_string()))?;
    writeln!(out, "{json}")?;
    Ok(())
}
