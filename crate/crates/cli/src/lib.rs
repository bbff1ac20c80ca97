//! Command-line front end for `anosov-core`: config ingestion, experiment
//! orchestration and CSV/JSON emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{Coding, CommandKind, FamilySpec, Grid, RunConfig};
pub use error::CliError;
pub use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "anosov",
    version,
    about = "Critical exponents of free-group representations into SL(2) and SL(3)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Functional as `roots:1,1`, `weights:1,0` or `raw:1,0,-1`.
    #[arg(long, global = true)]
    pub phi: Option<String>,
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    Abc,
    Standard,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// Graph JSON file.
    #[arg(long, conflicts_with = "builtin")]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// Representation JSON file.
    #[arg(long)]
    pub representation: Option<PathBuf>,
    /// Fock-Goncharov parameters (optionally with `"mode": "shear"`), JSON file.
    #[arg(long, conflicts_with = "representation")]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pressure of an edge potential on a coding.
    Pressure {
        #[command(flatten)]
        source: SourceArgs,
        /// JSON array of edge weights, indexed by edge id; zero if omitted.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Exponents, bounds and certificate for one pair-of-pants structure.
    PantsExponent {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// One CSV row of exponents per shear parameter.
    Sweep {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Triple ratios `X1,X2` of the second slice for the Thurston column.
        #[arg(long, value_delimiter = ',')]
        compare_x: Option<Vec<f64>>,
    },
    /// Separation certificate plus a seeded audit of the contraction estimate.
    Certify {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Thurston distance estimate between two pair-of-pants structures.
    Thurston {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Bounded check that a graph is a strong Markov coding.
    ValidateCoding {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        depth: Option<usize>,
    },
}

/// Rendered result and exit code of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    pub fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

/// Runs a merged configuration and returns the rendered output.
pub fn run_config(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        CommandKind::Pressure => commands::pressure::run(cfg),
        CommandKind::PantsExponent => commands::pants::run(cfg),
        CommandKind::Sweep => commands::sweep::run(cfg),
        CommandKind::Certify => commands::certify::run(cfg),
        CommandKind::Thurston => commands::thurston::run(cfg),
        CommandKind::ValidateCoding => commands::coding::run(cfg),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    run_config(&RunConfig::load(cli)?)
}

/// [`run`], then writes the output to `--out` or stdout and returns the exit code.
pub fn main_with(cli: &Cli) -> i32 {
    let result = RunConfig::load(cli).and_then(|cfg| {
        let o = run_config(&cfg)?;
        output::emit(&o.text, cfg.out.as_deref())?;
        Ok(o.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
