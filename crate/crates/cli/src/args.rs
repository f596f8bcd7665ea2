use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Check which packages of a Packages index can be installed.
#[derive(Debug, Parser)]
#[command(name = "debcheck", version, args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub check: CheckArgs,
}

#[derive(Debug, Default, Args)]
pub struct CheckArgs {
    /// Print why each failing package cannot be installed.
    #[arg(long)]
    pub explain: bool,
    /// Report only packages that cannot be installed.
    #[arg(long, conflicts_with = "successes_only")]
    pub failures_only: bool,
    /// Report only packages that can be installed.
    #[arg(long)]
    pub successes_only: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Check only these packages: `name` (every version) or `name=version`.
    #[arg(long = "check", value_name = "PKG[=VER]")]
    pub checks: Vec<String>,
    /// Include timings in JSON output.
    #[arg(long)]
    pub timings: bool,
    /// Print the expanded Packages index instead of checking.
    #[arg(long, conflicts_with = "dump_dimacs")]
    pub dump_expanded: bool,
    /// Print the clause set in DIMACS format instead of checking.
    #[arg(long)]
    pub dump_dimacs: bool,
    /// Packages file; standard input when absent.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find co-installable package pairs that ship the same file.
    Conflicts {
        #[arg(long)]
        contents: PathBuf,
        #[arg(long)]
        packages: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Combine JSON reports of several architectures.
    Aggregate {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}
