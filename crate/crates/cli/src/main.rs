//! `combmetric`: combinatorial metrics on F_q^n from the command line.
//!
//! Exit status is 0 for success or an affirmative verdict, 1 for a refutation
//! and 2 for usage, input or cap errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use combmetric::Limits;

#[derive(Parser)]
#[command(name = "combmetric", version, about = "Combinatorial metrics induced by coverings")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Field order (a prime up to 251).
    #[arg(long, global = true, default_value_t = 2)]
    pub q: u32,
    /// Covering file: {"n": .., "sets": [[1-based ints], ..]}.
    #[arg(long, global = true)]
    pub covering: Option<PathBuf>,
    /// Code file: {"q": .., "n": .., "generators": [[ints], ..]}.
    #[arg(long, global = true)]
    pub code: Option<PathBuf>,
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on any single enumeration.
    #[arg(long, global = true, default_value_t = 1 << 24)]
    pub max_enum: u128,
    /// Cap on the order of an explicitly built group.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_group: usize,
    /// Largest subspace dimension in exhaustive scans
    /// [default: n for identity-check, 2 for the extension-property commands].
    #[arg(long, global = true)]
    pub max_dim: Option<usize>,
}

impl RunConfig {
    pub fn limits(&self) -> Limits {
        Limits {
            max_enum: self.max_enum,
            max_group: self.max_group,
            ..Limits::default()
        }
    }

    pub fn mep_dim(&self) -> usize {
        self.max_dim.unwrap_or(2)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Remove redundant basic sets and print the normalized covering.
    Normalize,
    /// Weight of a vector.
    Weight {
        /// Comma-separated residues.
        #[arg(long)]
        vector: String,
    },
    /// Distance between two vectors.
    Distance {
        /// Two comma-separated vectors: --vector x --vector y.
        #[arg(long, num_args = 1, required = true)]
        vector: Vec<String>,
    },
    /// Weight distribution of the code.
    Enumerator,
    /// The dual code.
    Dual,
    /// Whether the metric admits a MacWilliams-type identity.
    IdentityCheck {
        /// Also group all subspaces of dimension <= --max-dim by distribution.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Order and structure of the linear isometry group.
    IsometryGroup {
        /// Print every element.
        #[arg(long)]
        dump: bool,
    },
    /// Split an isometry as a permutation times a block matrix.
    Decompose {
        /// Matrix file: {"q": .., "matrix": [[ints], ..]}.
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Extension-property verdict.
    MepCheck {
        /// Scan all local equivalences from subspaces of dimension <= --max-dim.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Conjectured criterion vs. exhaustive scan over connected coverings of [n],
    /// one JSON line per covering.
    ConjectureScan {
        #[arg(long)]
        n: usize,
        /// Include coverings whose basic sets differ in size.
        #[arg(long)]
        all: bool,
    },
    /// Metric axioms over all pairs, and all or sampled triples.
    CheckAxioms {
        /// Exhaustive triple check when q^(3n) is at most this.
        #[arg(long, default_value_t = 1 << 21)]
        triple_cap: u128,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = &cli.config;
    let outcome = match &cli.command {
        Command::Normalize => commands::normalize(cfg),
        Command::Weight { vector } => commands::weight(cfg, vector),
        Command::Distance { vector } => commands::distance(cfg, vector),
        Command::Enumerator => commands::enumerator(cfg),
        Command::Dual => commands::dual(cfg),
        Command::IdentityCheck { exhaustive } => commands::identity_check(cfg, *exhaustive),
        Command::IsometryGroup { dump } => commands::isometry_group(cfg, *dump),
        Command::Decompose { matrix } => commands::decompose(cfg, matrix),
        Command::MepCheck { exhaustive } => commands::mep_check(cfg, *exhaustive),
        Command::ConjectureScan { n, all } => commands::conjecture_scan(cfg, *n, *all),
        Command::CheckAxioms {
            triple_cap,
            samples,
        } => commands::check_axioms(cfg, *triple_cap, *samples),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
