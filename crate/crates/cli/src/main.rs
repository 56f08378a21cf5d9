//! `covadj`: check covariate-adjustment validity on causal graphs.
//!
//! Exit status is 0 when a criterion holds or a command succeeds, 1 when a
//! criterion fails or a counterexample is found, and 2 on usage, input or
//! precondition errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "covadj",
    version,
    about = "Covariate adjustment on causal graphs with latent confounding"
)]
struct Cli {
    /// Emit a single JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GraphArg {
    /// Graph file (`A -> B`, `A <-> B`, `node A B` lines).
    #[arg(long, value_name = "PATH")]
    graph: PathBuf,
}

/// Comma-separated node lists; repeated flags accumulate.
#[derive(Args, Debug, Clone)]
struct QueryArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Treatments.
    #[arg(
        short = 'X',
        value_delimiter = ',',
        required = true,
        value_name = "NODES"
    )]
    x: Vec<String>,
    /// Outcomes.
    #[arg(
        short = 'Y',
        value_delimiter = ',',
        required = true,
        value_name = "NODES"
    )]
    y: Vec<String>,
    /// Covariates.
    #[arg(short = 'Z', value_delimiter = ',', value_name = "NODES")]
    z: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(
        short = 'X',
        value_delimiter = ',',
        required = true,
        value_name = "NODES"
    )]
    x: Vec<String>,
    #[arg(
        short = 'Y',
        value_delimiter = ',',
        required = true,
        value_name = "NODES"
    )]
    y: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Fast,
    Reference,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the back-door criterion.
    CheckBackdoor(QueryArgs),
    /// Check the complete adjustment criterion.
    CheckAdjust {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value = "fast")]
        mode: ModeArg,
    },
    /// List valid adjustment sets, smallest first.
    FindSets {
        #[command(flatten)]
        pair: PairArgs,
        /// Nodes to draw covariates from (default: every other node).
        #[arg(long, value_delimiter = ',', value_name = "NODES")]
        candidates: Option<Vec<String>>,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Print the canonical adjustment set.
    CanonicalSet(PairArgs),
    /// Decide whether any adjustment set exists.
    ExistsSet(PairArgs),
    /// Dump the twin network for do(X).
    Twin {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short = 'X', value_delimiter = ',', value_name = "NODES")]
        x: Vec<String>,
    },
    /// Marginalize nodes out (latent projection).
    Project {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, value_delimiter = ',', required = true, value_name = "NODES")]
        latent: Vec<String>,
    },
    /// Make bidirected arcs explicit and mediate selected directed edges.
    Magnify {
        #[command(flatten)]
        graph: GraphArg,
        /// Directed edges to mediate, written `A->B`.
        #[arg(long = "edge", value_delimiter = ',', value_name = "A->B")]
        edges: Vec<String>,
        /// Also mediate every edge out of these nodes.
        #[arg(long, value_delimiter = ',', value_name = "NODES")]
        out_of: Vec<String>,
    },
    /// Decide adjustment validity via the magnified graph.
    CheckT7(QueryArgs),
    /// Numerically confirm a valid adjustment set on random models.
    Verify {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Search for a model where adjusting gives the wrong answer.
    Refute {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// Write the counterexample model as JSON.
        #[arg(long, value_name = "PATH")]
        scm_out: Option<PathBuf>,
    },
    /// List paths between node sets, or reduce a route to its direct path.
    Paths {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(short = 'X', value_delimiter = ',', value_name = "NODES")]
        x: Vec<String>,
        #[arg(short = 'Y', value_delimiter = ',', value_name = "NODES")]
        y: Vec<String>,
        /// Conditioning set used to mark paths open or blocked.
        #[arg(short = 'Z', value_delimiter = ',', value_name = "NODES")]
        z: Vec<String>,
        #[arg(long)]
        max_len: Option<usize>,
        /// A walk such as `X -> A <- B -> A -> Y` to reduce.
        #[arg(long, value_name = "ROUTE", conflicts_with_all = ["x", "y"])]
        route: Option<String>,
    },
}

/// How a successfully executed command should exit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Positive,
    Negative,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(Outcome::Positive) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
