//! Command-line front end for the star surgery toolkit.

pub mod census;
mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use starsurg_core::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    /// A negative answer: not equal, inconclusive, exhausted.
    pub const NEGATIVE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const RESOURCE: i32 = 3;
}

#[derive(Parser, Debug)]
#[command(
    name = "starsurg",
    version,
    about = "Star surgery, cap embeddings and planar monodromy"
)]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dual cap graph of a dually positive star graph.
    Dualize { graph: PathBuf },
    /// Homological embeddings of a cap graph (a filling graph is dualized first).
    EnumerateEmbeddings {
        graph: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Print the classes of every embedding.
        #[arg(long)]
        classes: bool,
    },
    /// Euler characteristics of the complements of every embedding.
    Euler {
        /// Graph file; alternatively use --a/--b for the P_(a,b) family.
        graph: Option<PathBuf>,
        #[arg(long, requires = "b")]
        a: Option<i64>,
        #[arg(long, requires = "a")]
        b: Option<i64>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Single rational blow-down verdict for P_(a,b).
    Obstruct {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
    },
    /// Park chains: by blow-up sides, by (p, q), or recognition of a chain.
    Park {
        /// Blow-up sides such as `LLR`.
        #[arg(long, conflicts_with_all = ["p", "chain"])]
        sides: Option<String>,
        #[arg(long, requires = "q", conflicts_with = "chain")]
        p: Option<i64>,
        #[arg(long, requires = "p")]
        q: Option<i64>,
        /// Chain weights, comma separated, e.g. `-2,-5`.
        #[arg(long, allow_hyphen_values = true)]
        chain: Option<String>,
    },
    /// Check a named relation or two factorization files for equality.
    VerifyRelation {
        /// lantern, daisy, glantern or fg.
        #[arg(long, conflicts_with_all = ["left", "right"])]
        name: Option<String>,
        /// Petal count for daisy.
        #[arg(long, default_value_t = 3)]
        p: usize,
        /// Hole count for glantern.
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        left: Option<PathBuf>,
        right: Option<PathBuf>,
        /// Word length guard (total letters).
        #[arg(long, env = "STARSURG_WORD_LIMIT", default_value_t = starsurg_core::mcg::DEFAULT_WORD_LIMIT)]
        word_limit: usize,
    },
    /// Replay the rewriting of F(m,n) and G(m,n) into a common word.
    ProofReplay {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Bounded search for a rewrite path between two factorizations.
    SubstSearch {
        /// Comma separated: lantern, daisy, daisyP, glanternK.
        #[arg(long, default_value = "lantern,daisy")]
        rules: String,
        /// Largest daisy included by `daisy`.
        #[arg(long, default_value_t = 4)]
        max_daisy: usize,
        #[arg(long, default_value_t = 6)]
        max_depth: usize,
        #[arg(long, env = "STARSURG_MAX_STATES", default_value_t = 100_000)]
        max_states: usize,
        /// Also allow Hurwitz moves that keep twists convex.
        #[arg(long)]
        hurwitz: bool,
        start: PathBuf,
        target: PathBuf,
    },
    /// Euler characteristic and first homology of a factorization's filling.
    Invariants { factorization: PathBuf },
    /// Deterministic census over a family grid, one JSON record per line.
    Census {
        #[arg(long, default_value = "P")]
        family: String,
        #[arg(long, default_value = "2..5")]
        a_range: String,
        #[arg(long, default_value = "2..5")]
        b_range: String,
        /// Append new records here (records already present are skipped).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Add wall-clock timings (makes records run-dependent).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Node budget for the embedding search.
    #[arg(long, env = "STARSURG_NODE_BUDGET", default_value_t = 50_000_000)]
    pub node_budget: u64,
    /// Forbid reusing a +1 label (faster, still exact for caps with one +1 per label).
    #[arg(long)]
    pub fast: bool,
}

/// Failure of a subcommand, with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: exit::USAGE,
            message: message.into(),
        }
    }

    pub fn core(e: Error) -> Self {
        Failure {
            code: if e.is_resource() {
                exit::RESOURCE
            } else {
                exit::USAGE
            },
            message: e.to_string(),
        }
    }

    /// A core error raised while reading `path`.
    pub fn in_file(path: &Path, e: Error) -> Self {
        let mut f = Failure::core(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Runs one invocation; returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let text = e.render().to_string();
            if code == exit::OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match commands::dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
