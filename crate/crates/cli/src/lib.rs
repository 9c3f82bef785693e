//! Command-line front end for `vclab-core`.
//!
//! Every subcommand writes JSON with sorted keys (or a plain table with `--pretty`).
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error.

pub mod commands;
pub mod suite;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "vclab",
    version,
    about = "Finite concept classes: VC-dimension, teaching, packing, compression"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    /// Human-readable table instead of JSON, where available.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Debug, Args)]
pub struct ClassArg {
    /// Class file: one 0/1 row per line, or {"n": .., "concepts": [..]}.
    #[arg(short = 'c', long = "class")]
    pub class: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TeachMethod {
    Exact,
    Halving,
    Thm14,
    Lemma36,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Learner {
    Consistent,
    Compression,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Singletons,
    Intervals,
    Cube,
    Hamming,
    Random,
    VcBounded,
    #[value(name = "36")]
    ThirtySix,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Level {
    Desk,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Size, VC-dimension and a largest shattered set.
    Vc {
        #[command(flatten)]
        class: ClassArg,
    },
    /// The dual class (transposed matrix, duplicate rows removed).
    Dual {
        #[command(flatten)]
        class: ClassArg,
        /// Emit the dual in the class text format.
        #[arg(long)]
        text: bool,
    },
    /// A teaching set, by exact search or by one of the constructions.
    Teach {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, value_enum, default_value = "exact")]
        method: TeachMethod,
        /// Concept index (required for exact).
        #[arg(long)]
        target: Option<usize>,
        /// Fallback threshold for thm14 (default: the asymptotic threshold).
        #[arg(long)]
        threshold: Option<u64>,
    },
    /// Recursive teaching dimension with its layers.
    Rtd {
        #[command(flatten)]
        class: ClassArg,
    },
    /// Greedy ε-packing of the class, or of its dual with --dual.
    Pack {
        #[command(flatten)]
        class: ClassArg,
        /// ε as p/q or a decimal.
        #[arg(long)]
        eps: String,
        /// Distribution file {"weights": [..]}; uniform when omitted.
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long)]
        dual: bool,
    },
    /// Compress the sample (points, labels of the target concept).
    Compress {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        target: usize,
        /// Comma-separated points, e.g. 0,2,5.
        #[arg(long)]
        points: String,
        #[arg(long)]
        base_threshold: Option<u64>,
        /// Wrap the compressed form with its size report.
        #[arg(long)]
        report: bool,
    },
    /// Reconstruct a hypothesis from a compressed sample.
    Decompress {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check the compression scheme on all (or sampled) pairs.
    Verify {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, default_value_t = vclab_core::compression::verify::DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = vclab_core::compression::verify::DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long)]
        base_threshold: Option<u64>,
    },
    /// Monte-Carlo failure rate against a PAC bound.
    Pac {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        dist: Option<PathBuf>,
        /// Sample size, or a comma-separated grid.
        #[arg(long)]
        m: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "consistent")]
        learner: Learner,
        #[arg(long)]
        base_threshold: Option<u64>,
        /// Also write one CSV row per grid point.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate a class in the text format.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Combined report: dimensions, packings, compression and bound checks.
    Analyze {
        #[command(flatten)]
        class: ClassArg,
        /// ε values for packings (repeatable).
        #[arg(long)]
        eps: Vec<String>,
        #[arg(long, default_value_t = vclab_core::compression::verify::DEFAULT_BUDGET)]
        budget: u64,
        /// Largest class size for which the RT-dimension is computed.
        #[arg(long, default_value_t = 64)]
        rtd_budget: usize,
    },
    /// Run the acceptance criteria.
    Suite {
        #[arg(long, value_enum, default_value = "desk")]
        level: Level,
        /// Run only these criteria (repeatable).
        #[arg(long)]
        only: Vec<u32>,
    },
}

/// Outcome of a command before it is written.
pub struct Outcome {
    pub body: String,
    pub code: i32,
}

/// Failure that maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let outcome = match commands::execute(&cli, err) {
        Ok(o) => o,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let mut body = outcome.body;
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, body) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => {
            let _ = out.write_all(body.as_bytes());
        }
    }
    outcome.code
}
