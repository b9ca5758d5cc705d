//! `hh-bounds`: Hermite-Hadamard enclosures for double integrals of
//! coordinate-convex functions.

mod commands;
mod output;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hh_bounds::InnerScheme;

const GRAMMAR_HELP: &str = "\
Functions are given with --f as a named corpus entry (xy, sumsq, expsum, absdist, const1)
or as an expression in x and y using + - * / ^, parentheses, exp(), abs(), max(), min().
Exponents must be numeric literals. Unary minus binds looser than '^': -x^2 means -(x^2).
There is no implicit multiplication: write 2*x, not 2x.

Exit codes: 0 ok, 1 property violation, 2 usage or parse error, 3 convexity check failed,
4 evaluation error. HH_BOUNDS_THREADS limits internal parallelism.";

#[derive(Parser)]
#[command(name = "hh-bounds", version, about, after_help = GRAMMAR_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fully discrete two-sided enclosure of the double integral.
    Bounds(BoundsArgs),
    /// The classical five-term chains of means with ordering verdicts.
    Chain(ChainArgs),
    /// Enclosure gap along a doubling sequence of n.
    Converge(ConvergeArgs),
    /// Property suite on random coordinate-convex instances.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeKind {
    Nested,
    Quadrature,
}

#[derive(Args)]
pub struct FunctionArgs {
    /// Expression in x and y, or a corpus name.
    #[arg(long = "f", value_name = "EXPR|NAME", allow_hyphen_values = true)]
    pub function: String,

    /// Integration rectangle [A, B] x [C, D].
    #[arg(
        long,
        num_args = 4,
        value_names = ["A", "B", "C", "D"],
        allow_negative_numbers = true,
        default_values_t = [0.0, 1.0, 0.0, 1.0]
    )]
    pub rect: Vec<f64>,

    #[arg(long, value_enum, default_value = "human")]
    pub output: OutputFormat,

    /// Skip the sampling check of coordinate convexity.
    #[arg(long)]
    pub skip_convexity_check: bool,

    /// Seed of the convexity check.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = hh_bounds::convexity::DEFAULT_SAMPLES)]
    pub convexity_samples: usize,

    #[arg(long, default_value_t = hh_bounds::convexity::DEFAULT_TOL)]
    pub convexity_tol: f64,

    /// Grid of the Simpson reference integral (power of two, >= 64).
    #[arg(long, default_value_t = hh_bounds::oracle::DEFAULT_GRID)]
    pub oracle_grid: usize,
}

#[derive(Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: FunctionArgs,

    /// Cells per axis of the outer partition.
    #[arg(long, default_value_t = 1)]
    pub n: usize,

    /// Inner subintervals per outer cell.
    #[arg(long, default_value_t = 16)]
    pub m: usize,
}

#[derive(Args)]
pub struct SchemeArgs {
    /// How inner one-dimensional integrals are resolved.
    #[arg(long, value_enum, default_value = "nested")]
    pub scheme: SchemeKind,

    /// Inner subintervals for the nested scheme.
    #[arg(long, default_value_t = 16)]
    pub m: usize,

    /// Absolute tolerance for the quadrature scheme.
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
}

impl SchemeArgs {
    pub fn scheme(&self) -> InnerScheme {
        match self.scheme {
            SchemeKind::Nested => InnerScheme::NestedDiscrete { m: self.m },
            SchemeKind::Quadrature => InnerScheme::Quadrature { tol: self.quad_tol },
        }
    }
}

#[derive(Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub common: FunctionArgs,

    #[command(flatten)]
    pub scheme: SchemeArgs,
}

#[derive(Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: FunctionArgs,

    /// Range LO:HI; n runs through LO, 2 LO, 4 LO, ... up to HI.
    #[arg(long, default_value = "1:64")]
    pub n: String,

    #[arg(long, default_value_t = 16)]
    pub m: usize,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Number of random instances.
    #[arg(long, default_value_t = 200)]
    pub cases: usize,

    /// Case i uses seed + i, so `--cases 1 --seed <seed + i>` replays it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_enum, default_value = "human")]
    pub output: OutputFormat,

    /// Add a term concave in x to every instance (negative control).
    #[arg(long, hide = true)]
    pub inject_concave: bool,
}

/// What a successful command prints, and its exit code.
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    pub fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: 0,
        }
    }
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<hh_bounds::Error> for Failure {
    fn from(e: hh_bounds::Error) -> Self {
        let code = match e {
            hh_bounds::Error::Evaluation { .. } => 4,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("HH_BOUNDS_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // an already-initialised pool keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Bounds(args) => commands::bounds(&args),
        Command::Chain(args) => commands::chain(&args),
        Command::Converge(args) => commands::converge(&args),
        Command::Verify(args) => verify::run(&args),
    };
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            eprint!("{}", out.stderr);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
