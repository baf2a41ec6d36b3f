use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lti_reach::discretize::Method;
use lti_reach::models::ModelSpec;

#[derive(Debug, Parser)]
#[command(
    name = "lti-reach",
    version,
    about = "Conservative time discretization of linear time-invariant systems",
    after_help = "Exit codes: 0 ok, 2 precondition violation, 3 soundness violation, 4 I/O error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discretize one model with one method and report supports, metadata
    /// and (for planar models) an outer polygon of Ω₀.
    Discretize(DiscretizeArgs),
    /// Support values ρ(d, Ω₀) over a range of time steps and methods.
    Sweep(SweepArgs),
    /// Median run times per method.
    Bench(BenchArgs),
    /// Trajectory-sampling audit of Ω₀ ⊇ reachable states on [0, δ].
    Soundness(SoundnessArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Built-in model: `oscillator[:f=..,r=..]`, `tdof`, `heat3d[:n=..]`, `iss`.
    #[arg(long, default_value = "oscillator")]
    pub model: ModelSpec,
    /// Load A from a MatrixMarket file instead (needs --sidecar).
    #[arg(long, requires = "sidecar")]
    pub matrix: Option<PathBuf>,
    /// JSON side-car with X0 and optionally U, B and direction.
    #[arg(long, requires = "matrix")]
    pub sidecar: Option<PathBuf>,
    /// Separate JSON side-car supplying U and B.
    #[arg(long, requires = "matrix")]
    pub input_sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MethodOpts {
    /// Truncation order p of the correction hull.
    #[arg(long)]
    pub order: Option<usize>,
    /// Split δ into k sub-steps and take the hull of the propagated sets.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Homogenize the system first (auxiliary value 1) and project back.
    #[arg(long)]
    pub homogenize: bool,
    /// Evaluate the forward method through Krylov actions of this dimension.
    #[arg(long)]
    pub krylov_dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Tab-separated values.
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output directory; stdout only when absent.
    #[arg(long, env = "LTI_REACH_OUT_DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

/// Comma-separated coordinates, e.g. `1,1`.
pub fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {x:?}"))
                .and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("non-finite entry {x:?}")) })
        })
        .collect()
}

#[derive(Debug, Args)]
pub struct DiscretizeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "forward")]
    pub method: Method,
    /// Time step; the model's reference step when absent.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Direction d for ρ(d, Ω₀); repeatable. Defaults to the model's.
    #[arg(long, value_parser = parse_vector)]
    pub direction: Vec<Vec<f64>>,
    /// Number of uniform directions for the polygon of planar models.
    #[arg(long, default_value_t = 30)]
    pub polygon: usize,
    #[command(flatten)]
    pub opts: MethodOpts,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Methods, comma-separated or repeated. All six base methods by default.
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Method>,
    /// Comma-separated steps, or `hi:lo:n` for n log-spaced steps.
    #[arg(long, default_value = "1e-1:1e-6:30")]
    pub deltas: String,
    #[arg(long, value_parser = parse_vector)]
    pub direction: Option<Vec<f64>>,
    /// Grid points evaluated concurrently.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[command(flatten)]
    pub opts: MethodOpts,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Method>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Repetitions per method (at least 3).
    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,
    /// Skip the dense Φ₂ row of the E₊ comparison.
    #[arg(long)]
    pub skip_dense: bool,
    #[command(flatten)]
    pub opts: MethodOpts,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SoundnessArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "forward")]
    pub method: Method,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 100)]
    pub directions: usize,
    /// Time grid resolution of the sampled trajectories.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Audit the shrunk d/dt "underapproximation" in reverse on the built-in
    /// large-box oscillator: succeed only if every point of it is reachable.
    #[arg(long)]
    pub underapprox: bool,
    #[command(flatten)]
    pub opts: MethodOpts,
}
