use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "hoqmc",
    version,
    about = "Interlaced Chen–Skriganov nets: construction, dual-net audits, Walsh coefficients and worst-case errors",
    after_help = "Exit status: 0 on success, 1 on rejected input, 2 when a size guard refuses the job.\n\
                  HOQMC_MAX_DUAL and HOQMC_MAX_N set the default dual-enumeration and point-count guards."
)]
pub struct Cli {
    /// JSON object whose keys are flag names (e.g. {"b": 2, "relaxed": true}); flags win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Size of the worker pool (default: all cores)
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Write the result here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Dual enumeration guard (default HOQMC_MAX_DUAL or 2^24)
    #[arg(long, global = true)]
    pub max_dual: Option<u128>,

    /// Point-count guard for kernel sums and point output (default HOQMC_MAX_N or 2^17)
    #[arg(long, global = true)]
    pub max_n: Option<u64>,

    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a net and print its JSON
    Construct(ConstructArgs),
    /// Print the points of a net as CSV
    Points(PointsArgs),
    /// Minimum Hamming, NRT and Dick metrics of the dual net, against the construction bounds
    Metrics(MetricsArgs),
    /// One Walsh coefficient of the kernel or of a Bernoulli polynomial, or a decay profile
    Walsh(WalshArgs),
    /// Worst-case error of a net or point set
    Wce(WceArgs),
    /// The explicit bound chains for a parameter set
    Bounds(BoundsArgs),
    /// Convergence sweep over w, written as CSV
    Sweep(SweepArgs),
}

/// Parameters of the composite construction.
#[derive(Args, Debug, Clone)]
pub struct NetArgs {
    /// Prime base
    #[arg(long)]
    pub b: Option<u64>,
    /// Dimension
    #[arg(long)]
    pub s: Option<usize>,
    /// Interlacing factor
    #[arg(long)]
    pub beta: Option<usize>,
    #[arg(long)]
    pub g: Option<usize>,
    #[arg(long)]
    pub w: Option<usize>,
    /// Distinct field elements β_{j,l}, comma separated (default 0,1,2,…)
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, num_args = 1)]
    pub betas: Option<Vec<u32>>,
    /// Skip the theorem's hypotheses on b, g and β
    #[arg(long)]
    pub relaxed: bool,
    /// The plain s-dimensional Chen–Skriganov net (β ignored)
    #[arg(long)]
    pub chen_skriganov: bool,
}

/// Where a net comes from: `--net-file`, the construction flags, or stdin.
#[derive(Args, Debug, Clone)]
pub struct NetSource {
    /// Net JSON file; without it and without --b the net is read from stdin
    #[arg(long, value_name = "FILE")]
    pub net_file: Option<PathBuf>,
    #[command(flatten)]
    pub build: NetArgs,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Smoothness, used by the hypothesis checks
    #[arg(long)]
    pub alpha: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PointFormat {
    /// `numerator/b^n`
    Rational,
    Float,
}

#[derive(Args, Debug)]
pub struct PointsArgs {
    #[command(flatten)]
    pub src: NetSource,
    #[arg(long, value_enum)]
    pub format: Option<PointFormat>,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub src: NetSource,
    /// Orders α of μ_α to report, comma separated (interlaced nets always include β)
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, num_args = 1)]
    pub alpha: Option<Vec<usize>>,
    /// Also check the counting bound on every NRT fiber
    #[arg(long)]
    pub fibers: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WalshKind {
    /// K̂_α(k, l), one component per dimension
    Kernel,
    /// b̂_r(k)
    Bernoulli,
    /// b̂_{r,per}(k, l)
    Periodic,
}

#[derive(Args, Debug)]
pub struct WalshArgs {
    #[arg(long)]
    pub b: Option<u64>,
    #[arg(long)]
    pub alpha: Option<usize>,
    /// Index as a decimal integer; comma separated for several dimensions
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, num_args = 1)]
    pub k: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, num_args = 1)]
    pub l: Option<Vec<String>>,
    #[arg(long, value_enum)]
    pub kind: Option<WalshKind>,
    /// Polynomial degree for --kind bernoulli|periodic
    #[arg(long)]
    pub r: Option<usize>,
    /// Print the diagonal decay profile over 0 < k < b^A instead
    #[arg(long, value_name = "A")]
    pub decay: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Exact kernel sum over all point pairs
    Exact,
    /// Truncated sum over the dual net
    Dual,
}

#[derive(Args, Debug)]
pub struct WceArgs {
    #[command(flatten)]
    pub src: NetSource,
    /// CSV of points (`p/b^n` rationals or decimals) instead of a net
    #[arg(long, value_name = "FILE")]
    pub points_file: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Dual-sum truncation level (default: the net precision)
    #[arg(long)]
    pub radius: Option<usize>,
    /// Exact rational kernel sum
    #[arg(long)]
    pub rational: bool,
    /// Permit quadratic kernel sums above 2^14 points
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long)]
    pub alpha: Option<usize>,
    /// Decay constant D of the diagonal kernel coefficients
    #[arg(long)]
    pub decay: Option<f64>,
    /// Measure D over 0 < k < b^A (overrides --decay)
    #[arg(long, value_name = "A")]
    pub measure_decay: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long)]
    pub alpha: Option<usize>,
    #[arg(long)]
    pub w_min: Option<usize>,
    #[arg(long)]
    pub w_max: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long)]
    pub rational: bool,
    /// Uniform random points (ChaCha8 seeded with this value) instead of the nets
    #[arg(long)]
    pub mc_seed: Option<u64>,
}
