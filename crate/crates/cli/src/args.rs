use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sl-extremal", version, about = "Extremal first eigenvalues of Robin Sturm-Liouville problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First eigenvalue of a potential, optionally with eigenfunction samples
    Eig(EigArgs),
    /// First eigenvalue of the zero potential
    EigZero(BcArgs),
    /// Integral p-norms of a step potential
    Norms(NormsArgs),
    /// W₂⁻¹ distance between two signed measures
    Wdist(WdistArgs),
    /// Members of the spike, spike-train and statement-3 families
    Family(FamilyArgs),
    /// Unboundedness-from-below study for gamma < 1
    VerifyThm1(Thm1Args),
    /// Convergence of the statement-3 family to the zero-potential value
    VerifyThm2(Thm2Args),
    /// Random coordinate search for extremal eigenvalues over step potentials
    Search(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegratorArg {
    Exact,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Min,
    Max,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format; tables default to csv, everything else to json
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BcArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub k0sq: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub k1sq: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = IntegratorArg::Exact)]
    pub integrator: IntegratorArg,
    #[arg(long, default_value_t = 16)]
    pub ode_steps_per_cell: usize,
}

#[derive(Debug, Args)]
#[group(id = "q", required = true, multiple = false)]
pub struct PotentialInput {
    /// Potential as inline JSON: {"breakpoints":[..],"heights":[..],"deltas":[{"site":..,"weight":..}]}
    #[arg(long, group = "q")]
    pub q_json: Option<String>,
    /// Path to a JSON file holding the potential
    #[arg(long, group = "q")]
    pub q_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    #[command(flatten)]
    pub q: PotentialInput,
    #[command(flatten)]
    pub bc: BcArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also return the eigenfunction sampled on this many uniform intervals
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[command(flatten)]
    pub q: PotentialInput,
    /// Exponents p; 0 is the geometric mean
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub p: Vec<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WdistArgs {
    /// First measure as inline JSON (signed heights allowed)
    #[arg(long, conflicts_with = "f_file", required_unless_present = "f_file")]
    pub f_json: Option<String>,
    #[arg(long)]
    pub f_file: Option<PathBuf>,
    /// Second measure; the zero measure when omitted
    #[arg(long, conflicts_with = "g_file")]
    pub g_json: Option<String>,
    #[arg(long)]
    pub g_file: Option<PathBuf>,
    /// Riesz grid sizes, one output row each
    #[arg(long, value_delimiter = ',', default_value = "16384")]
    pub grid: Vec<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub statement: u8,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Spike location (statement 1)
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Family index (statements 1 and 3)
    #[arg(long)]
    pub n: Option<u64>,
    /// Target level ρ* (statement 2)
    #[arg(long)]
    pub rho: Option<f64>,
    /// Exponent ν of the budget norm (statement 2)
    #[arg(long)]
    pub nu: Option<f64>,
    /// Number of spikes (statement 2)
    #[arg(long)]
    pub spikes: Option<usize>,
    /// Spike height (statement 2)
    #[arg(long)]
    pub spike_height: Option<f64>,
    /// Background level (statement 2)
    #[arg(long)]
    pub floor: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Thm1Args {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub rho: Vec<f64>,
    #[arg(long)]
    pub floor: Option<f64>,
    #[arg(long)]
    pub spikes_per_sqrt_rho: Option<f64>,
    #[arg(long)]
    pub min_spikes: Option<usize>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[command(flatten)]
    pub bc: BcArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct Thm2Args {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[command(flatten)]
    pub bc: BcArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Number of equal cells
    #[arg(long, default_value_t = 8)]
    pub cells: usize,
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub initial_step: Option<f64>,
    #[arg(long)]
    pub min_step: Option<f64>,
    /// Height caps, one warm-started round each
    #[arg(long, value_delimiter = ',')]
    pub caps: Vec<f64>,
    #[command(flatten)]
    pub bc: BcArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}
