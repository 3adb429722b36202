//! Command-line and config-file parameters.
//!
//! Every parameter struct is both a clap argument group and a serde map, so
//! a config file section can fill whatever the flags leave unset.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "tfd", version, about = "Truncated Fock-space thermofield simulator")]
pub struct Cli {
    /// Directory for the JSON and CSV outputs (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,

    /// JSON config file; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        self != Format::Csv
    }

    pub fn csv(self) -> bool {
        self != Format::Json
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Thermofield vacuum of a single mode pair.
    Vacuum(VacuumArgs),
    /// Down conversion of a thermal pump: photon numbers before and after.
    Pdc(PdcArgs),
    /// Project the pump pair onto a definite outcome.
    Project(ProjectArgs),
    /// Pump occupation over a range of βω₀.
    Sweep(SweepArgs),
    /// Run the built-in invariant checks.
    Selftest(SelftestArgs),
    /// The βω₀ = ln 2 worked example, stated and recomputed values side by side.
    Example(ExampleArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Vacuum(_) => "vacuum",
            Command::Pdc(_) => "pdc",
            Command::Project(_) => "project",
            Command::Sweep(_) => "sweep",
            Command::Selftest(_) => "selftest",
            Command::Example(_) => "example",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticsArg {
    Boson,
    Fermion,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct VacuumArgs {
    #[arg(long, value_enum)]
    pub statistics: Option<StatisticsArg>,
    /// Dimensionless β·ω (required).
    #[arg(long, allow_hyphen_values = true)]
    pub beta_omega: Option<f64>,
    /// Mode frequency; default 1.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Occupation cutoff; default 16 for bosons, 1 for fermions.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Series tolerance for the annihilation residual; default 1e-10.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// Physical parameters shared by the down-conversion commands.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct PhysicsArgs {
    /// Dimensionless β·ω₀; default ln 2.
    #[arg(long, allow_hyphen_values = true)]
    pub beta_omega0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub pump_cutoff: Option<usize>,
    #[arg(long)]
    pub signal_cutoff: Option<usize>,
    #[arg(long)]
    pub idler_cutoff: Option<usize>,
    /// Series tolerance of the exact evolution; default 1e-10.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    ClosedForm,
    Evolve,
    Both,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct PdcArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: PhysicsArgs,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceArg {
    /// First-order converted state of the full truncated vacuum.
    ClosedForm,
    /// Converted state of the vacuum cut after the two-photon term.
    TwoPhoton,
    /// Converted sector of the exact evolution.
    Evolve,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ProjectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: PhysicsArgs,
    /// Pump hat occupation of the outcome.
    #[arg(long)]
    pub n_hat: Option<usize>,
    /// Pump tilde occupation of the outcome.
    #[arg(long)]
    pub n_tilde: Option<usize>,
    #[arg(long, value_enum)]
    pub source: Option<SourceArg>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: PhysicsArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub step: Option<f64>,
    /// Explicit comma-separated βω₀ values; replaces the range.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub values: Vec<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct SelftestArgs {
    /// Seed of the random operators; default 2024.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random Hermitian operators; default 50.
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExampleArgs {
    /// Pump cutoff; default 40.
    #[arg(long)]
    pub pump_cutoff: Option<usize>,
}
