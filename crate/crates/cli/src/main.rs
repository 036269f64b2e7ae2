use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gausscap::CapacityError;
use serde::Serialize;

mod commands;

/// Classical capacities of bosonic Gaussian channels.
#[derive(Debug, Parser, Serialize)]
#[command(name = "gausscap", version)]
struct Cli {
    /// Reduced Planck constant used by every frequency-weighted formula.
    #[arg(long, global = true, env = "GAUSSCAP_HBAR", default_value_t = 1.0)]
    hbar: f64,

    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Also write a columnar dump (CSV) of the main table.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// Seed for randomized restarts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Relative tolerance override for the energy constraint.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Capacity of a single mode, a broadband channel or a bandpass channel.
    #[command(subcommand)]
    Capacity(CapacityCmd),
    /// Discrete water-filling over a mode table (CSV: omega,K_abs,N).
    Waterfill(WaterfillArgs),
    /// Finite-horizon rates C_T/T against the broadband capacity.
    Converge(ConvergeArgs),
    /// Rectangle probes that lower-bound a bandpass capacity.
    #[command(subcommand)]
    Probe(ProbeCmd),
    /// Symplectic spectra of covariance matrices and stationary kernels.
    #[command(subcommand)]
    Symplectic(SymplecticCmd),
    /// Vacuum inner product and symplectic form of two test functions.
    VacuumForm(VacuumFormArgs),
    /// Check inputs without computing anything.
    Validate(ValidateArgs),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CapacityCmd {
    SingleMode(SingleModeArgs),
    Broadband(BroadbandArgs),
    Bandpass(BandpassArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SingleModel {
    #[value(alias = "att")]
    Attenuator,
    #[value(alias = "amp")]
    Amplifier,
    #[value(alias = "noise")]
    ClassicalNoise,
    #[value(alias = "contra", alias = "pia")]
    ContravariantAmplifier,
    #[value(alias = "cq")]
    ClassicalQuantum,
    #[value(alias = "qc")]
    QuantumClassical,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BroadModel {
    #[value(alias = "gc", alias = "covariant")]
    GaugeCovariant,
    #[value(alias = "gcontra", alias = "contravariant")]
    GaugeContravariant,
    #[value(alias = "cq")]
    ClassicalQuantum,
    #[value(alias = "qc")]
    QuantumClassical,
}

#[derive(Debug, Args, Serialize)]
struct SingleModeArgs {
    #[arg(long, value_enum)]
    model: SingleModel,
    /// Gain k of the mode.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    k: f64,
    /// Mean noise photon number.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    noise: f64,
    /// Mean signal photon number.
    #[arg(long, allow_negative_numbers = true)]
    energy: f64,
}

#[derive(Debug, Args, Serialize)]
struct BroadbandArgs {
    /// Profile document (JSON).
    #[arg(long)]
    profile: PathBuf,
    /// Power budget.
    #[arg(long, allow_negative_numbers = true)]
    energy: f64,
    #[arg(long, value_enum, default_value = "gauge-covariant")]
    model: BroadModel,
}

#[derive(Debug, Args, Serialize)]
struct BandpassArgs {
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    energy: f64,
    /// Carrier frequency; the photon energy is hbar times this.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    carrier: f64,
}

#[derive(Debug, Args, Serialize)]
struct WaterfillArgs {
    #[arg(long)]
    modes: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    energy: f64,
    /// Measure attached to each mode in the energy sum.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    weight: f64,
}

#[derive(Debug, Args, Serialize)]
struct ConvergeArgs {
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    energy: f64,
    /// Observation times, comma separated and increasing.
    #[arg(long = "t", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    horizons: Vec<f64>,
    /// Cutoff schedule c * T^alpha.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    schedule_c: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    schedule_alpha: f64,
    /// Add error-probability bounds with this delta (nats per second).
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Rate for the error bounds; defaults to half the broadband capacity.
    #[arg(long, requires = "delta")]
    rate: Option<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ProbeCmd {
    Quantum(ProbeArgs),
    Classical(ProbeArgs),
}

#[derive(Debug, Args, Serialize)]
struct ProbeArgs {
    /// Noise spectrum N(w) is read from this profile.
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    energy: f64,
    /// Lower band edges, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    omega1: Vec<f64>,
    /// Fixed band width for every probe.
    #[arg(long, conflicts_with_all = ["height", "height_rule"])]
    width: Option<f64>,
    /// Fixed rectangle height M for every probe.
    #[arg(long, conflicts_with = "height_rule")]
    height: Option<f64>,
    /// Height M = exp(-omega1 / 2) for each probe.
    #[arg(long)]
    height_rule: bool,
    /// Photon energy for quantum probes (defaults to hbar).
    #[arg(long, allow_negative_numbers = true)]
    photon_energy: Option<f64>,
    /// Bound the divergence certificate must exceed.
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SymplecticCmd {
    /// Symplectic eigenvalues of a covariance file.
    Williamson {
        #[arg(long)]
        covariance: PathBuf,
    },
    /// Nystrom spectrum of the noise kernel of a profile on [0, T].
    Kernel {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        horizon: f64,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Shape {
    Bump,
    Plateau,
}

#[derive(Debug, Args, Serialize)]
struct VacuumFormArgs {
    /// CSV with columns t,f,g on a uniform grid; overrides the shapes.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "bump")]
    f_shape: Shape,
    /// Shape parameters: bump centre,half-width or plateau centre,inner,outer.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    f_params: Vec<f64>,
    #[arg(long, value_enum, default_value = "bump")]
    g_shape: Shape,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    g_params: Vec<f64>,
    /// Sampling window a,b.
    #[arg(long, value_delimiter = ',', default_value = "-3,3")]
    span: Vec<f64>,
    #[arg(long, default_value_t = 3001)]
    points: usize,
    /// Also evaluate the time-domain double integral.
    #[arg(long)]
    slobodeckij: bool,
}

#[derive(Debug, Args, Serialize)]
struct ValidateArgs {
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    modes: Option<PathBuf>,
    #[arg(long)]
    covariance: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    energy: Option<f64>,
    #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true)]
    horizons: Vec<f64>,
}

/// Errors that are about the invocation rather than the mathematics.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<CapacityError>() {
        return e.category().exit_code() as u8;
    }
    if err.downcast_ref::<InputError>().is_some() || err.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
