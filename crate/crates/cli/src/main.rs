//! `modwave`: exact transmitted densities of cut-off modulated wavepackets,
//! delay-time sweeps, the invariant suite and the Crank–Nicolson oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{DkValue, Output, Potential};

/// Exit codes.
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "modwave", version, about = "Transmission of phase-modulated cut-off wavepackets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample ρ (and optional components/approximations) along t or x.
    Trace {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output CSV path (stdout when omitted); a run record is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure delay-times over a list of Δk values.
    Delay {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Comma-separated Δk values (Å⁻¹); `k` means Δk = k.
        #[arg(long, value_delimiter = ',', value_parser = DkValue::parse)]
        dk_list: Option<Vec<DkValue>>,
        /// Time the front of the total density instead of ρ₊.
        #[arg(long)]
        total_density: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite and print a JSON report.
    Validate {
        /// Fault injection, e.g. `hbar_over_m=1.000001`.
        #[arg(long, hide = true)]
        perturb: Option<String>,
    },
    /// Compare Crank–Nicolson integration with the analytic density.
    Oracle(OracleArgs),
    /// List presets, or print one preset's configuration.
    Presets { name: Option<String> },
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// JSON scenario file.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Named preset (see `presets`).
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, value_enum)]
    pub potential: Option<Potential>,
    /// Delta strength λ (eV·Å).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Incidence energy (eV).
    #[arg(long)]
    pub energy: Option<f64>,
    /// Modulation Δk (Å⁻¹), or `k`.
    #[arg(long, value_parser = DkValue::parse)]
    pub dk: Option<DkValue>,
    #[arg(long)]
    pub mass_ratio: Option<f64>,
    /// Sample in t at this position (Å).
    #[arg(long, conflicts_with = "fixed_t", allow_negative_numbers = true)]
    pub fixed_x: Option<f64>,
    /// Sample in x at this time (ps).
    #[arg(long, allow_negative_numbers = true)]
    pub fixed_t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub outputs: Option<Vec<Output>>,
    /// Resonance CSV for `--potential custom`.
    #[arg(long)]
    pub resonances: Option<PathBuf>,
    /// Range L (Å) of the custom potential.
    #[arg(long)]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Which default run to perform.
    #[arg(long, value_enum, default_value = "free")]
    pub potential: Potential,
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub dk: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Replace the grid levels by a single level with this many points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Skip the long beat-envelope run of the delta default.
    #[arg(long)]
    pub skip_beats: bool,
    /// CSV of the probe densities.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("MW_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("MW_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("MW_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let result = match cli.command {
        Command::Trace { scenario, out } => commands::trace(&scenario, out.as_deref()),
        Command::Delay { scenario, dk_list, total_density, out } => {
            commands::delay(&scenario, dk_list, total_density, out.as_deref())
        }
        Command::Validate { perturb } => commands::validate(perturb.as_deref()),
        Command::Oracle(args) => commands::oracle(&args),
        Command::Presets { name } => commands::presets(name.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
