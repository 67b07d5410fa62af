//! `rlvr` — experiment runner for binary-reward prompt-weighting schemes.
//!
//! Subcommands: `advantages` (per-group advantage vectors), `dynamics`
//! (success-rate trajectories and figure bundles), `optimal`
//! (budget-constrained hitting-time comparison), `simulate` (finite-sample
//! population runs), `verify` (self-check suites). All output data is CSV.
//!
//! Exit codes: 0 success, 2 usage/configuration error, 3 closed-form
//! capability fallback, 4 numeric failure or failed verification.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "rlvr", version, about = "Prompt-weighting laboratory for binary-reward RL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print rho_hat, weight, effective weight, and advantages for a reward group.
    Advantages(AdvantagesArgs),
    /// Integrate or evaluate success-rate dynamics and write trajectory CSVs.
    Dynamics(DynamicsArgs),
    /// Compare budget-normalized hitting times against the Cauchy-Schwarz bound.
    Optimal(OptimalArgs),
    /// Run the finite-sample population simulator and write trace CSVs.
    Simulate(SimulateArgs),
    /// Run self-verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct AdvantagesArgs {
    /// Weighting scheme (linear-r, sqrt-r, plateau-r, uniform-r, grpo, rloo,
    /// kimi, rejection-sampling).
    #[arg(long)]
    scheme: String,
    /// Comma-separated binary rewards, e.g. `1,0,0,0`.
    #[arg(long)]
    rewards: String,
    /// Handling of all-fail groups: `limit` or `zero`.
    #[arg(long, default_value = "limit")]
    zero_mode: String,
    /// Treat the group as inside a warmup period (all-fail groups get zero).
    #[arg(long)]
    warmup: bool,
}

#[derive(Args)]
struct DynamicsArgs {
    /// Scheme or comma-separated list of schemes.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    rho0: Option<f64>,
    #[arg(long)]
    rho_star: Option<f64>,
    /// Clock: `regular` or `effective`.
    #[arg(long)]
    mode: Option<String>,
    /// Scale the weight to the unit budget over [rho0, rho-star] first.
    #[arg(long)]
    normalized: bool,
    #[arg(long)]
    budget: Option<f64>,
    /// Integrator step size.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Use the closed-form trajectory instead of integrating.
    #[arg(long)]
    closed_form: bool,
    /// Evaluate up to this regular time (sets the horizon).
    #[arg(long, conflicts_with = "tau")]
    t: Option<f64>,
    /// Evaluate up to this effective time (sets the horizon).
    #[arg(long)]
    tau: Option<f64>,
    /// Emit the two budget-normalized comparison tables (regular rho0=0.1,
    /// effective rho0=0.03) instead of single trajectories.
    #[arg(long)]
    figure4: bool,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Significant digits in CSV output.
    #[arg(long)]
    precision: Option<usize>,
    /// Flat TOML config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct OptimalArgs {
    /// Clock: `regular` or `effective`.
    #[arg(long, default_value = "regular")]
    mode: String,
    #[arg(long)]
    rho0: f64,
    #[arg(long, default_value_t = 1.0)]
    rho_star: f64,
    /// Comma-separated scheme list, or `all`.
    #[arg(long, default_value = "all")]
    schemes: String,
    #[arg(long, default_value_t = 1.0)]
    budget: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scheme: Option<String>,
    /// Rollouts per prompt.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, conflicts_with = "lr")]
    beta: Option<f64>,
    /// Learning-rate alias: lr maps to beta = 1/lr.
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    warmup_steps: Option<usize>,
    /// Handling of all-fail groups: `limit` or `zero`.
    #[arg(long)]
    zero_mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Initial distribution: `beta:A,B`, `point:RHO`, or `hist:PATH`.
    #[arg(long)]
    init: Option<String>,
    /// Comma-separated steps at which to write batch histograms.
    #[arg(long)]
    checkpoints: Option<String>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    precision: Option<usize>,
    /// Flat TOML config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    suite: Option<String>,
    /// List available suites and exit.
    #[arg(long)]
    list: bool,
}

/// Error carrying the process exit code.
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }

    /// Failure already reported on stdout/stderr; only sets the exit code.
    pub fn silent(code: u8) -> Self {
        Self {
            code,
            message: String::new(),
        }
    }
}

impl From<rlvr_core::Error> for CliError {
    fn from(e: rlvr_core::Error) -> Self {
        let code = match &e {
            rlvr_core::Error::Domain(_) | rlvr_core::Error::Config(_) => 2,
            rlvr_core::Error::Capability { .. } => 3,
            rlvr_core::Error::Numeric(_) => 4,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Advantages(args) => commands::advantages(args),
        Command::Dynamics(args) => commands::dynamics(args),
        Command::Optimal(args) => commands::optimal(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Verify(args) => commands::verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}
