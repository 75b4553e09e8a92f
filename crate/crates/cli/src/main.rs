//! `urkit`: Dickey-Fuller unit root tests, simulation and Monte Carlo
//! experiments from the command line.

mod commands;
mod format;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "urkit", version, about = "Dickey-Fuller unit root testing toolkit")]
struct Cli {
    /// Worker threads for Monte Carlo work; 0 uses every core. Results do
    /// not depend on this value.
    #[arg(long, global = true, env = "URKIT_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test an observed series for a unit root.
    Test(TestArgs),
    /// Simulate a series from a DGP and write it as CSV.
    Simulate(SimulateArgs),
    /// Tabulate critical values under the null DGP of an experiment config.
    Cv(McArgs),
    /// Run the size/power, variance and efficiency analyses of a config.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
pub struct TestArgs {
    /// Series CSV: one value column, or time label and value.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// onestep, twostep, residual or zeropad [default: twostep]
    #[arg(long)]
    pub method: Option<String>,
    /// none, c, ct, poly:R, break:TB[:trend][:poly=R] or custom:PATH [default: c]
    #[arg(long)]
    pub det: Option<String>,
    /// Augmentation lags, or `auto` for floor(4 (T/100)^(1/4)) [default: auto]
    #[arg(long)]
    pub k: Option<String>,
    /// Critical value table written by `urkit cv`.
    #[arg(long)]
    pub cv: Option<PathBuf>,
    /// Also write the results as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rerun from a manifest-bearing output file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Sample size [default: 100]
    #[arg(long = "T")]
    pub t: Option<usize>,
    /// [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Autoregressive root [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Innovation standard deviation [default: 1]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Deterministic spec of the mean [default: none]
    #[arg(long)]
    pub det: Option<String>,
    /// Comma-separated mean coefficients, one per deterministic column.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Comma-separated AR coefficients of the errors.
    #[arg(long = "error-ar", allow_hyphen_values = true)]
    pub error_ar: Option<String>,
    /// Initial condition [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<f64>,
    /// Discarded pre-sample draws, or `stationary` [default: 0]
    #[arg(long = "burn-in")]
    pub burn_in: Option<String>,
    /// gaussian or t:DF [default: gaussian]
    #[arg(long)]
    pub innovations: Option<String>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rerun from a manifest-bearing output file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct McArgs {
    /// Experiment config (INI) or a manifest-bearing output file.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub mc: McArgs,
    /// Critical value table for size/power; tabulated from the null DGP
    /// when absent.
    #[arg(long)]
    pub cv: Option<PathBuf>,
    /// Power-curve plot data [default: <out>_power.csv when --out is given]
    #[arg(long = "plot-out")]
    pub plot_out: Option<PathBuf>,
    /// Tabulated critical values [default: <out>_cv.csv when --out is given]
    #[arg(long = "cv-out")]
    pub cv_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Test(a) => commands::test(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Cv(a) => commands::cv(a, cli.threads),
        Command::Experiment(a) => commands::experiment(a, cli.threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("urkit: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
