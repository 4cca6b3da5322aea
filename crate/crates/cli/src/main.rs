//! `dnnreuse` — static data-reuse analysis and energy-efficiency
//! calibration for DNN layer graphs.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::CliError;

#[derive(Parser)]
#[command(name = "dnnreuse", version, about = "Data-reuse and energy-efficiency analysis for DNN graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Ai,
    Di,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[default]
    Raw,
    Converted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    /// Charge each layer its output tensor only.
    #[default]
    Output,
    /// Charge each layer its input and output tensors.
    InputOutput,
}

#[derive(Args, Clone, Copy)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Evaluate on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Network-level profile and derived metrics for one or more models.
    Analyze {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        batch: u64,
        #[arg(long, default_value_t = dnnreuse::metrics::DEFAULT_ALPHA)]
        alpha: f64,
        /// A/W cut points as `LOW,HIGH`.
        #[arg(long, default_value = "0.3333333333333333,3")]
        thresholds: String,
        #[command(flatten)]
        common: Common,
    },
    /// Per-layer costs and intensity, with median and variance.
    Layers {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Convention::Output)]
        convention: Convention,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep α and report correlation of DI(α) with measured efficiency.
    Calibrate {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        measurements: PathBuf,
        #[arg(long)]
        device: String,
        #[arg(long)]
        batch: u32,
        #[arg(long, default_value_t = dnnreuse::stats::DEFAULT_STEP)]
        step: f64,
        #[arg(long, default_value_t = dnnreuse::stats::DEFAULT_EPSILON)]
        epsilon: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Compute/memory-bound classification against a hardware spec.
    Roofline {
        #[arg(long)]
        hw: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Ai)]
        metric: Metric,
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long, default_value_t = dnnreuse::metrics::DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Mode::Raw)]
        mode: Mode,
        #[arg(long, default_value_t = 4.0)]
        bytes_per_element: f64,
        #[arg(long, default_value_t = 2.0)]
        flops_per_mac: f64,
        /// Measurements supplying achieved throughput (needs --device/--batch).
        #[arg(long, requires_all = ["device", "batch"])]
        measurements: Option<PathBuf>,
        #[arg(long)]
        device: Option<String>,
        #[arg(long)]
        batch: Option<u32>,
        /// Also write the sampled envelope as CSV to this path.
        #[arg(long)]
        envelope: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Per-run energy per pixel and MACs per joule joined with reuse metrics.
    Energy {
        #[arg(long)]
        measurements: PathBuf,
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        device: Option<String>,
        #[arg(long)]
        batch: Option<u32>,
        #[arg(long, default_value_t = dnnreuse::metrics::DEFAULT_ALPHA)]
        alpha: f64,
        /// Divide energy per pixel by the batch size.
        #[arg(long)]
        per_frame: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Pearson and Spearman correlation of two CSV columns with Fisher-Z intervals.
    Stats {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[command(flatten)]
        common: Common,
    },
    /// Fisher-Z interval for a given correlation and sample size.
    Ci {
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Smallest sample size whose Fisher-Z interval fits in a width.
    SampleSize {
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long)]
        width: f64,
    },
    /// Settled average power of a `t_ms,watts` trace.
    Power {
        trace: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        idle: f64,
        #[arg(long)]
        subtract_idle: bool,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Analyze {
            models,
            batch,
            alpha,
            thresholds,
            common,
        } => commands::analyze(&models, batch, alpha, &thresholds, common),
        Command::Layers {
            model,
            convention,
            common,
        } => commands::layers(&model, convention, common),
        Command::Calibrate {
            profiles,
            measurements,
            device,
            batch,
            step,
            epsilon,
            common,
        } => commands::calibrate(&profiles, &measurements, &device, batch, step, epsilon, common),
        Command::Roofline {
            hw,
            metric,
            profiles,
            alpha,
            mode,
            bytes_per_element,
            flops_per_mac,
            measurements,
            device,
            batch,
            envelope,
            common,
        } => commands::roofline(commands::RooflineArgs {
            hw,
            metric,
            profiles,
            alpha,
            mode,
            bytes_per_element,
            flops_per_mac,
            measured: measurements.map(|m| (m, device.unwrap_or_default(), batch.unwrap_or(1))),
            envelope,
            common,
        }),
        Command::Energy {
            measurements,
            profiles,
            device,
            batch,
            alpha,
            per_frame,
            common,
        } => commands::energy(&measurements, &profiles, device.as_deref(), batch, alpha, per_frame, common),
        Command::Stats { csv, x, y, common } => commands::stats(&csv, &x, &y, common),
        Command::Ci { r, n, level, common } => commands::ci(r, n, level, common),
        Command::SampleSize { level, width } => commands::sample_size(level, width),
        Command::Power {
            trace,
            idle,
            subtract_idle,
        } => commands::power(&trace, idle, subtract_idle),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
