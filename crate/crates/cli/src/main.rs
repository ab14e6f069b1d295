// Copyright 2026 The qmesh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! `qmesh`: reproducible runs of the classifier, the vehicle protocol and
//! their diagnostics. Exit codes: 0 success, 1 internal error, 2 bad input.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmesh_core::QmeshError;

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "qmesh",
    version,
    about = "Quantum gas-sensor classification and vehicle entanglement runs"
)]
struct Cli {
    /// JSON or TOML file overriding the defaults; flags override the file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Only log warnings and errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize, split, train and evaluate a classifier.
    Train(TrainArgs),
    /// Class probabilities for one row or a CSV of rows (JSON lines).
    Predict(PredictArgs),
    /// Metrics of a saved model on a labelled dataset.
    Evaluate(EvaluateArgs),
    /// Run the multi-vehicle entanglement protocol.
    Protocol(ProtocolArgs),
    /// Compare parameter-shift and finite-difference gradients.
    Gradcheck(GradcheckArgs),
    /// Per-sensor summary statistics.
    Stats(DataArgs),
    /// Pairwise sensor table for external plotting.
    ExportPairs(ExportArgs),
    /// Per-row prediction latency across dataset sizes.
    Timing(TimingArgs),
    /// Write a synthetic Gaussian-cluster dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    #[arg(long, value_name = "CSV")]
    data: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GradientFlag {
    ParameterShift,
    FiniteDifference,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, value_name = "CSV", required_unless_present = "synthetic")]
    data: Option<PathBuf>,
    /// Train on synthetic clusters with this many rows per class instead.
    #[arg(long, value_name = "N", conflicts_with = "data")]
    synthetic: Option<usize>,
    /// Cluster spread of --synthetic, as a fraction of each sensor range.
    #[arg(long, default_value_t = 0.02)]
    spread: f64,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Comma-separated labels, in class-index order.
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<String>>,
    #[arg(long)]
    max_train_rows: Option<usize>,
    #[arg(long, value_enum)]
    gradient_mode: Option<GradientFlag>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long, value_name = "JSON")]
    model: PathBuf,
    /// Comma-separated raw readings.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    row: Option<String>,
    /// CSV whose header names the model's sensors.
    #[arg(long, value_name = "CSV")]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long, value_name = "JSON")]
    model: PathBuf,
    #[arg(long, value_name = "CSV")]
    data: PathBuf,
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    #[arg(long)]
    vehicles: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    /// Bases to report, e.g. `Z,X`.
    #[arg(long, value_delimiter = ',')]
    bases: Option<Vec<String>>,
    /// Depolarizing probability after every gate.
    #[arg(long)]
    noise_p: Option<f64>,
    #[arg(long)]
    qpe_ancillas: Option<usize>,
    #[arg(long)]
    reset_per_round: bool,
    /// Trajectories of the standalone teleport benchmark; 0 skips it.
    #[arg(long)]
    trajectories: Option<usize>,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    #[arg(long)]
    probes: Option<usize>,
    /// Evaluate at shift 0.1 while dividing by 2 sin(pi/2); must fail.
    #[arg(long)]
    corrupt_shift: bool,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long, value_name = "CSV")]
    data: PathBuf,
    /// Sensors to pair; all seven by default.
    #[arg(long, value_delimiter = ',')]
    sensors: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct TimingArgs {
    #[arg(long, value_name = "JSON")]
    model: PathBuf,
    #[arg(long, value_name = "CSV")]
    data: PathBuf,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    per_class: usize,
    #[arg(long, default_value_t = 3)]
    classes: usize,
    #[arg(long, default_value_t = 0.02)]
    spread: f64,
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<QmeshError> for CliError {
    fn from(e: QmeshError) -> Self {
        if e.is_input_error() {
            CliError::input(e.to_string())
        } else {
            CliError::internal(e.to_string())
        }
    }
}

fn apply_flags(cfg: &mut RunConfig, cli: &Cli) {
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    match &cli.command {
        Command::Train(a) => {
            let t = &mut cfg.train;
            if let Some(v) = a.eta {
                t.eta = v;
            }
            if let Some(v) = a.epsilon {
                t.epsilon = v;
            }
            if let Some(v) = a.max_iters {
                t.max_iters = v;
            }
            if let Some(v) = a.test_fraction {
                t.test_fraction = v;
            }
            if let Some(v) = &a.classes {
                t.classes = v.clone();
            }
            if a.max_train_rows.is_some() {
                t.max_train_rows = a.max_train_rows;
            }
            if let Some(m) = a.gradient_mode {
                t.gradient_mode = match m {
                    GradientFlag::ParameterShift => qmesh_core::vqc::GradientMode::ParameterShift,
                    GradientFlag::FiniteDifference => {
                        qmesh_core::vqc::GradientMode::FiniteDifference
                    }
                };
            }
            if let Some(v) = a.layers {
                cfg.encoder.layers = v;
            }
        }
        Command::Protocol(a) => {
            let p = &mut cfg.protocol;
            if let Some(v) = a.vehicles {
                p.n_vehicles = v;
            }
            if let Some(v) = a.rounds {
                p.rounds = v;
            }
            if let Some(v) = a.shots {
                p.shots = v;
            }
            if let Some(v) = &a.bases {
                p.bases = v.clone();
            }
            if let Some(v) = a.qpe_ancillas {
                p.qpe_ancillas = v;
            }
            if a.reset_per_round {
                p.reset_per_round = true;
            }
            if let Some(v) = a.trajectories {
                p.benchmark_trajectories = v;
            }
            if let Some(v) = a.noise_p {
                cfg.noise = qmesh_core::NoiseModel {
                    p_depolarizing: v,
                    policy: qmesh_core::NoisePolicy::AfterEveryGate,
                };
            }
        }
        Command::Gradcheck(a) => {
            if let Some(v) = a.probes {
                cfg.gradcheck.probes = v;
            }
        }
        Command::Timing(a) => {
            if let Some(v) = &a.sizes {
                cfg.timing.sizes = v.clone();
            }
        }
        _ => {}
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    apply_flags(&mut cfg, &cli);
    commands::prepare_out(&cfg)?;
    match &cli.command {
        Command::Train(a) => commands::train(&cfg, a.data.as_deref(), a.synthetic, a.spread),
        Command::Predict(a) => {
            commands::predict(&cfg, &a.model, a.row.as_deref(), a.input.as_deref())
        }
        Command::Evaluate(a) => commands::evaluate(&cfg, &a.model, &a.data),
        Command::Protocol(_) => commands::protocol(&cfg),
        Command::Gradcheck(a) => commands::gradcheck(&cfg, a.corrupt_shift),
        Command::Stats(a) => commands::stats(&cfg, &a.data),
        Command::ExportPairs(a) => commands::export_pairs(&cfg, &a.data, a.sensors.as_deref()),
        Command::Timing(a) => commands::timing(&cfg, &a.model, &a.data),
        Command::Synth(a) => commands::synth(&cfg, a.per_class, a.classes, a.spread),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
