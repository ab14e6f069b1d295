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

//! Effective run configuration: defaults, then a config file, then flags.

use std::path::{Path, PathBuf};

use qmesh_core::data::SENSOR_NAMES;
use qmesh_core::encoding::EncoderConfig;
use qmesh_core::noise::NoiseModel;
use qmesh_core::vqc::timing::DEFAULT_SIZES;
use qmesh_core::vqc::GradientMode;
use qmesh_core::GasLabel;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub encoder: EncoderConfig,
    pub train: TrainSection,
    pub protocol: ProtocolSection,
    pub noise: NoiseModel,
    pub gradcheck: GradcheckSection,
    pub timing: TimingSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSection {
    pub eta: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub shift: f64,
    pub gradient_mode: GradientMode,
    pub test_fraction: f64,
    /// Labels kept for training, in class-index order.
    pub classes: Vec<String>,
    /// Cap on training rows, taken as a stratified subsample.
    pub max_train_rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSection {
    pub n_vehicles: usize,
    pub rounds: usize,
    pub shots: u64,
    pub qpe_ancillas: usize,
    pub qpe_phase: f64,
    pub reset_per_round: bool,
    /// Bases written to the report, from Z, X, Y.
    pub bases: Vec<String>,
    /// Haar-message teleports through a fresh Bell pair under the run's
    /// noise model; 0 skips the benchmark.
    pub benchmark_trajectories: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradcheckSection {
    pub probes: usize,
    pub n_qubits: usize,
    pub max_layers: usize,
    pub samples: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSection {
    pub sizes: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = qmesh_core::TrainConfig::default();
        let protocol = qmesh_core::ProtocolConfig::default();
        RunConfig {
            seed: 0,
            out: PathBuf::from("qmesh-out"),
            encoder: EncoderConfig::new(SENSOR_NAMES.len(), 2),
            train: TrainSection {
                eta: train.eta,
                epsilon: train.epsilon,
                max_iters: train.max_iters,
                shift: train.shift,
                gradient_mode: train.gradient_mode,
                test_fraction: 0.3,
                classes: GasLabel::CANONICAL[..3]
                    .iter()
                    .map(|l| l.to_string())
                    .collect(),
                max_train_rows: None,
            },
            protocol: ProtocolSection {
                n_vehicles: protocol.n_vehicles,
                rounds: protocol.rounds,
                shots: protocol.shots,
                qpe_ancillas: protocol.qpe_ancillas,
                qpe_phase: protocol.qpe_phase,
                reset_per_round: protocol.reset_per_round,
                bases: vec!["Z".into(), "X".into(), "Y".into()],
                benchmark_trajectories: 2000,
            },
            noise: NoiseModel::noiseless(),
            gradcheck: GradcheckSection {
                probes: 10,
                n_qubits: 4,
                max_layers: 2,
                samples: 5,
                threshold: 1e-6,
            },
            timing: TimingSection {
                sizes: DEFAULT_SIZES.to_vec(),
            },
        }
    }
}

impl RunConfig {
    /// Defaults overlaid with the file at `path` (JSON, or TOML by extension).
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut base = serde_json::to_value(RunConfig::default()).expect("defaults serialize");
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::input(format!("cannot read config {}: {e}", path.display()))
            })?;
            let overlay: Value = if path.extension().is_some_and(|e| e == "toml") {
                let t: toml::Value = toml::from_str(&text)
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                serde_json::to_value(t).expect("toml values map to json")
            } else {
                serde_json::from_str(&text)
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
            };
            merge(&mut base, overlay);
        }
        serde_json::from_value(base).map_err(|e| CliError::input(format!("invalid config: {e}")))
    }

    pub fn train_config(&self) -> qmesh_core::TrainConfig {
        qmesh_core::TrainConfig {
            eta: self.train.eta,
            epsilon: self.train.epsilon,
            max_iters: self.train.max_iters,
            seed: self.seed,
            shift: self.train.shift,
            gradient_mode: self.train.gradient_mode,
        }
    }

    pub fn protocol_config(&self) -> qmesh_core::ProtocolConfig {
        qmesh_core::ProtocolConfig {
            n_vehicles: self.protocol.n_vehicles,
            rounds: self.protocol.rounds,
            qpe_ancillas: self.protocol.qpe_ancillas,
            qpe_phase: self.protocol.qpe_phase,
            noise: self.noise,
            shots: self.protocol.shots,
            seed: self.seed,
            reset_per_round: self.protocol.reset_per_round,
        }
    }

    pub fn class_labels(&self) -> Vec<GasLabel> {
        self.train
            .classes
            .iter()
            .map(|c| c.parse().expect("label parsing is infallible"))
            .collect()
    }
}

/// Recursive object merge; non-object values in `overlay` replace `base`.
fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
