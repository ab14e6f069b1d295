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

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng as _;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::data::GasLabel;
use crate::encoding::{build_ansatz, encode, EncoderConfig, MinMaxScaler};
use crate::error::{QmeshError, Result};
use crate::seed;
use crate::sim::{QuantumCircuit, StateVector};

pub const MODEL_VERSION: u64 = 1;

/// Class readout on the low `class_bits` qubits.
///
/// Class `j` targets the basis state `|j>` (class bits hold `j`, every other
/// qubit 0); its projector covers every basis state whose class bits equal `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassProjectors {
    pub n_qubits: usize,
    pub n_classes: usize,
    pub class_bits: usize,
}

impl ClassProjectors {
    pub fn new(n_qubits: usize, n_classes: usize) -> Result<Self> {
        if n_classes < 2 {
            return Err(QmeshError::validation(
                "a classifier needs at least 2 classes",
            ));
        }
        let class_bits = (usize::BITS - (n_classes - 1).leading_zeros()) as usize;
        if class_bits > n_qubits {
            return Err(QmeshError::validation(format!(
                "{n_classes} classes need {class_bits} qubits, register has {n_qubits}"
            )));
        }
        Ok(ClassProjectors {
            n_qubits,
            n_classes,
            class_bits,
        })
    }

    /// Register index of class `j`'s target basis state.
    pub fn target_index(&self, class: usize) -> usize {
        class
    }

    pub fn class_of_index(&self, index: usize) -> Option<usize> {
        let j = index & ((1 << self.class_bits) - 1);
        (j < self.n_classes).then_some(j)
    }

    /// `Tr[Pi_j |psi><psi|]` per class, plus the unassigned mass.
    pub fn probabilities(&self, state: &StateVector) -> (Vec<f64>, f64) {
        self.probabilities_from(&state.probabilities())
    }

    /// Same readout from any outcome distribution over register indices.
    pub fn probabilities_from(&self, outcome_probs: &[f64]) -> (Vec<f64>, f64) {
        let mut probs = vec![0.0; self.n_classes];
        let mut residual = 0.0;
        for (i, p) in outcome_probs.iter().enumerate() {
            match self.class_of_index(i) {
                Some(j) => probs[j] += p,
                None => residual += p,
            }
        }
        for p in probs.iter_mut() {
            *p = p.clamp(0.0, 1.0);
        }
        (probs, residual.max(0.0))
    }
}

/// Index of the largest probability; ties go to the lowest index.
pub fn argmax(probs: &[f64]) -> usize {
    let mut best = 0;
    for (j, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = j;
        }
    }
    best
}

/// Trained (or freshly initialized) classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct VqcModel {
    pub encoder: EncoderConfig,
    pub params: Vec<f64>,
    /// Class `j` is `classes[j]`.
    pub classes: Vec<GasLabel>,
    pub scaler: MinMaxScaler,
    pub seed: u64,
}

impl VqcModel {
    /// Parameters drawn uniformly from [-pi, pi] with the `"init"` substream.
    pub fn init(
        encoder: EncoderConfig,
        classes: Vec<GasLabel>,
        scaler: MinMaxScaler,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = seed::substream(seed, "init");
        let params = (0..encoder.param_count())
            .map(|_| rng.random_range(-PI..=PI))
            .collect();
        let m = VqcModel {
            encoder,
            params,
            classes,
            scaler,
            seed,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        if self.params.len() != self.encoder.param_count() {
            return Err(QmeshError::validation(format!(
                "model has {} parameters, ansatz expects {}",
                self.params.len(),
                self.encoder.param_count()
            )));
        }
        for (i, c) in self.classes.iter().enumerate() {
            if self.classes[..i].contains(c) {
                return Err(QmeshError::validation(format!("class '{c}' listed twice")));
            }
        }
        if self.scaler.n_sensors() != self.encoder.n_qubits {
            return Err(QmeshError::validation(format!(
                "{} normalization constants for {} qubits",
                self.scaler.n_sensors(),
                self.encoder.n_qubits
            )));
        }
        ClassProjectors::new(self.encoder.n_qubits, self.classes.len())?;
        Ok(())
    }

    pub fn projectors(&self) -> Result<ClassProjectors> {
        ClassProjectors::new(self.encoder.n_qubits, self.classes.len())
    }

    pub fn class_index(&self, label: &GasLabel) -> Result<usize> {
        self.classes.iter().position(|c| c == label).ok_or_else(|| {
            QmeshError::validation(format!("class '{label}' is not in the model's class map"))
        })
    }

    pub fn ansatz(&self) -> Result<QuantumCircuit> {
        build_ansatz(&self.params, &self.encoder)
    }

    /// `U(theta) |lambda(row)>` for an already normalized row.
    pub fn output_state(&self, normalized_row: &[f64]) -> Result<StateVector> {
        let mut s = encode(normalized_row, &self.encoder)?;
        s.apply_circuit(&self.ansatz()?)?;
        Ok(s)
    }

    pub fn to_json(&self) -> Value {
        let class_map: Map<String, Value> = self
            .classes
            .iter()
            .enumerate()
            .map(|(j, c)| (c.to_string(), json!(j)))
            .collect();
        let norm: Map<String, Value> = self
            .scaler
            .sensor_names
            .iter()
            .zip(self.scaler.mins.iter().zip(&self.scaler.maxs))
            .map(|(name, (lo, hi))| (name.clone(), json!([lo, hi])))
            .collect();
        json!({
            "version": MODEL_VERSION,
            "n_qubits": self.encoder.n_qubits,
            "layers": self.encoder.layers,
            "angle_scale": self.encoder.angle_scale,
            "params": self.params,
            "class_map": class_map,
            "norm_constants": norm,
            "seed": self.seed,
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let file: ModelFile = serde_json::from_value(value.clone())?;
        if file.version != MODEL_VERSION {
            return Err(QmeshError::validation(format!(
                "unsupported model version {}",
                file.version
            )));
        }
        let mut classes = Vec::with_capacity(file.class_map.len());
        for (label, j) in file.class_map {
            let j = j.as_u64().ok_or_else(|| {
                QmeshError::validation(format!("class '{label}' has a non-integer index"))
            })?;
            classes.push((j as usize, label.parse::<GasLabel>().unwrap()));
        }
        classes.sort_by_key(|(j, _)| *j);
        if classes.iter().enumerate().any(|(k, (j, _))| k != *j) {
            return Err(QmeshError::validation(
                "class_map indices must be 0..c without gaps",
            ));
        }
        let mut scaler = MinMaxScaler {
            sensor_names: Vec::new(),
            mins: Vec::new(),
            maxs: Vec::new(),
        };
        for (name, range) in file.norm_constants {
            let [lo, hi]: [f64; 2] = serde_json::from_value(range)?;
            scaler.sensor_names.push(name);
            scaler.mins.push(lo);
            scaler.maxs.push(hi);
        }
        let model = VqcModel {
            encoder: EncoderConfig {
                n_qubits: file.n_qubits,
                layers: file.layers,
                angle_scale: file.angle_scale,
            },
            params: file.params,
            classes: classes.into_iter().map(|(_, l)| l).collect(),
            scaler,
            seed: file.seed,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        crate::data::write_atomic(path, text.as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| QmeshError::io(path, e))?;
        Self::from_json(&serde_json::from_str(&text)?)
    }
}

#[derive(Deserialize)]
struct ModelFile {
    version: u64,
    n_qubits: usize,
    layers: usize,
    angle_scale: f64,
    params: Vec<f64>,
    class_map: Map<String, Value>,
    norm_constants: Map<String, Value>,
    seed: u64,
}
