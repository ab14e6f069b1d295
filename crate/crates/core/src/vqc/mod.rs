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

//! Variational quantum classifier: encoded rows pass through a trainable
//! ansatz and are read out with per-class projectors.

mod metrics;
mod model;
pub mod timing;
mod train;

use serde::{Deserialize, Serialize};

pub use metrics::{ClassMetrics, Metrics};
pub use model::{argmax, ClassProjectors, VqcModel, MODEL_VERSION};
pub use train::{
    cost, cost_prepared, fidelities, finite_difference_gradient, gradient, gradient_prepared,
    parameter_shift_gradient, train, train_prepared, GradientMode, PreparedData, StopReason,
    TraceEntry, TrainConfig, TrainOutcome, FD_STEP,
};

use crate::data::{Dataset, GasLabel};
use crate::error::Result;
use crate::sim::{measure, Basis};

/// Class probabilities for one row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub probs: Vec<(GasLabel, f64)>,
    /// Probability mass on basis states assigned to no class.
    pub residual: f64,
    pub label: GasLabel,
    pub class_index: usize,
}

impl VqcModel {
    /// Normalizes with the stored constants, then reads out
    /// `Tr[Pi_j U |lambda><lambda| U^dagger]`.
    pub fn predict(&self, raw_row: &[f64]) -> Result<Prediction> {
        let row = self.scaler.transform_row(raw_row)?;
        self.predict_normalized(&row)
    }

    pub fn predict_normalized(&self, row: &[f64]) -> Result<Prediction> {
        let state = self.output_state(row)?;
        let (probs, residual) = self.projectors()?.probabilities(&state);
        let j = argmax(&probs);
        Ok(Prediction {
            probs: self.classes.iter().cloned().zip(probs).collect(),
            residual,
            label: self.classes[j].clone(),
            class_index: j,
        })
    }

    /// Same readout estimated from `shots` Z-basis samples.
    pub fn predict_sampled(&self, raw_row: &[f64], shots: u64, seed: u64) -> Result<Prediction> {
        let row = self.scaler.transform_row(raw_row)?;
        let state = self.output_state(&row)?;
        let hist = measure(&state, Basis::Z, shots, seed)?;
        let mut freqs = vec![0.0; state.dim()];
        for (key, &count) in &hist.counts {
            let index = usize::from_str_radix(key, 2).expect("histogram keys are bitstrings");
            freqs[index] = count as f64 / shots as f64;
        }
        let (probs, residual) = self.projectors()?.probabilities_from(&freqs);
        let j = argmax(&probs);
        Ok(Prediction {
            probs: self.classes.iter().cloned().zip(probs).collect(),
            residual,
            label: self.classes[j].clone(),
            class_index: j,
        })
    }

    /// Confusion matrix and scores on raw labelled rows.
    pub fn evaluate(&self, test: &[(Vec<f64>, GasLabel)]) -> Result<Metrics> {
        if test.is_empty() {
            return Err(crate::QmeshError::validation("evaluation set is empty"));
        }
        let mut pairs = Vec::with_capacity(test.len());
        for (row, label) in test {
            let truth = self.class_index(label)?;
            pairs.push((truth, self.predict(row)?.class_index));
        }
        Metrics::from_pairs(&self.classes, &pairs)
    }

    pub fn evaluate_dataset(&self, test: &Dataset) -> Result<Metrics> {
        self.evaluate(&raw_rows(test))
    }
}

/// `(readings, label)` pairs of a dataset, unnormalized.
pub fn raw_rows(dataset: &Dataset) -> Vec<(Vec<f64>, GasLabel)> {
    dataset
        .records
        .iter()
        .map(|r| (r.readings.to_vec(), r.label.clone()))
        .collect()
}

/// `(normalized readings, label)` pairs using the model's scaler.
pub fn normalized_rows(model: &VqcModel, dataset: &Dataset) -> Result<Vec<(Vec<f64>, GasLabel)>> {
    dataset
        .records
        .iter()
        .map(|r| Ok((model.scaler.transform_row(&r.readings)?, r.label.clone())))
        .collect()
}
