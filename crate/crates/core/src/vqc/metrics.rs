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

use serde::{Deserialize, Serialize};

use crate::data::GasLabel;
use crate::error::{QmeshError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: GasLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Confusion matrix (rows: true class, columns: predicted) and the scores
/// derived from it. Any 0/0 ratio is reported as 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub confusion: Vec<Vec<usize>>,
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: f64,
    pub accuracy: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Metrics {
    pub fn from_confusion(labels: &[GasLabel], confusion: Vec<Vec<usize>>) -> Result<Self> {
        let c = labels.len();
        if confusion.len() != c || confusion.iter().any(|r| r.len() != c) {
            return Err(QmeshError::validation(
                "confusion matrix shape does not match labels",
            ));
        }
        let per_class: Vec<ClassMetrics> = (0..c)
            .map(|j| {
                let tp = confusion[j][j];
                let support: usize = confusion[j].iter().sum();
                let predicted: usize = confusion.iter().map(|r| r[j]).sum();
                let precision = ratio(tp, predicted);
                let recall = ratio(tp, support);
                let f1 = if precision + recall == 0.0 {
                    0.0
                } else {
                    2.0 * precision * recall / (precision + recall)
                };
                ClassMetrics {
                    label: labels[j].clone(),
                    precision,
                    recall,
                    f1,
                    support,
                }
            })
            .collect();
        let total: usize = confusion.iter().flatten().sum();
        let correct: usize = (0..c).map(|j| confusion[j][j]).sum();
        let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / c as f64;
        Ok(Metrics {
            confusion,
            per_class,
            macro_f1,
            accuracy: ratio(correct, total),
        })
    }

    /// Tallies `(true, predicted)` class-index pairs.
    pub fn from_pairs(labels: &[GasLabel], pairs: &[(usize, usize)]) -> Result<Self> {
        let c = labels.len();
        let mut confusion = vec![vec![0usize; c]; c];
        for &(t, p) in pairs {
            if t >= c || p >= c {
                return Err(QmeshError::validation(format!(
                    "class index out of range: ({t}, {p})"
                )));
            }
            confusion[t][p] += 1;
        }
        Self::from_confusion(labels, confusion)
    }
}
