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

//! Per-row detection latency across dataset sizes.
//!
//! Any classifier implementing [`Detector`] can be timed side by side, so
//! external baselines plug in without touching this crate.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::model::VqcModel;
use crate::data::GasLabel;
use crate::error::{QmeshError, Result};

/// Dataset sizes of the default latency sweep.
pub const DEFAULT_SIZES: [usize; 5] = [20, 40, 60, 80, 100];

pub trait Detector {
    fn name(&self) -> &str;
    /// Classifies one raw sensor row.
    fn detect(&self, raw_row: &[f64]) -> Result<GasLabel>;
}

impl Detector for VqcModel {
    fn name(&self) -> &str {
        "vqc"
    }

    fn detect(&self, raw_row: &[f64]) -> Result<GasLabel> {
        Ok(self.predict(raw_row)?.label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyRow {
    pub detector: String,
    pub rows: usize,
    pub total_seconds: f64,
    pub per_row_seconds: f64,
}

/// Times each detector on the first `n` rows for every `n` in `sizes`,
/// cycling through `rows` when a size exceeds the pool.
pub fn latency_report(
    detectors: &[&dyn Detector],
    rows: &[Vec<f64>],
    sizes: &[usize],
) -> Result<Vec<LatencyRow>> {
    if rows.is_empty() {
        return Err(QmeshError::validation(
            "latency sweep needs at least one row",
        ));
    }
    let mut out = Vec::new();
    for det in detectors {
        for &n in sizes {
            if n == 0 {
                return Err(QmeshError::validation(
                    "latency sweep sizes must be positive",
                ));
            }
            let start = Instant::now();
            for row in rows.iter().cycle().take(n) {
                std::hint::black_box(det.detect(row)?);
            }
            let total = start.elapsed().as_secs_f64();
            out.push(LatencyRow {
                detector: det.name().to_string(),
                rows: n,
                total_seconds: total,
                per_row_seconds: total / n as f64,
            });
        }
    }
    Ok(out)
}

pub fn latency_csv(rows: &[LatencyRow]) -> String {
    let mut s = String::from("detector,rows,total_seconds,per_row_seconds\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{:.9},{:.9}\n",
            r.detector, r.rows, r.total_seconds, r.per_row_seconds
        ));
    }
    s
}
