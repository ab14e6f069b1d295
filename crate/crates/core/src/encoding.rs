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

//! Classical sensor rows to quantum states.
//!
//! Rows are min-max scaled per column, mapped linearly onto rotation angles
//! `theta_i = angle_scale * s'_i`, and loaded by an entangling feature map.
//! A layered trainable ansatz follows the same register layout.

use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{QmeshError, Result};
use crate::sim::{GateOp, QuantumCircuit, StateVector};

/// Raw readings, one row per sample and one column per sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorMatrix {
    values: Vec<Vec<f64>>,
    sensor_names: Vec<String>,
}

impl SensorMatrix {
    pub fn new(values: Vec<Vec<f64>>, sensor_names: Vec<String>) -> Result<Self> {
        if values.is_empty() || sensor_names.is_empty() {
            return Err(QmeshError::validation(
                "sensor matrix needs at least one row and one column",
            ));
        }
        let n = sensor_names.len();
        for (i, row) in values.iter().enumerate() {
            if row.len() != n {
                return Err(QmeshError::validation(format!(
                    "row {i} has {} values, expected {n}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(QmeshError::validation(format!(
                    "row {i} contains non-finite value {v}"
                )));
            }
        }
        Ok(SensorMatrix {
            values,
            sensor_names,
        })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn sensor_names(&self) -> &[String] {
        &self.sensor_names
    }

    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_sensors(&self) -> usize {
        self.sensor_names.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }
}

/// Per-column scaling constants fitted on a training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub sensor_names: Vec<String>,
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(raw: &SensorMatrix) -> Self {
        let n = raw.n_sensors();
        let mut mins = vec![f64::INFINITY; n];
        let mut maxs = vec![f64::NEG_INFINITY; n];
        for row in raw.rows() {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        MinMaxScaler {
            sensor_names: raw.sensor_names().to_vec(),
            mins,
            maxs,
        }
    }

    pub fn n_sensors(&self) -> usize {
        self.mins.len()
    }

    /// Indices of columns whose max equals their min.
    pub fn constant_columns(&self) -> Vec<usize> {
        (0..self.n_sensors())
            .filter(|&j| self.maxs[j] == self.mins[j])
            .collect()
    }

    fn scale(&self, j: usize, v: f64) -> f64 {
        let range = self.maxs[j] - self.mins[j];
        if range == 0.0 {
            0.0
        } else {
            (v - self.mins[j]) / range
        }
    }

    /// Scales one row with the fitted constants, clamping into [0, 1].
    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.n_sensors() {
            return Err(QmeshError::validation(format!(
                "row has {} values, expected {}",
                row.len(),
                self.n_sensors()
            )));
        }
        Ok(row
            .iter()
            .enumerate()
            .map(|(j, &v)| self.scale(j, v).clamp(0.0, 1.0))
            .collect())
    }
}

/// Min-max scaled matrix together with the constants that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrix {
    pub values: Vec<Vec<f64>>,
    pub scaler: MinMaxScaler,
    /// Columns that were constant and therefore mapped to 0.
    pub constant_columns: Vec<usize>,
}

/// `s'_ij = (s_ij - min_j) / (max_j - min_j)`; constant columns become 0.
pub fn min_max_normalize(raw: &SensorMatrix) -> NormalizedMatrix {
    let scaler = MinMaxScaler::fit(raw);
    let constant_columns = scaler.constant_columns();
    for &j in &constant_columns {
        warn!(
            "sensor column '{}' is constant; normalized to 0",
            scaler.sensor_names[j]
        );
    }
    let values = raw
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| scaler.scale(j, v))
                .collect()
        })
        .collect();
    NormalizedMatrix {
        values,
        scaler,
        constant_columns,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    /// One qubit per sensor.
    pub n_qubits: usize,
    /// Layer count M, shared by the feature map and the ansatz.
    pub layers: usize,
    pub angle_scale: f64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            n_qubits: 7,
            layers: 2,
            angle_scale: PI,
        }
    }
}

impl EncoderConfig {
    pub fn new(n_qubits: usize, layers: usize) -> Self {
        EncoderConfig {
            n_qubits,
            layers,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(QmeshError::validation("encoder needs at least one qubit"));
        }
        if self.layers == 0 {
            return Err(QmeshError::validation("encoder needs at least one layer"));
        }
        if !self.angle_scale.is_finite() {
            return Err(QmeshError::validation("angle scale must be finite"));
        }
        Ok(())
    }

    /// Ansatz parameters: `layers * 3 * n_qubits`.
    pub fn param_count(&self) -> usize {
        self.layers * 3 * self.n_qubits
    }
}

/// Rotation angles for one encoded row (radians).
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector(pub Vec<f64>);

pub fn angles_from_row(row: &[f64], config: &EncoderConfig) -> AngleVector {
    AngleVector(row.iter().map(|s| config.angle_scale * s).collect())
}

/// Nearest-neighbour ring `(i, i+1 mod n)`; a 2-qubit ring has one edge.
fn ring_edges(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => vec![],
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// Per layer: H on every qubit, `RotPaper(theta_i)` on qubit i, then CZ on
/// the ring in ascending i. The whole circuit is marked as preparation.
pub fn build_feature_map(theta: &AngleVector, config: &EncoderConfig) -> Result<QuantumCircuit> {
    config.validate()?;
    let n = config.n_qubits;
    if theta.0.len() != n {
        return Err(QmeshError::validation(format!(
            "feature map needs {n} angles, got {}",
            theta.0.len()
        )));
    }
    if n < 2 {
        warn!("feature map on a single qubit: entangling layer skipped");
    }
    let mut c = QuantumCircuit::new(n);
    for _ in 0..config.layers {
        for q in 0..n {
            c.push(GateOp::h(q))?;
        }
        for (q, &t) in theta.0.iter().enumerate() {
            c.push(GateOp::rot_paper(q, t))?;
        }
        for (a, b) in ring_edges(n) {
            c.push(GateOp::cz(a, b))?;
        }
    }
    c.mark_all_as_prep();
    Ok(c)
}

/// Where each ansatz parameter sits, for `layer` and qubit/edge `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSlot {
    Ry { layer: usize, qubit: usize },
    Rz { layer: usize, qubit: usize },
    CPhase { layer: usize, edge: usize },
}

/// Layout of the flat parameter array: layer-major, and within a layer
/// `[Ry angles | Rz angles | CPHASE angles]`.
pub fn param_slot(index: usize, config: &EncoderConfig) -> ParamSlot {
    let n = config.n_qubits;
    let layer = index / (3 * n);
    let within = index % (3 * n);
    match within / n {
        0 => ParamSlot::Ry {
            layer,
            qubit: within,
        },
        1 => ParamSlot::Rz {
            layer,
            qubit: within - n,
        },
        _ => ParamSlot::CPhase {
            layer,
            edge: within - 2 * n,
        },
    }
}

/// Per layer: Ry then Rz on every qubit, CPHASE on ring pairs
/// `(i, i+1 mod n)` with one angle each, then fixed iSWAPs on `(0,1), (2,3), ...`.
///
/// A one-qubit register has no ring pairs; its CPHASE parameters are unused.
pub fn build_ansatz(params: &[f64], config: &EncoderConfig) -> Result<QuantumCircuit> {
    config.validate()?;
    let expected = config.param_count();
    if params.len() != expected {
        return Err(QmeshError::validation(format!(
            "ansatz expects {expected} parameters, got {}",
            params.len()
        )));
    }
    let n = config.n_qubits;
    let mut c = QuantumCircuit::new(n);
    for layer in params.chunks(3 * n) {
        let (ry, rest) = layer.split_at(n);
        let (rz, cp) = rest.split_at(n);
        for (q, &t) in ry.iter().enumerate() {
            c.push(GateOp::ry(q, t))?;
        }
        for (q, &t) in rz.iter().enumerate() {
            c.push(GateOp::rz(q, t))?;
        }
        if n >= 2 {
            for (i, &phi) in cp.iter().enumerate() {
                c.push(GateOp::cphase(i, (i + 1) % n, phi))?;
            }
        }
        for q in (0..n.saturating_sub(1)).step_by(2) {
            c.push(GateOp::iswap(q, q + 1))?;
        }
    }
    Ok(c)
}

/// `|lambda> = feature_map(angles(row)) |0...0>`.
pub fn encode(row: &[f64], config: &EncoderConfig) -> Result<StateVector> {
    if row.len() != config.n_qubits {
        return Err(QmeshError::validation(format!(
            "row has {} values, encoder expects {}",
            row.len(),
            config.n_qubits
        )));
    }
    let circuit = build_feature_map(&angles_from_row(row, config), config)?;
    let mut state = StateVector::new(config.n_qubits)?;
    state.apply_circuit(&circuit)?;
    Ok(state)
}
