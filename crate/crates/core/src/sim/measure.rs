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

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use super::gate::GateOp;
use super::state::StateVector;
use crate::error::{QmeshError, Result};
use crate::seed::{self, Rng};

/// Measurement basis. X measures after `H`; Y after `Sdg` then `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    /// Gates rotating this basis onto Z for one qubit.
    pub fn rotation(&self, qubit: usize) -> Vec<GateOp> {
        match self {
            Basis::Z => vec![],
            Basis::X => vec![GateOp::h(qubit)],
            Basis::Y => vec![GateOp::sdg(qubit), GateOp::h(qubit)],
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Basis::Z => "Z",
            Basis::X => "X",
            Basis::Y => "Y",
        };
        f.write_str(s)
    }
}

impl FromStr for Basis {
    type Err = QmeshError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "Z" => Ok(Basis::Z),
            "X" => Ok(Basis::X),
            "Y" => Ok(Basis::Y),
            other => Err(QmeshError::validation(format!("unknown basis '{other}'"))),
        }
    }
}

/// Outcome counts keyed by bitstring, most-significant qubit first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementHistogram {
    pub basis: Basis,
    pub n_qubits: usize,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl MeasurementHistogram {
    pub fn empty(basis: Basis, n_qubits: usize) -> Self {
        MeasurementHistogram {
            basis,
            n_qubits,
            shots: 0,
            counts: BTreeMap::new(),
        }
    }

    /// Records one outcome given as a register index.
    pub fn record(&mut self, index: usize) {
        *self
            .counts
            .entry(bitstring(index, self.n_qubits))
            .or_insert(0) += 1;
        self.shots += 1;
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn frequency(&self, key: &str) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        self.count(key) as f64 / self.shots as f64
    }

    /// Adds another histogram of the same basis and width.
    pub fn merge(&mut self, other: &MeasurementHistogram) -> Result<()> {
        if other.basis != self.basis || other.n_qubits != self.n_qubits {
            return Err(QmeshError::validation(
                "cannot merge histograms of different shape",
            ));
        }
        for (k, v) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += v;
        }
        self.shots += other.shots;
        Ok(())
    }

    /// Counts over a subset of qubits; the key lists `qubits` in descending
    /// index order, matching the full-register convention.
    pub fn marginal(&self, qubits: &[usize]) -> Result<MeasurementHistogram> {
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(QmeshError::QubitIndex {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        let mut sel = qubits.to_vec();
        sel.sort_unstable();
        sel.dedup();
        let mut out = MeasurementHistogram::empty(self.basis, sel.len());
        for (key, &count) in &self.counts {
            let bytes = key.as_bytes();
            let sub: String = sel
                .iter()
                .rev()
                .map(|&q| bytes[self.n_qubits - 1 - q] as char)
                .collect();
            *out.counts.entry(sub).or_insert(0) += count;
        }
        out.shots = self.shots;
        Ok(out)
    }

    pub fn is_consistent(&self) -> bool {
        self.counts.values().sum::<u64>() == self.shots
            && self.counts.keys().all(|k| k.len() == self.n_qubits)
    }
}

/// Register index as a bitstring, most-significant qubit first.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    format!("{index:0n_qubits$b}")
}

/// Copy of `state` rotated so a Z readout measures `basis`.
pub fn rotate_to_basis(state: &StateVector, basis: Basis) -> Result<StateVector> {
    let mut rotated = state.clone();
    for q in 0..state.n_qubits() {
        for g in basis.rotation(q) {
            rotated.apply(&g)?;
        }
    }
    Ok(rotated)
}

/// Samples `shots` outcomes in `basis` with the substream `"measure"` of
/// `seed`. The input state is left untouched.
pub fn measure(
    state: &StateVector,
    basis: Basis,
    shots: u64,
    seed: u64,
) -> Result<MeasurementHistogram> {
    let mut rng = seed::substream(seed, "measure");
    sample(state, basis, shots, &mut rng)
}

/// Like [`measure`] with a caller-owned generator.
pub fn sample(
    state: &StateVector,
    basis: Basis,
    shots: u64,
    rng: &mut Rng,
) -> Result<MeasurementHistogram> {
    if shots == 0 {
        return Err(QmeshError::validation("shots must be at least 1"));
    }
    let rotated = rotate_to_basis(state, basis)?;
    let dist = WeightedIndex::new(rotated.probabilities())
        .map_err(|e| QmeshError::validation(format!("invalid outcome distribution: {e}")))?;
    let mut hist = MeasurementHistogram::empty(basis, state.n_qubits());
    for _ in 0..shots {
        hist.record(dist.sample(rng));
    }
    Ok(hist)
}

/// One outcome index in `basis`.
pub fn sample_once(state: &StateVector, basis: Basis, rng: &mut Rng) -> Result<usize> {
    let rotated = rotate_to_basis(state, basis)?;
    let dist = WeightedIndex::new(rotated.probabilities())
        .map_err(|e| QmeshError::validation(format!("invalid outcome distribution: {e}")))?;
    Ok(dist.sample(rng))
}
