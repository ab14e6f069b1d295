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

//! Single-qubit depolarizing noise, exact or by Pauli-trajectory sampling.
//!
//! Channel on one qubit: `rho -> (1 - p) rho + p/3 (X rho X + Y rho Y + Z rho Z)`.
//! A gate is a noisy location; every qubit it touches is depolarized
//! independently.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{QmeshError, Result};
use crate::seed::{self, Rng};
use crate::sim::{DensityMatrix, GateOp, QuantumCircuit};

/// Which gates count as noisy locations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoisePolicy {
    #[default]
    AfterEveryGate,
    /// Only gates in a circuit's preparation block.
    AfterEncodingOnly,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p_depolarizing: f64,
    #[serde(default)]
    pub policy: NoisePolicy,
}

/// Depolarizing probability used when none is configured.
pub const DEFAULT_P: f64 = 0.05;

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::noiseless()
    }
}

impl NoiseModel {
    pub fn new(p_depolarizing: f64, policy: NoisePolicy) -> Result<Self> {
        check_probability(p_depolarizing)?;
        Ok(NoiseModel {
            p_depolarizing,
            policy,
        })
    }

    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(p, NoisePolicy::AfterEveryGate)
    }

    pub fn noiseless() -> Self {
        NoiseModel {
            p_depolarizing: 0.0,
            policy: NoisePolicy::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability(self.p_depolarizing)
    }

    pub fn is_noiseless(&self) -> bool {
        self.policy == NoisePolicy::None || self.p_depolarizing == 0.0
    }

    /// Whether gate number `index` of a circuit with preparation block
    /// `prep_len` is a noisy location.
    pub fn is_noisy_location(&self, index: usize, prep_len: usize) -> bool {
        match self.policy {
            NoisePolicy::AfterEveryGate => true,
            NoisePolicy::AfterEncodingOnly => index < prep_len,
            NoisePolicy::None => false,
        }
    }

    /// Draws the Pauli errors following one noisy gate: for each touched
    /// qubit, with probability p one of X, Y, Z uniformly.
    pub fn sample_errors(&self, gate: &GateOp, rng: &mut Rng) -> Vec<GateOp> {
        let mut errors = Vec::new();
        if self.p_depolarizing == 0.0 {
            return errors;
        }
        for q in gate.qubits() {
            if rng.random::<f64>() < self.p_depolarizing {
                errors.push(match rng.random_range(0..3u8) {
                    0 => GateOp::x(q),
                    1 => GateOp::y(q),
                    _ => GateOp::z(q),
                });
            }
        }
        errors
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QmeshError::validation(format!(
            "depolarizing probability {p} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Exact single-qubit depolarizing channel on `qubit`.
pub fn apply_depolarizing(rho: &DensityMatrix, qubit: usize, p: f64) -> Result<DensityMatrix> {
    check_probability(p)?;
    if qubit >= rho.n_qubits() {
        return Err(QmeshError::QubitIndex {
            index: qubit,
            n_qubits: rho.n_qubits(),
        });
    }
    if p == 0.0 {
        return Ok(rho.clone());
    }
    let mut acc = rho.matrix() * crate::sim::C64::new(1.0 - p, 0.0);
    for pauli in [GateOp::x(qubit), GateOp::y(qubit), GateOp::z(qubit)] {
        let mut conj = rho.clone();
        conj.apply(&pauli)?;
        acc += conj.matrix() * crate::sim::C64::new(p / 3.0, 0.0);
    }
    Ok(DensityMatrix::from_matrix_unchecked(acc))
}

/// Runs `circuit` on `rho` with the exact channel after every noisy location.
pub fn run_exact(
    rho: &DensityMatrix,
    circuit: &QuantumCircuit,
    model: &NoiseModel,
) -> Result<DensityMatrix> {
    model.validate()?;
    let mut out = rho.clone();
    for (i, g) in circuit.gates().iter().enumerate() {
        out.apply(g)?;
        if model.is_noisy_location(i, circuit.prep_len()) {
            for q in g.qubits() {
                out = apply_depolarizing(&out, q, model.p_depolarizing)?;
            }
        }
    }
    Ok(out)
}

/// One Monte-Carlo unraveling of `circuit` under `model`, drawn from the
/// substream `"noise"` of `seed`.
pub fn sample_noisy_circuit(
    circuit: &QuantumCircuit,
    model: &NoiseModel,
    seed: u64,
) -> Result<QuantumCircuit> {
    let mut rng = seed::substream(seed, "noise");
    sample_noisy_circuit_with(circuit, model, &mut rng)
}

pub fn sample_noisy_circuit_with(
    circuit: &QuantumCircuit,
    model: &NoiseModel,
    rng: &mut Rng,
) -> Result<QuantumCircuit> {
    model.validate()?;
    let mut out = QuantumCircuit::new(circuit.n_qubits());
    let mut prep_len = 0;
    for (i, g) in circuit.gates().iter().enumerate() {
        out.push(g.clone())?;
        if model.is_noisy_location(i, circuit.prep_len()) {
            for e in model.sample_errors(g, rng) {
                out.push(e)?;
            }
        }
        if i + 1 == circuit.prep_len() {
            prep_len = out.len();
        }
    }
    out.set_prep_len(prep_len);
    Ok(out)
}
