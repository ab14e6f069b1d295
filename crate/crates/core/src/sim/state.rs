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

use std::sync::OnceLock;

use rand::Rng as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::circuit::QuantumCircuit;
use super::gate::{apply_gate_to_amplitudes, GateOp, C64};
use crate::error::{QmeshError, Result};
use crate::seed::Rng;

/// Default statevector register cap.
pub const DEFAULT_MAX_QUBITS: usize = 20;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "QMESH_MAX_QUBITS";

/// Statevector cap in effect for this process (read once).
pub fn max_qubits() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_QUBITS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| (1..=30).contains(&n))
            .unwrap_or(DEFAULT_MAX_QUBITS)
    })
}

pub(crate) fn check_capacity(n_qubits: usize, limit: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > limit {
        return Err(QmeshError::Capacity {
            requested: n_qubits,
            limit,
        });
    }
    Ok(())
}

/// Pure state of an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits, max_qubits())?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::new(n_qubits)?;
        if index >= s.amps.len() {
            return Err(QmeshError::validation(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wraps raw amplitudes; the length must be a power of two and the norm 1
    /// within 1e-10.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QmeshError::validation(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_capacity(n_qubits, max_qubits())?;
        let s = StateVector { n_qubits, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(QmeshError::validation(format!(
                "amplitudes have squared norm {norm}, expected 1"
            )));
        }
        Ok(s)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(QmeshError::validation("cannot normalize a zero vector"));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(QmeshError::validation(format!(
                "inner product of {}- and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ high`: the qubits of `self` keep their indices, `high`'s qubits
    /// are appended above them.
    pub fn tensor(&self, high: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + high.n_qubits;
        check_capacity(n, max_qubits())?;
        let mut amps = Vec::with_capacity(1 << n);
        for h in &high.amps {
            for l in &self.amps {
                amps.push(l * h);
            }
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        apply_gate_to_amplitudes(&mut self.amps, gate);
        Ok(())
    }

    /// Consuming form of [`apply`](Self::apply).
    pub fn apply_gate(mut self, gate: &GateOp) -> Result<StateVector> {
        self.apply(gate)?;
        Ok(self)
    }

    pub fn apply_circuit(&mut self, circuit: &QuantumCircuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(QmeshError::validation(format!(
                "{}-qubit circuit applied to a {}-qubit state",
                circuit.n_qubits(),
                self.n_qubits
            )));
        }
        // gates were validated when pushed onto the circuit
        for g in circuit.gates() {
            apply_gate_to_amplitudes(&mut self.amps, g);
        }
        Ok(())
    }

    /// Probability that `qubit` reads 1 in the Z basis.
    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(QmeshError::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let bit = 1 << qubit;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects `qubit` onto `outcome` and renormalizes. Returns the
    /// probability the outcome had.
    pub fn collapse(&mut self, qubit: usize, outcome: u8) -> Result<f64> {
        let p1 = self.prob_one(qubit)?;
        let p = if outcome == 1 { p1 } else { 1.0 - p1 };
        if p <= 1e-15 {
            return Err(QmeshError::validation(format!(
                "outcome {outcome} on qubit {qubit} has zero probability"
            )));
        }
        let bit = 1 << qubit;
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit != 0) as u8) == outcome {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        Ok(p)
    }

    /// Z-basis mid-circuit measurement of one qubit, sampled by the Born rule.
    pub fn measure_qubit(&mut self, qubit: usize, rng: &mut Rng) -> Result<u8> {
        let p1 = self.prob_one(qubit)?;
        let outcome = u8::from(rng.random::<f64>() < p1);
        self.collapse(qubit, outcome)?;
        Ok(outcome)
    }

    /// Single-qubit statevector of `qubit`, valid when that qubit is in a
    /// product state with the rest of the register (e.g. after the others
    /// were measured). Returns `None` if it is entangled.
    pub fn extract_qubit(&self, qubit: usize) -> Result<Option<StateVector>> {
        let rho = super::density::reduced_density(self, &[qubit])?;
        let eig = rho.eigenvalues();
        if eig.iter().cloned().fold(f64::MIN, f64::max) < 1.0 - 1e-9 {
            return Ok(None);
        }
        // pick the row with the larger diagonal weight: rho = |v><v|
        let m = rho.matrix();
        let pivot = if m[(0, 0)].re >= m[(1, 1)].re { 0 } else { 1 };
        let scale = m[(pivot, pivot)].re.sqrt();
        let amps = vec![m[(0, pivot)] / scale, m[(1, pivot)] / scale];
        StateVector::normalized(amps).map(Some)
    }

    /// Largest deviation from unit norm.
    pub fn norm_error(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }
}

#[derive(Serialize, Deserialize)]
struct StateDump {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateDump {
            n_qubits: self.n_qubits,
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dump = StateDump::deserialize(deserializer)?;
        let amps: Vec<C64> = dump
            .amplitudes
            .iter()
            .map(|[re, im]| C64::new(*re, *im))
            .collect();
        if amps.len() != 1 << dump.n_qubits {
            return Err(serde::de::Error::custom(
                "amplitude count does not match n_qubits",
            ));
        }
        StateVector::from_amplitudes(amps).map_err(serde::de::Error::custom)
    }
}
