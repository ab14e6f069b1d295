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

use super::circuit::QuantumCircuit;
use super::gate::GateOp;
use super::state::StateVector;
use crate::error::{QmeshError, Result};

/// Textbook QFT on the sub-register `qubits` (entry 0 is its least
/// significant bit), final bit reversal included:
/// `|x> -> 2^{-m/2} sum_y exp(2 pi i x y / 2^m) |y>`.
pub fn qft_circuit(n_qubits: usize, qubits: &[usize]) -> Result<QuantumCircuit> {
    check_distinct(qubits)?;
    let mut c = QuantumCircuit::new(n_qubits);
    let m = qubits.len();
    for j in (0..m).rev() {
        c.push(GateOp::h(qubits[j]))?;
        for l in (0..j).rev() {
            let angle = PI / (1u64 << (j - l)) as f64;
            c.push(GateOp::cphase(qubits[l], qubits[j], angle))?;
        }
    }
    for k in 0..m / 2 {
        let (a, b) = (qubits[k], qubits[m - 1 - k]);
        c.push(GateOp::cx(a, b))?;
        c.push(GateOp::cx(b, a))?;
        c.push(GateOp::cx(a, b))?;
    }
    Ok(c)
}

pub fn inverse_qft_circuit(n_qubits: usize, qubits: &[usize]) -> Result<QuantumCircuit> {
    Ok(qft_circuit(n_qubits, qubits)?.inverse())
}

pub fn apply_qft(mut state: StateVector, qubits: &[usize]) -> Result<StateVector> {
    let c = qft_circuit(state.n_qubits(), qubits)?;
    state.apply_circuit(&c)?;
    Ok(state)
}

pub fn apply_inverse_qft(mut state: StateVector, qubits: &[usize]) -> Result<StateVector> {
    let c = inverse_qft_circuit(state.n_qubits(), qubits)?;
    state.apply_circuit(&c)?;
    Ok(state)
}

fn check_distinct(qubits: &[usize]) -> Result<()> {
    if qubits.is_empty() {
        return Err(QmeshError::validation("QFT needs at least one qubit"));
    }
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(QmeshError::validation(format!(
                "QFT qubit {q} listed twice"
            )));
        }
    }
    Ok(())
}
