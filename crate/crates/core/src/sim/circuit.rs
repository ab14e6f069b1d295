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

use super::gate::GateOp;
use crate::error::{QmeshError, Result};

/// Ordered gate program on a fixed-size register.
///
/// `prep_len` marks how many leading gates form the state-preparation
/// (encoding) block; noise policies that only corrupt encoding use it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumCircuit {
    n_qubits: usize,
    gates: Vec<GateOp>,
    #[serde(default)]
    prep_len: usize,
}

impl QuantumCircuit {
    pub fn new(n_qubits: usize) -> Self {
        QuantumCircuit {
            n_qubits,
            gates: Vec::new(),
            prep_len: 0,
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<GateOp>) -> Result<Self> {
        let mut c = QuantumCircuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn prep_len(&self) -> usize {
        self.prep_len
    }

    /// Marks every gate currently in the circuit as preparation.
    pub fn mark_all_as_prep(&mut self) {
        self.prep_len = self.gates.len();
    }

    pub(crate) fn set_prep_len(&mut self, prep_len: usize) {
        self.prep_len = prep_len.min(self.gates.len());
    }

    pub fn push(&mut self, gate: GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other`'s gates. The preparation block of `self` is kept; if
    /// `self` was entirely preparation, `other`'s block extends it.
    pub fn append(&mut self, other: &QuantumCircuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(QmeshError::validation(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        if self.prep_len == self.gates.len() {
            self.prep_len += other.prep_len;
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Circuit implementing the adjoint unitary.
    pub fn inverse(&self) -> QuantumCircuit {
        QuantumCircuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().flat_map(|g| g.inverse()).collect(),
            prep_len: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_validates() {
        let mut c = QuantumCircuit::new(2);
        assert!(c.push(GateOp::cx(0, 1)).is_ok());
        assert!(c.push(GateOp::h(2)).is_err());
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn append_extends_prep_block() {
        let mut a = QuantumCircuit::from_gates(2, vec![GateOp::h(0)]).unwrap();
        a.mark_all_as_prep();
        let mut b = QuantumCircuit::from_gates(2, vec![GateOp::h(1)]).unwrap();
        b.mark_all_as_prep();
        a.append(&b).unwrap();
        assert_eq!(a.prep_len(), 2);
        let c = QuantumCircuit::from_gates(2, vec![GateOp::x(1)]).unwrap();
        a.append(&c).unwrap();
        assert_eq!(a.prep_len(), 2);
        assert_eq!(a.len(), 3);
    }
}
