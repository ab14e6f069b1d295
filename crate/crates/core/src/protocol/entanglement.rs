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

//! Two-qubit concurrence and von Neumann entanglement entropy.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{QmeshError, Result};
use crate::sim::density::{hermitian_eigenvalues, hermitian_sqrt};
use crate::sim::{reduced_density, DensityMatrix, StateVector, C64};

/// Entanglement of one bipartition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub vehicle: usize,
    pub partition: String,
    pub concurrence: f64,
    pub entropy_bits: f64,
}

impl EntanglementReport {
    /// Concurrence of the pair `(q1, q2)` and entropy of `q1` against the
    /// rest of the register.
    pub fn for_pair(vehicle: usize, state: &StateVector, q1: usize, q2: usize) -> Result<Self> {
        Ok(EntanglementReport {
            vehicle,
            partition: format!("q{q1} | q{q2}"),
            concurrence: concurrence(&reduced_density(state, &[q1, q2])?)?,
            entropy_bits: entanglement_entropy(state, &[q1])?,
        })
    }
}

/// Spin flip `(Y x Y) rho* (Y x Y)`.
fn spin_flip(rho: &DMatrix<C64>) -> DMatrix<C64> {
    let y = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    );
    let yy = y.kronecker(&y);
    &yy * rho.map(|z| z.conj()) * &yy
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`, where `l_i` are the
/// square roots of the eigenvalues of `rho * rho~` in descending order.
///
/// The eigenvalues are taken from the Hermitian `sqrt(rho) rho~ sqrt(rho)`,
/// which is similar to `rho * rho~`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.n_qubits() != 2 {
        return Err(QmeshError::validation(format!(
            "concurrence needs a 2-qubit state, got {} qubits",
            rho.n_qubits()
        )));
    }
    let root = hermitian_sqrt(rho.matrix());
    let r = &root * spin_flip(rho.matrix()) * &root;
    let l: Vec<f64> = hermitian_eigenvalues(&r)
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// `-Tr(rho log2 rho)` with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&v| v > 1e-15)
        .map(|v| -v * v.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Entropy in bits of the reduced state on `subsystem`, which must be a
/// non-empty proper subset of the register.
pub fn entanglement_entropy(state: &StateVector, subsystem: &[usize]) -> Result<f64> {
    let n = state.n_qubits();
    if subsystem.is_empty() {
        return Err(QmeshError::validation("entropy subsystem is empty"));
    }
    let mut distinct = subsystem.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() >= n {
        return Err(QmeshError::validation(
            "entropy subsystem must be a proper subset of the register",
        ));
    }
    // the complement has the same spectrum; trace down to the smaller side
    let side: Vec<usize> = if 2 * distinct.len() > n {
        (0..n).filter(|q| !distinct.contains(q)).collect()
    } else {
        distinct
    };
    Ok(von_neumann_entropy(&reduced_density(state, &side)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GateOp;

    fn bell() -> StateVector {
        StateVector::new(2)
            .unwrap()
            .apply_gate(&GateOp::h(0))
            .unwrap()
            .apply_gate(&GateOp::cx(0, 1))
            .unwrap()
    }

    #[test]
    fn bell_pair_is_maximally_entangled() {
        let s = bell();
        let c = concurrence(&DensityMatrix::from_state(&s).unwrap()).unwrap();
        assert!((c - 1.0).abs() < 1e-9);
        for q in 0..2 {
            assert!((entanglement_entropy(&s, &[q]).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn product_state_has_no_entanglement() {
        let s = StateVector::basis(2, 0b10).unwrap();
        let c = concurrence(&DensityMatrix::from_state(&s).unwrap()).unwrap();
        assert!(c.abs() < 1e-9);
        assert!(entanglement_entropy(&s, &[0]).unwrap().abs() < 1e-9);
    }

    #[test]
    fn ghz_single_qubit_entropy_is_one_bit() {
        let mut s = StateVector::new(3).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::cx(0, 1)).unwrap();
        s.apply(&GateOp::cx(0, 2)).unwrap();
        for q in 0..3 {
            let rho = reduced_density(&s, &[q]).unwrap();
            assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
            assert!(rho.matrix()[(0, 1)].norm() < 1e-12);
            assert!((entanglement_entropy(&s, &[q]).unwrap() - 1.0).abs() < 1e-9);
        }
        assert!((entanglement_entropy(&s, &[0, 1]).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_subsystems() {
        let s = bell();
        assert!(entanglement_entropy(&s, &[]).is_err());
        assert!(entanglement_entropy(&s, &[0, 1]).is_err());
        assert!(entanglement_entropy(&s, &[0, 0, 1]).is_err());
        let three = StateVector::new(3).unwrap();
        assert!(concurrence(&DensityMatrix::from_state(&three).unwrap()).is_err());
    }
}
