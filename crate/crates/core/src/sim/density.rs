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

//! Mixed states, partial traces and fidelities.

use nalgebra::{DMatrix, SymmetricEigen};

use super::gate::{apply_gate_to_amplitudes, GateOp, C64};
use super::state::{check_capacity, StateVector};
use crate::error::{QmeshError, Result};

/// Density-matrix register cap.
pub const MAX_DENSITY_QUBITS: usize = 10;

/// Hermitian, unit-trace, positive semidefinite operator on n qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    m: DMatrix<C64>,
}

impl DensityMatrix {
    /// `|psi><psi|`
    pub fn from_state(state: &StateVector) -> Result<Self> {
        check_capacity(state.n_qubits(), MAX_DENSITY_QUBITS)?;
        let a = state.amplitudes();
        let dim = a.len();
        let m = DMatrix::from_fn(dim, dim, |j, k| a[j] * a[k].conj());
        Ok(DensityMatrix {
            n_qubits: state.n_qubits(),
            m,
        })
    }

    /// `I / 2^n`
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits, MAX_DENSITY_QUBITS)?;
        let dim = 1usize << n_qubits;
        Ok(DensityMatrix {
            n_qubits,
            m: DMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0),
        })
    }

    /// Validates Hermiticity, unit trace and positivity (tolerances 1e-10,
    /// 1e-10 and -1e-9).
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(QmeshError::validation(format!(
                "density matrix must be square with power-of-two size, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_capacity(n_qubits, MAX_DENSITY_QUBITS)?;
        let rho = DensityMatrix { n_qubits, m };
        rho.check_valid(1e-10)?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        let n_qubits = m.nrows().trailing_zeros() as usize;
        DensityMatrix { n_qubits, m }
    }

    /// Checks the three density-matrix invariants at tolerance `tol`.
    pub fn check_valid(&self, tol: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(QmeshError::validation(format!(
                "matrix is not Hermitian (max deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(QmeshError::validation(format!("trace is {tr}, expected 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-9 {
            return Err(QmeshError::validation(format!(
                "matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.m[(r, c)] - self.m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in descending order (Hermitian part).
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    /// `U rho U^dagger` for one gate.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let dim = self.dim();
        // columns of rho -> U rho
        let mut work = vec![C64::new(0.0, 0.0); dim];
        for col in 0..dim {
            work.copy_from_slice(self.m.column(col).as_slice());
            apply_gate_to_amplitudes(&mut work, gate);
            self.m.column_mut(col).copy_from_slice(&work);
        }
        // (U rho)^dagger = rho U^dagger; apply U again to its columns
        self.m.adjoint_mut();
        for col in 0..dim {
            work.copy_from_slice(self.m.column(col).as_slice());
            apply_gate_to_amplitudes(&mut work, gate);
            self.m.column_mut(col).copy_from_slice(&work);
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &super::circuit::QuantumCircuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(QmeshError::validation(
                "circuit and density matrix sizes differ",
            ));
        }
        for g in circuit.gates() {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Z-basis outcome probabilities (the diagonal).
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.m[(i, i)].re.max(0.0))
            .collect()
    }

    /// Reduced state on `keep`. Kept qubits are renumbered in ascending
    /// order of their original index.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = normalize_keep(keep, self.n_qubits)?;
        let (keep_off, env_off) = offsets(&keep, self.n_qubits);
        let kd = keep_off.len();
        let mut out = DMatrix::zeros(kd, kd);
        for (r, &ro) in keep_off.iter().enumerate() {
            for (c, &co) in keep_off.iter().enumerate() {
                out[(r, c)] = env_off.iter().map(|&e| self.m[(ro | e, co | e)]).sum();
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    /// Convex mixture `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<DensityMatrix> {
        if self.n_qubits != other.n_qubits {
            return Err(QmeshError::validation(
                "cannot mix states of different sizes",
            ));
        }
        Ok(DensityMatrix::from_matrix_unchecked(
            &self.m * C64::new(w, 0.0) + &other.m * C64::new(1.0 - w, 0.0),
        ))
    }

    /// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`; reduces to
    /// `|<a|b>|^2` on pure states.
    pub fn uhlmann_fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(QmeshError::validation(
                "fidelity of states of different sizes",
            ));
        }
        let root = hermitian_sqrt(&self.m);
        let inner = &root * &other.m * &root;
        let tr: f64 = hermitian_eigenvalues(&inner)
            .into_iter()
            .map(|v| v.max(0.0).sqrt())
            .sum();
        Ok((tr * tr).clamp(0.0, 1.0))
    }
}

/// Reduced density matrix of a pure state on `keep`, without forming the full
/// `2^n x 2^n` matrix.
pub fn reduced_density(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = normalize_keep(keep, state.n_qubits())?;
    check_capacity(keep.len(), MAX_DENSITY_QUBITS)?;
    let (keep_off, env_off) = offsets(&keep, state.n_qubits());
    let a = state.amplitudes();
    let kd = keep_off.len();
    let mut out = DMatrix::zeros(kd, kd);
    for &e in &env_off {
        for (r, &ro) in keep_off.iter().enumerate() {
            let ar = a[ro | e];
            if ar.norm_sqr() == 0.0 {
                continue;
            }
            for (c, &co) in keep_off.iter().enumerate() {
                out[(r, c)] += ar * a[co | e].conj();
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Square-root fidelity `sqrt(<psi| rho |psi>)`.
pub fn fidelity(pure: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if pure.n_qubits() != rho.n_qubits() {
        return Err(QmeshError::validation(format!(
            "fidelity of a {}-qubit state against a {}-qubit density matrix",
            pure.n_qubits(),
            rho.n_qubits()
        )));
    }
    let a = pure.amplitudes();
    let m = rho.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for (j, aj) in a.iter().enumerate() {
        for (k, ak) in a.iter().enumerate() {
            acc += aj.conj() * m[(j, k)] * ak;
        }
    }
    Ok(acc.re.clamp(0.0, 1.0).sqrt())
}

/// Squared overlap `|<a|b>|^2` between pure states.
pub fn pure_fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut vals: Vec<f64> = SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

pub(crate) fn hermitian_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0)));
    v * d * v.adjoint()
}

fn normalize_keep(keep: &[usize], n_qubits: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(QmeshError::validation(
            "partial trace needs a non-empty keep set",
        ));
    }
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.len() != keep.len() {
        return Err(QmeshError::validation("keep set contains duplicate qubits"));
    }
    if let Some(&q) = k.iter().find(|&&q| q >= n_qubits) {
        return Err(QmeshError::QubitIndex { index: q, n_qubits });
    }
    Ok(k)
}

/// Full-register index offsets for every assignment of the kept qubits and of
/// the traced-out qubits.
fn offsets(keep: &[usize], n_qubits: usize) -> (Vec<usize>, Vec<usize>) {
    let env: Vec<usize> = (0..n_qubits).filter(|q| !keep.contains(q)).collect();
    let spread = |qubits: &[usize]| -> Vec<usize> {
        (0..1usize << qubits.len())
            .map(|s| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| s >> bit & 1 == 1)
                    .fold(0, |acc, (_, &q)| acc | (1 << q))
            })
            .collect()
    };
    (spread(keep), spread(&env))
}
