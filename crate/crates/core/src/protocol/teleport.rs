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

//! Bell preparation, teleportation with Pauli corrections, and phase
//! estimation on a shared statevector.

use std::f64::consts::PI;

use log::warn;

use super::entanglement::concurrence;
use crate::error::{QmeshError, Result};
use crate::noise::NoiseModel;
use crate::seed::Rng;
use crate::sim::{inverse_qft_circuit, reduced_density, DensityMatrix, GateOp, StateVector};

/// Applies gates, inserting sampled Pauli errors after noisy locations.
/// The same generator draws mid-circuit measurement outcomes.
pub(crate) struct Executor<'r> {
    pub noise: NoiseModel,
    pub rng: &'r mut Rng,
}

impl<'r> Executor<'r> {
    pub fn noiseless(rng: &'r mut Rng) -> Self {
        Executor {
            noise: NoiseModel::noiseless(),
            rng,
        }
    }

    /// `prep` marks state-preparation gates for the encoding-only policy.
    pub fn gate(&mut self, state: &mut StateVector, gate: &GateOp, prep: bool) -> Result<()> {
        state.apply(gate)?;
        let index = if prep { 0 } else { 1 };
        if self.noise.is_noisy_location(index, 1) {
            for e in self.noise.sample_errors(gate, self.rng) {
                state.apply(&e)?;
            }
        }
        Ok(())
    }
}

/// `|00> -> (|00> + |11>)/sqrt(2)`: H on `q1`, then CX(`q1` -> `q2`).
pub fn prepare_bell(state: &mut StateVector, q1: usize, q2: usize) -> Result<()> {
    if q1 == q2 {
        return Err(QmeshError::validation(
            "Bell pair needs two distinct qubits",
        ));
    }
    if cfg!(debug_assertions) {
        for q in [q1, q2] {
            if state.prob_one(q)? > 1e-12 {
                return Err(QmeshError::validation(format!(
                    "Bell preparation expects qubit {q} in |0>"
                )));
            }
        }
    }
    state.apply(&GateOp::h(q1))?;
    state.apply(&GateOp::cx(q1, q2))
}

pub(crate) fn prepare_bell_with(
    exec: &mut Executor,
    state: &mut StateVector,
    q1: usize,
    q2: usize,
) -> Result<()> {
    exec.gate(state, &GateOp::h(q1), true)?;
    exec.gate(state, &GateOp::cx(q1, q2), true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportResult {
    /// `(a, b)`: `a` from the first Bell-pair qubit, `b` from the message.
    pub classical_bits: (u8, u8),
    /// Reduced state of the receiving qubit.
    pub output_state: DensityMatrix,
    /// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` between the
    /// message's reduced state before and the receiver's after; equals
    /// `<psi| sigma |psi>` for a pure message.
    pub fidelity_vs_input: f64,
}

impl TeleportResult {
    /// Receiver state as a statevector, when it is pure.
    pub fn output_pure(&self) -> Option<StateVector> {
        let m = self.output_state.matrix();
        let purity = self.output_state.eigenvalues()[0];
        if purity < 1.0 - 1e-9 {
            return None;
        }
        let pivot = if m[(0, 0)].re >= m[(1, 1)].re { 0 } else { 1 };
        let scale = m[(pivot, pivot)].re.sqrt();
        StateVector::normalized(vec![m[(0, pivot)] / scale, m[(1, pivot)] / scale]).ok()
    }
}

/// Which branch the Bell measurement takes.
enum Outcomes {
    Sampled,
    Forced(u8, u8),
}

/// Teleports `message` onto `pair.1`: CX(message -> pair.0), H(message),
/// measure `pair.0` -> `a` and `message` -> `b`, then X^a and Z^b on `pair.1`.
/// Outcomes follow the Born rule drawn from `rng`.
pub fn teleport(
    state: &mut StateVector,
    message: usize,
    pair: (usize, usize),
    rng: &mut Rng,
) -> Result<TeleportResult> {
    check_pair(state, message, pair)?;
    teleport_inner(
        &mut Executor::noiseless(rng),
        state,
        message,
        pair,
        Outcomes::Sampled,
    )
}

/// Teleportation conditioned on a chosen measurement branch `(a, b)`.
/// Fails if that branch has zero probability.
pub fn teleport_branch(
    state: &mut StateVector,
    message: usize,
    pair: (usize, usize),
    bits: (u8, u8),
) -> Result<TeleportResult> {
    check_pair(state, message, pair)?;
    let mut unused = crate::seed::substream(0, "unused");
    teleport_inner(
        &mut Executor::noiseless(&mut unused),
        state,
        message,
        pair,
        Outcomes::Forced(bits.0, bits.1),
    )
}

pub(crate) fn teleport_with(
    exec: &mut Executor,
    state: &mut StateVector,
    message: usize,
    pair: (usize, usize),
) -> Result<TeleportResult> {
    teleport_inner(exec, state, message, pair, Outcomes::Sampled)
}

fn check_pair(state: &StateVector, message: usize, pair: (usize, usize)) -> Result<()> {
    let (b1, b2) = pair;
    if message == b1 || message == b2 || b1 == b2 {
        return Err(QmeshError::validation(
            "teleportation needs three distinct qubits",
        ));
    }
    if cfg!(debug_assertions) {
        let c = concurrence(&reduced_density(state, &[b1, b2])?)?;
        if c < 0.99 {
            warn!("teleporting through a pair with concurrence {c:.3}");
        }
    }
    Ok(())
}

fn teleport_inner(
    exec: &mut Executor,
    state: &mut StateVector,
    message: usize,
    (b1, b2): (usize, usize),
    outcomes: Outcomes,
) -> Result<TeleportResult> {
    let before = reduced_density(state, &[message])?;
    exec.gate(state, &GateOp::cx(message, b1), false)?;
    exec.gate(state, &GateOp::h(message), false)?;
    let (a, b) = match outcomes {
        Outcomes::Sampled => {
            let a = state.measure_qubit(b1, exec.rng)?;
            let b = state.measure_qubit(message, exec.rng)?;
            (a, b)
        }
        Outcomes::Forced(a, b) => {
            for (q, bit) in [(b1, a), (message, b)] {
                let p = state.collapse(q, bit)?;
                if p < 1e-12 {
                    return Err(QmeshError::validation(format!(
                        "measurement branch ({a}, {b}) has zero probability"
                    )));
                }
            }
            (a, b)
        }
    };
    if a == 1 {
        exec.gate(state, &GateOp::x(b2), false)?;
    }
    if b == 1 {
        exec.gate(state, &GateOp::z(b2), false)?;
    }
    let output_state = reduced_density(state, &[b2])?;
    let fidelity_vs_input = before.uhlmann_fidelity(&output_state)?;
    Ok(TeleportResult {
        classical_bits: (a, b),
        output_state,
        fidelity_vs_input,
    })
}

/// Phase estimation of `diag(1, e^{i phase})` acting on `target`.
///
/// `ancillas[k]` carries bit k of the estimate: H on every ancilla,
/// controlled phase `2^k * phase` from `ancillas[k]`, then the inverse QFT.
/// Reading the ancillas gives the nearest `t`-bit value of `phase / 2 pi`.
pub fn qpe(state: &mut StateVector, ancillas: &[usize], target: usize, phase: f64) -> Result<()> {
    let mut unused = crate::seed::substream(0, "unused");
    qpe_with(
        &mut Executor::noiseless(&mut unused),
        state,
        ancillas,
        target,
        phase,
    )
}

pub(crate) fn qpe_with(
    exec: &mut Executor,
    state: &mut StateVector,
    ancillas: &[usize],
    target: usize,
    phase: f64,
) -> Result<()> {
    if ancillas.is_empty() {
        warn!("phase estimation with no ancillas: skipped");
        return Ok(());
    }
    if ancillas.contains(&target) {
        return Err(QmeshError::validation(
            "QPE target cannot be one of its ancillas",
        ));
    }
    for &a in ancillas {
        exec.gate(state, &GateOp::h(a), false)?;
    }
    for (k, &a) in ancillas.iter().enumerate() {
        let angle = (phase * (1u64 << k) as f64).rem_euclid(2.0 * PI);
        exec.gate(state, &GateOp::cphase(a, target, angle), false)?;
    }
    for g in inverse_qft_circuit(state.n_qubits(), ancillas)?.gates() {
        exec.gate(state, g, false)?;
    }
    Ok(())
}

/// Probability of each ancilla readout value (bit k from `ancillas[k]`).
pub fn ancilla_distribution(state: &StateVector, ancillas: &[usize]) -> Result<Vec<f64>> {
    for &a in ancillas {
        if a >= state.n_qubits() {
            return Err(QmeshError::QubitIndex {
                index: a,
                n_qubits: state.n_qubits(),
            });
        }
    }
    let mut out = vec![0.0; 1 << ancillas.len()];
    for (i, p) in state.probabilities().into_iter().enumerate() {
        let v = ancillas
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &a)| acc | (((i >> a) & 1) << k));
        out[v] += p;
    }
    Ok(out)
}
