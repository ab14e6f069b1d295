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

//! Multi-vehicle entanglement protocol: per round, Bell preparation and a
//! one-qubit QFT per vehicle, Toffoli coupling (optionally with phase
//! estimation) per ordered vehicle pair, then teleportation inside each
//! vehicle. Vehicle `i` owns qubits `3i, 3i+1, 3i+2`.

mod entanglement;
mod teleport;

use std::f64::consts::FRAC_PI_2;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use entanglement::{
    concurrence, entanglement_entropy, von_neumann_entropy, EntanglementReport,
};
pub use teleport::{
    ancilla_distribution, prepare_bell, qpe, teleport, teleport_branch, TeleportResult,
};

use crate::error::{QmeshError, Result};
use crate::noise::NoiseModel;
use crate::seed::{self, Rng};
use crate::sim::{
    max_qubits, measure::sample_once, reduced_density, Basis, DensityMatrix, GateOp,
    MeasurementHistogram, StateVector, C64,
};
use teleport::{prepare_bell_with, qpe_with, teleport_with, Executor};

/// Qubits owned by each vehicle.
pub const QUBITS_PER_VEHICLE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolConfig {
    pub n_vehicles: usize,
    pub rounds: usize,
    /// Phase-estimation ancillas appended after the vehicle registers;
    /// 0 skips the QPE step.
    pub qpe_ancillas: usize,
    /// Phase of `diag(1, e^{i phase})` estimated in the coupling stage.
    pub qpe_phase: f64,
    pub noise: NoiseModel,
    /// Trajectories; each yields one sample per basis.
    pub shots: u64,
    pub seed: u64,
    /// Start every round from `|0...0>` instead of carrying the register over.
    pub reset_per_round: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            n_vehicles: 2,
            rounds: 1,
            qpe_ancillas: 0,
            qpe_phase: FRAC_PI_2,
            noise: NoiseModel::noiseless(),
            shots: 1024,
            seed: 0,
            reset_per_round: false,
        }
    }
}

impl ProtocolConfig {
    pub fn n_qubits(&self) -> usize {
        QUBITS_PER_VEHICLE * self.n_vehicles + self.qpe_ancillas
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_vehicles == 0 {
            return Err(QmeshError::validation(
                "protocol needs at least one vehicle",
            ));
        }
        if self.rounds == 0 {
            return Err(QmeshError::validation("protocol needs at least one round"));
        }
        if self.shots == 0 {
            return Err(QmeshError::validation("shots must be at least 1"));
        }
        if !self.qpe_phase.is_finite() {
            return Err(QmeshError::validation("QPE phase must be finite"));
        }
        self.noise.validate()?;
        let limit = max_qubits();
        if self.n_qubits() > limit {
            return Err(QmeshError::Capacity {
                requested: self.n_qubits(),
                limit,
            });
        }
        Ok(())
    }

    /// Ordered vehicle pairs: every `(i, j)` with `i < j` ascending, then
    /// every `(j, i)` in the same order.
    pub fn vehicle_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_vehicles;
        let forward: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let reverse = forward.iter().map(|&(i, j)| (j, i));
        forward.iter().copied().chain(reverse).collect()
    }
}

/// Histograms in Z, X, Y order plus per-vehicle diagnostics averaged over
/// trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub config: ProtocolConfig,
    pub histograms: Vec<MeasurementHistogram>,
    /// Per vehicle, mean over trajectories and rounds.
    pub teleport_fidelities: Vec<f64>,
    /// Per vehicle, first-round Bell pair right after preparation:
    /// concurrence of the trajectory-averaged pair state, and the mean
    /// per-trajectory entropy of the first qubit.
    pub entanglement: Vec<EntanglementReport>,
}

impl ProtocolReport {
    pub fn histogram(&self, basis: Basis) -> &MeasurementHistogram {
        self.histograms
            .iter()
            .find(|h| h.basis == basis)
            .expect("report holds every basis")
    }

    pub fn to_json(&self) -> Value {
        let mut hists = serde_json::Map::new();
        for h in &self.histograms {
            hists.insert(
                h.basis.to_string(),
                serde_json::to_value(h).expect("histogram serializes"),
            );
        }
        json!({
            "config": self.config,
            "histograms": hists,
            "teleport_fidelities": self.teleport_fidelities,
            "entanglement": self.entanglement,
        })
    }
}

/// Runs `config.shots` independent trajectories, trajectory `t` drawing
/// noise and mid-circuit outcomes from substream `("trajectory", t)`.
pub fn run_protocol(config: &ProtocolConfig) -> Result<ProtocolReport> {
    config.validate()?;
    let n = config.n_vehicles;
    let nq = config.n_qubits();
    let mut histograms: Vec<MeasurementHistogram> = Basis::ALL
        .iter()
        .map(|&b| MeasurementHistogram::empty(b, nq))
        .collect();
    let mut fid = vec![0.0; n];
    let mut pair_rho: Vec<Option<DensityMatrix>> = vec![None; n];
    let mut ent = vec![0.0; n];

    for t in 0..config.shots {
        let mut rng = seed::indexed_substream(config.seed, "trajectory", t);
        let mut exec = Executor {
            noise: config.noise,
            rng: &mut rng,
        };
        let weight = 1.0 / (t + 1) as f64;
        let state = run_trajectory(
            config,
            &mut exec,
            |i, s| {
                let (a, b) = (3 * i, 3 * i + 1);
                let rho = reduced_density(s, &[a, b])?;
                // running mean keeps the matrix normalized
                pair_rho[i] = Some(match pair_rho[i].take() {
                    None => rho,
                    Some(acc) => rho.mix(&acc, weight)?,
                });
                ent[i] += entanglement_entropy(s, &[a])?;
                Ok(())
            },
            |i, f| fid[i] += f,
        )?;
        for h in histograms.iter_mut() {
            let idx = sample_once(&state, h.basis, exec.rng)?;
            h.record(idx);
        }
    }

    let shots = config.shots as f64;
    let per_vehicle_fid = fid
        .iter()
        .map(|f| f / (shots * config.rounds as f64))
        .collect();
    let entanglement = pair_rho
        .iter()
        .enumerate()
        .map(|(i, rho)| {
            Ok(EntanglementReport {
                vehicle: i,
                partition: format!("q{} | q{}", 3 * i, 3 * i + 1),
                concurrence: concurrence(rho.as_ref().expect("at least one trajectory"))?,
                entropy_bits: ent[i] / shots,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProtocolReport {
        config: *config,
        histograms,
        teleport_fidelities: per_vehicle_fid,
        entanglement,
    })
}

fn run_trajectory(
    config: &ProtocolConfig,
    exec: &mut Executor,
    mut on_bell: impl FnMut(usize, &StateVector) -> Result<()>,
    mut on_teleport: impl FnMut(usize, f64),
) -> Result<StateVector> {
    let n = config.n_vehicles;
    let nq = config.n_qubits();
    let ancillas: Vec<usize> = (3 * n..nq).collect();
    let pairs = config.vehicle_pairs();
    let mut state = StateVector::new(nq)?;

    for round in 0..config.rounds {
        if round > 0 && config.reset_per_round {
            state = StateVector::new(nq)?;
        }
        for i in 0..n {
            prepare_bell_with(exec, &mut state, 3 * i, 3 * i + 1)?;
            // one-qubit QFT
            exec.gate(&mut state, &GateOp::h(3 * i + 2), true)?;
        }
        if round == 0 {
            for i in 0..n {
                on_bell(i, &state)?;
            }
        }
        for &(i, j) in &pairs {
            exec.gate(
                &mut state,
                &GateOp::toffoli(3 * i + 1, 3 * j + 1, 3 * i + 2),
                false,
            )?;
            if !ancillas.is_empty() {
                qpe_with(exec, &mut state, &ancillas, 3 * i + 2, config.qpe_phase)?;
            }
        }
        for i in 0..n {
            let r = teleport_with(exec, &mut state, 3 * i, (3 * i + 1, 3 * i + 2))?;
            on_teleport(i, r.fidelity_vs_input);
        }
    }
    Ok(state)
}

/// Haar-random single-qubit state.
pub fn random_qubit(rng: &mut Rng) -> StateVector {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let amps = vec![C64::new(v[0], v[1]), C64::new(v[2], v[3])];
        if let Ok(s) = StateVector::normalized(amps) {
            return s;
        }
    }
}

/// Mean fidelity of teleporting Haar-random messages when Bell preparation
/// and teleportation gates suffer `noise`. Trajectory `t` uses substream
/// `("teleport-noise", t)`.
pub fn teleport_fidelity_under_noise(
    noise: &NoiseModel,
    trajectories: usize,
    seed: u64,
) -> Result<f64> {
    noise.validate()?;
    if trajectories == 0 {
        return Err(QmeshError::validation("need at least one trajectory"));
    }
    let mut total = 0.0;
    for t in 0..trajectories {
        let mut rng = seed::indexed_substream(seed, "teleport-noise", t as u64);
        let message = random_qubit(&mut rng);
        let mut state = message.tensor(&StateVector::new(2)?)?;
        let mut exec = Executor {
            noise: *noise,
            rng: &mut rng,
        };
        prepare_bell_with(&mut exec, &mut state, 1, 2)?;
        total += teleport_with(&mut exec, &mut state, 0, (1, 2))?.fidelity_vs_input;
    }
    Ok(total / trajectories as f64)
}
