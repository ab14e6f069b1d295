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

//! Fidelity cost, gradients and the decaying-step optimizer.
//!
//! Cost: `C(theta) = sum_i (1 - F_i)^2` with `F_i = |<target_i| U(theta) |lambda_i>|^2`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::model::VqcModel;
use crate::data::GasLabel;
use crate::encoding::encode;
use crate::error::{QmeshError, Result};
use crate::sim::{GateOp, QuantumCircuit, StateVector};

/// Central-difference step of [`GradientMode::FiniteDifference`].
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    ParameterShift,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Initial learning rate; step k uses `eta / sqrt(k + 1)`.
    pub eta: f64,
    /// Stop once `|C_k - C_{k-1}| <= epsilon`.
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Parameter-shift half-angle.
    pub shift: f64,
    pub gradient_mode: GradientMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            eta: 0.1,
            epsilon: 1e-7,
            max_iters: 200,
            seed: 0,
            shift: FRAC_PI_2,
            gradient_mode: GradientMode::ParameterShift,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(QmeshError::validation(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(QmeshError::validation(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(QmeshError::validation("max_iters must be at least 1"));
        }
        if self.gradient_mode == GradientMode::ParameterShift && self.shift.sin().abs() < 1e-12 {
            return Err(QmeshError::validation(
                "parameter shift must not be a multiple of pi",
            ));
        }
        Ok(())
    }

    /// Learning rate of step `k`.
    pub fn eta_at(&self, k: usize) -> f64 {
        self.eta / ((k + 1) as f64).sqrt()
    }
}

/// Encoded training samples: the feature map does not depend on the trainable
/// parameters, so states are prepared once.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub states: Vec<StateVector>,
    pub targets: Vec<usize>,
}

impl PreparedData {
    /// `rows` must already be normalized.
    pub fn new(model: &VqcModel, rows: &[(Vec<f64>, GasLabel)]) -> Result<Self> {
        if rows.is_empty() {
            return Err(QmeshError::validation("training data is empty"));
        }
        let proj = model.projectors()?;
        let mut states = Vec::with_capacity(rows.len());
        let mut targets = Vec::with_capacity(rows.len());
        for (row, label) in rows {
            targets.push(proj.target_index(model.class_index(label)?));
            states.push(encode(row, &model.encoder)?);
        }
        Ok(PreparedData { states, targets })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

fn target_fidelity(state: &StateVector, target: usize) -> f64 {
    state.amplitudes()[target].norm_sqr()
}

/// Per-sample fidelities at the model's current parameters.
pub fn fidelities(model: &VqcModel, data: &PreparedData) -> Result<Vec<f64>> {
    let ansatz = model.ansatz()?;
    data.states
        .iter()
        .zip(&data.targets)
        .map(|(s, &t)| {
            let mut out = s.clone();
            out.apply_circuit(&ansatz)?;
            Ok(target_fidelity(&out, t))
        })
        .collect()
}

/// Sum of `(1 - F)^2`, accumulated in sample order.
pub fn cost_prepared(model: &VqcModel, data: &PreparedData) -> Result<f64> {
    Ok(fidelities(model, data)?
        .into_iter()
        .map(|f| (1.0 - f).powi(2))
        .sum())
}

/// Exact cost over normalized rows.
pub fn cost(model: &VqcModel, rows: &[(Vec<f64>, GasLabel)]) -> Result<f64> {
    cost_prepared(model, &PreparedData::new(model, rows)?)
}

/// Parameter-shift gradient. `eval_shift` is where the circuit is evaluated,
/// `assumed_shift` the shift the `2 sin(s)` denominator is built from; they
/// are equal except in deliberate negative tests.
pub fn parameter_shift_gradient(
    model: &VqcModel,
    data: &PreparedData,
    eval_shift: f64,
    assumed_shift: f64,
) -> Result<Vec<f64>> {
    let ansatz = model.ansatz()?;
    let slots = param_gate_indices(&ansatz, model.params.len());
    let denom = 2.0 * assumed_shift.sin();
    let mut grad = vec![0.0; model.params.len()];
    let gates = ansatz.gates();

    for (input, &target) in data.states.iter().zip(&data.targets) {
        let mut forward = input.clone();
        forward.apply_circuit(&ansatz)?;
        let outer = -2.0 * (1.0 - target_fidelity(&forward, target));

        // prefix advances gate by gate so each parameter restarts from the
        // state just before its own gate
        let mut prefix = input.clone();
        let mut applied = 0;
        for (j, slot) in slots.iter().enumerate() {
            let Some(g) = *slot else { continue };
            while applied < g {
                prefix.apply(&gates[applied])?;
                applied += 1;
            }
            let mut shifted = [0.0; 2];
            for (sign, value) in [1.0, -1.0].iter().zip(shifted.iter_mut()) {
                let mut s = prefix.clone();
                let gate = &gates[g];
                let angle = gate.kind.angle().unwrap_or(0.0) + sign * eval_shift;
                s.apply(&GateOp::new(
                    gate.kind.with_angle(angle),
                    gate.targets.clone(),
                    gate.controls.clone(),
                ))?;
                for rest in &gates[g + 1..] {
                    s.apply(rest)?;
                }
                *value = target_fidelity(&s, target);
            }
            grad[j] += outer * (shifted[0] - shifted[1]) / denom;
        }
    }
    Ok(grad)
}

/// Central finite differences of the total cost with step [`FD_STEP`].
pub fn finite_difference_gradient(model: &VqcModel, data: &PreparedData) -> Result<Vec<f64>> {
    let mut probe = model.clone();
    let mut grad = vec![0.0; model.params.len()];
    for (j, g) in grad.iter_mut().enumerate() {
        let base = model.params[j];
        probe.params[j] = base + FD_STEP;
        let plus = cost_prepared(&probe, data)?;
        probe.params[j] = base - FD_STEP;
        let minus = cost_prepared(&probe, data)?;
        probe.params[j] = base;
        *g = (plus - minus) / (2.0 * FD_STEP);
    }
    Ok(grad)
}

pub fn gradient_prepared(
    model: &VqcModel,
    data: &PreparedData,
    config: &TrainConfig,
) -> Result<Vec<f64>> {
    match config.gradient_mode {
        GradientMode::ParameterShift => {
            parameter_shift_gradient(model, data, config.shift, config.shift)
        }
        GradientMode::FiniteDifference => finite_difference_gradient(model, data),
    }
}

/// dC/dtheta_j for every ansatz parameter, over normalized rows.
pub fn gradient(
    model: &VqcModel,
    rows: &[(Vec<f64>, GasLabel)],
    config: &TrainConfig,
) -> Result<Vec<f64>> {
    gradient_prepared(model, &PreparedData::new(model, rows)?, config)
}

/// Gate index carrying each parameter. The ansatz emits angled gates in
/// parameter order; unused parameters (single-qubit CPHASE slots) map to None.
fn param_gate_indices(ansatz: &QuantumCircuit, n_params: usize) -> Vec<Option<usize>> {
    let angled: Vec<usize> = ansatz
        .gates()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.kind.angle().is_some())
        .map(|(i, _)| i)
        .collect();
    if angled.len() == n_params {
        return angled.into_iter().map(Some).collect();
    }
    // one-qubit register: layers are [Ry, Rz, (unused CPHASE)]
    let mut out = Vec::with_capacity(n_params);
    let mut it = angled.into_iter();
    for j in 0..n_params {
        out.push(if j % 3 == 2 { None } else { it.next() });
    }
    out
}

/// One row of the optimizer trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub eta_k: f64,
    /// Cost at the parameters the step started from.
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    Converged,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: VqcModel,
    pub trace: Vec<TraceEntry>,
    pub final_cost: f64,
    pub stop_reason: StopReason,
}

impl TrainOutcome {
    pub fn initial_cost(&self) -> f64 {
        self.trace
            .first()
            .map(|t| t.cost)
            .unwrap_or(self.final_cost)
    }

    /// `iteration,eta_k,cost` with a header row.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,eta_k,cost\n");
        for t in &self.trace {
            out.push_str(&format!("{},{},{}\n", t.iteration, t.eta_k, t.cost));
        }
        out
    }
}

/// Gradient descent from the model's current parameters.
///
/// Step k evaluates `C_k` and its gradient, stops early if `k > 0` and
/// `|C_k - C_{k-1}| <= epsilon`, otherwise moves by `eta / sqrt(k+1)` times
/// the gradient. At most `max_iters` steps are taken.
pub fn train(
    model: &VqcModel,
    rows: &[(Vec<f64>, GasLabel)],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    let data = PreparedData::new(model, rows)?;
    train_prepared(model, &data, config)
}

pub fn train_prepared(
    model: &VqcModel,
    data: &PreparedData,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    let mut current = model.clone();
    let mut trace = Vec::with_capacity(config.max_iters);
    let mut previous: Option<f64> = None;
    let mut stop_reason = StopReason::MaxIterations;

    for k in 0..config.max_iters {
        let c = cost_prepared(&current, data)?;
        if !c.is_finite() {
            return Err(QmeshError::NonFiniteCost {
                iteration: k,
                value: c,
            });
        }
        if let Some(prev) = previous {
            if (c - prev).abs() <= config.epsilon {
                stop_reason = StopReason::Converged;
                break;
            }
        }
        let grad = gradient_prepared(&current, data, config)?;
        let eta_k = config.eta_at(k);
        for (p, g) in current.params.iter_mut().zip(&grad) {
            *p -= eta_k * g;
        }
        trace.push(TraceEntry {
            iteration: k,
            eta_k,
            cost: c,
        });
        log::debug!("iteration {k}: cost {c:.6}, eta {eta_k:.4}");
        previous = Some(c);
    }
    let final_cost = cost_prepared(&current, data)?;
    if !final_cost.is_finite() {
        return Err(QmeshError::NonFiniteCost {
            iteration: trace.len(),
            value: final_cost,
        });
    }
    Ok(TrainOutcome {
        model: current,
        trace,
        final_cost,
        stop_reason,
    })
}
