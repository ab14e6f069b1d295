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

//! Exact statevector and density-matrix simulation.

pub mod circuit;
pub mod density;
pub mod gate;
pub mod measure;
pub mod qft;
pub mod state;

pub use circuit::QuantumCircuit;
pub use density::{fidelity, pure_fidelity, reduced_density, DensityMatrix, MAX_DENSITY_QUBITS};
pub use gate::{GateKind, GateOp, C64};
pub use measure::{measure, sample, Basis, MeasurementHistogram};
pub use qft::{apply_inverse_qft, apply_qft, inverse_qft_circuit, qft_circuit};
pub use state::{max_qubits, StateVector, DEFAULT_MAX_QUBITS, MAX_QUBITS_ENV};
