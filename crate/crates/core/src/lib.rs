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

//! Quantum pipeline for gas-sensor classification and vehicular entanglement
//! protocols, running on a built-in exact simulator.

pub mod data;
pub mod encoding;
pub mod error;
pub mod noise;
pub mod protocol;
pub mod seed;
pub mod sim;
pub mod vqc;

pub use error::{QmeshError, Result};

pub use data::{Dataset, GasLabel, SensorRecord};
pub use encoding::{EncoderConfig, MinMaxScaler};
pub use noise::{NoiseModel, NoisePolicy};
pub use protocol::{ProtocolConfig, ProtocolReport};
pub use sim::{Basis, DensityMatrix, GateOp, MeasurementHistogram, QuantumCircuit, StateVector};
pub use vqc::{Metrics, TrainConfig, VqcModel};
