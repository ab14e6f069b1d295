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

//! Fixtures shared by the benchmarks.

use qmesh_core::data::synthetic_clusters;
use qmesh_core::encoding::{EncoderConfig, MinMaxScaler};
use qmesh_core::{GasLabel, Result, VqcModel};

/// An untrained 7-qubit model over synthetic rows, and those raw rows.
pub fn fixture_model(layers: usize, rows_per_class: usize) -> Result<(VqcModel, Vec<Vec<f64>>)> {
    let data = synthetic_clusters(rows_per_class, 3, 0.05, 1)?;
    let scaler = MinMaxScaler::fit(&data.sensor_matrix()?);
    let model = VqcModel::init(
        EncoderConfig::new(7, layers),
        GasLabel::CANONICAL[..3].to_vec(),
        scaler,
        1,
    )?;
    let rows = data.records.iter().map(|r| r.readings.to_vec()).collect();
    Ok((model, rows))
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixture_builds() {
        let (model, rows) = super::fixture_model(1, 2).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(model.predict(&rows[0]).is_ok());
    }
}
