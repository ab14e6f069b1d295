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

use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by every module of the toolkit.
#[derive(Debug, Error)]
pub enum QmeshError {
    /// A register size exceeds the configured cap (or is zero).
    #[error("capacity error: {requested} qubits requested, limit is {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("validation error: {0}")]
    Validation(String),

    /// A CSV header lacks a required column.
    #[error("schema error: missing column '{0}'")]
    MissingColumn(String),

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("stratification error: class '{label}' has {count} record(s), need at least 2")]
    Stratification { label: String, count: usize },

    #[error("non-finite cost at iteration {iteration}: {value}")]
    NonFiniteCost { iteration: usize, value: f64 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl QmeshError {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        QmeshError::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QmeshError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than internal failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, QmeshError::NonFiniteCost { .. })
    }
}

pub type Result<T> = std::result::Result<T, QmeshError>;
