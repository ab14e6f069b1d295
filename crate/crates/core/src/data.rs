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

//! Gas-sensor dataset ingestion, splitting, statistics and exports.
//!
//! CSV files are UTF-8, comma separated, with a header row naming the seven
//! MQ sensor columns and a label column.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::encoding::SensorMatrix;
use crate::error::{QmeshError, Result};
use crate::seed;

/// Sensor columns in canonical order.
pub const SENSOR_NAMES: [&str; 7] = ["MQ2", "MQ3", "MQ5", "MQ6", "MQ7", "MQ8", "MQ135"];
pub const N_SENSORS: usize = SENSOR_NAMES.len();

/// Gas category of a record.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GasLabel {
    NoGas,
    Perfume,
    CO2COMixture,
    ToxicMixture,
    Other(String),
}

impl GasLabel {
    pub const CANONICAL: [GasLabel; 4] = [
        GasLabel::NoGas,
        GasLabel::Perfume,
        GasLabel::CO2COMixture,
        GasLabel::ToxicMixture,
    ];

    pub fn as_str(&self) -> &str {
        match self {
            GasLabel::NoGas => "No Gas",
            GasLabel::Perfume => "Perfume",
            GasLabel::CO2COMixture => "CO2 and CO Mixture",
            GasLabel::ToxicMixture => "Toxic Gases Mixture",
            GasLabel::Other(s) => s,
        }
    }

    /// Matches case-insensitively, ignoring spaces, underscores and hyphens.
    pub fn parse_with(text: &str, aliases: &BTreeMap<String, GasLabel>) -> GasLabel {
        let key = match_key(text);
        if let Some(label) = aliases.get(&key) {
            return label.clone();
        }
        GasLabel::CANONICAL
            .iter()
            .find(|l| match_key(l.as_str()) == key)
            .cloned()
            .unwrap_or_else(|| GasLabel::Other(text.trim().to_string()))
    }
}

fn match_key(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

impl fmt::Display for GasLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GasLabel {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(GasLabel::parse_with(s, &BTreeMap::new()))
    }
}

impl Serialize for GasLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for GasLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(s.parse().unwrap())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorRecord {
    pub readings: [f64; N_SENSORS],
    pub label: GasLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<SensorRecord>,
    pub provenance: Provenance,
}

/// CSV reading options.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Header names accepted for the label column, matched like labels.
    pub label_columns: Vec<String>,
    /// Extra label spellings, keyed by their match key.
    pub aliases: BTreeMap<String, GasLabel>,
    /// Reject labels outside the canonical four instead of keeping `Other`.
    pub strict_labels: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        let mut opts = LoadOptions {
            label_columns: vec!["label".into(), "gas".into()],
            aliases: BTreeMap::new(),
            strict_labels: false,
        };
        // spellings used by the public release of the MQ corpus
        opts.add_alias("NoGas", GasLabel::NoGas);
        opts.add_alias("Smoke", GasLabel::CO2COMixture);
        opts.add_alias("Mixture", GasLabel::ToxicMixture);
        opts
    }
}

impl LoadOptions {
    pub fn add_alias(&mut self, spelling: &str, label: GasLabel) {
        self.aliases.insert(match_key(spelling), label);
    }
}

impl Dataset {
    pub fn new(records: Vec<SensorRecord>, source: impl Into<String>) -> Result<Self> {
        if records.is_empty() {
            return Err(QmeshError::validation("dataset is empty"));
        }
        let rows = records.len();
        Ok(Dataset {
            records,
            provenance: Provenance {
                source: source.into(),
                rows,
            },
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn sensor_matrix(&self) -> Result<SensorMatrix> {
        SensorMatrix::new(
            self.records.iter().map(|r| r.readings.to_vec()).collect(),
            SENSOR_NAMES.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn labels(&self) -> Vec<GasLabel> {
        self.records.iter().map(|r| r.label.clone()).collect()
    }

    /// Record count per label, in label order.
    pub fn label_counts(&self) -> BTreeMap<GasLabel, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.label.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// Keeps only records whose label is in `labels`.
    pub fn filter_labels(&self, labels: &[GasLabel]) -> Result<Dataset> {
        let records: Vec<_> = self
            .records
            .iter()
            .filter(|r| labels.contains(&r.label))
            .cloned()
            .collect();
        Dataset::new(records, self.provenance.source.clone())
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| QmeshError::io(path, e))?;
    read_csv(file, &path.display().to_string(), opts)
}

/// Parses dataset CSV from any reader; `source` is recorded as provenance.
pub fn read_csv<R: Read>(reader: R, source: &str, opts: &LoadOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(QmeshError::validation(format!("{source}: file is empty")));
    }
    let find = |name: &str| headers.iter().position(|h| match_key(h) == match_key(name));
    let mut sensor_idx = [0usize; N_SENSORS];
    for (slot, name) in sensor_idx.iter_mut().zip(SENSOR_NAMES) {
        *slot = find(name).ok_or_else(|| QmeshError::MissingColumn(name.to_string()))?;
    }
    let label_idx = opts
        .label_columns
        .iter()
        .find_map(|c| find(c))
        .ok_or_else(|| QmeshError::MissingColumn("label".to_string()))?;
    let extra: Vec<&str> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx && !sensor_idx.contains(i))
        .map(|(_, h)| h)
        .collect();
    if !extra.is_empty() {
        warn!("{source}: ignoring extra columns {extra:?}");
    }

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        // header is line 1
        let line = i + 2;
        let row = row?;
        let mut readings = [0.0; N_SENSORS];
        for (k, &col) in sensor_idx.iter().enumerate() {
            readings[k] = parse_reading(row.get(col).unwrap_or(""), line, SENSOR_NAMES[k])?;
        }
        let text = row.get(label_idx).unwrap_or("");
        if text.is_empty() {
            return Err(QmeshError::Parse {
                row: line,
                column: "label".into(),
                message: "missing label".into(),
            });
        }
        let label = GasLabel::parse_with(text, &opts.aliases);
        if opts.strict_labels && matches!(label, GasLabel::Other(_)) {
            return Err(QmeshError::Parse {
                row: line,
                column: "label".into(),
                message: format!("unknown label '{text}'"),
            });
        }
        records.push(SensorRecord { readings, label });
    }
    if records.is_empty() {
        return Err(QmeshError::validation(format!("{source}: no data rows")));
    }
    Dataset::new(records, source)
}

/// Reads the named numeric columns of a headed CSV, in `columns` order.
/// Other columns are ignored.
pub fn read_rows<R: Read>(reader: R, source: &str, columns: &[String]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let idx: Vec<usize> = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| match_key(h) == match_key(c))
                .ok_or_else(|| QmeshError::MissingColumn(c.clone()))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row?;
        let values = idx
            .iter()
            .zip(columns)
            .map(|(&j, name)| parse_reading(row.get(j).unwrap_or(""), line, name))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(QmeshError::validation(format!("{source}: no data rows")));
    }
    Ok(rows)
}

/// Parses one comma-separated row of `expected` readings.
pub fn parse_row(text: &str, expected: &[String]) -> Result<Vec<f64>> {
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    if fields.len() != expected.len() {
        return Err(QmeshError::validation(format!(
            "row has {} values, expected {}",
            fields.len(),
            expected.len()
        )));
    }
    fields
        .iter()
        .zip(expected)
        .map(|(f, name)| parse_reading(f, 1, name))
        .collect()
}

fn parse_reading(text: &str, row: usize, column: &str) -> Result<f64> {
    let value: f64 = text.parse().map_err(|_| QmeshError::Parse {
        row,
        column: column.to_string(),
        message: format!("'{text}' is not a number"),
    })?;
    if !value.is_finite() || value < 0.0 {
        return Err(QmeshError::Parse {
            row,
            column: column.to_string(),
            message: format!("reading {value} must be finite and non-negative"),
        });
    }
    Ok(value)
}

/// Writes the dataset in loader format. Floats use the shortest text that
/// parses back to the same value.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = SENSOR_NAMES.to_vec();
    header.push("label");
    w.write_record(&header)?;
    for r in &dataset.records {
        let mut fields: Vec<String> = r.readings.iter().map(|v| v.to_string()).collect();
        fields.push(r.label.to_string());
        w.write_record(&fields)?;
    }
    w.flush().map_err(|e| QmeshError::io("<csv writer>", e))?;
    Ok(())
}

/// Stratified split. Per-class test counts are apportioned by largest
/// remainder so they sum to `round(n * test_fraction)`, and every class keeps
/// at least one record on each side.
pub fn split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(QmeshError::validation(format!(
            "test fraction {test_fraction} must lie strictly between 0 and 1"
        )));
    }
    let mut by_class: BTreeMap<GasLabel, Vec<usize>> = BTreeMap::new();
    for (i, r) in dataset.records.iter().enumerate() {
        by_class.entry(r.label.clone()).or_default().push(i);
    }
    for (label, idx) in &by_class {
        if idx.len() < 2 {
            return Err(QmeshError::Stratification {
                label: label.to_string(),
                count: idx.len(),
            });
        }
    }

    let total_test = (dataset.len() as f64 * test_fraction).round() as usize;
    let quotas: Vec<f64> = by_class
        .values()
        .map(|idx| idx.len() as f64 * test_fraction)
        .collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    // largest fractional part first, ties by class order
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut remaining = total_test.saturating_sub(counts.iter().sum());
    for &k in order.iter().cycle().take(order.len() * 2) {
        if remaining == 0 {
            break;
        }
        counts[k] += 1;
        remaining -= 1;
    }
    for (c, idx) in counts.iter_mut().zip(by_class.values()) {
        *c = (*c).clamp(1, idx.len() - 1);
    }

    let mut rng = seed::substream(seed, "split");
    let mut test_idx = Vec::new();
    let mut train_idx = Vec::new();
    for (idx, &n_test) in by_class.values().zip(&counts) {
        let mut shuffled = idx.clone();
        shuffled.shuffle(&mut rng);
        test_idx.extend_from_slice(&shuffled[..n_test]);
        train_idx.extend_from_slice(&shuffled[n_test..]);
    }
    test_idx.sort_unstable();
    train_idx.sort_unstable();
    let pick = |idx: &[usize]| idx.iter().map(|&i| dataset.records[i].clone()).collect();
    Ok((
        Dataset::new(
            pick(&train_idx),
            format!("{}#train", dataset.provenance.source),
        )?,
        Dataset::new(
            pick(&test_idx),
            format!("{}#test", dataset.provenance.source),
        )?,
    ))
}

/// Population statistics of one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub sensor: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub variance: f64,
}

/// min, max, mean and population variance of a column of values.
pub fn column_stats(name: &str, values: &[f64]) -> ColumnStats {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    ColumnStats {
        sensor: name.to_string(),
        min: values.iter().cloned().fold(f64::INFINITY, f64::min),
        max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        mean,
        variance,
    }
}

pub fn summary_stats(dataset: &Dataset) -> Vec<ColumnStats> {
    SENSOR_NAMES
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col: Vec<f64> = dataset.records.iter().map(|r| r.readings[j]).collect();
            column_stats(name, &col)
        })
        .collect()
}

/// Tidy pairwise table `sensor_a,sensor_b,value_a,value_b,label`, one row per
/// record for every unordered pair of the selected sensors.
pub fn write_pairdata<W: Write>(dataset: &Dataset, sensors: &[&str], writer: W) -> Result<()> {
    if sensors.is_empty() {
        return Err(QmeshError::validation(
            "no sensors selected for pair export",
        ));
    }
    let mut idx = Vec::with_capacity(sensors.len());
    for s in sensors {
        let j = SENSOR_NAMES
            .iter()
            .position(|n| n.eq_ignore_ascii_case(s))
            .ok_or_else(|| QmeshError::validation(format!("unknown sensor '{s}'")))?;
        if !idx.contains(&j) {
            idx.push(j);
        }
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["sensor_a", "sensor_b", "value_a", "value_b", "label"])?;
    for (pos, &a) in idx.iter().enumerate() {
        for &b in &idx[pos + 1..] {
            for r in &dataset.records {
                w.write_record([
                    SENSOR_NAMES[a],
                    SENSOR_NAMES[b],
                    &r.readings[a].to_string(),
                    &r.readings[b].to_string(),
                    r.label.as_str(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| QmeshError::io("<csv writer>", e))?;
    Ok(())
}

/// File form of [`write_pairdata`], written atomically.
pub fn export_pairdata(dataset: &Dataset, sensors: &[&str], path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_pairdata(dataset, sensors, &mut buf)?;
    write_atomic(path, &buf)
}

/// Writes `bytes` to a sibling temp file and renames it into place.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(|e| QmeshError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| QmeshError::io(path, e))
}

/// Per-sensor `(min, max)` of the published MQ corpus, in `SENSOR_NAMES` order.
pub const CORPUS_RANGES: [(f64, f64); N_SENSORS] = [
    (502.0, 824.0),
    (337.0, 543.0),
    (291.0, 596.0),
    (311.0, 524.0),
    (361.0, 796.0),
    (220.0, 794.0),
    (275.0, 589.0),
];

/// Gaussian clusters with the corpus schema, one per canonical label.
///
/// Class `k` centres sensor `s` at fraction `0.2 + 0.6 * ((k + s) mod c) / (c - 1)`
/// of the corpus range; `spread` is the standard deviation as a fraction of
/// the range. Readings are clipped at zero. Rows are interleaved by class.
pub fn synthetic_clusters(
    n_per_class: usize,
    n_classes: usize,
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(2..=GasLabel::CANONICAL.len()).contains(&n_classes) {
        return Err(QmeshError::validation(format!(
            "synthetic data supports 2 to 4 classes, got {n_classes}"
        )));
    }
    if n_per_class == 0 || !(spread >= 0.0 && spread.is_finite()) {
        return Err(QmeshError::validation(
            "synthetic data needs rows and a finite spread",
        ));
    }
    let mut rng = seed::substream(seed, "synthetic");
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut records = Vec::with_capacity(n_per_class * n_classes);
    for _ in 0..n_per_class {
        for (k, label) in GasLabel::CANONICAL[..n_classes].iter().enumerate() {
            let mut readings = [0.0; N_SENSORS];
            for (s, (r, &(lo, hi))) in readings.iter_mut().zip(&CORPUS_RANGES).enumerate() {
                let frac = 0.2 + 0.6 * ((k + s) % n_classes) as f64 / (n_classes - 1) as f64;
                let width = hi - lo;
                let v: f64 = lo + width * (frac + spread * noise.sample(&mut rng));
                *r = v.max(0.0);
            }
            records.push(SensorRecord {
                readings,
                label: label.clone(),
            });
        }
    }
    Dataset::new(
        records,
        format!("synthetic:{n_classes}x{n_per_class}:seed={seed}"),
    )
}
