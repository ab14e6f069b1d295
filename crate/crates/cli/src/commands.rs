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

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::Path;

use log::info;
use qmesh_core::data::{
    export_pairdata, load_csv, parse_row, read_rows, split, summary_stats, synthetic_clusters,
    write_atomic, write_csv, LoadOptions, CORPUS_RANGES, SENSOR_NAMES,
};
use qmesh_core::encoding::{EncoderConfig, MinMaxScaler};
use qmesh_core::protocol::{run_protocol, teleport_fidelity_under_noise};
use qmesh_core::seed;
use qmesh_core::sim::Basis;
use qmesh_core::vqc::timing::{latency_csv, latency_report, Detector};
use qmesh_core::vqc::{
    finite_difference_gradient, normalized_rows, parameter_shift_gradient, raw_rows,
    train as train_model, Prediction, PreparedData,
};
use qmesh_core::{Dataset, GasLabel, Metrics, VqcModel};
use rand::Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::CliError;

/// Creates the output directory and echoes the effective configuration.
pub fn prepare_out(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", cfg.out.display())))?;
    let text = serde_json::to_string_pretty(cfg).expect("config serializes");
    info!("effective config:\n{text}");
    write_file(cfg, "config.json", text.as_bytes())
}

fn write_file(cfg: &RunConfig, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let path = cfg.out.join(name);
    write_atomic(&path, bytes)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn write_json(cfg: &RunConfig, name: &str, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json serializes");
    text.push('\n');
    write_file(cfg, name, text.as_bytes())
}

fn load(path: &Path) -> Result<Dataset, CliError> {
    Ok(load_csv(path, &LoadOptions::default())?)
}

fn metrics_json(m: &Metrics) -> Value {
    json!({
        "macro_f1": m.macro_f1,
        "accuracy": m.accuracy,
        "per_class": m.per_class,
        "confusion": m.confusion,
    })
}

pub fn train(
    cfg: &RunConfig,
    data_path: Option<&Path>,
    synthetic: Option<usize>,
    spread: f64,
) -> Result<(), CliError> {
    if cfg.encoder.n_qubits != SENSOR_NAMES.len() {
        return Err(CliError::input(format!(
            "encoder.n_qubits must be {} (one per sensor), got {}",
            SENSOR_NAMES.len(),
            cfg.encoder.n_qubits
        )));
    }
    let classes = cfg.class_labels();
    let dataset = match (data_path, synthetic) {
        (Some(p), _) => load(p)?,
        (None, Some(n)) => synthetic_clusters(n, classes.len(), spread, cfg.seed)?,
        (None, None) => return Err(CliError::input("train needs --data or --synthetic")),
    };
    let dataset = dataset.filter_labels(&classes)?;
    let counts = dataset.label_counts();
    for c in &classes {
        if !counts.contains_key(c) {
            return Err(CliError::input(format!(
                "class '{c}' has no rows in the dataset"
            )));
        }
    }
    let (mut train_set, test_set) = split(&dataset, cfg.train.test_fraction, cfg.seed)?;
    if let Some(cap) = cfg.train.max_train_rows {
        if cap < train_set.len() {
            // the "test" side of a second stratified split is the subsample
            let frac = cap as f64 / train_set.len() as f64;
            train_set = split(&train_set, frac, cfg.seed)?.1;
        }
    }
    info!(
        "{} training rows, {} test rows, classes {:?}",
        train_set.len(),
        test_set.len(),
        classes.iter().map(|c| c.to_string()).collect::<Vec<_>>()
    );

    let scaler = MinMaxScaler::fit(&train_set.sensor_matrix()?);
    let model = VqcModel::init(cfg.encoder, classes, scaler, cfg.seed)?;
    let rows = normalized_rows(&model, &train_set)?;
    let outcome = train_model(&model, &rows, &cfg.train_config())?;
    info!(
        "cost {:.6} -> {:.6} after {} iterations ({:?})",
        outcome.initial_cost(),
        outcome.final_cost,
        outcome.trace.len(),
        outcome.stop_reason
    );
    let metrics = outcome.model.evaluate_dataset(&test_set)?;
    info!("held-out macro-F1 {:.4}", metrics.macro_f1);

    outcome.model.save(cfg.out.join("model.json"))?;
    write_file(cfg, "trace.csv", outcome.trace_csv().as_bytes())?;
    let mut report = metrics_json(&metrics);
    let obj = report.as_object_mut().expect("object");
    obj.insert("train_rows".into(), json!(train_set.len()));
    obj.insert("test_rows".into(), json!(test_set.len()));
    obj.insert("initial_cost".into(), json!(outcome.initial_cost()));
    obj.insert("final_cost".into(), json!(outcome.final_cost));
    obj.insert("iterations".into(), json!(outcome.trace.len()));
    obj.insert("stop_reason".into(), json!(outcome.stop_reason));
    obj.insert("data_source".into(), json!(dataset.provenance.source));
    write_json(cfg, "metrics.json", &report)
}

fn prediction_json(p: &Prediction) -> Value {
    let probs: serde_json::Map<String, Value> = p
        .probs
        .iter()
        .map(|(l, x)| (l.to_string(), json!(x)))
        .collect();
    json!({"probs": probs, "residual": p.residual, "label": p.label.to_string()})
}

pub fn predict(
    cfg: &RunConfig,
    model_path: &Path,
    row: Option<&str>,
    input: Option<&Path>,
) -> Result<(), CliError> {
    let model = VqcModel::load(model_path)?;
    let names = &model.scaler.sensor_names;
    let rows = match (row, input) {
        (Some(r), _) => vec![parse_row(r, names)?],
        (None, Some(p)) => {
            let f = std::fs::File::open(p)
                .map_err(|e| CliError::input(format!("cannot open {}: {e}", p.display())))?;
            read_rows(f, &p.display().to_string(), names)?
        }
        (None, None) => return Err(CliError::input("predict needs --row or --input")),
    };
    let mut lines = String::new();
    for r in &rows {
        lines.push_str(&prediction_json(&model.predict(r)?).to_string());
        lines.push('\n');
    }
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(lines.as_bytes())
        .map_err(|e| CliError::internal(format!("stdout: {e}")))?;
    write_file(cfg, "predictions.jsonl", lines.as_bytes())
}

pub fn evaluate(cfg: &RunConfig, model_path: &Path, data_path: &Path) -> Result<(), CliError> {
    let model = VqcModel::load(model_path)?;
    let dataset = load(data_path)?.filter_labels(&model.classes)?;
    let metrics = model.evaluate_dataset(&dataset)?;
    info!("macro-F1 {:.4} on {} rows", metrics.macro_f1, dataset.len());
    write_json(cfg, "metrics.json", &metrics_json(&metrics))
}

pub fn protocol(cfg: &RunConfig) -> Result<(), CliError> {
    let pc = cfg.protocol_config();
    let mut bases = Vec::new();
    for b in &cfg.protocol.bases {
        let basis: Basis = b.parse().map_err(CliError::from)?;
        if !bases.contains(&basis) {
            bases.push(basis);
        }
    }
    let report = match run_protocol(&pc) {
        Err(qmesh_core::QmeshError::Capacity { requested, limit }) => {
            return Err(CliError::input(format!(
                "protocol with {} vehicles needs 3n = {} vehicle qubits ({requested} in total), limit is {limit}; \
                 raise it with {}",
                pc.n_vehicles,
                3 * pc.n_vehicles,
                qmesh_core::sim::MAX_QUBITS_ENV
            )))
        }
        r => r?,
    };
    let mut v = report.to_json();
    if let Some(h) = v["histograms"].as_object_mut() {
        h.retain(|k, _| bases.iter().any(|b| b.to_string() == *k));
    }
    info!(
        "in-register teleport fidelity per vehicle {:?}",
        report.teleport_fidelities
    );
    let trajectories = cfg.protocol.benchmark_trajectories;
    if trajectories > 0 {
        let mean = teleport_fidelity_under_noise(&pc.noise, trajectories, cfg.seed)?;
        info!("teleport benchmark: mean fidelity {mean:.6} over {trajectories} trajectories");
        v.as_object_mut().expect("object").insert(
            "teleport_benchmark".into(),
            json!({"trajectories": trajectories, "mean_fidelity": mean}),
        );
    }
    write_json(cfg, "protocol.json", &v)
}

pub fn gradcheck(cfg: &RunConfig, corrupt_shift: bool) -> Result<(), CliError> {
    let g = &cfg.gradcheck;
    if g.probes == 0 || g.samples == 0 || g.max_layers == 0 {
        return Err(CliError::input(
            "gradcheck needs probes, samples and layers >= 1",
        ));
    }
    let (eval_shift, assumed_shift) = if corrupt_shift {
        (0.1, FRAC_PI_2)
    } else {
        (cfg.train.shift, cfg.train.shift)
    };
    let n = g.n_qubits;
    let n_classes = if n >= 2 { 3 } else { 2 };
    let scaler = MinMaxScaler {
        sensor_names: (0..n).map(|i| format!("x{i}")).collect(),
        mins: vec![0.0; n],
        maxs: vec![1.0; n],
    };
    let mut rng = seed::substream(cfg.seed, "gradcheck");
    let mut max_abs_diff: f64 = 0.0;
    for k in 0..g.probes {
        let layers = 1 + k % g.max_layers;
        let model = VqcModel::init(
            EncoderConfig::new(n, layers),
            GasLabel::CANONICAL[..n_classes].to_vec(),
            scaler.clone(),
            cfg.seed.wrapping_add(k as u64),
        )?;
        let rows: Vec<(Vec<f64>, GasLabel)> = (0..g.samples)
            .map(|i| {
                let r = (0..n).map(|_| rng.random::<f64>()).collect();
                (r, GasLabel::CANONICAL[i % n_classes].clone())
            })
            .collect();
        let data = PreparedData::new(&model, &rows)?;
        let ps = parameter_shift_gradient(&model, &data, eval_shift, assumed_shift)?;
        let fd = finite_difference_gradient(&model, &data)?;
        for (a, b) in ps.iter().zip(&fd) {
            max_abs_diff = max_abs_diff.max((a - b).abs());
        }
    }
    let pass = max_abs_diff <= g.threshold;
    let report = json!({
        "max_abs_diff": max_abs_diff,
        "threshold": g.threshold,
        "n_probes": g.probes,
        "pass": pass,
        "eval_shift": eval_shift,
        "assumed_shift": assumed_shift,
    });
    println!("{}", report);
    write_json(cfg, "gradcheck.json", &report)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::internal(format!(
            "gradient check failed: max |PS - FD| = {max_abs_diff:.3e} > {:.1e}",
            g.threshold
        )))
    }
}

pub fn stats(cfg: &RunConfig, data_path: &Path) -> Result<(), CliError> {
    let dataset = load(data_path)?;
    let stats = summary_stats(&dataset);
    let matches = stats
        .iter()
        .zip(&CORPUS_RANGES)
        .all(|(s, &(lo, hi))| s.min == lo && s.max == hi);
    let counts: serde_json::Map<String, Value> = dataset
        .label_counts()
        .into_iter()
        .map(|(l, n)| (l.to_string(), json!(n)))
        .collect();
    write_json(
        cfg,
        "stats.json",
        &json!({
            "source": dataset.provenance.source,
            "rows": dataset.len(),
            "label_counts": counts,
            "sensors": stats,
            "matches_corpus_ranges": matches,
        }),
    )
}

pub fn export_pairs(
    cfg: &RunConfig,
    data_path: &Path,
    sensors: Option<&[String]>,
) -> Result<(), CliError> {
    let dataset = load(data_path)?;
    let selected: Vec<&str> = match sensors {
        Some(s) => s.iter().map(String::as_str).collect(),
        None => SENSOR_NAMES.to_vec(),
    };
    let path = cfg.out.join("pairs.csv");
    export_pairdata(&dataset, &selected, &path)?;
    info!("wrote {}", path.display());
    Ok(())
}

pub fn timing(cfg: &RunConfig, model_path: &Path, data_path: &Path) -> Result<(), CliError> {
    let model = VqcModel::load(model_path)?;
    let dataset = load(data_path)?;
    let rows: Vec<Vec<f64>> = raw_rows(&dataset).into_iter().map(|(r, _)| r).collect();
    let detectors: [&dyn Detector; 1] = [&model];
    let report = latency_report(&detectors, &rows, &cfg.timing.sizes)?;
    write_file(cfg, "timing.csv", latency_csv(&report).as_bytes())
}

pub fn synth(
    cfg: &RunConfig,
    per_class: usize,
    classes: usize,
    spread: f64,
) -> Result<(), CliError> {
    let dataset = synthetic_clusters(per_class, classes, spread, cfg.seed)?;
    let mut buf = Vec::new();
    write_csv(&dataset, &mut buf)?;
    write_file(cfg, "dataset.csv", &buf)
}
