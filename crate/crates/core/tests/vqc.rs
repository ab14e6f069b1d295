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

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use qmesh_core::data::GasLabel;
use qmesh_core::encoding::{EncoderConfig, MinMaxScaler};
use qmesh_core::sim::{StateVector, C64};
use qmesh_core::vqc::*;
use qmesh_core::QmeshError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_scaler(n: usize) -> MinMaxScaler {
    MinMaxScaler {
        sensor_names: (0..n).map(|i| format!("s{i}")).collect(),
        mins: vec![0.0; n],
        maxs: vec![1.0; n],
    }
}

fn two_labels() -> Vec<GasLabel> {
    vec![GasLabel::NoGas, GasLabel::Perfume]
}

/// One qubit, one layer: the encoded state is |+> for every row, and
/// `Ry(-pi/2)` maps it onto the class-0 target |0>.
fn one_qubit_model(params: [f64; 3]) -> VqcModel {
    VqcModel {
        encoder: EncoderConfig::new(1, 1),
        params: params.to_vec(),
        classes: two_labels(),
        scaler: unit_scaler(1),
        seed: 0,
    }
}

fn random_model(n: usize, layers: usize, classes: usize, seed: u64) -> VqcModel {
    VqcModel::init(
        EncoderConfig::new(n, layers),
        GasLabel::CANONICAL[..classes].to_vec(),
        unit_scaler(n),
        seed,
    )
    .unwrap()
}

fn random_rows(n: usize, count: usize, classes: usize, seed: u64) -> Vec<(Vec<f64>, GasLabel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let row = (0..n).map(|_| rng.random::<f64>()).collect();
            (row, GasLabel::CANONICAL[i % classes].clone())
        })
        .collect()
}

#[test]
fn cost_is_zero_when_output_equals_target() {
    let m = one_qubit_model([-FRAC_PI_2, 0.0, 0.0]);
    let c = cost(&m, &[(vec![0.3], GasLabel::NoGas)]).unwrap();
    assert!(c.abs() < 1e-12, "{c}");
}

#[test]
fn cost_is_one_when_output_is_orthogonal() {
    let m = one_qubit_model([-FRAC_PI_2, 0.0, 0.0]);
    let c = cost(&m, &[(vec![0.3], GasLabel::Perfume)]).unwrap();
    assert!((c - 1.0).abs() < 1e-12, "{c}");
}

#[test]
fn cost_of_two_half_fidelity_samples() {
    let m = one_qubit_model([0.0, 0.0, 0.0]);
    let data = [(vec![0.1], GasLabel::NoGas), (vec![0.9], GasLabel::Perfume)];
    let f = fidelities(&m, &PreparedData::new(&m, &data).unwrap()).unwrap();
    assert!(f.iter().all(|f| (f - 0.5).abs() < 1e-12));
    assert!((cost(&m, &data).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn unknown_class_is_rejected() {
    let m = one_qubit_model([0.0; 3]);
    let err = cost(&m, &[(vec![0.1], GasLabel::ToxicMixture)]).unwrap_err();
    assert!(matches!(err, QmeshError::Validation(_)));
}

#[test]
fn gradient_vanishes_at_a_minimum() {
    let m = one_qubit_model([-FRAC_PI_2, 0.4, 0.0]);
    let data = [(vec![0.2], GasLabel::NoGas), (vec![0.7], GasLabel::NoGas)];
    assert!(cost(&m, &data).unwrap() < 1e-24);
    for mode in [GradientMode::ParameterShift, GradientMode::FiniteDifference] {
        let cfg = TrainConfig {
            gradient_mode: mode,
            ..Default::default()
        };
        let g = gradient(&m, &data, &cfg).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-8), "{mode:?}: {g:?}");
    }
}

#[test]
fn parameter_shift_matches_finite_differences() {
    for (k, layers) in [1, 2, 1, 2, 1, 2, 1, 2, 1, 2].into_iter().enumerate() {
        let m = random_model(4, layers, 3, 100 + k as u64);
        let data = PreparedData::new(&m, &random_rows(4, 5, 3, 200 + k as u64)).unwrap();
        let ps = parameter_shift_gradient(&m, &data, FRAC_PI_2, FRAC_PI_2).unwrap();
        let fd = finite_difference_gradient(&m, &data).unwrap();
        let dev = ps
            .iter()
            .zip(&fd)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-6, "model {k}: deviation {dev}");
    }
}

#[test]
fn shift_is_exact_for_any_angle() {
    let m = random_model(3, 1, 2, 5);
    let data = PreparedData::new(&m, &random_rows(3, 4, 2, 6)).unwrap();
    let a = parameter_shift_gradient(&m, &data, FRAC_PI_2, FRAC_PI_2).unwrap();
    let b = parameter_shift_gradient(&m, &data, 0.3, 0.3).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn mismatched_shift_denominator_is_detectable() {
    let m = random_model(3, 1, 2, 5);
    let data = PreparedData::new(&m, &random_rows(3, 4, 2, 6)).unwrap();
    let good = finite_difference_gradient(&m, &data).unwrap();
    let bad = parameter_shift_gradient(&m, &data, 0.1, FRAC_PI_2).unwrap();
    let dev = good
        .iter()
        .zip(&bad)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(dev > 1e-3, "{dev}");
}

#[test]
fn duplicating_samples_doubles_the_gradient() {
    let m = random_model(3, 2, 2, 9);
    let rows = random_rows(3, 4, 2, 10);
    let doubled: Vec<_> = rows.iter().chain(rows.iter()).cloned().collect();
    let cfg = TrainConfig::default();
    let g1 = gradient(&m, &rows, &cfg).unwrap();
    let g2 = gradient(&m, &doubled, &cfg).unwrap();
    for (a, b) in g1.iter().zip(&g2) {
        assert!((2.0 * a - b).abs() < 1e-10);
    }
}

#[test]
fn learning_rate_schedule() {
    let cfg = TrainConfig {
        eta: 0.4,
        ..Default::default()
    };
    assert_eq!(cfg.eta_at(3), 0.2);
    let m = random_model(2, 1, 2, 1);
    let out = train(
        &m,
        &random_rows(2, 4, 2, 2),
        &TrainConfig {
            eta: 0.4,
            epsilon: 1e-300,
            max_iters: 12,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(out.trace.len(), 12);
    for t in &out.trace {
        assert_eq!(t.eta_k, 0.4 / ((t.iteration + 1) as f64).sqrt());
    }
}

#[test]
fn single_iteration_takes_one_step() {
    let m = random_model(2, 1, 2, 3);
    let rows = random_rows(2, 4, 2, 4);
    let cfg = TrainConfig {
        max_iters: 1,
        epsilon: 1e9,
        ..Default::default()
    };
    let out = train(&m, &rows, &cfg).unwrap();
    assert_eq!(out.trace.len(), 1);
    assert_eq!(out.stop_reason, StopReason::MaxIterations);
    let g = gradient(&m, &rows, &cfg).unwrap();
    for ((p0, p1), g) in m.params.iter().zip(&out.model.params).zip(&g) {
        assert_eq!(*p1, p0 - cfg.eta * g);
    }
}

#[test]
fn huge_epsilon_converges_after_second_evaluation() {
    let m = random_model(2, 1, 2, 3);
    let cfg = TrainConfig {
        max_iters: 50,
        epsilon: 1e9,
        ..Default::default()
    };
    let out = train(&m, &random_rows(2, 4, 2, 4), &cfg).unwrap();
    assert_eq!(out.trace.len(), 1);
    assert_eq!(out.stop_reason, StopReason::Converged);
}

#[test]
fn invalid_config_is_rejected() {
    for cfg in [
        TrainConfig {
            eta: 0.0,
            ..Default::default()
        },
        TrainConfig {
            epsilon: -1.0,
            ..Default::default()
        },
        TrainConfig {
            max_iters: 0,
            ..Default::default()
        },
    ] {
        assert!(cfg.validate().is_err());
    }
}

/// Two linearly separable groups on two features.
fn toy_rows() -> Vec<(Vec<f64>, GasLabel)> {
    [
        ([0.05, 0.10], GasLabel::NoGas),
        ([0.10, 0.20], GasLabel::NoGas),
        ([0.20, 0.05], GasLabel::NoGas),
        ([0.15, 0.15], GasLabel::NoGas),
        ([0.85, 0.90], GasLabel::Perfume),
        ([0.90, 0.80], GasLabel::Perfume),
        ([0.80, 0.95], GasLabel::Perfume),
        ([0.95, 0.85], GasLabel::Perfume),
    ]
    .into_iter()
    .map(|(r, l)| (r.to_vec(), l))
    .collect()
}

#[test]
fn toy_task_halves_the_cost() {
    let m = VqcModel::init(EncoderConfig::new(2, 2), two_labels(), unit_scaler(2), 11).unwrap();
    let cfg = TrainConfig {
        eta: 0.2,
        max_iters: 200,
        seed: 11,
        ..Default::default()
    };
    let out = train(&m, &toy_rows(), &cfg).unwrap();
    assert!(
        out.final_cost < 0.5 * out.initial_cost(),
        "{} -> {}",
        out.initial_cost(),
        out.final_cost
    );
    let metrics = out.model.evaluate(&toy_rows()).unwrap();
    assert_eq!(metrics.accuracy, 1.0);
}

#[test]
fn training_is_deterministic() {
    let run = || {
        let m = random_model(3, 1, 2, 21);
        let out = train(
            &m,
            &random_rows(3, 6, 2, 22),
            &TrainConfig {
                max_iters: 15,
                ..Default::default()
            },
        )
        .unwrap();
        (out.trace_csv(), out.model.params)
    };
    assert_eq!(run(), run());
}

#[test]
fn trace_csv_layout() {
    let m = random_model(2, 1, 2, 1);
    let out = train(
        &m,
        &random_rows(2, 2, 2, 1),
        &TrainConfig {
            max_iters: 3,
            epsilon: 1e-300,
            ..Default::default()
        },
    )
    .unwrap();
    let csv = out.trace_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "iteration,eta_k,cost");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,0.1,"));
}

#[test]
fn prediction_of_a_target_state_is_certain() {
    let m = one_qubit_model([-FRAC_PI_2, 0.0, 0.0]);
    let p = m.predict(&[0.42]).unwrap();
    assert_eq!(p.label, GasLabel::NoGas);
    assert!((p.probs[0].1 - 1.0).abs() < 1e-12);
    assert!(p.probs[1].1.abs() < 1e-12);
    assert!(p.residual.abs() < 1e-12);
}

#[test]
fn uniform_state_splits_evenly_over_four_classes() {
    let proj = ClassProjectors::new(2, 4).unwrap();
    let amps = vec![C64::new(0.5, 0.0); 4];
    let (p, residual) = proj.probabilities(&StateVector::from_amplitudes(amps).unwrap());
    assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));
    assert!(residual.abs() < 1e-12);
}

#[test]
fn three_classes_leave_a_residual() {
    let proj = ClassProjectors::new(3, 3).unwrap();
    assert_eq!(proj.class_bits, 2);
    let amps = vec![C64::new(1.0 / 8f64.sqrt(), 0.0); 8];
    let (p, residual) = proj.probabilities(&StateVector::from_amplitudes(amps).unwrap());
    assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));
    assert!((residual - 0.25).abs() < 1e-12);
}

#[test]
fn sampled_prediction_agrees_with_exact() {
    let m = random_model(4, 2, 3, 31);
    let row = [120.0, 0.3, 0.9, 0.5];
    let exact = m.predict(&row).unwrap();
    let sampled = m.predict_sampled(&row, 10_000, 32).unwrap();
    for ((_, a), (_, b)) in exact.probs.iter().zip(&sampled.probs) {
        assert!((a - b).abs() <= 0.02, "{a} vs {b}");
    }
}

#[test]
fn predict_rejects_wrong_row_length() {
    let m = random_model(3, 1, 2, 1);
    assert!(matches!(
        m.predict(&[0.1, 0.2]).unwrap_err(),
        QmeshError::Validation(_)
    ));
}

#[test]
fn model_json_round_trip() {
    let mut m = random_model(4, 2, 3, 77);
    m.scaler.sensor_names = vec!["MQ2".into(), "MQ3".into(), "MQ5".into(), "MQ6".into()];
    m.scaler.mins = vec![502.0, 337.0, 291.0, 311.0];
    m.scaler.maxs = vec![824.0, 543.0, 596.0, 524.0];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    m.save(&path).unwrap();
    let back = VqcModel::load(&path).unwrap();
    assert_eq!(back, m);

    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(
        keys,
        [
            "version",
            "n_qubits",
            "layers",
            "angle_scale",
            "params",
            "class_map",
            "norm_constants",
            "seed"
        ]
    );
    assert_eq!(v["class_map"]["Perfume"], 1);
    assert_eq!(
        v["norm_constants"]["MQ2"],
        serde_json::json!([502.0, 824.0])
    );
}

#[test]
fn model_json_rejects_bad_documents() {
    let m = random_model(2, 1, 2, 1);
    let mut v = m.to_json();
    v["version"] = 2.into();
    assert!(VqcModel::from_json(&v).is_err());
    let mut v = m.to_json();
    v["params"] = serde_json::json!([0.0]);
    assert!(VqcModel::from_json(&v).is_err());
}

#[test]
fn init_draws_parameters_in_range() {
    let m = random_model(7, 2, 3, 5);
    assert_eq!(m.params.len(), 42);
    assert!(m.params.iter().all(|p| (-PI..=PI).contains(p)));
    assert_eq!(m.params, random_model(7, 2, 3, 5).params);
    assert_ne!(m.params, random_model(7, 2, 3, 6).params);
}

#[test]
fn metrics_from_a_trained_model_are_consistent() {
    let m = random_model(3, 1, 3, 8);
    let rows = random_rows(3, 12, 3, 9);
    let metrics = m.evaluate(&rows).unwrap();
    let total: usize = metrics.confusion.iter().flatten().sum();
    assert_eq!(total, 12);
    for (j, c) in metrics.per_class.iter().enumerate() {
        let tp = metrics.confusion[j][j] as f64;
        let predicted: usize = metrics.confusion.iter().map(|r| r[j]).sum();
        let expect_p = if predicted == 0 {
            0.0
        } else {
            tp / predicted as f64
        };
        assert!((c.precision - expect_p).abs() < 1e-12);
        assert_eq!(c.support, 4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cost_is_non_negative(seed in 0u64..1000) {
        let m = random_model(3, 1, 2, seed);
        let c = cost(&m, &random_rows(3, 3, 2, seed + 1)).unwrap();
        prop_assert!(c >= 0.0);
    }

    #[test]
    fn prediction_probabilities_are_bounded(seed in 0u64..1000, row in prop::collection::vec(0.0f64..1.0, 3)) {
        let m = random_model(3, 2, 3, seed);
        let p = m.predict(&row).unwrap();
        let total: f64 = p.probs.iter().map(|(_, x)| x).sum::<f64>() + p.residual;
        prop_assert!((total - 1.0).abs() < 1e-12);
        for (_, x) in &p.probs {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(x));
        }
    }

    #[test]
    fn argmax_ignores_positive_scaling(probs in prop::collection::vec(0.0f64..1.0, 2..6), k in 0.01f64..100.0) {
        let scaled: Vec<f64> = probs.iter().map(|p| p * k).collect();
        prop_assert_eq!(argmax(&probs), argmax(&scaled));
    }
}
