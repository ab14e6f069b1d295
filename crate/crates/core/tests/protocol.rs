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

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use nalgebra::DMatrix;
use qmesh_core::noise::NoiseModel;
use qmesh_core::protocol::*;
use qmesh_core::seed;
use qmesh_core::sim::{measure, Basis, DensityMatrix, StateVector, C64};
use qmesh_core::QmeshError;

fn bell() -> StateVector {
    let mut s = StateVector::new(2).unwrap();
    prepare_bell(&mut s, 0, 1).unwrap();
    s
}

/// Message on qubit 0, Bell pair on (1, 2).
fn teleport_register(message: &StateVector) -> StateVector {
    let mut s = message.tensor(&StateVector::new(2).unwrap()).unwrap();
    prepare_bell(&mut s, 1, 2).unwrap();
    s
}

fn plus() -> StateVector {
    StateVector::from_amplitudes(vec![C64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap()
}

#[test]
fn bell_preparation() {
    let s = bell();
    let a = s.amplitudes();
    assert!((a[0] - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    assert!((a[3] - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    assert!(a[1].norm() < 1e-15 && a[2].norm() < 1e-15);

    let h = measure(&s, Basis::Z, 1000, 1).unwrap();
    assert!(h.counts.keys().all(|k| k == "00" || k == "11"));

    let c = concurrence(&DensityMatrix::from_state(&s).unwrap()).unwrap();
    assert!((c - 1.0).abs() < 1e-9);
}

#[test]
fn bell_preparation_checks_its_inputs() {
    let mut s = StateVector::new(2).unwrap();
    assert!(prepare_bell(&mut s, 1, 1).is_err());
    let mut s = StateVector::basis(2, 1).unwrap();
    assert!(matches!(
        prepare_bell(&mut s, 0, 1),
        Err(QmeshError::Validation(_))
    ));
    let mut s = StateVector::new(2).unwrap();
    assert!(matches!(
        prepare_bell(&mut s, 0, 5),
        Err(QmeshError::QubitIndex { .. })
    ));
}

#[test]
fn zero_message_survives_every_branch() {
    let zero = StateVector::new(1).unwrap();
    for bits in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let mut s = teleport_register(&zero);
        let r = teleport_branch(&mut s, 0, (1, 2), bits).unwrap();
        assert_eq!(r.classical_bits, bits);
        assert!((r.fidelity_vs_input - 1.0).abs() < 1e-10);
        let out = r.output_pure().unwrap();
        assert!((out.amplitudes()[0].norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn plus_message_is_teleported_exactly() {
    let mut rng = seed::substream(3, "test");
    let mut s = teleport_register(&plus());
    let r = teleport(&mut s, 0, (1, 2), &mut rng).unwrap();
    assert!((r.fidelity_vs_input - 1.0).abs() < 1e-10);
}

#[test]
fn random_messages_are_teleported_on_all_branches() {
    let mut rng = seed::substream(5, "messages");
    for _ in 0..25 {
        let msg = random_qubit(&mut rng);
        for bits in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let mut s = teleport_register(&msg);
            let r = teleport_branch(&mut s, 0, (1, 2), bits).unwrap();
            let out = r.output_pure().unwrap();
            let overlap = msg.inner(&out).unwrap().norm_sqr();
            assert!(overlap >= 1.0 - 1e-10, "{bits:?}: {overlap}");
        }
    }
}

#[test]
fn teleport_requires_distinct_qubits() {
    let mut rng = seed::substream(0, "t");
    let mut s = teleport_register(&plus());
    assert!(teleport(&mut s, 1, (1, 2), &mut rng).is_err());
}

#[test]
fn qpe_reads_exact_phases() {
    // (phase, ancillas, expected readout value)
    for (phase, t, expected) in [
        (PI, 1, 1usize),
        (FRAC_PI_2, 2, 1),
        (0.0, 3, 0),
        (3.0 * FRAC_PI_2, 2, 3),
    ] {
        let mut s = StateVector::basis(t + 1, 1).unwrap();
        let ancillas: Vec<usize> = (1..=t).collect();
        qpe(&mut s, &ancillas, 0, phase).unwrap();
        let dist = ancilla_distribution(&s, &ancillas).unwrap();
        assert!(
            (dist[expected] - 1.0).abs() < 1e-10,
            "phase {phase}: {dist:?}"
        );
    }
}

#[test]
fn qpe_two_ancilla_bitstring() {
    let mut s = StateVector::basis(3, 1).unwrap();
    qpe(&mut s, &[1, 2], 0, FRAC_PI_2).unwrap();
    let h = measure(&s, Basis::Z, 500, 2).unwrap();
    let marginal = h.marginal(&[1, 2]).unwrap();
    assert_eq!(marginal.count("01"), 500);
}

#[test]
fn qpe_without_ancillas_is_a_no_op() {
    let mut s = StateVector::basis(2, 1).unwrap();
    let before = s.clone();
    qpe(&mut s, &[], 0, 1.0).unwrap();
    assert_eq!(s, before);
}

/// Closed form of the Werner-state concurrence, checked against the
/// eigenvalues of the non-Hermitian product `rho * rho~` computed directly.
#[test]
fn werner_state_concurrence() {
    let w = 0.5;
    let bell = DensityMatrix::from_state(&bell()).unwrap();
    let rho = bell
        .mix(&DensityMatrix::maximally_mixed(2).unwrap(), w)
        .unwrap();
    let c = concurrence(&rho).unwrap();

    let re = DMatrix::from_fn(4, 4, |i, j| rho.matrix()[(i, j)].re);
    let yy = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0,
        ],
    );
    let tilde = &yy * &re * &yy;
    let mut l: Vec<f64> = (&re * &tilde)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    let oracle = (l[0] - l[1] - l[2] - l[3]).max(0.0);

    assert!((oracle - 0.25).abs() < 1e-9);
    assert!((c - oracle).abs() < 1e-6, "{c} vs {oracle}");
    assert!((c - ((3.0 * w - 1.0) / 2.0)).abs() < 1e-6);
}

#[test]
fn single_vehicle_run_matches_hand_trace() {
    // Bell(0,1), H(2); CX(0,1) then H(0) returns qubits 0 and 1 to |00>, so
    // both outcomes are 0 and qubit 2 stays in |+>.
    let cfg = ProtocolConfig {
        n_vehicles: 1,
        shots: 2000,
        seed: 17,
        ..Default::default()
    };
    let r = run_protocol(&cfg).unwrap();
    let z = r.histogram(Basis::Z);
    assert!(z.counts.keys().all(|k| k == "000" || k == "100"));
    assert!(z.counts.len() < 8);
    assert!((z.frequency("100") - 0.5).abs() < 0.05);
    let x = r.histogram(Basis::X);
    assert!(x.counts.keys().all(|k| k.starts_with('0')));
    // maximally mixed message half against |+>
    assert!((r.teleport_fidelities[0] - 0.5).abs() < 1e-10);
    assert_eq!(run_protocol(&cfg).unwrap(), r);
}

#[test]
fn histogram_totals_equal_shots() {
    let cfg = ProtocolConfig {
        n_vehicles: 2,
        rounds: 2,
        qpe_ancillas: 1,
        shots: 300,
        noise: NoiseModel::depolarizing(0.05).unwrap(),
        seed: 4,
        ..Default::default()
    };
    let r = run_protocol(&cfg).unwrap();
    assert_eq!(r.histograms.len(), 3);
    for h in &r.histograms {
        assert_eq!(h.shots, 300);
        assert_eq!(h.counts.values().sum::<u64>(), 300);
        assert_eq!(h.n_qubits, 7);
    }
}

#[test]
fn four_vehicle_run_is_bit_identical() {
    let cfg = ProtocolConfig {
        n_vehicles: 4,
        shots: 200,
        seed: 99,
        ..Default::default()
    };
    let a = run_protocol(&cfg).unwrap();
    let b = run_protocol(&cfg).unwrap();
    assert_eq!(a.to_json().to_string(), b.to_json().to_string());
    let c = run_protocol(&ProtocolConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a.histograms, c.histograms);
}

#[test]
fn prepared_pairs_exceed_thresholds() {
    let r = run_protocol(&ProtocolConfig {
        n_vehicles: 3,
        shots: 20,
        ..Default::default()
    })
    .unwrap();
    for e in &r.entanglement {
        assert!(e.concurrence >= 0.99, "{e:?}");
        assert!(e.entropy_bits >= 0.99, "{e:?}");
    }
}

#[test]
fn reset_per_round_repeats_the_first_round() {
    let base = ProtocolConfig {
        n_vehicles: 2,
        shots: 100,
        seed: 8,
        ..Default::default()
    };
    let one = run_protocol(&base).unwrap();
    let two = run_protocol(&ProtocolConfig {
        rounds: 2,
        reset_per_round: true,
        ..base
    })
    .unwrap();
    for (a, b) in one.teleport_fidelities.iter().zip(&two.teleport_fidelities) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn oversized_protocol_is_a_capacity_error() {
    let err = run_protocol(&ProtocolConfig {
        n_vehicles: 7,
        ..Default::default()
    })
    .unwrap_err();
    assert!(
        matches!(err, QmeshError::Capacity { requested: 21, .. }),
        "{err}"
    );
    assert!(err.to_string().contains("21"));
}

#[test]
fn invalid_protocol_configs() {
    for cfg in [
        ProtocolConfig {
            n_vehicles: 0,
            ..Default::default()
        },
        ProtocolConfig {
            rounds: 0,
            ..Default::default()
        },
        ProtocolConfig {
            shots: 0,
            ..Default::default()
        },
    ] {
        assert!(matches!(run_protocol(&cfg), Err(QmeshError::Validation(_))));
    }
}

#[test]
fn report_json_layout() {
    let r = run_protocol(&ProtocolConfig {
        n_vehicles: 1,
        shots: 10,
        ..Default::default()
    })
    .unwrap();
    let v = r.to_json();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(
        keys,
        [
            "config",
            "histograms",
            "teleport_fidelities",
            "entanglement"
        ]
    );
    let bases: Vec<&String> = v["histograms"].as_object().unwrap().keys().collect();
    assert_eq!(bases, ["Z", "X", "Y"]);
    assert_eq!(v["entanglement"][0]["vehicle"], 0);
    assert!(v["entanglement"][0]["concurrence"].is_number());
    assert_eq!(v["config"]["n_vehicles"], 1);
}

#[test]
fn noise_lowers_teleport_fidelity() {
    let f: Vec<f64> = [0.0, 0.05, 0.1, 0.2]
        .iter()
        .map(|&p| {
            teleport_fidelity_under_noise(&NoiseModel::depolarizing(p).unwrap(), 2000, 12).unwrap()
        })
        .collect();
    assert!((f[0] - 1.0).abs() < 1e-10);
    for w in f.windows(2) {
        assert!(w[1] <= w[0], "{f:?}");
    }
}

#[test]
fn gate_noise_in_protocol_reduces_bell_concurrence() {
    let noisy = run_protocol(&ProtocolConfig {
        n_vehicles: 1,
        shots: 500,
        noise: NoiseModel::depolarizing(0.2).unwrap(),
        ..Default::default()
    })
    .unwrap();
    assert!(noisy.entanglement[0].concurrence < 0.95);
}

/// The in-register message is half of a Bell pair and the resource pair is
/// `I/2 (x) |+>`, so every output is pure and its fidelity with `I/2` is 1/2
/// with or without noise.
#[test]
fn in_register_fidelity_is_one_half() {
    for p in [0.0, 0.2] {
        let config = ProtocolConfig {
            n_vehicles: 2,
            shots: 200,
            noise: NoiseModel::depolarizing(p).unwrap(),
            ..ProtocolConfig::default()
        };
        for f in run_protocol(&config).unwrap().teleport_fidelities {
            assert!((f - 0.5).abs() < 1e-9, "p={p}: {f}");
        }
    }
}
