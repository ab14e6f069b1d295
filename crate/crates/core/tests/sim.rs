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

use std::f64::consts::PI;

use proptest::prelude::*;
use qmesh_core::sim::{
    apply_inverse_qft, apply_qft, measure, reduced_density, DensityMatrix, GateKind, GateOp,
    QuantumCircuit, StateVector, C64,
};
use qmesh_core::Basis;

fn state(amps: &[(f64, f64)]) -> StateVector {
    StateVector::normalized(amps.iter().map(|&(re, im)| C64::new(re, im)).collect()).unwrap()
}

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter("non-zero", |v| {
        v.iter().any(|&(a, b)| a.abs() + b.abs() > 1e-3)
    })
}

fn gate(n: usize) -> impl Strategy<Value = GateOp> {
    (
        0usize..15,
        -PI..PI,
        Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
    )
        .prop_map(|(k, a, q)| {
            let kind = [
                GateKind::H,
                GateKind::X,
                GateKind::Y,
                GateKind::Z,
                GateKind::S,
                GateKind::Sdg,
                GateKind::Ry(a),
                GateKind::Rz(a),
                GateKind::RotPaper(a),
                GateKind::CX,
                GateKind::CZ,
                GateKind::CPhase(a),
                GateKind::ControlledRz(a),
                GateKind::ISwap,
                GateKind::Toffoli,
            ][k];
            let (nt, nc) = kind.arity();
            GateOp::new(kind, q[..nt].to_vec(), q[nt..nt + nc].to_vec())
        })
}

proptest! {
    #[test]
    fn gates_preserve_norm(amps in amplitudes(5), gates in prop::collection::vec(gate(5), 1..60)) {
        let mut s = state(&amps);
        for g in &gates {
            s.apply(g).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn circuit_then_inverse_is_identity(amps in amplitudes(4), gates in prop::collection::vec(gate(4), 1..30)) {
        let start = state(&amps);
        let mut s = start.clone();
        for g in &gates {
            s.apply(g).unwrap();
        }
        for g in gates.iter().rev() {
            for inv in g.inverse() {
                s.apply(&inv).unwrap();
            }
        }
        for (a, b) in s.amplitudes().iter().zip(start.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn statevector_and_density_routes_agree(amps in amplitudes(3), gates in prop::collection::vec(gate(3), 1..20)) {
        let mut s = state(&amps);
        let mut rho = DensityMatrix::from_state(&s).unwrap();
        let mut circuit = QuantumCircuit::new(3);
        for g in &gates {
            circuit.push(g.clone()).unwrap();
        }
        s.apply_circuit(&circuit).unwrap();
        rho.apply_circuit(&circuit).unwrap();
        let want = DensityMatrix::from_state(&s).unwrap();
        prop_assert!((rho.matrix() - want.matrix()).camax() < 1e-10);
    }

    #[test]
    fn product_states_factor_under_partial_trace(a in amplitudes(2), b in amplitudes(2)) {
        let (low, high) = (state(&a), state(&b));
        let joint = low.tensor(&high).unwrap();
        let got = reduced_density(&joint, &[0, 1]).unwrap();
        let want = DensityMatrix::from_state(&low).unwrap();
        prop_assert!((got.matrix() - want.matrix()).camax() < 1e-10);
        let full = DensityMatrix::from_state(&joint).unwrap();
        let via_density = full.partial_trace(&[2, 3]).unwrap();
        let want = DensityMatrix::from_state(&high).unwrap();
        prop_assert!((via_density.matrix() - want.matrix()).camax() < 1e-10);
    }

    #[test]
    fn qft_round_trip(amps in amplitudes(4)) {
        let s = state(&amps);
        let q = [2, 0, 3];
        let back = apply_inverse_qft(apply_qft(s.clone(), &q).unwrap(), &q).unwrap();
        for (a, b) in back.amplitudes().iter().zip(s.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn qft_matches_dft_matrix() {
    for n in 1..=3usize {
        let dim = 1usize << n;
        let qubits: Vec<usize> = (0..n).collect();
        for j in 0..dim {
            let out = apply_qft(StateVector::basis(n, j).unwrap(), &qubits).unwrap();
            for k in 0..dim {
                let want = C64::from_polar(
                    1.0 / (dim as f64).sqrt(),
                    2.0 * PI * (j * k) as f64 / dim as f64,
                );
                assert!(
                    (out.amplitudes()[k] - want).norm() < 1e-10,
                    "n={n} j={j} k={k}"
                );
            }
        }
    }
}

#[test]
fn uniform_circuit_frequencies() {
    let mut s = StateVector::new(4).unwrap();
    for q in 0..4 {
        s.apply(&GateOp::h(q)).unwrap();
    }
    let hist = measure(&s, Basis::Z, 16_000, 1).unwrap();
    assert_eq!(hist.counts.len(), 16);
    for (key, &c) in &hist.counts {
        let f = c as f64 / 16_000.0;
        assert!((f - 1.0 / 16.0).abs() <= 0.01, "{key}: {f}");
    }
}

#[test]
fn x_and_y_bases_rotate_eigenstates_to_zero() {
    let mut plus = StateVector::new(1).unwrap();
    plus.apply(&GateOp::h(0)).unwrap();
    assert_eq!(
        measure(&plus, Basis::X, 200, 3).unwrap().counts.get("0"),
        Some(&200)
    );

    let mut plus_i = plus.clone();
    plus_i.apply(&GateOp::s(0)).unwrap();
    assert_eq!(
        measure(&plus_i, Basis::Y, 200, 3).unwrap().counts.get("0"),
        Some(&200)
    );
}
