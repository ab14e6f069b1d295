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

//! Gate definitions and the amplitude kernel shared by pure and mixed states.
//!
//! Qubit 0 is the least-significant bit of an amplitude index.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QmeshError, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Gate family, with its angle where it has one (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", content = "angle")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    CX,
    CZ,
    CPhase(f64),
    Toffoli,
    ISwap,
    Ry(f64),
    Rz(f64),
    /// `[[cos θ, -i sin θ], [-i sin θ, cos θ]]`, i.e. `exp(-iθX)`.
    RotPaper(f64),
    ControlledRz(f64),
}

impl GateKind {
    /// (number of targets, number of controls)
    pub fn arity(&self) -> (usize, usize) {
        match self {
            GateKind::H
            | GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::S
            | GateKind::Sdg
            | GateKind::Ry(_)
            | GateKind::Rz(_)
            | GateKind::RotPaper(_) => (1, 0),
            GateKind::CX | GateKind::CZ | GateKind::CPhase(_) | GateKind::ControlledRz(_) => (1, 1),
            GateKind::Toffoli => (1, 2),
            GateKind::ISwap => (2, 0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::CPhase(_) => "CPHASE",
            GateKind::Toffoli => "Toffoli",
            GateKind::ISwap => "iSWAP",
            GateKind::Ry(_) => "Ry",
            GateKind::Rz(_) => "Rz",
            GateKind::RotPaper(_) => "RotPaper",
            GateKind::ControlledRz(_) => "CRz",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::CPhase(a)
            | GateKind::Ry(a)
            | GateKind::Rz(a)
            | GateKind::RotPaper(a)
            | GateKind::ControlledRz(a) => Some(a),
            _ => None,
        }
    }

    /// Same family with a different angle; unchanged for fixed gates.
    pub fn with_angle(&self, angle: f64) -> GateKind {
        match self {
            GateKind::CPhase(_) => GateKind::CPhase(angle),
            GateKind::Ry(_) => GateKind::Ry(angle),
            GateKind::Rz(_) => GateKind::Rz(angle),
            GateKind::RotPaper(_) => GateKind::RotPaper(angle),
            GateKind::ControlledRz(_) => GateKind::ControlledRz(angle),
            other => *other,
        }
    }

    /// Matrix on the target qubits only (row-major, target 0 is the low bit).
    /// Controls, if any, select the subspace it acts on.
    fn target_matrix(&self) -> Vec<C64> {
        match *self {
            GateKind::H => {
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                vec![h, h, h, -h]
            }
            GateKind::X | GateKind::CX | GateKind::Toffoli => vec![ZERO, ONE, ONE, ZERO],
            GateKind::Y => vec![ZERO, -I, I, ZERO],
            GateKind::Z | GateKind::CZ => vec![ONE, ZERO, ZERO, -ONE],
            GateKind::S => vec![ONE, ZERO, ZERO, I],
            GateKind::Sdg => vec![ONE, ZERO, ZERO, -I],
            GateKind::CPhase(phi) => vec![ONE, ZERO, ZERO, C64::from_polar(1.0, phi)],
            GateKind::Ry(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                vec![
                    C64::new(c, 0.0),
                    C64::new(-s, 0.0),
                    C64::new(s, 0.0),
                    C64::new(c, 0.0),
                ]
            }
            GateKind::Rz(theta) | GateKind::ControlledRz(theta) => vec![
                C64::from_polar(1.0, -theta / 2.0),
                ZERO,
                ZERO,
                C64::from_polar(1.0, theta / 2.0),
            ],
            GateKind::RotPaper(theta) => {
                let (s, c) = theta.sin_cos();
                vec![
                    C64::new(c, 0.0),
                    C64::new(0.0, -s),
                    C64::new(0.0, -s),
                    C64::new(c, 0.0),
                ]
            }
            GateKind::ISwap => vec![
                ONE, ZERO, ZERO, ZERO, //
                ZERO, ZERO, I, ZERO, //
                ZERO, I, ZERO, ZERO, //
                ZERO, ZERO, ZERO, ONE,
            ],
        }
    }
}

/// One gate application: a kind plus the qubits it touches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    #[serde(flatten)]
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, targets: Vec<usize>, controls: Vec<usize>) -> Self {
        GateOp {
            kind,
            targets,
            controls,
        }
    }

    fn single(kind: GateKind, q: usize) -> Self {
        GateOp::new(kind, vec![q], Vec::new())
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }
    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::single(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }
    pub fn s(q: usize) -> Self {
        Self::single(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Self {
        Self::single(GateKind::Sdg, q)
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self::single(GateKind::Ry(theta), q)
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self::single(GateKind::Rz(theta), q)
    }
    pub fn rot_paper(q: usize, theta: f64) -> Self {
        Self::single(GateKind::RotPaper(theta), q)
    }
    pub fn cx(control: usize, target: usize) -> Self {
        GateOp::new(GateKind::CX, vec![target], vec![control])
    }
    pub fn cz(control: usize, target: usize) -> Self {
        GateOp::new(GateKind::CZ, vec![target], vec![control])
    }
    pub fn cphase(control: usize, target: usize, phi: f64) -> Self {
        GateOp::new(GateKind::CPhase(phi), vec![target], vec![control])
    }
    pub fn crz(control: usize, target: usize, theta: f64) -> Self {
        GateOp::new(GateKind::ControlledRz(theta), vec![target], vec![control])
    }
    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        GateOp::new(GateKind::Toffoli, vec![target], vec![c1, c2])
    }
    pub fn iswap(a: usize, b: usize) -> Self {
        GateOp::new(GateKind::ISwap, vec![a, b], Vec::new())
    }

    /// Every qubit the gate touches, targets first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().chain(self.controls.iter()).copied()
    }

    /// Checks arity, index range and distinctness against a register size.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let (nt, nc) = self.kind.arity();
        if self.targets.len() != nt || self.controls.len() != nc {
            return Err(QmeshError::validation(format!(
                "{} expects {nt} target(s) and {nc} control(s), got {} and {}",
                self.kind.name(),
                self.targets.len(),
                self.controls.len()
            )));
        }
        let mut seen = 0u64;
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(QmeshError::QubitIndex { index: q, n_qubits });
            }
            if seen & (1 << q) != 0 {
                return Err(QmeshError::validation(format!(
                    "{} touches qubit {q} twice",
                    self.kind.name()
                )));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    /// Gates whose product (applied in order) is the inverse of this one.
    pub fn inverse(&self) -> Vec<GateOp> {
        let kind = match self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::ISwap => {
                // iSWAP^dagger = iSWAP * (Z x Z)
                let (a, b) = (self.targets[0], self.targets[1]);
                return vec![GateOp::z(a), GateOp::z(b), self.clone()];
            }
            k => match k.angle() {
                Some(a) => k.with_angle(-a),
                None => k,
            },
        };
        vec![GateOp::new(
            kind,
            self.targets.clone(),
            self.controls.clone(),
        )]
    }

    /// Dense unitary on the local register `targets ++ controls`
    /// (local qubit `k` is the k-th entry of that list).
    pub fn unitary(&self) -> DMatrix<C64> {
        let nt = self.targets.len();
        let local = nt + self.controls.len();
        let local_op = GateOp::new(self.kind, (0..nt).collect(), (nt..local).collect());
        let dim = 1usize << local;
        let mut m = DMatrix::zeros(dim, dim);
        let mut column = vec![ZERO; dim];
        for col in 0..dim {
            column.iter_mut().for_each(|a| *a = ZERO);
            column[col] = ONE;
            apply_gate_to_amplitudes(&mut column, &local_op);
            for row in 0..dim {
                m[(row, col)] = column[row];
            }
        }
        m
    }
}

/// Applies `gate` in place to a `2^n` amplitude buffer. The gate must already
/// be validated against the register size.
pub(crate) fn apply_gate_to_amplitudes(amps: &mut [C64], gate: &GateOp) {
    let matrix = gate.kind.target_matrix();
    let ctrl_mask = gate.controls.iter().fold(0usize, |m, &q| m | (1 << q));
    match gate.targets.as_slice() {
        [t] => apply_one_target(amps, *t, ctrl_mask, &matrix),
        targets => apply_multi_target(amps, targets, ctrl_mask, &matrix),
    }
}

fn apply_one_target(amps: &mut [C64], target: usize, ctrl_mask: usize, m: &[C64]) {
    let bit = 1usize << target;
    let (m00, m01, m10, m11) = (m[0], m[1], m[2], m[3]);
    let dim = amps.len();
    // Walk blocks of 2*bit, pairing index i (target 0) with i | bit.
    let mut base = 0;
    while base < dim {
        for i in base..base + bit {
            if i & ctrl_mask != ctrl_mask {
                continue;
            }
            let a0 = amps[i];
            let a1 = amps[i | bit];
            amps[i] = m00 * a0 + m01 * a1;
            amps[i | bit] = m10 * a0 + m11 * a1;
        }
        base += bit << 1;
    }
}

fn apply_multi_target(amps: &mut [C64], targets: &[usize], ctrl_mask: usize, m: &[C64]) {
    let k = targets.len();
    let sub = 1usize << k;
    let target_mask = targets.iter().fold(0usize, |acc, &q| acc | (1 << q));
    let offsets: Vec<usize> = (0..sub)
        .map(|s| {
            targets
                .iter()
                .enumerate()
                .filter(|(bit, _)| s >> bit & 1 == 1)
                .fold(0usize, |acc, (_, &q)| acc | (1 << q))
        })
        .collect();
    let mut gathered = vec![ZERO; sub];
    for base in 0..amps.len() {
        if base & target_mask != 0 || base & ctrl_mask != ctrl_mask {
            continue;
        }
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base | off];
        }
        for (row, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (col, g) in gathered.iter().enumerate() {
                acc += m[row * sub + col] * g;
            }
            amps[base | off] = acc;
        }
    }
}
