//! Deferred-measurement reference semantics, written independently of the
//! branching executor: every measurement is postponed to the end, every
//! classically controlled Pauli becomes a quantum-controlled one, and the
//! register is never collapsed.

#![allow(dead_code)]

use telegate::protocol::{Bit, Instruction, Pauli, Program, Qubit};
use telegate::qsim::{controlled, gates, State};
use telegate::Complex;

pub struct Dilation {
    pub state: State<f64>,
    pub slots: Vec<Qubit>,
    /// Slot of the qubit each bit was measured from, in measurement order.
    pub measured: Vec<(Bit, usize)>,
    pub n_external: usize,
}

fn bell() -> State<f64> {
    let r = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex::new(0.0, 0.0);
    State::from_amplitudes(vec![r, z, z, r]).unwrap()
}

pub fn dilate(p: &Program<f64>, input: &State<f64>) -> Dilation {
    let mut state = input.clone();
    let mut slots: Vec<Qubit> = p.external().iter().map(|e| e.wire).collect();
    let mut measured: Vec<(Bit, usize)> = Vec::new();
    let slot =
        |slots: &[Qubit], w: &Qubit| slots.iter().position(|s| s == w).expect("wire defined");
    for ins in p.instructions() {
        match ins {
            Instruction::AllocQubit { wire, value, .. } => {
                state = state
                    .kron(&State::basis(1, usize::from(*value)).unwrap())
                    .unwrap();
                slots.push(*wire);
            }
            Instruction::MakeBellPair { alice, bob } => {
                state = state.kron(&bell()).unwrap();
                slots.push(*alice);
                slots.push(*bob);
            }
            Instruction::ApplyLocal { wires, gate, .. } => {
                let pos: Vec<usize> = wires.iter().map(|w| slot(&slots, w)).collect();
                state = state.apply_unitary(&pos, &gate.matrix).unwrap();
            }
            Instruction::ApplyControlledLocal {
                control,
                targets,
                gate,
                ..
            } => {
                let mut pos = vec![slot(&slots, control)];
                pos.extend(targets.iter().map(|w| slot(&slots, w)));
                state = state
                    .apply_unitary(&pos, &controlled(&gate.matrix).unwrap())
                    .unwrap();
            }
            Instruction::MeasureZ { wire, out, .. } => measured.push((*out, slot(&slots, wire))),
            Instruction::ConditionalPauli {
                wire, pauli, bit, ..
            } => {
                let ctrl = measured
                    .iter()
                    .find(|(b, _)| b == bit)
                    .expect("bit measured")
                    .1;
                let pauli = match pauli {
                    Pauli::X => gates::x(),
                    Pauli::Z => gates::z(),
                };
                state = state
                    .apply_unitary(&[ctrl, slot(&slots, wire)], &controlled(&pauli).unwrap())
                    .unwrap();
            }
            Instruction::SendBit { .. } | Instruction::DiscardBit { .. } => {}
        }
    }
    Dilation {
        state,
        slots,
        measured,
        n_external: p.n_external(),
    }
}

/// Reduced density matrix of the external wires (the leading slots).
pub fn reduced_density(d: &Dilation) -> Vec<Vec<Complex<f64>>> {
    let dim_ext = 1usize << d.n_external;
    let rest = d.state.dim() / dim_ext;
    let psi = d.state.amplitudes();
    let mut rho = vec![vec![Complex::new(0.0, 0.0); dim_ext]; dim_ext];
    for i in 0..dim_ext {
        for j in 0..dim_ext {
            for k in 0..rest {
                rho[i][j] += psi[i * rest + k] * psi[j * rest + k].conj();
            }
        }
    }
    rho
}

/// Every assignment of measurement outcomes: (bits in measurement order,
/// probability, normalized external state or None if the probability is 0).
pub fn branches(d: &Dilation) -> Vec<(Vec<bool>, f64, Option<State<f64>>)> {
    let n_total = d.slots.len();
    let m = d.measured.len();
    assert_eq!(n_total, d.n_external + m, "every internal wire is measured");
    let dim_ext = 1usize << d.n_external;
    let psi = d.state.amplitudes();
    let mut out = Vec::new();
    for assignment in 0..(1usize << m) {
        let bits: Vec<bool> = (0..m)
            .map(|i| (assignment >> (m - 1 - i)) & 1 == 1)
            .collect();
        let mut internal_index = 0usize;
        for ((_, pos), b) in d.measured.iter().zip(&bits) {
            if *b {
                internal_index |= 1 << (n_total - 1 - pos);
            }
        }
        let amps: Vec<Complex<f64>> = (0..dim_ext)
            .map(|i| psi[(i << m) | internal_index])
            .collect();
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let state = (p > 1e-14).then(|| State::normalized(amps).unwrap());
        out.push((bits, p, state));
    }
    out
}
