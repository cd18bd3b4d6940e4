//! Builds the three-phase nonlocal controlled-unitary protocol and the
//! monolithic gate it is supposed to implement.
//!
//! Wire layout: `q0` is Alice's control, `q1..=qk` are Bob's targets,
//! `q{k+1}`/`q{k+2}` are Alice's and Bob's halves of the Bell pair.

use thiserror::Error;

use crate::gatelang::literal_of;
use crate::protocol::{Bit, ExternalWire, Gate, Instruction, Party, Pauli, Phase, Program, Qubit};
use crate::qsim::{controlled, gates, QsimError, Unitary};
use crate::scalar::Real;

pub const MAX_TARGET_QUBITS: usize = 8;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum BuildError {
    #[error("target register must have 1..={MAX_TARGET_QUBITS} qubits, got {0}")]
    TargetSize(usize),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// The unitary to be controlled across the cut.
#[derive(Clone, Debug, PartialEq)]
pub struct NonlocalCU<T: Real = f64> {
    gate: Gate<T>,
}

impl<T: Real> NonlocalCU<T> {
    /// `label` is the gate-expression text used when the program is written
    /// out; without one the matrix is written as a literal.
    pub fn new(c: Unitary<T>, label: Option<&str>) -> Result<Self, BuildError> {
        let k = c.n_qubits();
        if !(1..=MAX_TARGET_QUBITS).contains(&k) {
            return Err(BuildError::TargetSize(k));
        }
        let label = label.map_or_else(|| literal_of(&c).to_string(), str::to_string);
        Ok(Self {
            gate: Gate::new(label, c),
        })
    }

    pub fn unitary(&self) -> &Unitary<T> {
        &self.gate.matrix
    }

    pub fn label(&self) -> &str {
        &self.gate.label
    }

    pub fn k(&self) -> usize {
        self.gate.matrix.n_qubits()
    }

    pub fn control(&self) -> Qubit {
        Qubit(0)
    }

    pub fn targets(&self) -> Vec<Qubit> {
        (1..=self.k() as u32).map(Qubit).collect()
    }

    pub fn bell_wires(&self) -> (Qubit, Qubit) {
        let k = self.k() as u32;
        (Qubit(k + 1), Qubit(k + 2))
    }
}

pub const C1: Bit = Bit(1);
pub const C2: Bit = Bit(2);

/// The twelve-instruction protocol: one ebit, one bit each way.
pub fn build_program<T: Real>(spec: &NonlocalCU<T>) -> Program<T> {
    let control = spec.control();
    let targets = spec.targets();
    let (a, b) = spec.bell_wires();

    let mut external = vec![ExternalWire {
        wire: control,
        party: Party::Alice,
    }];
    external.extend(targets.iter().map(|&wire| ExternalWire {
        wire,
        party: Party::Bob,
    }));

    let mut p = Program::new(external);
    p.push(
        Phase::Distribution,
        Instruction::MakeBellPair { alice: a, bob: b },
    )
    .push(
        Phase::Interaction,
        Instruction::ApplyControlledLocal {
            party: Party::Alice,
            control,
            targets: vec![a],
            gate: Gate::new("X", gates::x()),
        },
    )
    .push(
        Phase::Interaction,
        Instruction::MeasureZ {
            party: Party::Alice,
            wire: a,
            out: C1,
        },
    )
    .push(
        Phase::Interaction,
        Instruction::SendBit {
            from: Party::Alice,
            to: Party::Bob,
            bit: C1,
        },
    )
    .push(
        Phase::Interaction,
        Instruction::ConditionalPauli {
            party: Party::Bob,
            wire: b,
            pauli: Pauli::X,
            bit: C1,
        },
    )
    .push(
        Phase::Interaction,
        Instruction::ApplyControlledLocal {
            party: Party::Bob,
            control: b,
            targets,
            gate: spec.gate.clone(),
        },
    )
    .push(
        Phase::Return,
        Instruction::ApplyLocal {
            party: Party::Bob,
            wires: vec![b],
            gate: Gate::new("H", gates::h()),
        },
    )
    .push(
        Phase::Return,
        Instruction::MeasureZ {
            party: Party::Bob,
            wire: b,
            out: C2,
        },
    )
    .push(
        Phase::Return,
        Instruction::SendBit {
            from: Party::Bob,
            to: Party::Alice,
            bit: C2,
        },
    )
    .push(
        Phase::Return,
        Instruction::ConditionalPauli {
            party: Party::Alice,
            wire: control,
            pauli: Pauli::Z,
            bit: C2,
        },
    )
    .push(Phase::Return, Instruction::DiscardBit { bit: C1 })
    .push(Phase::Return, Instruction::DiscardBit { bit: C2 });
    p
}

/// `controlled(C)` on `[control, targets…]`.
pub fn build_specification<T: Real>(spec: &NonlocalCU<T>) -> Result<Unitary<T>, BuildError> {
    Ok(controlled(spec.unitary())?)
}

/// Deliberate single-point breakages of the builder program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Both Bell-pair halves start in `|0⟩` instead of entangled.
    DropBell,
    DropXCorrection,
    DropZCorrection,
    DropControlledGate,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [
        Mutation::DropBell,
        Mutation::DropXCorrection,
        Mutation::DropZCorrection,
        Mutation::DropControlledGate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::DropBell => "drop-bell",
            Mutation::DropXCorrection => "drop-x-correction",
            Mutation::DropZCorrection => "drop-z-correction",
            Mutation::DropControlledGate => "drop-cgate",
        }
    }
}

/// Applies `m` to the first matching instruction. `None` if the program has
/// nothing to break, which never happens for [`build_program`] output.
pub fn mutate<T: Real>(p: &Program<T>, m: Mutation) -> Option<Program<T>> {
    let find = |pred: &dyn Fn(&Instruction<T>) -> bool| p.instructions().iter().position(pred);
    match m {
        Mutation::DropBell => {
            let i = find(&|ins| matches!(ins, Instruction::MakeBellPair { .. }))?;
            let Instruction::MakeBellPair { alice, bob } = p.instructions()[i] else {
                unreachable!()
            };
            Some(p.with_replaced(
                i,
                vec![
                    Instruction::AllocQubit {
                        party: Party::Alice,
                        wire: alice,
                        value: false,
                    },
                    Instruction::AllocQubit {
                        party: Party::Bob,
                        wire: bob,
                        value: false,
                    },
                ],
            ))
        }
        Mutation::DropXCorrection => find(&|ins| {
            matches!(
                ins,
                Instruction::ConditionalPauli {
                    pauli: Pauli::X,
                    ..
                }
            )
        })
        .map(|i| p.without(i)),
        Mutation::DropZCorrection => find(&|ins| {
            matches!(
                ins,
                Instruction::ConditionalPauli {
                    pauli: Pauli::Z,
                    ..
                }
            )
        })
        .map(|i| p.without(i)),
        Mutation::DropControlledGate => find(&|ins| {
            matches!(
                ins,
                Instruction::ApplyControlledLocal {
                    party: Party::Bob,
                    ..
                }
            )
        })
        .map(|i| p.without(i)),
    }
}
