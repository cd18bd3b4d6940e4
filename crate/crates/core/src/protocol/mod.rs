//! Two-party instruction IR.
//!
//! Every quantum wire belongs to exactly one party for its whole lifetime.
//! Classical bits are single-use values: written once by a measurement,
//! moved across the cut only by [`Instruction::SendBit`], and discarded at
//! the end.

use std::fmt;

use serde::Serialize;

use crate::qsim::Unitary;
use crate::scalar::Real;

mod census;
mod text;
mod validate;

pub use census::{resource_census, ResourceCensus};
pub use text::{parse_program, ProgramSource, TextError};
pub use validate::{validate_locality, Violation, ViolationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Self {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Party::Alice => "A",
            Party::Bob => "B",
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "Alice",
            Party::Bob => "Bob",
        })
    }
}

/// Quantum wire, written `q<n>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Qubit(pub u32);

/// Classical single-bit wire, written `c<n>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bit(pub u32);

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WireKind {
    Quantum,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WireRef {
    Quantum(Qubit),
    Classical(Bit),
}

impl WireRef {
    pub fn kind(self) -> WireKind {
        match self {
            WireRef::Quantum(_) => WireKind::Quantum,
            WireRef::Classical(_) => WireKind::Classical,
        }
    }
}

impl fmt::Display for WireRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WireRef::Quantum(q) => q.fmt(f),
            WireRef::Classical(c) => c.fmt(f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Z,
}

/// A unitary together with the expression text it was written as.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate<T: Real = f64> {
    pub label: String,
    pub matrix: Unitary<T>,
}

impl<T: Real> Gate<T> {
    pub fn new(label: impl Into<String>, matrix: Unitary<T>) -> Self {
        Self {
            label: label.into(),
            matrix,
        }
    }
}

/// Which of the three protocol stages an instruction belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    /// ① entanglement distribution
    Distribution,
    /// ② Alice's interaction, message to Bob, Bob's correction and controlled gate
    Interaction,
    /// ③ Bob's measurement, message back, Alice's correction
    Return,
    Unphased,
}

impl Phase {
    pub fn number(self) -> Option<u8> {
        match self {
            Phase::Distribution => Some(1),
            Phase::Interaction => Some(2),
            Phase::Return => Some(3),
            Phase::Unphased => None,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Phase::Distribution),
            2 => Some(Phase::Interaction),
            3 => Some(Phase::Return),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instruction<T: Real = f64> {
    AllocQubit {
        party: Party,
        wire: Qubit,
        value: bool,
    },
    /// Shared `(|00⟩+|11⟩)/√2`; the only way entanglement crosses the cut.
    MakeBellPair {
        alice: Qubit,
        bob: Qubit,
    },
    ApplyLocal {
        party: Party,
        wires: Vec<Qubit>,
        gate: Gate<T>,
    },
    ApplyControlledLocal {
        party: Party,
        control: Qubit,
        targets: Vec<Qubit>,
        gate: Gate<T>,
    },
    MeasureZ {
        party: Party,
        wire: Qubit,
        out: Bit,
    },
    SendBit {
        from: Party,
        to: Party,
        bit: Bit,
    },
    ConditionalPauli {
        party: Party,
        wire: Qubit,
        pauli: Pauli,
        bit: Bit,
    },
    DiscardBit {
        bit: Bit,
    },
}

impl<T: Real> Instruction<T> {
    /// The acting party, for single-party instructions.
    pub fn party(&self) -> Option<Party> {
        match self {
            Self::AllocQubit { party, .. }
            | Self::ApplyLocal { party, .. }
            | Self::ApplyControlledLocal { party, .. }
            | Self::MeasureZ { party, .. }
            | Self::ConditionalPauli { party, .. } => Some(*party),
            Self::MakeBellPair { .. } | Self::SendBit { .. } | Self::DiscardBit { .. } => None,
        }
    }

    pub fn qubits(&self) -> Vec<Qubit> {
        match self {
            Self::AllocQubit { wire, .. }
            | Self::MeasureZ { wire, .. }
            | Self::ConditionalPauli { wire, .. } => {
                vec![*wire]
            }
            Self::MakeBellPair { alice, bob } => vec![*alice, *bob],
            Self::ApplyLocal { wires, .. } => wires.clone(),
            Self::ApplyControlledLocal {
                control, targets, ..
            } => std::iter::once(*control)
                .chain(targets.iter().copied())
                .collect(),
            Self::SendBit { .. } | Self::DiscardBit { .. } => Vec::new(),
        }
    }

    pub fn gate(&self) -> Option<&Gate<T>> {
        match self {
            Self::ApplyLocal { gate, .. } | Self::ApplyControlledLocal { gate, .. } => Some(gate),
            _ => None,
        }
    }
}

/// A quantum wire that is input and output of the program, never measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExternalWire {
    pub wire: Qubit,
    pub party: Party,
}

/// Instruction list with per-instruction phase tags and declared
/// external wires. External wires are ordered: they define the qubit order
/// of the program's input and output states.
#[derive(Clone, Debug, PartialEq)]
pub struct Program<T: Real = f64> {
    external: Vec<ExternalWire>,
    instructions: Vec<Instruction<T>>,
    phases: Vec<Phase>,
}

impl<T: Real> Program<T> {
    pub fn new(external: Vec<ExternalWire>) -> Self {
        Self {
            external,
            instructions: Vec::new(),
            phases: Vec::new(),
        }
    }

    pub fn push(&mut self, phase: Phase, instruction: Instruction<T>) -> &mut Self {
        self.instructions.push(instruction);
        self.phases.push(phase);
        self
    }

    pub fn with(mut self, phase: Phase, instruction: Instruction<T>) -> Self {
        self.push(phase, instruction);
        self
    }

    pub fn external(&self) -> &[ExternalWire] {
        &self.external
    }

    pub fn n_external(&self) -> usize {
        self.external.len()
    }

    pub fn instructions(&self) -> &[Instruction<T>] {
        &self.instructions
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Phase, &Instruction<T>)> {
        self.phases.iter().copied().zip(&self.instructions)
    }

    pub fn is_external(&self, q: Qubit) -> bool {
        self.external.iter().any(|e| e.wire == q)
    }

    /// Copy with instruction `index` removed.
    pub fn without(&self, index: usize) -> Self {
        let mut p = self.clone();
        p.instructions.remove(index);
        p.phases.remove(index);
        p
    }

    /// Copy with `instruction` inserted before position `index`.
    pub fn with_inserted(&self, index: usize, phase: Phase, instruction: Instruction<T>) -> Self {
        let mut p = self.clone();
        p.instructions.insert(index, instruction);
        p.phases.insert(index, phase);
        p
    }

    /// Copy with instruction `index` replaced by the given sequence.
    pub fn with_replaced(&self, index: usize, replacement: Vec<Instruction<T>>) -> Self {
        let mut p = self.clone();
        let phase = p.phases[index];
        let n = replacement.len();
        p.instructions.splice(index..=index, replacement);
        p.phases
            .splice(index..=index, std::iter::repeat_n(phase, n));
        p
    }

    /// Appends `other`'s instructions; external wires are taken from `self`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut p = self.clone();
        p.instructions.extend(other.instructions.iter().cloned());
        p.phases.extend(other.phases.iter().copied());
        p
    }

    /// Serializes to the line-oriented program format.
    pub fn to_text(&self) -> String {
        text::write_program(self)
    }
}
