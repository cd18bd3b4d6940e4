use std::collections::HashMap;
use std::fmt;

use super::{Bit, Instruction, Party, Program, Qubit, WireRef};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A single-party instruction touches a qubit owned by the other party.
    CrossPartyQuantumTouch {
        party: Party,
        owner: Party,
    },
    UndefinedWire,
    WireRedefined,
    DuplicateWire,
    UseAfterMeasurement,
    ExternalMeasured,
    InternalNeverMeasured,
    GateArity {
        wires: usize,
        gate_qubits: usize,
    },
    ReadBeforeWrite,
    ReadAfterDiscard,
    /// The reading party never measured or received the bit.
    BitNotHeld {
        party: Party,
    },
    DoubleWrite,
    SelfSend,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CrossPartyQuantumTouch { party, owner } => {
                write!(
                    f,
                    "cross-party quantum touch ({party} acts on a wire owned by {owner})"
                )
            }
            Self::UndefinedWire => f.write_str("undefined quantum wire"),
            Self::WireRedefined => f.write_str("quantum wire defined twice"),
            Self::DuplicateWire => f.write_str("wire listed twice in one instruction"),
            Self::UseAfterMeasurement => f.write_str("quantum wire used after measurement"),
            Self::ExternalMeasured => f.write_str("external wire measured"),
            Self::InternalNeverMeasured => f.write_str("internal wire never measured"),
            Self::GateArity { wires, gate_qubits } => {
                write!(
                    f,
                    "gate arity mismatch ({gate_qubits}-qubit gate on {wires} wire(s))"
                )
            }
            Self::ReadBeforeWrite => f.write_str("read before write"),
            Self::ReadAfterDiscard => f.write_str("read after discard"),
            Self::BitNotHeld { party } => {
                write!(f, "classical bit read by {party} without crossing the cut")
            }
            Self::DoubleWrite => f.write_str("classical wire written twice"),
            Self::SelfSend => f.write_str("send from a party to itself"),
        }
    }
}

/// A locality or wire-discipline violation. `index` is the offending
/// instruction, or `None` for problems with the external-wire declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub index: Option<usize>,
    pub wire: Option<WireRef>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "instruction {i}: {}", self.kind)?,
            None => write!(f, "external wires: {}", self.kind)?,
        }
        if let Some(w) = self.wire {
            write!(f, " [{w}]")?;
        }
        Ok(())
    }
}

struct QubitInfo {
    owner: Party,
    measured: bool,
    external: bool,
    defined_at: Option<usize>,
}

#[derive(Default)]
struct BitInfo {
    held_by_alice: bool,
    held_by_bob: bool,
    discarded: bool,
}

impl BitInfo {
    fn holds(&self, p: Party) -> bool {
        match p {
            Party::Alice => self.held_by_alice,
            Party::Bob => self.held_by_bob,
        }
    }

    fn give(&mut self, p: Party) {
        match p {
            Party::Alice => self.held_by_alice = true,
            Party::Bob => self.held_by_bob = true,
        }
    }
}

struct Checker {
    qubits: HashMap<Qubit, QubitInfo>,
    bits: HashMap<Bit, BitInfo>,
    violations: Vec<Violation>,
}

impl Checker {
    fn flag(&mut self, index: Option<usize>, wire: Option<WireRef>, kind: ViolationKind) {
        self.violations.push(Violation { index, wire, kind });
    }

    fn define(&mut self, index: usize, wire: Qubit, owner: Party) {
        if self.qubits.contains_key(&wire) {
            self.flag(
                Some(index),
                Some(WireRef::Quantum(wire)),
                ViolationKind::WireRedefined,
            );
            return;
        }
        self.qubits.insert(
            wire,
            QubitInfo {
                owner,
                measured: false,
                external: false,
                defined_at: Some(index),
            },
        );
    }

    fn touch(&mut self, index: usize, party: Party, wire: Qubit) {
        let kind = match self.qubits.get(&wire) {
            None => ViolationKind::UndefinedWire,
            Some(q) if q.owner != party => ViolationKind::CrossPartyQuantumTouch {
                party,
                owner: q.owner,
            },
            Some(q) if q.measured => ViolationKind::UseAfterMeasurement,
            Some(_) => return,
        };
        self.flag(Some(index), Some(WireRef::Quantum(wire)), kind);
    }

    fn distinct(&mut self, index: usize, wires: &[Qubit]) {
        for (i, w) in wires.iter().enumerate() {
            if wires[..i].contains(w) {
                self.flag(
                    Some(index),
                    Some(WireRef::Quantum(*w)),
                    ViolationKind::DuplicateWire,
                );
            }
        }
    }

    fn read(&mut self, index: usize, party: Party, bit: Bit) {
        let kind = match self.bits.get(&bit) {
            None => ViolationKind::ReadBeforeWrite,
            Some(b) if b.discarded => ViolationKind::ReadAfterDiscard,
            Some(b) if !b.holds(party) => ViolationKind::BitNotHeld { party },
            Some(_) => return,
        };
        self.flag(Some(index), Some(WireRef::Classical(bit)), kind);
    }

    fn gate_arity(&mut self, index: usize, wires: usize, gate_qubits: usize) {
        if wires != gate_qubits {
            self.flag(
                Some(index),
                None,
                ViolationKind::GateArity { wires, gate_qubits },
            );
        }
    }

    fn step<T: Real>(&mut self, index: usize, ins: &Instruction<T>) {
        match ins {
            Instruction::AllocQubit { party, wire, .. } => self.define(index, *wire, *party),
            Instruction::MakeBellPair { alice, bob } => {
                if alice == bob {
                    self.flag(
                        Some(index),
                        Some(WireRef::Quantum(*alice)),
                        ViolationKind::DuplicateWire,
                    );
                    return;
                }
                self.define(index, *alice, Party::Alice);
                self.define(index, *bob, Party::Bob);
            }
            Instruction::ApplyLocal { party, wires, gate } => {
                self.gate_arity(index, wires.len(), gate.matrix.n_qubits());
                self.distinct(index, wires);
                for w in wires {
                    self.touch(index, *party, *w);
                }
            }
            Instruction::ApplyControlledLocal {
                party,
                control,
                targets,
                gate,
            } => {
                self.gate_arity(index, targets.len(), gate.matrix.n_qubits());
                self.distinct(index, &ins.qubits());
                self.touch(index, *party, *control);
                for w in targets {
                    self.touch(index, *party, *w);
                }
            }
            Instruction::MeasureZ { party, wire, out } => {
                self.touch(index, *party, *wire);
                if let Some(q) = self.qubits.get_mut(wire) {
                    if q.external {
                        self.flag(
                            Some(index),
                            Some(WireRef::Quantum(*wire)),
                            ViolationKind::ExternalMeasured,
                        );
                    } else {
                        q.measured = true;
                    }
                }
                if self.bits.contains_key(out) {
                    self.flag(
                        Some(index),
                        Some(WireRef::Classical(*out)),
                        ViolationKind::DoubleWrite,
                    );
                } else {
                    let mut info = BitInfo::default();
                    info.give(*party);
                    self.bits.insert(*out, info);
                }
            }
            Instruction::SendBit { from, to, bit } => {
                if from == to {
                    self.flag(
                        Some(index),
                        Some(WireRef::Classical(*bit)),
                        ViolationKind::SelfSend,
                    );
                }
                self.read(index, *from, *bit);
                if let Some(b) = self.bits.get_mut(bit) {
                    b.give(*to);
                }
            }
            Instruction::ConditionalPauli {
                party, wire, bit, ..
            } => {
                self.touch(index, *party, *wire);
                self.read(index, *party, *bit);
            }
            Instruction::DiscardBit { bit } => {
                let kind = match self.bits.get_mut(bit) {
                    None => ViolationKind::ReadBeforeWrite,
                    Some(b) if b.discarded => ViolationKind::ReadAfterDiscard,
                    Some(b) => {
                        b.discarded = true;
                        return;
                    }
                };
                self.flag(Some(index), Some(WireRef::Classical(*bit)), kind);
            }
        }
    }
}

/// Checks the program against the locality cut and the wire disciplines in
/// one pass, collecting every violation instead of stopping at the first.
pub fn validate_locality<T: Real>(p: &Program<T>) -> Result<(), Vec<Violation>> {
    let mut ck = Checker {
        qubits: HashMap::new(),
        bits: HashMap::new(),
        violations: Vec::new(),
    };
    for ext in p.external() {
        if ck.qubits.contains_key(&ext.wire) {
            ck.flag(
                None,
                Some(WireRef::Quantum(ext.wire)),
                ViolationKind::WireRedefined,
            );
            continue;
        }
        ck.qubits.insert(
            ext.wire,
            QubitInfo {
                owner: ext.party,
                measured: false,
                external: true,
                defined_at: None,
            },
        );
    }
    for (i, ins) in p.instructions().iter().enumerate() {
        ck.step(i, ins);
    }
    let mut dangling: Vec<(usize, Qubit)> = ck
        .qubits
        .iter()
        .filter(|(_, q)| !q.external && !q.measured)
        .filter_map(|(w, q)| q.defined_at.map(|i| (i, *w)))
        .collect();
    dangling.sort();
    for (i, w) in dangling {
        ck.flag(
            Some(i),
            Some(WireRef::Quantum(w)),
            ViolationKind::InternalNeverMeasured,
        );
    }
    if ck.violations.is_empty() {
        Ok(())
    } else {
        ck.violations.sort_by_key(|v| v.index.map_or(0, |i| i + 1));
        Err(ck.violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{ExternalWire, Gate, Pauli, Phase};
    use crate::qsim::gates;

    fn ext() -> Vec<ExternalWire> {
        vec![
            ExternalWire {
                wire: Qubit(0),
                party: Party::Alice,
            },
            ExternalWire {
                wire: Qubit(1),
                party: Party::Bob,
            },
        ]
    }

    fn kinds(p: &Program) -> Vec<(Option<usize>, ViolationKind)> {
        validate_locality(p)
            .unwrap_err()
            .into_iter()
            .map(|v| (v.index, v.kind))
            .collect()
    }

    #[test]
    fn empty_program_is_valid() {
        assert!(validate_locality(&Program::<f64>::new(ext())).is_ok());
    }

    #[test]
    fn cross_party_controlled_gate_is_flagged() {
        let p = Program::new(ext()).with(
            Phase::Unphased,
            Instruction::ApplyControlledLocal {
                party: Party::Alice,
                control: Qubit(0),
                targets: vec![Qubit(1)],
                gate: Gate::new("X", gates::x()),
            },
        );
        assert_eq!(
            kinds(&p),
            vec![(
                Some(0),
                ViolationKind::CrossPartyQuantumTouch {
                    party: Party::Alice,
                    owner: Party::Bob
                }
            )]
        );
        assert!(validate_locality(&p).unwrap_err()[0]
            .to_string()
            .contains("cross-party quantum touch"));
    }

    #[test]
    fn read_before_write_is_flagged() {
        let p = Program::new(ext()).with(
            Phase::Unphased,
            Instruction::ConditionalPauli {
                party: Party::Bob,
                wire: Qubit(1),
                pauli: Pauli::X,
                bit: Bit(1),
            },
        );
        assert_eq!(kinds(&p), vec![(Some(0), ViolationKind::ReadBeforeWrite)]);
    }

    #[test]
    fn bit_must_be_sent_before_remote_use() {
        let p = Program::new(ext())
            .with(
                Phase::Unphased,
                Instruction::AllocQubit {
                    party: Party::Alice,
                    wire: Qubit(2),
                    value: false,
                },
            )
            .with(
                Phase::Unphased,
                Instruction::MeasureZ {
                    party: Party::Alice,
                    wire: Qubit(2),
                    out: Bit(1),
                },
            )
            .with(
                Phase::Unphased,
                Instruction::ConditionalPauli {
                    party: Party::Bob,
                    wire: Qubit(1),
                    pauli: Pauli::Z,
                    bit: Bit(1),
                },
            );
        assert_eq!(
            kinds(&p),
            vec![(Some(2), ViolationKind::BitNotHeld { party: Party::Bob })]
        );
    }

    #[test]
    fn wire_discipline_errors() {
        let p = Program::new(ext())
            .with(
                Phase::Unphased,
                Instruction::MakeBellPair {
                    alice: Qubit(2),
                    bob: Qubit(3),
                },
            )
            .with(
                Phase::Unphased,
                Instruction::MeasureZ {
                    party: Party::Alice,
                    wire: Qubit(0),
                    out: Bit(1),
                },
            )
            .with(
                Phase::Unphased,
                Instruction::MeasureZ {
                    party: Party::Alice,
                    wire: Qubit(2),
                    out: Bit(1),
                },
            )
            .with(
                Phase::Unphased,
                Instruction::ApplyLocal {
                    party: Party::Alice,
                    wires: vec![Qubit(2)],
                    gate: Gate::new("H", gates::h()),
                },
            )
            .with(
                Phase::Unphased,
                Instruction::SendBit {
                    from: Party::Bob,
                    to: Party::Bob,
                    bit: Bit(1),
                },
            )
            .with(Phase::Unphased, Instruction::DiscardBit { bit: Bit(1) })
            .with(Phase::Unphased, Instruction::DiscardBit { bit: Bit(1) });
        let got = kinds(&p);
        assert!(
            got.contains(&(Some(0), ViolationKind::InternalNeverMeasured)),
            "{got:?}"
        );
        assert!(got.contains(&(Some(1), ViolationKind::ExternalMeasured)));
        assert!(got.contains(&(Some(2), ViolationKind::DoubleWrite)));
        assert!(got.contains(&(Some(3), ViolationKind::UseAfterMeasurement)));
        assert!(got.contains(&(Some(4), ViolationKind::SelfSend)));
        assert!(got.contains(&(Some(4), ViolationKind::BitNotHeld { party: Party::Bob })));
        assert!(got.contains(&(Some(6), ViolationKind::ReadAfterDiscard)));
    }

    #[test]
    fn arity_and_duplicates() {
        let p = Program::new(ext())
            .with(
                Phase::Unphased,
                Instruction::ApplyLocal {
                    party: Party::Bob,
                    wires: vec![Qubit(1)],
                    gate: Gate::new("CNOT", gates::cnot()),
                },
            )
            .with(
                Phase::Unphased,
                Instruction::ApplyControlledLocal {
                    party: Party::Bob,
                    control: Qubit(1),
                    targets: vec![Qubit(1)],
                    gate: Gate::new("X", gates::x()),
                },
            );
        assert_eq!(
            kinds(&p),
            vec![
                (
                    Some(0),
                    ViolationKind::GateArity {
                        wires: 1,
                        gate_qubits: 2
                    }
                ),
                (Some(1), ViolationKind::DuplicateWire),
            ]
        );
    }
}
