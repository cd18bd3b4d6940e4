//! Single-instruction locality breakers for builder programs.

use rand::Rng;
use telegate::builder::C1;
use telegate::protocol::{Gate, Instruction, Party, Pauli, Qubit};
use telegate::qsim::gates;

/// An instruction in which `party` acts on a wire the other party owns.
pub fn cross_party<R: Rng>(rng: &mut R, k: u32) -> Instruction {
    let alice_wires = [Qubit(0), Qubit(k + 1)];
    let bob_wires: Vec<Qubit> = (1..=k).chain([k + 2]).map(Qubit).collect();
    let (party, foreign, own) = if rng.random_bool(0.5) {
        (
            Party::Alice,
            bob_wires[rng.random_range(0..bob_wires.len())],
            Qubit(0),
        )
    } else {
        (Party::Bob, alice_wires[rng.random_range(0..2)], Qubit(1))
    };
    match rng.random_range(0..4) {
        0 => Instruction::ApplyLocal {
            party,
            wires: vec![foreign],
            gate: Gate::new("Z", gates::z()),
        },
        1 => Instruction::ApplyLocal {
            party,
            wires: vec![own, foreign],
            gate: Gate::new("CNOT", gates::cnot()),
        },
        2 => Instruction::ApplyControlledLocal {
            party,
            control: own,
            targets: vec![foreign],
            gate: Gate::new("X", gates::x()),
        },
        _ => Instruction::ConditionalPauli {
            party,
            wire: foreign,
            pauli: Pauli::Z,
            bit: C1,
        },
    }
}
