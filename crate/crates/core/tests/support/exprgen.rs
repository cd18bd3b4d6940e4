//! Seeded random gate expressions that are well-typed by construction.

use rand::Rng;
use telegate::gatelang::{literal_of, GateExpr, NamedGate, ParamGate};
use telegate::qsim::{random, Unitary};

pub fn expr<R: Rng>(n_qubits: usize, depth: usize, rng: &mut R) -> GateExpr {
    let leaf = depth == 0 || rng.random_bool(0.3);
    if leaf {
        return match (n_qubits, rng.random_range(0..3)) {
            (1, 0) => GateExpr::Named(NamedGate::ALL[rng.random_range(0..NamedGate::ALL.len())]),
            (1, 1) => {
                let g = ParamGate::ALL[rng.random_range(0..ParamGate::ALL.len())];
                GateExpr::Param(g, rng.random_range(-7.0..7.0))
            }
            _ => {
                let u: Unitary = random::haar_unitary(1 << n_qubits, rng).unwrap();
                literal_of(&u)
            }
        };
    }
    match rng.random_range(0..3) {
        0 => GateExpr::product(
            expr(n_qubits, depth - 1, rng),
            expr(n_qubits, depth - 1, rng),
        ),
        1 => GateExpr::adjoint(expr(n_qubits, depth - 1, rng)),
        _ if n_qubits == 2 => GateExpr::tensor(expr(1, depth - 1, rng), expr(1, depth - 1, rng)),
        _ => GateExpr::product(
            expr(1, depth - 1, rng),
            GateExpr::adjoint(expr(1, depth - 1, rng)),
        ),
    }
}
