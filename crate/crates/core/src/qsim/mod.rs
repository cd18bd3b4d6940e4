//! Dense state-vector engine.
//!
//! Basis indices are big-endian: qubit 0 is the most significant bit, so in
//! `kron(a, b)` the factor `a` acts on the lower-numbered qubits.

use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

pub mod gates;
mod matrix;
pub mod random;
mod state;

pub use matrix::{controlled, kron, Unitary};
pub use state::{apply_unitary, fidelity, measure_z, MeasurementBranch, State};

pub const DEFAULT_MAX_QUBITS: usize = 12;

static MAX_QUBITS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_QUBITS);

/// Largest register (in qubits) any state or matrix may span.
pub fn max_qubits() -> usize {
    MAX_QUBITS.load(Ordering::Relaxed)
}

/// Overrides the process-wide register cap.
pub fn set_max_qubits(n: usize) {
    MAX_QUBITS.store(n, Ordering::Relaxed);
}

pub(crate) fn check_qubits(n: usize) -> Result<(), QsimError> {
    let max = max_qubits();
    if n > max {
        return Err(QsimError::TooManyQubits { requested: n, max });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsimError {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("matrix or state contains a non-finite entry")]
    NonFinite,
    #[error("matrix is not unitary (max |U^dag U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("{requested} qubits exceeds the configured maximum of {max}")]
    TooManyQubits { requested: usize, max: usize },
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("cannot normalize the zero vector")]
    ZeroVector,
}

pub(crate) fn log2_exact(dim: usize) -> Result<usize, QsimError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(QsimError::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}
