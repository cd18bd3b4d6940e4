//! Exact execution of programs by enumerating every measurement branch,
//! and channel extraction via Choi matrices.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

use crate::protocol::{validate_locality, Bit, Instruction, Pauli, Program, Qubit, Violation};
use crate::qsim::{controlled, gates, QsimError, State, Unitary};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ExecError {
    #[error("program fails locality validation ({} violation(s)): {}", .0.len(), .0.first().map(ToString::to_string).unwrap_or_default())]
    Invalid(Vec<Violation>),
    #[error("input has {found} qubits but the program has {expected} external wires")]
    InputMismatch { expected: usize, found: usize },
    #[error("instruction {index}: classical wire {bit} read before it was written")]
    UnsetBit { index: usize, bit: Bit },
    #[error("instruction {index}: quantum wire {wire} is not live")]
    DeadWire { index: usize, wire: Qubit },
    #[error("internal wires left unmeasured at program end: {0:?}")]
    UnmeasuredInternal(Vec<Qubit>),
    #[error("not a valid Choi matrix: {0}")]
    NotAChannel(String),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// One classical history of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchOutcome<T: Real = f64> {
    /// Measurement results in execution order.
    pub transcript: Vec<(Bit, bool)>,
    pub probability: T,
    /// State of the external wires (in declaration order), followed by any
    /// untouched reference qubits.
    pub final_state: State<T>,
}

impl<T: Real> BranchOutcome<T> {
    /// `c1=0 c2=1` style rendering.
    pub fn transcript_label(&self) -> String {
        self.transcript
            .iter()
            .map(|(b, v)| format!("{b}={}", u8::from(*v)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn transcript_bits(&self) -> String {
        self.transcript
            .iter()
            .map(|(_, v)| if *v { '1' } else { '0' })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Wire(Qubit),
    Reference,
}

struct Frame<T: Real> {
    pc: usize,
    state: State<T>,
    slots: Vec<Slot>,
    bits: BTreeMap<Bit, bool>,
    transcript: Vec<(Bit, bool)>,
    probability: T,
}

impl<T: Real> Frame<T> {
    fn position(&self, index: usize, wire: Qubit) -> Result<usize, ExecError> {
        self.slots
            .iter()
            .position(|s| *s == Slot::Wire(wire))
            .ok_or(ExecError::DeadWire { index, wire })
    }

    fn positions(&self, index: usize, wires: &[Qubit]) -> Result<Vec<usize>, ExecError> {
        wires.iter().map(|w| self.position(index, *w)).collect()
    }

    fn bit(&self, index: usize, bit: Bit) -> Result<bool, ExecError> {
        self.bits
            .get(&bit)
            .copied()
            .ok_or(ExecError::UnsetBit { index, bit })
    }

    fn append(&mut self, ket: &State<T>, wires: &[Qubit]) -> Result<(), ExecError> {
        self.state = self.state.kron(ket)?;
        self.slots.extend(wires.iter().map(|w| Slot::Wire(*w)));
        Ok(())
    }
}

fn bell<T: Real>() -> State<T> {
    let r = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    State::from_amplitudes(vec![r, Complex::zero(), Complex::zero(), r]).expect("normalized")
}

/// Validates `p`, then runs it on `input` (one qubit per external wire).
///
/// Outcomes are sorted by transcript; branches with probability below
/// `T::PRUNE_TOL` are omitted.
pub fn run_branches<T: Real>(
    p: &Program<T>,
    input: &State<T>,
) -> Result<Vec<BranchOutcome<T>>, ExecError> {
    validate_locality(p).map_err(ExecError::Invalid)?;
    run_with_reference(p, input, 0)
}

/// Like [`run_branches`] but skips validation; runtime wire and bit checks
/// still apply.
pub fn run_branches_unchecked<T: Real>(
    p: &Program<T>,
    input: &State<T>,
) -> Result<Vec<BranchOutcome<T>>, ExecError> {
    run_with_reference(p, input, 0)
}

/// Runs with `n_reference` trailing qubits of `input` held aside, untouched.
fn run_with_reference<T: Real>(
    p: &Program<T>,
    input: &State<T>,
    n_reference: usize,
) -> Result<Vec<BranchOutcome<T>>, ExecError> {
    let n_ext = p.n_external();
    if input.n_qubits() != n_ext + n_reference {
        return Err(ExecError::InputMismatch {
            expected: n_ext,
            found: input.n_qubits() - n_reference.min(input.n_qubits()),
        });
    }
    let mut slots: Vec<Slot> = p.external().iter().map(|e| Slot::Wire(e.wire)).collect();
    slots.extend(std::iter::repeat_n(Slot::Reference, n_reference));

    let mut stack = vec![Frame {
        pc: 0,
        state: input.clone(),
        slots,
        bits: BTreeMap::new(),
        transcript: Vec::new(),
        probability: T::one(),
    }];
    let mut done = Vec::new();
    let instructions = p.instructions();

    'frames: while let Some(mut f) = stack.pop() {
        while f.pc < instructions.len() {
            let index = f.pc;
            f.pc += 1;
            match &instructions[index] {
                Instruction::AllocQubit { wire, value, .. } => {
                    f.append(&State::basis(1, usize::from(*value))?, &[*wire])?;
                }
                Instruction::MakeBellPair { alice, bob } => f.append(&bell(), &[*alice, *bob])?,
                Instruction::ApplyLocal { wires, gate, .. } => {
                    let pos = f.positions(index, wires)?;
                    f.state = f.state.apply_unitary(&pos, &gate.matrix)?;
                }
                Instruction::ApplyControlledLocal {
                    control,
                    targets,
                    gate,
                    ..
                } => {
                    let mut pos = vec![f.position(index, *control)?];
                    pos.extend(f.positions(index, targets)?);
                    f.state = f.state.apply_unitary(&pos, &controlled(&gate.matrix)?)?;
                }
                Instruction::MeasureZ { wire, out, .. } => {
                    let pos = f.position(index, *wire)?;
                    let branches = f.state.measure_z(pos)?;
                    // push in reverse so outcome 0 is explored first
                    for b in branches.into_iter().rev() {
                        let probability = f.probability * b.probability;
                        if probability.as_f64() < T::PRUNE_TOL {
                            continue;
                        }
                        let mut slots = f.slots.clone();
                        slots.remove(pos);
                        let mut bits = f.bits.clone();
                        bits.insert(*out, b.outcome);
                        let mut transcript = f.transcript.clone();
                        transcript.push((*out, b.outcome));
                        stack.push(Frame {
                            pc: f.pc,
                            state: b.post_state,
                            slots,
                            bits,
                            transcript,
                            probability,
                        });
                    }
                    // the children carry the continuation
                    continue 'frames;
                }
                Instruction::SendBit { bit, .. } => {
                    f.bit(index, *bit)?;
                }
                Instruction::ConditionalPauli {
                    wire, pauli, bit, ..
                } => {
                    let pos = f.position(index, *wire)?;
                    if f.bit(index, *bit)? {
                        let g: Unitary<T> = match pauli {
                            Pauli::X => gates::x(),
                            Pauli::Z => gates::z(),
                        };
                        f.state = f.state.apply_unitary(&[pos], &g)?;
                    }
                }
                Instruction::DiscardBit { bit } => {
                    f.bit(index, *bit)?;
                    f.bits.remove(bit);
                }
            }
        }
        let leftover: Vec<Qubit> = f
            .slots
            .iter()
            .filter_map(|s| match s {
                Slot::Wire(w) if !p.is_external(*w) => Some(*w),
                _ => None,
            })
            .collect();
        if !leftover.is_empty() {
            return Err(ExecError::UnmeasuredInternal(leftover));
        }
        done.push(BranchOutcome {
            transcript: f.transcript,
            probability: f.probability,
            final_state: f.state,
        });
    }
    done.sort_by(|a, b| a.transcript.cmp(&b.transcript));
    Ok(done)
}

/// Dense Hermitian matrix on `dim` basis states, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Density<T: Real = f64> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> Density<T> {
    /// `Σ w |ψ⟩⟨ψ|`.
    pub fn from_ensemble<'a, I>(ensemble: I) -> Result<Self, ExecError>
    where
        I: IntoIterator<Item = (T, &'a State<T>)>,
    {
        let mut out: Option<Self> = None;
        for (w, psi) in ensemble {
            let d = psi.dim();
            let rho = out.get_or_insert_with(|| Self {
                dim: d,
                entries: vec![Complex::zero(); d * d],
            });
            if rho.dim != d {
                return Err(QsimError::DimensionMismatch {
                    expected: rho.dim,
                    found: d,
                }
                .into());
            }
            let amps = psi.amplitudes();
            for (i, a) in amps.iter().enumerate() {
                let wa = *a * w;
                for (j, b) in amps.iter().enumerate() {
                    rho.entries[i * d + j] = rho.entries[i * d + j] + wa * b.conj();
                }
            }
        }
        out.ok_or_else(|| ExecError::NotAChannel("empty ensemble".into()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::zero(), |acc, i| acc + self.entry(i, i))
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm().as_f64());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim;
        let m = DMatrix::from_fn(d, d, |i, j| {
            let z = self.entry(i, j);
            Complex::new(z.re.as_f64(), z.im.as_f64())
        });
        // symmetrize away rounding asymmetry before the Hermitian solver
        let h = (&m + m.adjoint()) * Complex::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Frobenius norm of `self − other`.
    pub fn frobenius_distance(&self, other: &Self) -> Option<f64> {
        (self.dim == other.dim).then(|| {
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (*a - *b).norm_sqr().as_f64())
                .sum::<f64>()
                .sqrt()
        })
    }
}

/// Choi state of a channel on `n` qubits: output system first, reference
/// second, normalized to unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Choi<T: Real = f64> {
    n_qubits: usize,
    rho: Density<T>,
}

impl<T: Real> Choi<T> {
    /// Checks Hermiticity, unit trace, and positivity against `T::CHOI_TOL`.
    pub fn new(n_qubits: usize, rho: Density<T>) -> Result<Self, ExecError> {
        if rho.dim != 1 << (2 * n_qubits) {
            return Err(QsimError::DimensionMismatch {
                expected: 1 << (2 * n_qubits),
                found: rho.dim,
            }
            .into());
        }
        let herm = rho.hermiticity_error();
        if herm > T::NORM_TOL {
            return Err(ExecError::NotAChannel(format!(
                "not Hermitian (error {herm:e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re.as_f64() - 1.0).abs() > T::NORM_TOL || tr.im.as_f64().abs() > T::NORM_TOL {
            return Err(ExecError::NotAChannel(format!("trace {tr} is not 1")));
        }
        let min_eig = rho.min_eigenvalue();
        if min_eig < -T::CHOI_TOL {
            return Err(ExecError::NotAChannel(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { n_qubits, rho })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.rho.dim
    }

    pub fn density(&self) -> &Density<T> {
        &self.rho
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.rho.entry(row, col)
    }

    pub fn frobenius_distance(&self, other: &Self) -> Option<f64> {
        self.rho.frobenius_distance(&other.rho)
    }
}

/// `(1/√d) Σ_i |i⟩|i⟩` on `2n` qubits.
pub fn max_entangled<T: Real>(n: usize) -> Result<State<T>, QsimError> {
    let d = 1usize << n;
    let mut amps = vec![Complex::zero(); d * d];
    let w = Complex::new(T::one() / T::lit(d as f64).sqrt(), T::zero());
    for i in 0..d {
        amps[i * d + i] = w;
    }
    State::normalized(amps)
}

/// Choi matrix of the channel `p` implements on its external wires.
pub fn channel_choi<T: Real>(p: &Program<T>) -> Result<Choi<T>, ExecError> {
    validate_locality(p).map_err(ExecError::Invalid)?;
    let n = p.n_external();
    let omega = max_entangled::<T>(n)?;
    let outcomes = run_with_reference(p, &omega, n)?;
    let rho = Density::from_ensemble(outcomes.iter().map(|o| (o.probability, &o.final_state)))?;
    Choi::new(n, rho)
}

/// Choi matrix of `ρ ↦ u ρ u†`.
pub fn unitary_choi<T: Real>(u: &Unitary<T>) -> Result<Choi<T>, ExecError> {
    let n = u.n_qubits();
    let targets: Vec<usize> = (0..n).collect();
    let psi = max_entangled::<T>(n)?.apply_unitary(&targets, u)?;
    Choi::new(n, Density::from_ensemble([(T::one(), &psi)])?)
}

/// `Σ p_b |φ_b⟩⟨φ_b|` over the outcomes of a run.
pub fn output_density<T: Real>(outcomes: &[BranchOutcome<T>]) -> Result<Density<T>, ExecError> {
    Density::from_ensemble(outcomes.iter().map(|o| (o.probability, &o.final_state)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build_program, NonlocalCU};
    use crate::protocol::{ExternalWire, Party, Phase};
    use crate::qsim::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_wires() -> Vec<ExternalWire> {
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

    fn builder_for(u: Unitary<f64>) -> Program<f64> {
        build_program(&NonlocalCU::new(u, None).unwrap())
    }

    #[test]
    fn empty_program_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi: State<f64> = random::haar_state(2, &mut rng).unwrap();
        let out = run_branches(&Program::new(two_wires()), &psi).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].probability, 1.0);
        assert!(out[0].transcript.is_empty());
        assert_eq!(out[0].final_state, psi);
    }

    #[test]
    fn identity_protocol_four_even_branches() {
        let out = run_branches(&builder_for(gates::id()), &State::basis(2, 0b00).unwrap()).unwrap();
        assert_eq!(out.len(), 4);
        let labels: Vec<String> = out.iter().map(|o| o.transcript_bits()).collect();
        assert_eq!(labels, ["00", "01", "10", "11"]);
        for o in &out {
            assert!((o.probability - 0.25).abs() < 1e-12);
            assert!(
                (o.final_state
                    .fidelity(&State::basis(2, 0b00).unwrap())
                    .unwrap()
                    - 1.0)
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn cnot_protocol_flips_target() {
        let out = run_branches(&builder_for(gates::x()), &State::basis(2, 0b10).unwrap()).unwrap();
        assert_eq!(out.len(), 4);
        for o in &out {
            assert!((o.probability - 0.25).abs() < 1e-12);
            assert!(
                (o.final_state
                    .fidelity(&State::basis(2, 0b11).unwrap())
                    .unwrap()
                    - 1.0)
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn rejects_wrong_input_size() {
        let err = run_branches(&builder_for(gates::x()), &State::zero(3).unwrap()).unwrap_err();
        assert_eq!(
            err,
            ExecError::InputMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn unset_condition_bit_is_an_error() {
        let p = Program::<f64>::new(two_wires()).with(
            Phase::Unphased,
            Instruction::ConditionalPauli {
                party: Party::Bob,
                wire: Qubit(1),
                pauli: Pauli::X,
                bit: Bit(9),
            },
        );
        assert!(matches!(
            run_branches(&p, &State::zero(2).unwrap()),
            Err(ExecError::Invalid(_))
        ));
        assert_eq!(
            run_branches_unchecked(&p, &State::zero(2).unwrap()).unwrap_err(),
            ExecError::UnsetBit {
                index: 0,
                bit: Bit(9)
            }
        );
    }

    #[test]
    fn unmeasured_internal_wire_is_an_error() {
        let p = Program::<f64>::new(two_wires()).with(
            Phase::Unphased,
            Instruction::AllocQubit {
                party: Party::Alice,
                wire: Qubit(5),
                value: true,
            },
        );
        assert_eq!(
            run_branches_unchecked(&p, &State::zero(2).unwrap()).unwrap_err(),
            ExecError::UnmeasuredInternal(vec![Qubit(5)])
        );
    }

    #[test]
    fn measuring_external_wire_is_rejected() {
        let p = Program::<f64>::new(two_wires()).with(
            Phase::Unphased,
            Instruction::MeasureZ {
                party: Party::Alice,
                wire: Qubit(0),
                out: Bit(1),
            },
        );
        assert!(matches!(channel_choi(&p), Err(ExecError::Invalid(_))));
    }

    #[test]
    fn choi_of_empty_program_is_phi_plus() {
        let one = vec![ExternalWire {
            wire: Qubit(0),
            party: Party::Alice,
        }];
        let j = channel_choi(&Program::<f64>::new(one)).unwrap();
        assert_eq!(j.dim(), 4);
        for r in 0..4 {
            for c in 0..4 {
                let want = if [0, 3].contains(&r) && [0, 3].contains(&c) {
                    0.5
                } else {
                    0.0
                };
                assert!((j.entry(r, c) - Complex::new(want, 0.0)).norm() < 1e-15);
            }
        }
        let ui = unitary_choi(&Unitary::<f64>::identity(2).unwrap()).unwrap();
        assert!(j.frobenius_distance(&ui).unwrap() <= 1e-12);
    }

    #[test]
    fn choi_of_x_pairs_flipped_reference() {
        // X|i⟩|i⟩ gives |1 0⟩ and |0 1⟩: support only on indices 1 and 2
        let j = unitary_choi(&gates::x::<f64>()).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let inside = [1, 2].contains(&r) && [1, 2].contains(&c);
                let want = if inside { 0.5 } else { 0.0 };
                assert!((j.entry(r, c).re - want).abs() < 1e-15 && j.entry(r, c).im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn random_unitary_chois_have_unit_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for i in 0..50 {
            let u: Unitary<f64> = random::haar_unitary(1 << (1 + i % 2), &mut rng).unwrap();
            let j = unitary_choi(&u).unwrap();
            assert!((j.density().trace() - Complex::new(1.0, 0.0)).norm() <= 1e-12);
            assert!(j.density().min_eigenvalue() >= -1e-10);
        }
    }

    #[test]
    fn builder_cnot_choi_matches_direct_cnot() {
        let jp = channel_choi(&builder_for(gates::x())).unwrap();
        // direct: (1/4) Σ_ij CNOT|i⟩⟨j|CNOT† ⊗ |i⟩⟨j|, with CNOT a basis permutation
        let perm = [0usize, 1, 3, 2];
        let mut direct = vec![Complex::new(0.0, 0.0); 256];
        for i in 0..4 {
            for j in 0..4 {
                let (r, c) = (perm[i] * 4 + i, perm[j] * 4 + j);
                direct[r * 16 + c] = Complex::new(0.25, 0.0);
            }
        }
        let diff: f64 = jp
            .density()
            .entries()
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-10, "{diff}");
    }

    #[test]
    fn trailing_discard_changes_nothing() {
        let p = builder_for(gates::h());
        let trimmed = p.without(p.len() - 1);
        let full = channel_choi(&p).unwrap();
        assert_eq!(channel_choi(&trimmed).unwrap(), full);
    }

    #[test]
    fn rejects_non_channel_matrices() {
        let bad = Density {
            dim: 4,
            entries: vec![Complex::new(0.5, 0.0); 16],
        };
        assert!(matches!(Choi::new(1, bad), Err(ExecError::NotAChannel(_))));
    }
}
