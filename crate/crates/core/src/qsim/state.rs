use num_complex::Complex;
use num_traits::{One, Zero};

use super::{check_qubits, log2_exact, QsimError, Unitary};
use crate::scalar::{is_finite, Real};

/// Normalized pure state over `n_qubits` qubits, big-endian basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct State<T: Real = f64> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

/// One outcome of a computational-basis measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBranch<T: Real = f64> {
    pub outcome: bool,
    pub probability: T,
    /// Renormalized state with the measured qubit removed.
    pub post_state: State<T>,
}

impl<T: Real> State<T> {
    /// `|0…0⟩`. A zero-qubit register is the scalar state `1`.
    pub fn zero(n_qubits: usize) -> Result<Self, QsimError> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, QsimError> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(QsimError::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut amps = vec![Complex::zero(); dim];
        amps[index] = Complex::one();
        Ok(Self { n_qubits, amps })
    }

    /// Accepts amplitudes whose squared norm is within `T::NORM_TOL` of one.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self, QsimError> {
        let n_qubits = log2_exact(amps.len())?;
        check_qubits(n_qubits)?;
        if !amps.iter().all(is_finite) {
            return Err(QsimError::NonFinite);
        }
        let norm_sqr = norm_sqr(&amps).as_f64();
        if (norm_sqr - 1.0).abs() > T::NORM_TOL {
            return Err(QsimError::NotNormalized { norm_sqr });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self, QsimError> {
        let n_qubits = log2_exact(amps.len())?;
        check_qubits(n_qubits)?;
        if !amps.iter().all(is_finite) {
            return Err(QsimError::NonFinite);
        }
        let norm = norm_sqr(&amps).sqrt();
        if norm.is_zero() {
            return Err(QsimError::ZeroVector);
        }
        Ok(Self {
            n_qubits,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.amps)
    }

    /// `self ⊗ other`; `other` becomes the trailing qubits.
    pub fn kron(&self, other: &Self) -> Result<Self, QsimError> {
        check_qubits(self.n_qubits + other.n_qubits)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| *a * *b));
        }
        Ok(Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        })
    }

    /// Applies `u` to `targets`; `targets[0]` is the most significant qubit
    /// of `u`'s basis.
    pub fn apply_unitary(&self, targets: &[usize], u: &Unitary<T>) -> Result<Self, QsimError> {
        let k = targets.len();
        if u.dim() != 1 << k {
            return Err(QsimError::DimensionMismatch {
                expected: 1 << k,
                found: u.dim(),
            });
        }
        let n = self.n_qubits;
        let mut mask = 0usize;
        for &q in targets {
            if q >= n {
                return Err(QsimError::QubitOutOfRange { qubit: q, n });
            }
            let bit = 1 << (n - 1 - q);
            if mask & bit != 0 {
                return Err(QsimError::DuplicateQubit(q));
            }
            mask |= bit;
        }
        // offsets[j]: basis-index contribution of local index j of u
        let sub = 1usize << k;
        let offsets: Vec<usize> = (0..sub)
            .map(|j| {
                targets.iter().enumerate().fold(0, |acc, (m, &q)| {
                    if (j >> (k - 1 - m)) & 1 == 1 {
                        acc | 1 << (n - 1 - q)
                    } else {
                        acc
                    }
                })
            })
            .collect();

        let mut out = self.amps.clone();
        let mut gathered = vec![Complex::zero(); sub];
        for base in (0..self.dim()).filter(|i| i & mask == 0) {
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amps[base | off];
            }
            for (r, row) in u.rows().enumerate() {
                let mut acc = Complex::zero();
                for (x, g) in row.iter().zip(&gathered) {
                    acc = acc + *x * *g;
                }
                out[base | offsets[r]] = acc;
            }
        }
        Ok(Self {
            n_qubits: n,
            amps: out,
        })
    }

    /// Z-basis measurement of `qubit`, returning every branch with
    /// probability at least `T::PRUNE_TOL`, in outcome order.
    pub fn measure_z(&self, qubit: usize) -> Result<Vec<MeasurementBranch<T>>, QsimError> {
        let n = self.n_qubits;
        if qubit >= n {
            return Err(QsimError::QubitOutOfRange { qubit, n });
        }
        let shift = n - 1 - qubit;
        let low_mask = (1usize << shift) - 1;
        let half = self.dim() / 2;

        let mut branches = Vec::with_capacity(2);
        for outcome in [false, true] {
            let amps: Vec<Complex<T>> = (0..half)
                .map(|i| {
                    let full =
                        ((i & !low_mask) << 1) | (usize::from(outcome) << shift) | (i & low_mask);
                    self.amps[full]
                })
                .collect();
            let p = norm_sqr(&amps);
            if p.as_f64() < T::PRUNE_TOL {
                continue;
            }
            let norm = p.sqrt();
            branches.push(MeasurementBranch {
                outcome,
                probability: p,
                post_state: Self {
                    n_qubits: n - 1,
                    amps: amps.into_iter().map(|a| a / norm).collect(),
                },
            });
        }
        // renormalize the surviving probabilities against pruned dust
        let total: T = branches.iter().map(|b| b.probability).sum();
        for b in &mut branches {
            b.probability = b.probability / total;
        }
        Ok(branches)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>, QsimError> {
        if self.n_qubits != other.n_qubits {
            return Err(QsimError::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// `|⟨self|other⟩|`, clamped to `[0, 1]`.
    pub fn fidelity(&self, other: &Self) -> Result<T, QsimError> {
        Ok(self.inner(other)?.norm().min(T::one()))
    }

    pub fn cast<U: Real>(&self) -> State<U> {
        State {
            n_qubits: self.n_qubits,
            amps: self
                .amps
                .iter()
                .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

fn norm_sqr<T: Real>(amps: &[Complex<T>]) -> T {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

pub fn apply_unitary<T: Real>(
    state: &State<T>,
    targets: &[usize],
    u: &Unitary<T>,
) -> Result<State<T>, QsimError> {
    state.apply_unitary(targets, u)
}

pub fn measure_z<T: Real>(
    state: &State<T>,
    qubit: usize,
) -> Result<Vec<MeasurementBranch<T>>, QsimError> {
    state.measure_z(qubit)
}

pub fn fidelity<T: Real>(a: &State<T>, b: &State<T>) -> Result<T, QsimError> {
    a.fidelity(b)
}
