use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{check_qubits, log2_exact, QsimError};
use crate::scalar::{is_finite, Real};

/// Dense square unitary matrix, row-major, dimension a power of two.
///
/// Construction through [`Unitary::new`] rejects anything whose `U†U`
/// deviates from the identity by more than `T::UNITARY_TOL` in any entry.
#[derive(Clone, PartialEq)]
pub struct Unitary<T: Real = f64> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> Unitary<T> {
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self, QsimError> {
        let n = log2_exact(dim)?;
        check_qubits(n)?;
        if entries.len() != dim * dim {
            return Err(QsimError::EntryCount {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if !entries.iter().all(is_finite) {
            return Err(QsimError::NonFinite);
        }
        let u = Self { dim, entries };
        let deviation = u.unitarity_deviation();
        if deviation.is_nan() || deviation > T::UNITARY_TOL {
            return Err(QsimError::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self, QsimError> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(QsimError::EntryCount {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(dim, rows.into_iter().flatten().collect())
    }

    /// Skips the unitarity check. Callers guarantee the entries come from
    /// products of already-validated unitaries.
    pub(crate) fn from_raw(dim: usize, entries: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Result<Self, QsimError> {
        check_qubits(log2_exact(dim)?)?;
        let mut entries = vec![Complex::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex::one();
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex<T>]> {
        self.entries.chunks(self.dim)
    }

    /// Largest entrywise deviation of `U†U` from the identity, as `f64`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex::<T>::zero();
                for k in 0..d {
                    acc = acc + self.entries[k * d + i].conj() * self.entries[k * d + j];
                }
                if i == j {
                    acc = acc - Complex::one();
                }
                worst = worst.max(acc.norm().as_f64());
            }
        }
        worst
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Result<Self, QsimError> {
        if self.dim != rhs.dim {
            return Err(QsimError::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let d = self.dim;
        let mut out = vec![Complex::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] = out[i * d + j] + a * rhs.entries[k * d + j];
                }
            }
        }
        Ok(Self::from_raw(d, out))
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                out.push(self.entries[j * d + i].conj());
            }
        }
        Self::from_raw(d, out)
    }

    /// `e^{iφ} · U`.
    pub fn with_global_phase(&self, phi: T) -> Self {
        let phase = Complex::from_polar(T::one(), phi);
        Self::from_raw(self.dim, self.entries.iter().map(|z| *z * phase).collect())
    }

    pub fn kron(&self, rhs: &Self) -> Result<Self, QsimError> {
        kron(self, rhs)
    }

    pub fn controlled(&self) -> Result<Self, QsimError> {
        controlled(self)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.dim != other.dim {
            return None;
        }
        Some(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (*a - *b).norm().as_f64())
                .fold(0.0, f64::max),
        )
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }

    /// Converts to another scalar precision.
    pub fn cast<U: Real>(&self) -> Unitary<U> {
        Unitary::from_raw(
            self.dim,
            self.entries
                .iter()
                .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        )
    }
}

impl<T: Real> fmt::Debug for Unitary<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Unitary({}x{})", self.dim, self.dim)?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("{:.6}", z)).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product; `a` occupies the leading (most significant) qubits.
pub fn kron<T: Real>(a: &Unitary<T>, b: &Unitary<T>) -> Result<Unitary<T>, QsimError> {
    check_qubits(a.n_qubits() + b.n_qubits())?;
    let (da, db) = (a.dim, b.dim);
    let d = da * db;
    let mut out = vec![Complex::zero(); d * d];
    for ar in 0..da {
        for ac in 0..da {
            let x = a.entries[ar * da + ac];
            if x.is_zero() {
                continue;
            }
            for br in 0..db {
                for bc in 0..db {
                    out[(ar * db + br) * d + ac * db + bc] = x * b.entries[br * db + bc];
                }
            }
        }
    }
    Ok(Unitary::from_raw(d, out))
}

/// `diag(I, u)` with the control as the first tensor factor.
pub fn controlled<T: Real>(u: &Unitary<T>) -> Result<Unitary<T>, QsimError> {
    check_qubits(u.n_qubits() + 1)?;
    let du = u.dim;
    let d = 2 * du;
    let mut out = vec![Complex::zero(); d * d];
    for i in 0..du {
        out[i * d + i] = Complex::one();
    }
    for r in 0..du {
        for c in 0..du {
            out[(du + r) * d + du + c] = u.entries[r * du + c];
        }
    }
    Ok(Unitary::from_raw(d, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::gates;
    use crate::qsim::State;

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = Unitary::<f64>::identity(2).unwrap();
        assert_eq!(kron(&i2, &i2).unwrap(), Unitary::identity(4).unwrap());
    }

    #[test]
    fn kron_x_identity_flips_leading_qubit() {
        let xi = kron(&gates::x::<f64>(), &gates::id()).unwrap();
        let out = State::basis(2, 0b00)
            .unwrap()
            .apply_unitary(&[0, 1], &xi)
            .unwrap();
        assert_eq!(out, State::basis(2, 0b10).unwrap());
    }

    #[test]
    fn kron_hh_gives_uniform_superposition() {
        let hh = kron(&gates::h::<f64>(), &gates::h()).unwrap();
        let out = State::zero(2).unwrap().apply_unitary(&[0, 1], &hh).unwrap();
        for a in out.amplitudes() {
            assert!((a - c64(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn kron_rejects_oversized_result() {
        let big = Unitary::<f64>::identity(1 << 7).unwrap();
        let other = Unitary::<f64>::identity(1 << 6).unwrap();
        assert!(matches!(
            kron(&big, &other),
            Err(QsimError::TooManyQubits {
                requested: 13,
                max: 12
            })
        ));
    }

    #[test]
    fn controlled_identity_and_x() {
        assert_eq!(
            controlled(&gates::id::<f64>()).unwrap(),
            Unitary::identity(4).unwrap()
        );
        assert_eq!(controlled(&gates::x::<f64>()).unwrap(), gates::cnot());
    }

    #[test]
    fn controlled_rz_is_diagonal_with_half_angle_phases() {
        let cu = controlled(&gates::rz::<f64>(0.3)).unwrap();
        // e^{-0.15i}, e^{+0.15i}
        let lo = c64(0.9887710779360422, -0.14943813247359922);
        let hi = c64(0.9887710779360422, 0.14943813247359922);
        let expected = [c64(1.0, 0.0), c64(1.0, 0.0), lo, hi];
        for (r, &diag) in expected.iter().enumerate() {
            for col in 0..4 {
                let want = if r == col { diag } else { c64(0.0, 0.0) };
                assert!((cu.entry(r, col) - want).norm() < 1e-15, "({r},{col})");
            }
        }
    }

    #[test]
    fn controlled_block_equals_u_exactly() {
        let u = gates::rx::<f64>(1.1).mul(&gates::t()).unwrap();
        let cu = controlled(&u).unwrap();
        for r in 0..2 {
            for col in 0..2 {
                assert_eq!(cu.entry(2 + r, 2 + col), u.entry(r, col));
                assert_eq!(cu.entry(2 + r, col), Complex::zero());
            }
        }
    }

    #[test]
    fn rejects_non_unitary_entries() {
        let err = Unitary::<f64>::new(
            2,
            vec![c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
        )
        .unwrap_err();
        assert!(matches!(err, QsimError::NotUnitary { .. }));
        let slightly_off = 1.0 + 1e-9;
        assert!(Unitary::<f64>::new(
            2,
            vec![
                c64(slightly_off, 0.0),
                c64(0.0, 0.0),
                c64(0.0, 0.0),
                c64(1.0, 0.0)
            ]
        )
        .is_err());
        assert!(Unitary::<f64>::new(3, vec![c64(1.0, 0.0); 9]).is_err());
        assert!(Unitary::<f64>::new(2, vec![c64(f64::NAN, 0.0); 4]).is_err());
    }

    #[test]
    fn adjoint_inverts() {
        let u = gates::ry::<f64>(0.7).mul(&gates::s()).unwrap();
        let prod = u.mul(&u.adjoint()).unwrap();
        assert!(prod.approx_eq(&Unitary::identity(2).unwrap(), 1e-15));
    }

    #[test]
    fn f32_matrices_work() {
        let cu = controlled(&gates::h::<f32>()).unwrap();
        assert!(cu.unitarity_deviation() < 1e-6);
        assert!(cu
            .cast::<f64>()
            .approx_eq(&controlled(&gates::h::<f64>()).unwrap(), 1e-7));
    }
}
