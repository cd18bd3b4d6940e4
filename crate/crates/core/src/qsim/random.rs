//! Haar-distributed unitaries and states.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{log2_exact, QsimError, State, Unitary};
use crate::scalar::Real;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unitary: Gram-Schmidt on a complex Ginibre matrix.
///
/// Gram-Schmidt leaves `R` with a positive real diagonal, which is exactly
/// the phase fix that makes the resulting `Q` Haar distributed.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> Result<Unitary<T>, QsimError> {
    log2_exact(dim)?;
    let mut cols: Vec<Vec<Complex<f64>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex<f64>> = (0..dim).map(|_| gaussian(rng)).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex<f64> = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|a| a / norm).collect());
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for col in &cols {
            entries.push(Complex::new(T::lit(col[r].re), T::lit(col[r].im)));
        }
    }
    Unitary::new(dim, entries)
}

/// Haar-random pure state on `n_qubits`.
pub fn haar_state<T: Real, R: Rng + ?Sized>(
    n_qubits: usize,
    rng: &mut R,
) -> Result<State<T>, QsimError> {
    let amps: Vec<Complex<f64>> = (0..1usize << n_qubits).map(|_| gaussian(rng)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    State::normalized(
        amps.into_iter()
            .map(|a| Complex::new(T::lit(a.re / norm), T::lit(a.im / norm)))
            .collect(),
    )
}
