//! Standard single-qubit gates.
//!
//! Conventions: `RZ(θ) = diag(e^{-iθ/2}, e^{iθ/2})`, `H = [[1,1],[1,-1]]/√2`,
//! `S = diag(1, i)`, `T = diag(1, e^{iπ/4})`, `PHASE(θ) = diag(1, e^{iθ})`.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::Unitary;
use crate::scalar::Real;

fn two<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Unitary<T> {
    Unitary::from_raw(2, vec![a, b, c, d])
}

fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

fn im<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), x)
}

pub fn id<T: Real>() -> Unitary<T> {
    two(
        Complex::one(),
        Complex::zero(),
        Complex::zero(),
        Complex::one(),
    )
}

pub fn x<T: Real>() -> Unitary<T> {
    two(
        Complex::zero(),
        Complex::one(),
        Complex::one(),
        Complex::zero(),
    )
}

pub fn y<T: Real>() -> Unitary<T> {
    two(
        Complex::zero(),
        im(-T::one()),
        im(T::one()),
        Complex::zero(),
    )
}

pub fn z<T: Real>() -> Unitary<T> {
    two(
        Complex::one(),
        Complex::zero(),
        Complex::zero(),
        re(-T::one()),
    )
}

pub fn h<T: Real>() -> Unitary<T> {
    let r = T::FRAC_1_SQRT_2();
    two(re(r), re(r), re(r), re(-r))
}

pub fn s<T: Real>() -> Unitary<T> {
    two(
        Complex::one(),
        Complex::zero(),
        Complex::zero(),
        Complex::i(),
    )
}

pub fn t<T: Real>() -> Unitary<T> {
    phase(T::FRAC_PI_4())
}

pub fn phase<T: Real>(theta: T) -> Unitary<T> {
    two(
        Complex::one(),
        Complex::zero(),
        Complex::zero(),
        Complex::from_polar(T::one(), theta),
    )
}

pub fn rx<T: Real>(theta: T) -> Unitary<T> {
    let half = theta / T::lit(2.0);
    let (s, c) = half.sin_cos();
    two(re(c), im(-s), im(-s), re(c))
}

pub fn ry<T: Real>(theta: T) -> Unitary<T> {
    let half = theta / T::lit(2.0);
    let (s, c) = half.sin_cos();
    two(re(c), re(-s), re(s), re(c))
}

pub fn rz<T: Real>(theta: T) -> Unitary<T> {
    let half = theta / T::lit(2.0);
    two(
        Complex::from_polar(T::one(), -half),
        Complex::zero(),
        Complex::zero(),
        Complex::from_polar(T::one(), half),
    )
}

pub fn cnot<T: Real>() -> Unitary<T> {
    let (o, l) = (Complex::zero(), Complex::one());
    Unitary::from_raw(
        4,
        vec![
            l, o, o, o, //
            o, l, o, o, //
            o, o, o, l, //
            o, o, l, o,
        ],
    )
}
