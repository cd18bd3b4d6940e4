use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the simulator is generic over (`f32` or `f64`).
///
/// The associated tolerances scale the numerical checks to the precision of
/// the type; the `f64` values are the ones the rest of the crate documents.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Allowed entrywise deviation of `U†U` from the identity.
    const UNITARY_TOL: f64;
    /// Allowed deviation of a state's squared norm from one.
    const NORM_TOL: f64;
    /// Measurement branches below this probability are dropped.
    const PRUNE_TOL: f64;
    /// Allowed negative eigenvalue / asymmetry of a Choi matrix.
    const CHOI_TOL: f64;

    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("finite scalar")
    }
}

impl Real for f64 {
    const UNITARY_TOL: f64 = 1e-10;
    const NORM_TOL: f64 = 1e-12;
    const PRUNE_TOL: f64 = 1e-14;
    const CHOI_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const UNITARY_TOL: f64 = 1e-5;
    const NORM_TOL: f64 = 1e-5;
    const PRUNE_TOL: f64 = 1e-7;
    const CHOI_TOL: f64 = 1e-5;
}

pub(crate) fn is_finite<T: Real>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
