//! Builds, runs and certifies the two-party protocol that applies a
//! controlled unitary across an Alice/Bob locality cut using one shared Bell
//! pair and one classical bit in each direction.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the documented tolerances assume.
//!
//! ```
//! use telegate::{builder, gatelang, verifier};
//!
//! let c = gatelang::parse_gate::<f64>("X").unwrap();
//! let spec = builder::NonlocalCU::new(c, Some("X")).unwrap();
//! let report = verifier::verify(&spec, &Default::default()).unwrap();
//! assert!(report.passed());
//! ```

pub mod builder;
pub mod executor;
pub mod gatelang;
pub mod protocol;
pub mod qsim;
pub mod scalar;
pub mod verifier;

pub use num_complex::Complex;
pub use scalar::Real;

pub type ComplexScalar = Complex<f64>;
pub type StateVector = qsim::State<f64>;
pub type UnitaryMatrix = qsim::Unitary<f64>;
pub type MeasurementBranch = qsim::MeasurementBranch<f64>;
pub type BranchOutcome = executor::BranchOutcome<f64>;
pub type ChoiMatrix = executor::Choi<f64>;
pub type NonlocalCUSpec = builder::NonlocalCU<f64>;

pub type StateVectorF32 = qsim::State<f32>;
pub type UnitaryMatrixF32 = qsim::Unitary<f32>;
pub type ChoiMatrixF32 = executor::Choi<f32>;
