//! Power-series coefficients of the local Heun solution.
//!
//! The coefficients `c_n` of `F(z) = sum c_n z^n`, the solution of Heun's
//! equation analytic at `z = 0` with `F(0) = 1`, are computed along three
//! independent routes that check one another:
//!
//! * [`recurrence`]: the classical three-term recurrence (the reference path);
//! * [`closed_form`]: explicit nested sums over index chains, for general
//!   `delta` and for the `delta = 0` and `delta = beta + 1` sub-families;
//! * [`jacobi`]: orthonormal polynomials of a birth-death Jacobi matrix,
//!   evaluated through its Green function and a diagonal perturbation.
//!
//! [`bounds`] provides explicit coefficient envelopes and [`series`] sums the
//! series inside the unit disk. Exact rational and machine complex arithmetic
//! are both available through [`scalar::Scalar`].

pub mod bounds;
pub mod chains;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod jacobi;
pub mod params;
pub mod recurrence;
pub mod scalar;
pub mod series;
pub mod table;

pub use error::{HeunError, Result};
pub use params::{HeunCanonicalParams, HeunValentParams, WConvention};
pub use scalar::{ArithmeticMode, Complex64, Rational, Scalar};
pub use table::{CoefficientTable, Method, ParamSet};
