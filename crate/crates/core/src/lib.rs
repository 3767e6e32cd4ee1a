//! Normalised incomplete beta function `I_x(a,b)` for large `a`, uniformly
//! in `x ∈ (0, 1]`.
//!
//! The main entry points are [`uniform::evaluate_fixed`] and
//! [`uniform::evaluate_adaptive`]. Every ingredient has an independent route
//! in [`oracle`] and the property suites in [`verify`] tie them together.

// Reference constants keep every published digit, and `!(x > 0.0)` is how
// the validators reject NaN along with the out-of-range values.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coefficients;
pub mod error;
pub mod fsequence;
pub mod hyp;
pub mod numerics;
pub mod oracle;
pub mod quadrature;
pub mod series;
pub mod uniform;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{make_params, make_params_xi, Abscissa, EvalParams};
