//! Evaluation of Erdélyi's multivariate Laguerre polynomials by several
//! independent methods, together with the classical univariate bounds
//! (Szegő, Rooney, Lewandowski–Szynal), two multivariate envelope bounds,
//! Dirichlet-measure Monte-Carlo checks of the underlying integral
//! representation, and a sweep engine that verifies the inequalities over
//! parameter grids and emits machine-readable reports.
//!
//! Everything that can be computed exactly is computed in arbitrary-precision
//! rational arithmetic; float paths exist only as fast screens and are always
//! backed by an exact re-check near equality.

// `!(x > 0.0)`-style guards are deliberate: they reject NaN along with the
// out-of-domain values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dirichlet;
pub mod error;
pub mod laguerre_mv;
pub mod laguerre_uv;
pub mod numerics;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{parse_rational, LogValue, Rational, Scalar};
