//! High-precision numerical verification of definite-integral identities
//! built from Gaussian and hyperbolic kernels.
//!
//! The crate evaluates both sides of each identity with double-exponential
//! quadrature in arbitrary-precision arithmetic and reports the residuals.
//! It also evaluates the Gaussian transform `M(y) = ∫₀^∞ e^(-x²) sech(xy) dx`
//! and checks its reciprocity `y M(y) = √π M(π/y)`.

pub mod catalog;
pub mod cli;
pub mod constants;
pub mod error;
pub mod expr;
pub mod kernels;
pub mod precision;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result, SourceSpan, SyntaxError};
pub use precision::{PrecisionContext, Real};
