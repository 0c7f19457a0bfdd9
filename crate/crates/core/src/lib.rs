//! Leibniz one-dimensional central extensions `CE(μ_n)` of the naturally graded
//! filiform Lie algebra: construction, adapted basis changes, classification
//! for `n = 4..8`, and a self-verification suite.

pub mod action;
pub mod algebra;
pub mod classification;
pub mod error;
pub mod family;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{ComplexScalar, Tolerance};
