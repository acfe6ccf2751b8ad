//! ℝ^d-valued functions on the interval `I = (0, 2π)`, quadrature rules on
//! `[0, 2π]`, and the Bochner/Sobolev norms built on them.
//!
//! The value space is `ℝ^d` with the Euclidean norm, so every Bochner
//! integral reduces to `d` scalar integrals against the same rule.

pub mod catalog;
pub mod function;
pub mod norms;
pub mod quadrature;

pub use catalog::{catalog, CATALOG_NAMES, STANDARD_CATALOG};
pub use function::FunctionOnI;
pub use norms::{fd_derivative, integrate, lp_norm, sobolev2_norm, DerivativeMode, NormParams, FD_STEP};
pub use quadrature::{QuadratureKind, QuadratureRule};
