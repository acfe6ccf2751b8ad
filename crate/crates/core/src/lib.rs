//! Spectral solver for the Laplace equation on the half-strip
//! `Π = (0, 2π) × (0, ∞)` with the nonlocal conditions
//! `u(0, y) = u(2π, y)`, `∂ₓu(0, y) = 0` and ℝ^d-valued trace `u(x, 0) = f(x)`.
//!
//! The solution is expanded in the root functions `{1, cos nx, x sin nx}`,
//! whose coefficients come from integration against the biorthogonal system.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod harmonic;
pub mod rootbasis;
pub mod vectorfn;

pub use error::{Error, Result};
