//! The root-function system `{1, cos nx, x sin nx}` of the nonlocal
//! spectral problem `φ″ + λφ = 0`, `φ(0) = φ(2π)`, `φ′(0) = 0`, together
//! with its biorthogonal system, coefficient functionals, partial-sum
//! projectors and Riesz projections.

pub mod checks;
pub mod coeffs;
pub mod riesz;
pub mod system;

pub use checks::{gram_matrix, hausdorff_young_gap, identity_defect, projector_ratios, ProjectorRatio, spectral_boundary_values, spectral_residual};
pub use coeffs::{
    projector_cos, projector_sin, reconstruct, reconstruct_into, root_coeffs, root_combination, trig_coeffs,
    RootCoefficients, TrigCoefficients,
};
pub use riesz::{riesz_projection, ComplexTrigCoefficients, ExponentialCoefficients, RieszSign};
pub use system::{bio_elements, root_elements, BioKind, BioSystemElement, RootKind, RootSystemElement};
