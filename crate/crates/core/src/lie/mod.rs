//! Nilpotent Lie algebras with a declared orthonormal basis.

pub mod algebra;
pub mod ce;
pub mod curvature;
pub mod exterior;
pub mod grading;
pub mod laplacian;
pub mod random;
pub mod symmetry;

pub use algebra::{
    center, lower_central_series, validate, AlgebraSpec, NilpotentLieAlgebra, ValidationReport,
};
pub use ce::{betti, ce_complex, ce_differential, complex_betti};
pub use curvature::{
    connection_coeffs, riemann_tensor, scalar_curvature, sectional_curvature, ScalarCurvature,
};
pub use grading::{lower_central_grading, AdaptedGrading};
pub use laplacian::{invariant_laplacian, rescaled_differential, rescaled_spectrum};
pub use symmetry::FiniteSymmetryGroup;
