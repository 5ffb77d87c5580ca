//! Exact spectral sequence of a flat degree-1 superconnection and the small-eigenvalue
//! predictions derived from it.

pub mod complex;
pub mod leray;
pub mod pages;
pub mod predict;
pub mod random;

pub use complex::{BigradedComplex, ComplexSpec, MapSpec};
pub use leray::{
    fiber_cohomology_monodromy, induced_on_cohomology, leray_circle, minimal_polynomial,
    unipotent_factor, JordanReport,
};
pub use pages::{
    e_infinity, next_page_dims, page, pages, stabilization_page, Page, SpectralSequenceReport,
};
pub use predict::{predict_small_count, CollapseCase, Prediction};
