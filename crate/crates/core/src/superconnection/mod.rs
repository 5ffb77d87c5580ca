//! Flat degree-1 superconnections over flat base models and their Laplacians.

pub mod base;
pub mod bundle;
pub mod cochain;
pub mod laplacian;
pub mod metric;
pub mod perturbation;
pub mod spec;

pub use base::{BaseKind, BaseModel, Grid};
pub use bundle::{from_affine_bundle, CurvatureForm, FlatnessReport, Superconnection};
pub use cochain::{bigraded_blocks, total_differential, total_differentials, CochainLayout};
pub use laplacian::{eigenvalues, laplacian, spectrum, GalerkinLaplacian, SolverPath};
pub use metric::{ConformalMode, MetricField, MetricKind, PreparedMetric};
pub use perturbation::{
    epsilon_close, metric_continuity_check, perturbation_check, spectral_distance,
};
pub use spec::{BundleSpec, Entry, FieldSpec};
