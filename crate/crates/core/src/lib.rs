//! Spectra of differential-form and superconnection Laplacians on collapsing
//! fiber bundles with nilpotent fibers.
//!
//! The numerical core is generic over [`Scalar`]; the aliases below fix the
//! common choices.

pub mod error;
pub mod lab;
pub mod lie;
pub mod numerics;
pub mod scalar;
pub mod spectral_sequence;
pub mod spectrum;
pub mod superconnection;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use spectrum::{SmallEigenvalueRule, SpectrumReport};

pub type Rational = num_rational::BigRational;
pub type Complex = num_complex::Complex64;
pub type DenseMatrix = numerics::Matrix<f64>;
pub type RationalMatrix = numerics::Matrix<Rational>;
pub type ComplexMatrix = numerics::Matrix<Complex>;
pub type RationalLieAlgebra = lie::NilpotentLieAlgebra<Rational>;
pub type RealLieAlgebra = lie::NilpotentLieAlgebra<f64>;
