pub mod eigen;
pub mod exact;
pub mod linalg;
pub mod matrix;
pub mod sparse;

pub use eigen::{cholesky, gen_sym_eig, sym_eig, sym_eigvals, EigenResult, Real, DEFAULT_TOL};
pub use exact::{nullspace_exact, quotient_dim, rank_exact, RationalMatrix};
pub use matrix::Matrix;
pub use sparse::{BlockDiagonal, SparseMatrix};
