//! Dense complex linear algebra with named tensor factors.

mod eigen;
mod json;
mod matrix;
mod spaces;

pub use eigen::{
    hermitian_eigen, is_psd, psd_sqrt, HermitianEigen, MAX_SWEEPS, OFF_DIAGONAL_THRESHOLD,
};
pub use json::MatrixJson;
pub use matrix::{dagger, kron, kron_all, matmul, trace, ComplexMatrix, C64, ONE, ZERO};
pub use spaces::{
    check_spaces, link, partial_trace, partial_transpose, permute_spaces, total_dim,
    LabeledOperator, SpaceLabel,
};

/// Default tolerance for Hermiticity and positivity checks.
pub const DEFAULT_TOL: f64 = 1e-9;
