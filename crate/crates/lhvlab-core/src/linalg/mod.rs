//! Self-contained dense complex linear algebra for small matrices:
//! products, tensor products, partial trace, Hermitian eigendecomposition,
//! Schmidt decomposition, Hilbert–Schmidt inner product.

mod eigen;
mod matrix;
mod schmidt;

pub use eigen::{hermitian_eigen, EigenDecomposition};
pub use matrix::{
    hs_inner, inner, norm, partial_trace, swap_subsystems, tensor, tensor_vec, ComplexMatrix,
    HermitianCheckedMatrix, Subsystem, TOL_HERM,
};
pub use schmidt::{schmidt, SchmidtDecomposition, RANK_TOL};

pub(crate) use eigen::hermitian_eigen_raw;
