//! Dense complex linear algebra: matrices, density matrices, partial
//! operations, spectra and Haar sampling.

mod density;
mod linalg;
mod matrix;
mod random;

pub use density::{strides, DensityMatrix, RawState};
pub use linalg::{
    hermitian_eigen, hermitian_eigenvalues, min_eigenvalue, real_singular_values, real_trace_norm,
    singular_values, trace_norm,
};
pub use matrix::{kron, kron_vec, ComplexMatrix, C64, ONE, ZERO};
pub use random::{
    complex_gaussian, conjugate, dirichlet_weights, haar_unitary, haar_unitary_with, permute_subsystems,
    random_density, random_local_unitary, random_product_mixture, random_pure_state, random_pure_vector,
    random_separable, random_split_mixture, SeedPath, UnitarySample,
};

/// Free-function form of [`DensityMatrix::partial_trace`].
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> crate::Result<DensityMatrix> {
    rho.partial_trace(keep)
}

/// Free-function form of [`DensityMatrix::partial_transpose`].
pub fn partial_transpose(rho: &DensityMatrix, party: usize) -> crate::Result<ComplexMatrix> {
    rho.partial_transpose(party)
}
