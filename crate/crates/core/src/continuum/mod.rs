//! Bloch bands of the continuous bichromatic lattice and their
//! tight-binding fit.

mod bands;
mod fit;
mod jacobi;

pub use bands::{bloch_matrix, continuum_bands, continuum_bloch_bands, ContinuumBands, ContinuumPotential};
pub use fit::{fit_tight_binding, TightBindingFit};
pub use jacobi::{hermitian_eigen, hermitian_eigen_small, HermitianEigen};
