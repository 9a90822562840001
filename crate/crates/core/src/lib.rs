//! Wannier-Stark spectra and Bloch-oscillation dynamics of a quantum particle
//! in one-dimensional double-periodic lattices under a static field.
//!
//! The tight-binding lattice has alternating hoppings `j1` (inside a two-site
//! cell) and `j2` (between cells), on-site energies `∓delta` and a Stark
//! energy `f` per site. The crate computes the Wannier-Stark spectrum by
//! truncated diagonalization and by Floquet quantization of the monodromy of
//! the generating-function equation, compares both with strong-field and
//! weak-field asymptotics, propagates wave packets on the tilted chain, and
//! solves the continuous optical-lattice band problem.
//!
//! The numerical core is generic over the scalar type (see [`Real`]); the
//! aliases at the crate root fix it to `f64`, which is what the time-domain
//! and continuum modules use.

pub mod cli;
pub mod continuum;
pub mod dynamics;
mod error;
pub mod model;
pub mod mat2;
pub mod quad;
mod scalar;
pub mod spectra;
pub mod strong_field;
pub mod weak_field;

pub use error::{Error, Result};
pub use scalar::Real;

pub use spectra::Branch;

/// Lattice parameters in double precision.
pub type LatticeParams = model::Lattice<f64>;
/// Truncated tilted chain in double precision.
pub type ChainHamiltonian = model::ChainHamiltonian<f64>;
/// Bloch band sample in double precision.
pub type BlochBandSample = model::BlochBandSample<f64>;
/// Ladder spectrum in double precision.
pub type LadderSpectrum = spectra::LadderSpectrum<f64>;
/// Floquet monodromy in double precision.
pub type Monodromy = spectra::Monodromy<f64>;
/// Avoided crossing in double precision.
pub type AvoidedCrossing = spectra::AvoidedCrossing<f64>;
/// Wu-Yang phase functions in double precision.
pub type WuYangPhaseSet = strong_field::WuYangPhaseSet<f64>;
/// Averaged strong-field coupling in double precision.
pub type AveragedCoupling = strong_field::AveragedCoupling<f64>;
/// Adiabatic ladder constants in double precision.
pub type AdiabaticLadder = weak_field::AdiabaticLadder<f64>;
/// Avoided-crossing gap estimate in double precision.
pub type GapEstimate = weak_field::GapEstimate<f64>;
/// Complex amplitude type used by the time-domain modules.
pub type Complex64 = num_complex::Complex64;
