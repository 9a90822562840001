//! Time evolution on the finite chain: band projectors, propagation under
//! static or ramped fields, resonant interband tunneling and band transfer.

mod bloch;
mod chain;
mod lorentz;
mod population;
mod transfer;

pub use bloch::{band_projectors, bloch_hamiltonian, bloch_vectors, Band, BandProjector, BlochBasis};
pub use chain::{bessel_sequence, propagate, ChainState, PropagationOptions, RampProtocol, TiltedChain};
pub use lorentz::{lorentzian_fit, LorentzFit};
pub use population::{mean_upper_population, resonance_scan, PopulationTrace};
pub use transfer::{bloch_transfer_experiment, lower_band_packet, TransferSetup, TransferTrajectory};
