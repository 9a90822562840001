//! Strong-field asymptotics for large `F`: the Wu-Yang propagator with its
//! spectrum and expansion, the averaged-coupling ladder, and the special
//! functions they use.

mod ladders;
mod special;
mod wu_yang;

pub use ladders::{
    averaged_coupling, expansion_coefficients, spectrum_bm, spectrum_expansion, spectrum_wu_yang,
    wu_yang_fundamental, AveragedCoupling, ExpansionOrder,
};
pub use special::{bessel_integral, bessel_j, bessel_series, osc_integral};
pub use wu_yang::{wu_yang_phases, wu_yang_propagator, WuYangPhaseSet};
