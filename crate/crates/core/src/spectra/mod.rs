//! Exact Wannier-Stark spectra: truncated-chain diagonalization, Floquet
//! quantization of the generating-function monodromy, and avoided-crossing
//! search.

mod crossings;
mod floquet;
mod tridiag;
mod truncated;

use std::fmt;

use crate::Real;

pub use crossings::{find_avoided_crossings, scaled_splitting, AvoidedCrossing};
pub use floquet::{monodromy, monodromy_with_tolerance, ws_spectrum_floquet, Monodromy};
pub use tridiag::{eigenvalues_in_window, eigenvalues_symmetric_tridiagonal, eigenvector_inverse_iteration, sturm_count};
pub use truncated::{default_chain_size, ws_spectrum_truncated};

/// Which of the two interleaved ladders a level belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

/// One ladder level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level<T> {
    pub energy: T,
    pub branch: Branch,
    pub index: i64,
    /// `false` for truncated-chain levels that moved when the chain grew.
    pub converged: bool,
}

/// Levels of one or two Wannier-Stark ladders at a fixed field.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderSpectrum<T> {
    pub levels: Vec<Level<T>>,
    pub field: T,
}

impl<T: Real> LadderSpectrum<T> {
    pub fn new(mut levels: Vec<Level<T>>, field: T) -> Self {
        levels.sort_by(|a, b| (a.branch, a.index).cmp(&(b.branch, b.index)).then(a.energy.partial_cmp(&b.energy).unwrap_or(std::cmp::Ordering::Equal)));
        Self { levels, field }
    }

    /// Energies folded into `(-F, F]`, one ladder period of width `2F`.
    pub fn fundamental(&self) -> Vec<T> {
        self.levels.iter().map(|l| fold_half_open(l.energy, self.field)).collect()
    }

    /// Energies folded into `(-F/2, F/2]`, for display of the merged ladder.
    pub fn fundamental_merged(&self) -> Vec<T> {
        let half = self.field * T::lit(0.5);
        self.levels.iter().map(|l| fold_half_open(l.energy, half)).collect()
    }

    pub fn branch(&self, b: Branch) -> impl Iterator<Item = &Level<T>> + '_ {
        self.levels.iter().filter(move |l| l.branch == b)
    }

    /// Energies of all levels, ascending.
    pub fn sorted_energies(&self) -> Vec<T> {
        let mut e: Vec<T> = self.levels.iter().map(|l| l.energy).collect();
        e.sort_by(|a, b| a.partial_cmp(b).expect("finite energies"));
        e
    }
}

/// `x` folded into `(-half, half]`.
pub(crate) fn fold_half_open<T: Real>(x: T, half: T) -> T {
    let period = half * T::lit(2.0);
    let mut r = x - (x / period).round() * period;
    if r <= -half {
        r += period;
    }
    if r > half {
        r -= period;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_is_half_open() {
        assert_eq!(fold_half_open(-1.0f64, 1.0), 1.0);
        assert_eq!(fold_half_open(1.0f64, 1.0), 1.0);
        assert!((fold_half_open(2.3f64, 1.0) - 0.3).abs() < 1e-15);
        assert!((fold_half_open(-2.3f64, 1.0) + 0.3).abs() < 1e-15);
    }
}
