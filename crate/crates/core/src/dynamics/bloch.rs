//! Bloch eigenvectors of the two-band model and band projectors on the chain.
//!
//! The chain is treated as a ring of `nc` cells for the Bloch sums, with the
//! quasimomentum grid `kappa_m = pi m / nc` folded into `[-pi/2, pi/2)`.
//! Plane waves carry the site-position phase `e^{i kappa x}`, so
//! `h(kappa) = [[-delta, g], [g*, delta]]`, `g = j1 e^{i kappa} + j2 e^{-i kappa}`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, LatticeParams, Result};

/// Band label of the two Bloch bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Lower,
    Upper,
}

/// Two-band Bloch Hamiltonian at quasimomentum `kappa` (zero field).
pub fn bloch_hamiltonian(p: &LatticeParams, kappa: f64) -> [[Complex64; 2]; 2] {
    let g = Complex64::from_polar(p.j1, kappa) + Complex64::from_polar(p.j2, -kappa);
    let d = Complex64::new(p.delta, 0.0);
    [[-d, g], [g.conj(), d]]
}

/// Normalized lower and upper eigenvectors of `h(kappa)`.
pub fn bloch_vectors(p: &LatticeParams, kappa: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let g = Complex64::from_polar(p.j1, kappa) + Complex64::from_polar(p.j2, -kappa);
    let d = p.delta;
    let r = (d * d + g.norm_sqr()).sqrt();
    let c = |x: f64| Complex64::new(x, 0.0);
    // pick the rows that stay away from zero for either sign of delta
    let (lower, upper) = if d >= 0.0 {
        ([c(r + d), -g.conj()], [g, c(r + d)])
    } else {
        ([g, c(d - r)], [c(r - d), g.conj()])
    };
    (normalize(lower), normalize(upper))
}

fn normalize(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    if n == 0.0 {
        return v;
    }
    [v[0] / n, v[1] / n]
}

/// Rejects lattices whose bands touch, where band projectors are undefined.
pub fn check_gapped(p: &LatticeParams) -> Result<()> {
    let gap = (p.delta * p.delta + (p.j1 - p.j2) * (p.j1 - p.j2)).sqrt();
    let scale = p.delta.abs() + p.j1 + p.j2;
    if gap <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::invalid("bands touch (delta = 0 and j1 = j2); band projectors are undefined"));
    }
    Ok(())
}

/// Bloch-sum machinery shared by the two projectors of one chain.
pub struct BlochBasis {
    n_sites: usize,
    cells: usize,
    first_cell: i64,
    kappas: Vec<f64>,
    lower: Vec<[Complex64; 2]>,
    upper: Vec<[Complex64; 2]>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for BlochBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlochBasis").field("n_sites", &self.n_sites).finish()
    }
}

impl BlochBasis {
    pub fn new(p: &LatticeParams, n_sites: usize) -> Result<Self> {
        if n_sites < 4 || n_sites % 2 != 0 {
            return Err(Error::invalid(format!("n_sites must be even and >= 4, got {n_sites}")));
        }
        check_gapped(p)?;
        let cells = n_sites / 2;
        let first_cell = -((cells / 2) as i64);
        let kappas: Vec<f64> = (0..cells).map(|m| kappa_of_index(m, cells)).collect();
        let (lower, upper) = kappas.iter().map(|&k| bloch_vectors(p, k)).unzip();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_sites,
            cells,
            first_cell,
            kappas,
            lower,
            upper,
            forward: planner.plan_fft_forward(cells),
            inverse: planner.plan_fft_inverse(cells),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Quasimomentum of FFT index `m`, in `[-pi/2, pi/2)`.
    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn vector(&self, band: Band, m: usize) -> [Complex64; 2] {
        match band {
            Band::Lower => self.lower[m],
            Band::Upper => self.upper[m],
        }
    }

    /// Offset of sublattice `s` in cell `first_cell`: `x = 2 l0 -+ 1/2`.
    fn origin(&self, s: usize) -> f64 {
        2.0 * self.first_cell as f64 + if s == 0 { -0.5 } else { 0.5 }
    }

    /// Sublattice amplitudes `psi_s(kappa_m) = sum_l e^{-i kappa x} psi_{s,l} / sqrt(nc)`.
    pub fn to_momentum(&self, psi: &[Complex64]) -> [Vec<Complex64>; 2] {
        assert_eq!(psi.len(), self.n_sites, "state length does not match the chain");
        let norm = 1.0 / (self.cells as f64).sqrt();
        let mut out = [Vec::new(), Vec::new()];
        for (s, slot) in out.iter_mut().enumerate() {
            let mut buf: Vec<Complex64> = (0..self.cells).map(|j| psi[2 * j + s]).collect();
            self.forward.process(&mut buf);
            let x0 = self.origin(s);
            for (m, v) in buf.iter_mut().enumerate() {
                *v *= Complex64::from_polar(norm, -self.kappas[m] * x0);
            }
            *slot = buf;
        }
        out
    }

    /// Inverse of [`to_momentum`](Self::to_momentum).
    pub fn to_sites(&self, amp: &[Vec<Complex64>; 2]) -> Vec<Complex64> {
        let norm = 1.0 / (self.cells as f64).sqrt();
        let mut psi = vec![Complex64::new(0.0, 0.0); self.n_sites];
        for (s, a) in amp.iter().enumerate() {
            let x0 = self.origin(s);
            let mut buf: Vec<Complex64> = a
                .iter()
                .enumerate()
                .map(|(m, v)| v * Complex64::from_polar(norm, self.kappas[m] * x0))
                .collect();
            self.inverse.process(&mut buf);
            for (j, v) in buf.into_iter().enumerate() {
                psi[2 * j + s] = v;
            }
        }
        psi
    }

    /// Band amplitudes `u_band(kappa_m)^dagger psi(kappa_m)`.
    pub fn band_amplitudes(&self, band: Band, psi: &[Complex64]) -> Vec<Complex64> {
        let k = self.to_momentum(psi);
        (0..self.cells)
            .map(|m| {
                let u = self.vector(band, m);
                u[0].conj() * k[0][m] + u[1].conj() * k[1][m]
            })
            .collect()
    }

    /// Circular mean of the quasimomentum distribution. The reduced zone has
    /// period `pi`, so the mean is taken over `2 kappa` and halved.
    pub fn mean_quasimomentum(&self, psi: &[Complex64]) -> f64 {
        let k = self.to_momentum(psi);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..self.cells {
            let w = k[0][m].norm_sqr() + k[1][m].norm_sqr();
            acc += Complex64::from_polar(w, 2.0 * self.kappas[m]);
        }
        0.5 * acc.arg()
    }
}

fn kappa_of_index(m: usize, cells: usize) -> f64 {
    let k = std::f64::consts::PI * m as f64 / cells as f64;
    if k >= std::f64::consts::FRAC_PI_2 {
        k - std::f64::consts::PI
    } else {
        k
    }
}

/// Orthogonal projector onto one Bloch band of the chain (as a ring).
#[derive(Debug, Clone)]
pub struct BandProjector {
    pub band: Band,
    basis: Arc<BlochBasis>,
}

impl BandProjector {
    pub fn basis(&self) -> &BlochBasis {
        &self.basis
    }

    /// `P psi`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let b = &self.basis;
        let a = b.band_amplitudes(self.band, psi);
        let mut amp = [Vec::with_capacity(a.len()), Vec::with_capacity(a.len())];
        for (m, am) in a.iter().enumerate() {
            let u = b.vector(self.band, m);
            amp[0].push(u[0] * am);
            amp[1].push(u[1] * am);
        }
        b.to_sites(&amp)
    }

    /// `<psi| P |psi>`.
    pub fn population(&self, psi: &[Complex64]) -> f64 {
        self.basis.band_amplitudes(self.band, psi).iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Lower and upper band projectors for a chain of `n_sites` sites. The
/// field entry of `p` is ignored.
pub fn band_projectors(p: &LatticeParams, n_sites: usize) -> Result<(BandProjector, BandProjector)> {
    let basis = Arc::new(BlochBasis::new(p, n_sites)?);
    Ok((
        BandProjector { band: Band::Lower, basis: basis.clone() },
        BandProjector { band: Band::Upper, basis },
    ))
}
