//! Plane-wave Bloch bands of `-1/2 d^2/dx^2 + V(x)` with period-one
//! potential `V(x) = V0 + V1 cos(2 pi x + phi1) + V2 cos(4 pi x + phi2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::jacobi::{hermitian_eigen, HermitianEigen};
use crate::dynamics::bloch_vectors;
use crate::{Error, LatticeParams, Result};

/// Bichromatic lattice potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumPotential {
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl ContinuumPotential {
    pub fn new(v0: f64, v1: f64, v2: f64, phi1: f64, phi2: f64) -> Result<Self> {
        if [v0, v1, v2, phi1, phi2].iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("potential parameters must be finite"));
        }
        Ok(Self { v0, v1, v2, phi1, phi2 })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.v0 + self.v1 * (2.0 * PI * x + self.phi1).cos() + self.v2 * (4.0 * PI * x + self.phi2).cos()
    }
}

/// Lowest bands on a uniform `k` grid over `[-pi, pi)`.
///
/// Sites of the two-well cell are the halves `[-1/2, 0)` (A) and
/// `[0, 1/2)` (B) of the period centred on `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumBands {
    pub k: Vec<f64>,
    /// `energies[i]` holds the band energies at `k[i]`, ascending.
    pub energies: Vec<Vec<f64>>,
    /// Weight on A minus weight on B of the lowest band at each `k`.
    pub lower_polarization: Vec<f64>,
    /// Wannier centre of the lowest band in units of the period, in
    /// `[-1/2, 1/2)`.
    pub lower_wannier_center: f64,
}

impl ContinuumBands {
    pub fn n_bands(&self) -> usize {
        self.energies.first().map_or(0, Vec::len)
    }

    /// Exact two-band data of a tight-binding lattice on the same grid,
    /// with `kappa = k/2`.
    pub fn from_tight_binding(p: &LatticeParams, n_k: usize) -> Result<Self> {
        if n_k < 4 {
            return Err(Error::invalid("need at least four k points"));
        }
        let k = k_grid(n_k);
        let mut energies = Vec::with_capacity(n_k);
        let mut pol = Vec::with_capacity(n_k);
        let mut vecs = Vec::with_capacity(n_k);
        for &kk in &k {
            let (lo, hi) = p.bloch_dispersion(0.5 * kk);
            energies.push(vec![lo, hi]);
            let (v, _) = bloch_vectors(p, 0.5 * kk);
            pol.push(v[0].norm_sqr() - v[1].norm_sqr());
            vecs.push(v);
        }
        // crossing the zone multiplies the periodic part by i sigma_z
        let i = Complex64::new(0.0, 1.0);
        let closing = [i * vecs[0][0], -i * vecs[0][1]];
        let mut prod = Complex64::new(1.0, 0.0);
        for j in 0..n_k {
            let next = if j + 1 < n_k { vecs[j + 1] } else { closing };
            prod *= vecs[j][0].conj() * next[0] + vecs[j][1].conj() * next[1];
            prod /= prod.norm();
        }
        Ok(Self { k, energies, lower_polarization: pol, lower_wannier_center: wannier_center(prod) })
    }
}

fn k_grid(n_k: usize) -> Vec<f64> {
    (0..n_k).map(|j| -PI + 2.0 * PI * j as f64 / n_k as f64).collect()
}

fn wannier_center(product: Complex64) -> f64 {
    let c = -product.arg() / (2.0 * PI);
    let r = c - c.round();
    if r >= 0.5 - 1e-12 {
        r - 1.0
    } else {
        r
    }
}

fn check_cutoff(cutoff: usize) -> Result<usize> {
    if cutoff < 21 || cutoff % 2 == 0 {
        return Err(Error::invalid(format!("plane-wave cutoff must be odd and at least 21, got {cutoff}")));
    }
    Ok(cutoff / 2)
}

/// Bloch Hamiltonian in the basis `exp(i (k + 2 pi m) x)`, `|m| <= m_max`.
pub fn bloch_matrix(pot: &ContinuumPotential, k: f64, m_max: usize) -> Vec<Vec<Complex64>> {
    let n = 2 * m_max + 1;
    let mut h = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let c1 = Complex64::from_polar(0.5 * pot.v1, pot.phi1);
    let c2 = Complex64::from_polar(0.5 * pot.v2, pot.phi2);
    for i in 0..n {
        let q = k + 2.0 * PI * (i as f64 - m_max as f64);
        h[i][i] = Complex64::new(0.5 * q * q + pot.v0, 0.0);
        // <m+1|V|m> carries e^{+i phi}
        if i + 1 < n {
            h[i + 1][i] = c1;
            h[i][i + 1] = c1.conj();
        }
        if i + 2 < n {
            h[i + 2][i] = c2;
            h[i][i + 2] = c2.conj();
        }
    }
    h
}

/// Bands at `k` from `cutoff = 2M+1` plane waves, with the lowest
/// `n_check` energies confirmed against `M+5` to `1e-10`.
fn solve_checked(pot: &ContinuumPotential, k: f64, cutoff: usize, n_check: usize) -> Result<HermitianEigen> {
    let m = check_cutoff(cutoff)?;
    let e = hermitian_eigen(&bloch_matrix(pot, k, m))?;
    let bigger = hermitian_eigen(&bloch_matrix(pot, k, m + 5))?;
    let change = (0..n_check.min(e.values.len()))
        .map(|j| (e.values[j] - bigger.values[j]).abs())
        .fold(0.0, f64::max);
    if change >= 1e-10 {
        return Err(Error::NonConvergence(format!(
            "lowest {n_check} bands at k={k} change by {change:.3e} when the cutoff grows from {cutoff} to {}",
            cutoff + 10
        )));
    }
    Ok(e)
}

/// All `cutoff` band energies at `k`, ascending; the two lowest are
/// checked for convergence in the cutoff.
pub fn continuum_bloch_bands(pot: &ContinuumPotential, k: f64, cutoff: usize) -> Result<Vec<f64>> {
    solve_checked(pot, k, cutoff, 2).map(|e| e.values)
}

/// `A - B` site weight of a plane-wave state.
fn polarization(c: &[Complex64]) -> f64 {
    let n = c.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let d = a as i64 - b as i64;
            if d % 2 != 0 {
                // integral of e^{2 pi i d x} over A minus over B
                acc += c[a] * c[b].conj() * Complex64::new(0.0, -2.0 / (PI * d as f64));
            }
        }
    }
    acc.re
}

/// Lowest `n_bands` bands on `n_k` points of `[-pi, pi)`.
pub fn continuum_bands(pot: &ContinuumPotential, n_k: usize, cutoff: usize, n_bands: usize) -> Result<ContinuumBands> {
    if n_k < 4 {
        return Err(Error::invalid("need at least four k points"));
    }
    if n_bands == 0 || n_bands > cutoff {
        return Err(Error::invalid(format!("band count must lie in 1..={cutoff}")));
    }
    let k = k_grid(n_k);
    let sols: Vec<HermitianEigen> = k.par_iter().map(|&kk| solve_checked(pot, kk, cutoff, n_bands)).collect::<Result<_>>()?;
    let energies = sols.iter().map(|e| e.values[..n_bands].to_vec()).collect();
    let lower: Vec<&Vec<Complex64>> = sols.iter().map(|e| &e.vectors[0]).collect();
    let pol = lower.iter().map(|c| polarization(c)).collect();
    // same function at k + 2 pi: coefficients shift by one plane wave
    let first = lower[0];
    let closing: Vec<Complex64> = (0..first.len())
        .map(|i| first.get(i + 1).copied().unwrap_or(Complex64::new(0.0, 0.0)))
        .collect();
    let mut prod = Complex64::new(1.0, 0.0);
    for j in 0..n_k {
        let next = if j + 1 < n_k { lower[j + 1] } else { &closing };
        prod *= lower[j].iter().zip(next).map(|(a, b)| a.conj() * b).sum::<Complex64>();
        prod /= prod.norm();
    }
    Ok(ContinuumBands { k, energies, lower_polarization: pol, lower_wannier_center: wannier_center(prod) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_potential() -> ContinuumPotential {
        ContinuumPotential::new(-0.117, -0.15, 0.3, 0.0, 0.0).unwrap()
    }

    #[test]
    fn empty_potential_gives_folded_parabolas() {
        let pot = ContinuumPotential::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let k = 0.7;
        let e = continuum_bloch_bands(&pot, k, 21).unwrap();
        let mut want: Vec<f64> = (-10..=10).map(|m| 0.5 * (k + 2.0 * PI * m as f64).powi(2)).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn gaps_match_second_order_perturbation() {
        let (v1, v2) = (0.01, 0.01);
        let pot = ContinuumPotential::new(0.0, v1, v2, 0.0, 0.0).unwrap();
        // k = 0: m = +-1 mix directly through V2 and via m = 0 through V1
        let e = continuum_bloch_bands(&pot, 0.0, 41).unwrap();
        let w0 = 0.5 * v2 + 0.25 * v1 * v1 / (2.0 * PI * PI);
        assert!(((e[2] - e[1]) - 2.0 * w0).abs() < 1e-7, "{} vs {}", e[2] - e[1], 2.0 * w0);
        // zone edge: m = 0, -1 mix directly through V1 and via m = 1, -2
        let e = continuum_bloch_bands(&pot, PI, 41).unwrap();
        let w1 = 0.5 * v1 - 2.0 * 0.25 * v1 * v2 / (4.0 * PI * PI);
        assert!(((e[1] - e[0]) - 2.0 * w1).abs() < 1e-7, "{} vs {}", e[1] - e[0], 2.0 * w1);
    }

    #[test]
    fn symmetric_variational_and_rigid_shift() {
        let pot = reference_potential();
        for k in [0.3, 1.1, 2.9] {
            let a = continuum_bloch_bands(&pot, k, 41).unwrap();
            let b = continuum_bloch_bands(&pot, -k, 41).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
            let small = hermitian_eigen(&bloch_matrix(&pot, k, 10)).unwrap().values;
            assert!(a.iter().zip(&small).take(4).all(|(x, y)| *x <= y + 1e-12));
            let shifted = ContinuumPotential { v0: pot.v0 + 0.37, ..pot };
            let c = continuum_bloch_bands(&shifted, k, 41).unwrap();
            assert!(a.iter().zip(&c).take(4).all(|(x, y)| (y - x - 0.37).abs() < 1e-12));
        }
    }

    #[test]
    fn rejects_small_cutoff() {
        assert!(continuum_bloch_bands(&reference_potential(), 0.0, 15).is_err());
    }

    #[test]
    fn tight_binding_wannier_centres() {
        let strong_intra = ContinuumBands::from_tight_binding(&LatticeParams::new(1.0, 0.6, 0.0, 0.0).unwrap(), 64).unwrap();
        assert!(strong_intra.lower_wannier_center.abs() < 1e-10);
        let strong_inter = ContinuumBands::from_tight_binding(&LatticeParams::new(0.6, 1.0, 0.0, 0.0).unwrap(), 64).unwrap();
        assert!((strong_inter.lower_wannier_center.abs() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn reference_potential_centres_lowest_band_on_the_origin_bond() {
        let b = continuum_bands(&reference_potential(), 32, 41, 2).unwrap();
        assert!(b.lower_wannier_center.abs() < 1e-8, "{}", b.lower_wannier_center);
        assert!(b.lower_polarization.iter().all(|p| p.abs() < 1e-10));
    }
}
