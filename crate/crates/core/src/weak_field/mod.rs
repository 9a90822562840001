//! Adiabatic weak-field theory: instantaneous eigensystem of the generator,
//! mean energies and Zak phases of the two ladders, the adiabatic spectrum
//! with its second-order correction, and the avoided-crossing gap estimate.

use std::ops::RangeInclusive;

use num_complex::Complex;

use crate::model::Lattice;
use crate::quad;
use crate::spectra::{fold_half_open, Branch, LadderSpectrum, Level};
use crate::{Error, Real, Result};

/// Eigenpairs of `G(theta) = [[m, w], [w*, -m]]`, `m = delta + F/2`,
/// `w = j1 + j2 e^{-i theta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantaneousEigen<T> {
    pub e_minus: T,
    pub e_plus: T,
    pub y_minus: [Complex<T>; 2],
    pub y_plus: [Complex<T>; 2],
}

fn coupling<T: Real>(p: &Lattice<T>, theta: T) -> Complex<T> {
    Complex::new(p.j1 + p.j2 * theta.cos(), -p.j2 * theta.sin())
}

fn normalized<T: Real>(v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Eigenvectors of `[[m, w], [w*, -m]]` in a gauge that is smooth in `w`:
/// the component that never vanishes is kept real and positive.
fn two_level_eigen<T: Real>(m: T, w: Complex<T>, scale: T) -> Result<InstantaneousEigen<T>> {
    let r = (m * m + w.norm_sqr()).sqrt();
    if !(r > T::epsilon() * T::lit(8.0) * scale) {
        return Err(Error::Degenerate("instantaneous eigenvalues coincide at zero".into()));
    }
    let c = |x: T| Complex::new(x, T::zero());
    let (y_plus, y_minus) = if m >= T::zero() {
        ([c(r + m), w.conj()], [w, c(-(r + m))])
    } else {
        ([w, c(r - m)], [c(r - m), -w.conj()])
    };
    Ok(InstantaneousEigen { e_minus: -r, e_plus: r, y_minus: normalized(y_minus), y_plus: normalized(y_plus) })
}

fn energy_scale<T: Real>(p: &Lattice<T>) -> T {
    p.delta.abs() + p.f + p.j1 + p.j2
}

/// Instantaneous eigenvalues `±sqrt((delta + F/2)^2 + |w|^2)` and eigenvectors.
pub fn instantaneous_eigen<T: Real>(p: &Lattice<T>, theta: T) -> Result<InstantaneousEigen<T>> {
    two_level_eigen(p.delta + p.f * T::lit(0.5), coupling(p, theta), energy_scale(p))
}

/// Mean energy and geometric offset of one adiabatic ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticLadder<T> {
    pub c_const: T,
    /// Zak phase in units of `2pi`, canonical in `(-1/2, 1/2]` for the plus branch.
    pub zak: T,
    pub branch: Branch,
}

/// `(1/2pi) ∫ sqrt((delta + F/2)^2 + |w(theta)|^2) dtheta`.
fn mean_energy<T: Real>(p: &Lattice<T>) -> T {
    let m = p.delta + p.f * T::lit(0.5);
    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(16.0));
    let q = quad::integrate(
        |th: T| (m * m + coupling(p, th).norm_sqr()).sqrt(),
        T::zero(),
        T::PI(),
        tol,
        T::epsilon() * T::lit(16.0),
    );
    q.value / T::PI()
}

/// Discrete Berry product `-(1/2pi) Im log prod <y_k|y_{k+1}>` over a closed
/// loop of `nodes` points of the upper eigenvector.
pub fn berry_phase<T: Real, V: Fn(T) -> Result<[Complex<T>; 2]>>(vector: V, nodes: usize) -> Result<T> {
    let h = T::lit(2.0) * T::PI() / T::from_usize_lossy(nodes);
    let first = vector(T::zero())?;
    let mut prev = first;
    let mut prod = Complex::new(T::one(), T::zero());
    for k in 1..=nodes {
        let next = if k == nodes { first } else { vector(h * T::from_usize_lossy(k))? };
        let overlap = prev[0].conj() * next[0] + prev[1].conj() * next[1];
        prod = prod * overlap;
        // keep the running product at unit scale
        let n = prod.norm();
        if n > T::zero() {
            prod = prod / n;
        }
        prev = next;
    }
    Ok(-prod.arg() / (T::lit(2.0) * T::PI()))
}

fn canonical_zak<T: Real>(c: T) -> T {
    let half = T::lit(0.5);
    let mut r = fold_half_open(c, half);
    if (r.abs() - half).abs() < T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) {
        r = half;
    }
    r
}

/// Zak phase of the upper Bloch band in units of `2pi`, from the band
/// eigenvectors with mass `delta`, refined until stable to `1e-10`.
///
/// When the two bands touch the band loop is singular and the generator at
/// the actual field (mass `delta + F/2`) is used instead.
pub fn zak_phase<T: Real>(p: &Lattice<T>) -> Result<T> {
    let touching = p.delta.abs() + (p.j1 - p.j2).abs() <= T::epsilon() * T::lit(8.0) * energy_scale(p);
    let m = if touching { p.delta + p.f * T::lit(0.5) } else { p.delta };
    let vector = |th: T| two_level_eigen(m, coupling(p, th), energy_scale(p)).map(|e| e.y_plus);
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(1e3));
    let mut nodes = 64;
    let mut prev = canonical_zak(berry_phase(&vector, nodes)?);
    loop {
        nodes *= 2;
        let next = canonical_zak(berry_phase(&vector, nodes)?);
        let change = fold_half_open(next - prev, T::lit(0.5)).abs();
        prev = next;
        if change < tol {
            return Ok(prev);
        }
        if nodes >= 1 << 20 {
            return Err(Error::NonConvergence("Berry product did not settle".into()));
        }
    }
}

/// Constants of the plus and minus adiabatic ladders.
pub fn adiabatic_constants<T: Real>(p: &Lattice<T>) -> Result<(AdiabaticLadder<T>, AdiabaticLadder<T>)> {
    p.require_field()?;
    let c = mean_energy(p);
    let zak = zak_phase(p)?;
    Ok((
        AdiabaticLadder { c_const: c, zak, branch: Branch::Plus },
        AdiabaticLadder { c_const: -c, zak: -zak, branch: Branch::Minus },
    ))
}

/// Coefficient `D` of the second-order correction `±D F^2` (zero offset).
pub fn d_coefficient<T: Real>(j1: T, j2: T) -> T {
    let s = j1 + j2;
    let d = j1 - j2;
    if s == T::zero() || d == T::zero() {
        return T::zero();
    }
    let (s2, d2) = (s * s, d * d);
    let tol = T::lit(1e-14).max(T::epsilon() * T::lit(16.0));
    let q = quad::integrate(
        |th: T| {
            let (sn, cs) = (th * T::lit(0.5)).sin_cos();
            (s2 * cs * cs + d2 * sn * sn).powf(T::lit(-2.5))
        },
        T::zero(),
        T::PI(),
        tol,
        T::lit(1e-13).max(T::epsilon() * T::lit(16.0)),
    );
    s2 * d2 / T::lit(32.0) * q.value / T::PI()
}

/// Order of the adiabatic spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdiabaticOrder {
    First,
    Second,
}

/// Levels `C± + 2F(n + c±)`, plus `±D F^2` at second order.
pub fn adiabatic_spectrum<T: Real>(
    p: &Lattice<T>,
    n_range: RangeInclusive<i64>,
    order: AdiabaticOrder,
) -> Result<LadderSpectrum<T>> {
    if order == AdiabaticOrder::Second && p.delta != T::zero() {
        return Err(Error::invalid("second-order adiabatic spectrum needs delta = 0"));
    }
    let (plus, minus) = adiabatic_constants(p)?;
    let correction = match order {
        AdiabaticOrder::First => T::zero(),
        AdiabaticOrder::Second => d_coefficient(p.j1, p.j2) * p.f * p.f,
    };
    let two_f = T::lit(2.0) * p.f;
    let mut levels = Vec::new();
    for n in n_range {
        for l in [minus, plus] {
            let energy = l.c_const + two_f * (T::from_i64_lossy(n) + l.zak) + l.branch.sign::<T>() * correction;
            levels.push(Level { energy, branch: l.branch, index: n, converged: true });
        }
    }
    Ok(LadderSpectrum::new(levels, p.f))
}

/// Gap estimate for an avoided crossing of the ladders of a lattice with
/// zero offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEstimate<T> {
    /// Turning point, `cosh theta0 = (j1^2 + j2^2) / (2 j1 j2)`.
    pub theta0: T,
    /// Tunneling action `S = ∫_0^theta0 sqrt(1 - cosh(theta)/cosh(theta0))`.
    pub action: T,
    /// `Delta E / F = (2/pi) exp(-S/F)`.
    pub ratio: T,
    pub gap: T,
}

impl<T: Real> GapEstimate<T> {
    /// Predicted `d ln(Delta E) / d(1/F)` at `1/F = inv_f`, including the
    /// explicit `F` prefactor of `Delta E`.
    pub fn log_gap_slope(&self, inv_f: T) -> T {
        -self.action - T::one() / inv_f
    }
}

/// Gap estimate; needs `delta = 0` and positive hoppings.
pub fn gap_estimate<T: Real>(p: &Lattice<T>) -> Result<GapEstimate<T>> {
    p.require_field()?;
    if p.delta != T::zero() {
        return Err(Error::invalid("gap estimate needs delta = 0"));
    }
    if !(p.j1 > T::zero() && p.j2 > T::zero()) {
        return Err(Error::invalid("gap estimate needs j1 > 0 and j2 > 0"));
    }
    let cosh0 = (p.j1 * p.j1 + p.j2 * p.j2) / (T::lit(2.0) * p.j1 * p.j2);
    let theta0 = cosh0.max(T::one()).acosh();
    let a = T::one() / cosh0;
    // theta = theta0 (1 - s^2) removes the square-root endpoint
    let action = if theta0 == T::zero() {
        T::zero()
    } else {
        let tol = T::lit(1e-14).max(T::epsilon() * T::lit(16.0));
        quad::integrate(
            |s: T| {
                let th = theta0 * (T::one() - s * s);
                (T::one() - a * th.cosh()).max(T::zero()).sqrt() * T::lit(2.0) * theta0 * s
            },
            T::zero(),
            T::one(),
            tol,
            T::zero(),
        )
        .value
    };
    let ratio = T::lit(2.0) / T::PI() * (-action / p.f).exp();
    Ok(GapEstimate { theta0, action, ratio, gap: ratio * p.f })
}

/// Whether the adiabatic ladders sit within three estimated gaps of each
/// other, where the adiabatic spectrum is not expected to hold.
pub fn near_avoided_crossing<T: Real>(p: &Lattice<T>) -> Result<bool> {
    let g = gap_estimate(p)?;
    let (plus, minus) = adiabatic_constants(p)?;
    let two_f = T::lit(2.0) * p.f;
    let e_plus = plus.c_const + two_f * plus.zak;
    let e_minus = minus.c_const + two_f * minus.zak;
    let split = fold_half_open(e_plus - e_minus, p.f).abs();
    Ok(split < T::lit(3.0) * g.gap)
}
