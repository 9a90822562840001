//! Avoided crossings between the two ladders as a function of `1/F`.

use rayon::prelude::*;

use super::floquet::monodromy;
use super::Branch;
use crate::model::Lattice;
use crate::{Error, Real, Result};

/// Location and size of a minimal splitting between the two ladders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvoidedCrossing<T> {
    pub inv_f_star: T,
    /// Minimal splitting in energy units; zero for an exact crossing.
    pub gap: T,
    pub branch_pair: (Branch, Branch),
}

/// Smallest distance between the two ladders, divided by `F`, at `1/F = z`.
///
/// With fundamental level `e` the ladders `±e + 2Fn` are split by `2e` and by
/// `2F - 2e`, so the scaled value lies in `[0, 1]`.
pub fn scaled_splitting<T: Real>(p: &Lattice<T>, inv_f: T) -> Result<T> {
    let at = p.with_field(T::one() / inv_f)?;
    let e = monodromy(&at)?.fundamental_energy(at.f) / at.f;
    Ok((T::lit(2.0) * e).min(T::lit(2.0) - T::lit(2.0) * e))
}

/// Scans `1/F` over `interval` with `resolution` samples, then refines each
/// interior local minimum of the scaled splitting by golden-section search.
pub fn find_avoided_crossings<T: Real>(
    p: &Lattice<T>,
    interval: (T, T),
    resolution: usize,
) -> Result<Vec<AvoidedCrossing<T>>> {
    let (a, b) = interval;
    if !(a > T::zero() && b > a && b.is_finite()) {
        return Err(Error::invalid(format!("1/F interval ({a}, {b}) must be positive and increasing")));
    }
    if resolution < 100 {
        return Err(Error::invalid(format!("resolution must be at least 100, got {resolution}")));
    }
    let step = (b - a) / T::from_usize_lossy(resolution - 1);
    let zs: Vec<T> = (0..resolution).map(|i| a + step * T::from_usize_lossy(i)).collect();
    let s: Vec<T> = zs
        .par_iter()
        .map(|&z| scaled_splitting(p, z))
        .collect::<Result<_>>()?;
    // ignore ripples at the level of the integration tolerance
    let depth = T::lit(1e-9);
    let mut out = Vec::new();
    for i in 1..resolution - 1 {
        if s[i] + depth < s[i - 1] && s[i] <= s[i + 1] {
            let (z, val) = golden_section(|z| scaled_splitting(p, z), zs[i - 1], zs[i + 1])?;
            let f = T::one() / z;
            let mut gap = val * f;
            if gap < T::lit(1e-12) * f {
                gap = T::zero();
            }
            out.push(AvoidedCrossing { inv_f_star: z, gap, branch_pair: (Branch::Plus, Branch::Minus) });
        }
    }
    Ok(out)
}

fn golden_section<T: Real, F: Fn(T) -> Result<T>>(f: F, mut a: T, mut b: T) -> Result<(T, T)> {
    let r = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let tol = T::lit(1e-6).max(T::epsilon().sqrt());
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if (b - a) <= tol * (a.abs() + b.abs()) * T::lit(0.5) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(j1: f64, j2: f64, d: f64) -> Lattice<f64> {
        Lattice::new(j1, j2, d, 1.0).unwrap()
    }

    #[test]
    fn dimerized_chain_crossings_near_nine() {
        let c = find_avoided_crossings(&lat(1.0, 0.6, 0.0), (8.6, 9.6), 100).unwrap();
        assert_eq!(c.len(), 1, "{c:?}");
        assert!((c[0].inv_f_star - 9.0).abs() < 0.3);
        assert!(c[0].gap > 0.0 && c[0].gap < 0.05);
    }

    #[test]
    fn uniform_chain_has_none() {
        let c = find_avoided_crossings(&lat(0.76, 0.76, 0.0), (1.0, 5.0), 100).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, v) = golden_section(|x: f64| Ok((x - 1.234) * (x - 1.234) + 0.5), 0.0, 3.0).unwrap();
        assert!((x - 1.234).abs() < 1e-5 && (v - 0.5).abs() < 1e-9);
    }
}
