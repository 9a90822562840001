//! Strong-field ladders: the Wu-Yang quantization, its expansion in
//! `eps = delta/F`, and the averaged-coupling (Bogoliubov-Mitropolskii) ladder.

use std::ops::RangeInclusive;

use crate::model::Lattice;
use crate::quad::{self, Primitive};
use crate::spectra::{Branch, LadderSpectrum, Level};
use crate::{Error, Real, Result};

use super::special::{bessel_j, osc_integral};
use super::wu_yang::wu_yang_propagator;

fn require_equal_hoppings<T: Real>(p: &Lattice<T>) -> Result<T> {
    p.require_field()?;
    let scale = p.j1.abs().max(p.j2.abs()).max(T::min_positive_value());
    if (p.j1 - p.j2).abs() > T::epsilon() * T::lit(16.0) * scale {
        return Err(Error::invalid(format!(
            "method needs equal hoppings, got j1={}, j2={}",
            p.j1, p.j2
        )));
    }
    Ok((p.j1 + p.j2) * T::lit(0.5))
}

/// Ladder `±e + 2Fn` where `e` is the fundamental level of the plus branch.
fn symmetric_ladder<T: Real>(e: T, f: T, n_range: RangeInclusive<i64>) -> LadderSpectrum<T> {
    let mut levels = Vec::new();
    for n in n_range {
        let base = T::lit(2.0) * f * T::from_i64_lossy(n);
        for b in [Branch::Minus, Branch::Plus] {
            levels.push(Level { energy: base + b.sign::<T>() * e, branch: b, index: n, converged: true });
        }
    }
    LadderSpectrum::new(levels, f)
}

/// Fundamental plus-branch level from the Wu-Yang propagator at `t = pi`,
/// together with the modulus of the discarded imaginary part of the arcsine
/// argument.
pub fn wu_yang_fundamental<T: Real>(p: &Lattice<T>) -> Result<(T, T)> {
    let j = require_equal_hoppings(p)?;
    let eps = p.delta / p.f;
    let omega = T::lit(2.0) * j / p.f;
    let u = wu_yang_propagator(eps, omega, T::PI());
    // (U11 - U22) / (2i)
    let d = u[0][0] - u[1][1];
    let arg_re = d.im * T::lit(0.5);
    let arg_im = -d.re * T::lit(0.5);
    if arg_re.abs() > T::one() {
        return Err(Error::OutOfValidity(format!(
            "arcsine argument {arg_re} outside [-1, 1] at f={}, delta={}",
            p.f, p.delta
        )));
    }
    let e = p.f * (T::lit(0.5) + arg_re.asin() / T::PI());
    Ok((e, arg_im.abs()))
}

/// Levels `F(2n ± 1/2) ± (F/pi) asin(...)` from the Wu-Yang propagator.
pub fn spectrum_wu_yang<T: Real>(p: &Lattice<T>, n_range: RangeInclusive<i64>) -> Result<LadderSpectrum<T>> {
    let (e, _) = wu_yang_fundamental(p)?;
    Ok(symmetric_ladder(e, p.f, n_range))
}

/// Coefficients `(Pi1, Pi3)` of the expansion `F/2 + eps Pi1 + eps^3 Pi3`.
///
/// `Pi1 = F J0(4J/F)` and
/// `Pi3 = -(2F/pi) ∫_0^pi [I(t, z) - I(pi, z)/2]^2 cos(z sin t) dt`, `z = 4J/F`.
pub fn expansion_coefficients<T: Real>(p: &Lattice<T>) -> Result<(T, T)> {
    let j = require_equal_hoppings(p)?;
    let z = T::lit(4.0) * j / p.f;
    let pi1 = p.f * bessel_j(0, z)?;
    let pi = T::PI();
    let panels = 16 + 2 * z.ceil().to_usize().unwrap_or(0);
    let big_i = Primitive::new(move |x: T| (z * x.sin()).sin(), T::zero(), pi, panels);
    let half_full = osc_integral(pi, z) * T::lit(0.5);
    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(10.0));
    let q = quad::integrate(
        |t: T| {
            let d = big_i.eval(t) - half_full;
            d * d * (z * t.sin()).cos()
        },
        T::zero(),
        pi,
        tol,
        T::zero(),
    );
    let pi3 = -T::lit(2.0) * p.f / pi * q.value;
    Ok((pi1, pi3))
}

/// Truncation order of the strong-field expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    First,
    Third,
}

/// Levels `F(2n ± 1/2) ± eps Pi1 ± eps^3 Pi3`.
pub fn spectrum_expansion<T: Real>(
    p: &Lattice<T>,
    n_range: RangeInclusive<i64>,
    order: ExpansionOrder,
) -> Result<LadderSpectrum<T>> {
    let (pi1, pi3) = expansion_coefficients(p)?;
    let eps = p.delta / p.f;
    let mut e = p.f * T::lit(0.5) + eps * pi1;
    if order == ExpansionOrder::Third {
        e += eps * eps * eps * pi3;
    }
    Ok(symmetric_ladder(e, p.f, n_range))
}

/// Mean coupling `f_bar` of the averaged equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedCoupling<T> {
    pub f_bar: T,
    pub params: Lattice<T>,
}

/// `f_bar = (delta/F) J0(2(j1+j2)/F) + ((j1-j2)/F) J1(2(j1+j2)/F)`.
pub fn averaged_coupling<T: Real>(p: &Lattice<T>) -> Result<AveragedCoupling<T>> {
    p.require_field()?;
    let z = T::lit(2.0) * (p.j1 + p.j2) / p.f;
    let f_bar = p.delta / p.f * bessel_j(0, z)? + (p.j1 - p.j2) / p.f * bessel_j(1, z)?;
    Ok(AveragedCoupling { f_bar, params: *p })
}

/// Levels `F(2n ± (1/2 + f_bar))`.
pub fn spectrum_bm<T: Real>(p: &Lattice<T>, n_range: RangeInclusive<i64>) -> Result<LadderSpectrum<T>> {
    let c = averaged_coupling(p)?;
    Ok(symmetric_ladder(p.f * (T::lit(0.5) + c.f_bar), p.f, n_range))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::monodromy;

    fn lat(j1: f64, j2: f64, d: f64, f: f64) -> Lattice<f64> {
        Lattice::new(j1, j2, d, f).unwrap()
    }

    fn exact_e(p: &Lattice<f64>) -> f64 {
        monodromy(p).unwrap().fundamental_energy(p.f)
    }

    #[test]
    fn zero_offset_gives_half_integer_ladders() {
        let p = lat(0.76, 0.76, 0.0, 0.8);
        for s in [
            spectrum_wu_yang(&p, -1..=1).unwrap(),
            spectrum_expansion(&p, -1..=1, ExpansionOrder::Third).unwrap(),
            spectrum_bm(&p, -1..=1).unwrap(),
        ] {
            for l in &s.levels {
                let want = 0.8 * (2.0 * l.index as f64 + l.branch.sign::<f64>() * 0.5);
                assert!((l.energy - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn averaged_coupling_examples() {
        let c = averaged_coupling(&lat(1.0, 0.6, 0.0, 1.0)).unwrap();
        assert!((c.f_bar - 0.4 * bessel_j(1, 3.2).unwrap()).abs() < 1e-15);
        assert_eq!(averaged_coupling(&lat(0.5, 0.5, 0.0, 1.0)).unwrap().f_bar, 0.0);
        let p = lat(0.76, 0.76, 0.3, 3.0);
        let (pi1, _) = expansion_coefficients(&p).unwrap();
        assert!((averaged_coupling(&p).unwrap().f_bar - pi1 / 3.0 * 0.1).abs() < 1e-15);
    }

    #[test]
    fn bm_equals_first_order_expansion() {
        for (d, f) in [(0.3, 3.0), (0.2, 1.0), (0.4, 0.5)] {
            let p = lat(0.76, 0.76, d, f);
            let a = spectrum_bm(&p, -2..=2).unwrap();
            let b = spectrum_expansion(&p, -2..=2, ExpansionOrder::First).unwrap();
            for (x, y) in a.levels.iter().zip(&b.levels) {
                assert!((x.energy - y.energy).abs() < 1e-12);
            }
        }
    }

    /// Fit of the exact fundamental level against eps, eps^3, eps^5.
    #[test]
    fn expansion_coefficients_match_exact_fit() {
        for f in [0.5, 1.0, 2.0] {
            let eps: Vec<f64> = vec![0.01, 0.02, 0.03, 0.04, 0.05];
            let y: Vec<f64> = eps.iter().map(|&e| exact_e(&lat(0.76, 0.76, e * f, f)) - f / 2.0).collect();
            // normal equations for the odd polynomial basis
            let basis = |e: f64| [e, e.powi(3), e.powi(5)];
            let mut a = [[0.0; 3]; 3];
            let mut b = [0.0; 3];
            for (e, yy) in eps.iter().zip(&y) {
                let v = basis(*e);
                for i in 0..3 {
                    b[i] += v[i] * yy;
                    for j in 0..3 {
                        a[i][j] += v[i] * v[j];
                    }
                }
            }
            let c = solve3(a, b);
            let (pi1, pi3) = expansion_coefficients(&lat(0.76, 0.76, 0.0, f)).unwrap();
            assert!((c[0] - pi1).abs() < 0.01 * pi1.abs(), "f={f}: {} vs {pi1}", c[0]);
            assert!((c[1] - pi3).abs() < 0.01 * pi3.abs(), "f={f}: {} vs {pi3}", c[1]);
        }
    }

    fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
        for k in 0..3 {
            for i in k + 1..3 {
                let m = a[i][k] / a[k][k];
                for j in k..3 {
                    a[i][j] -= m * a[k][j];
                }
                b[i] -= m * b[k];
            }
        }
        let mut x = [0.0; 3];
        for i in (0..3).rev() {
            let s: f64 = (i + 1..3).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    #[test]
    fn wu_yang_tracks_exact_at_small_eps() {
        let p = lat(0.76, 0.76, 0.02, 1.0);
        let (e, discarded) = wu_yang_fundamental(&p).unwrap();
        assert!((e - exact_e(&p)).abs() < 1e-5);
        assert!(discarded < 1e-4);
        let third = spectrum_expansion(&p, 0..=0, ExpansionOrder::Third).unwrap();
        let plus = third.branch(Branch::Plus).next().unwrap().energy;
        assert!((plus - e).abs() < 1e-6);
    }

    #[test]
    fn unequal_hoppings_rejected() {
        assert!(spectrum_wu_yang(&lat(1.0, 0.6, 0.1, 1.0), 0..=0).is_err());
        assert!(expansion_coefficients(&lat(1.0, 0.6, 0.1, 1.0)).is_err());
    }
}
