//! Monodromy of the generating-function equation and Floquet quantization.

use std::ops::RangeInclusive;

use num_complex::Complex;

use super::{Branch, LadderSpectrum, Level};
use crate::mat2::{self, Mat2};
use crate::model::Lattice;
use crate::{Error, Real, Result};

/// Period-`2pi` propagator of `i dY/dtheta = G0(theta)/(2F) Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy<T> {
    pub matrix: Mat2<T>,
    pub eigenvalues: (Complex<T>, Complex<T>),
    pub integration_steps: usize,
}

impl<T: Real> Monodromy<T> {
    /// Eigenphase `|arg lambda|` in `[0, pi]`.
    pub fn phase(&self) -> T {
        self.eigenvalues.0.arg().abs()
    }

    /// Fundamental level `e = (F/pi) |arg lambda|` in `[0, F]`; the spectrum
    /// is `{+e + 2Fn} ∪ {-e + 2Fn}`.
    pub fn fundamental_energy(&self, f: T) -> T {
        f / T::PI() * self.phase()
    }

    pub fn unitarity_defect(&self) -> T {
        mat2::unitarity_defect(&self.matrix)
    }

    pub fn det(&self) -> Complex<T> {
        mat2::det(&self.matrix)
    }
}

/// Generator `G0(theta)/(2F)` multiplied by `-i`.
fn rhs_matrix<T: Real>(p: &Lattice<T>, theta: T) -> Mat2<T> {
    let scale = T::one() / (T::lit(2.0) * p.f);
    let m = (p.delta + p.f * T::lit(0.5)) * scale;
    let w = Complex::new(p.j1 + p.j2 * theta.cos(), -p.j2 * theta.sin()) * scale;
    let mi = Complex::new(T::zero(), -T::one());
    [[mi * m, mi * w], [mi * w.conj(), -(mi * m)]]
}

fn rk4_propagate<T: Real>(p: &Lattice<T>, steps: usize) -> Mat2<T> {
    let h = T::lit(2.0) * T::PI() / T::from_usize_lossy(steps);
    let hc = Complex::new(h, T::zero());
    let half = Complex::new(T::lit(0.5), T::zero());
    let sixth = Complex::new(T::one() / T::lit(6.0), T::zero());
    let two = Complex::new(T::lit(2.0), T::zero());
    let mut y = mat2::identity::<T>();
    let mut a_left = rhs_matrix(p, T::zero());
    for s in 0..steps {
        let theta = h * T::from_usize_lossy(s);
        let a_mid = rhs_matrix(p, theta + h * T::lit(0.5));
        let a_right = rhs_matrix(p, theta + h);
        let k1 = mat2::mul(&a_left, &y);
        let k2 = mat2::mul(&a_mid, &mat2::add(&y, &mat2::scale(&k1, hc * half)));
        let k3 = mat2::mul(&a_mid, &mat2::add(&y, &mat2::scale(&k2, hc * half)));
        let k4 = mat2::mul(&a_right, &mat2::add(&y, &mat2::scale(&k3, hc)));
        let incr = mat2::add(&mat2::add(&k1, &mat2::scale(&k2, two)), &mat2::add(&mat2::scale(&k3, two), &k4));
        y = mat2::add(&y, &mat2::scale(&incr, hc * sixth));
        a_left = a_right;
    }
    y
}

/// Default entry-wise refinement tolerance for the scalar type.
pub(crate) fn default_tolerance<T: Real>() -> T {
    T::lit(1e-11).max(T::epsilon() * T::lit(1000.0))
}

/// Monodromy at trial energy zero, refined until halving the step changes no
/// entry by more than the default tolerance.
pub fn monodromy<T: Real>(p: &Lattice<T>) -> Result<Monodromy<T>> {
    monodromy_with_tolerance(p, default_tolerance())
}

pub fn monodromy_with_tolerance<T: Real>(p: &Lattice<T>, tol: T) -> Result<Monodromy<T>> {
    p.require_field()?;
    const MAX_STEPS: usize = 1 << 23;
    // start near the resolution the generator norm demands
    let norm = ((p.delta + p.f * T::lit(0.5)).abs() + p.j1 + p.j2) / (T::lit(2.0) * p.f);
    let mut steps = 64usize;
    let wanted = (norm * T::lit(2.0) * T::PI() * T::lit(4.0)).to_usize().unwrap_or(MAX_STEPS);
    while steps < wanted && steps < MAX_STEPS / 4 {
        steps *= 2;
    }
    let mut prev = rk4_propagate(p, steps);
    loop {
        let next_steps = steps * 2;
        if next_steps > MAX_STEPS {
            return Err(Error::NonConvergence(format!(
                "monodromy did not settle to {tol} within {MAX_STEPS} steps (f={})",
                p.f
            )));
        }
        let next = rk4_propagate(p, next_steps);
        let change = mat2::max_abs_diff(&next, &prev);
        prev = next;
        steps = next_steps;
        if change < tol {
            break;
        }
    }
    let matrix = mat2::polar_unitary(&prev);
    let (l1, l2) = mat2::eigenvalues(&matrix);
    // order the pair so the first eigenvalue has non-negative phase
    let eigenvalues = if l1.arg() >= T::zero() { (l1, l2) } else { (l2, l1) };
    Ok(Monodromy { matrix, eigenvalues, integration_steps: steps })
}

/// Wannier-Stark levels `±e + 2Fn` for `n` in `n_range`.
pub fn ws_spectrum_floquet<T: Real>(p: &Lattice<T>, n_range: RangeInclusive<i64>) -> Result<LadderSpectrum<T>> {
    let m = monodromy(p)?;
    Ok(ladder_from_fundamental(m.fundamental_energy(p.f), p.f, n_range))
}

pub(crate) fn ladder_from_fundamental<T: Real>(e: T, f: T, n_range: RangeInclusive<i64>) -> LadderSpectrum<T> {
    let mut levels = Vec::new();
    for n in n_range {
        let base = T::lit(2.0) * f * T::from_i64_lossy(n);
        for b in [Branch::Minus, Branch::Plus] {
            levels.push(Level { energy: b.sign::<T>() * e + base, branch: b, index: n, converged: true });
        }
    }
    LadderSpectrum::new(levels, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lat(j1: f64, j2: f64, d: f64, f: f64) -> Lattice<f64> {
        Lattice::new(j1, j2, d, f).unwrap()
    }

    #[test]
    fn free_sites_give_quarter_turn() {
        let m = monodromy(&lat(0.0, 0.0, 0.0, 0.7)).unwrap();
        let want = [[Complex::new(0.0, -1.0), Complex::new(0.0, 0.0)], [Complex::new(0.0, 0.0), Complex::new(0.0, 1.0)]];
        assert!(mat2::max_abs_diff(&m.matrix, &want) < 1e-12);
    }

    #[test]
    fn equal_hoppings_give_half_integer_ladder() {
        for (j, f) in [(0.76, 0.1), (0.3, 1.0), (1.2, 0.35)] {
            let m = monodromy(&lat(j, j, 0.0, f)).unwrap();
            assert!((m.phase() - PI / 2.0).abs() < 1e-10, "j={j} f={f}: {}", m.phase());
        }
    }

    #[test]
    fn invariants_hold() {
        for (j1, j2, d, f) in [(1.0, 0.6, 0.0, 0.1), (0.76, 0.76, 0.4, 0.3), (0.2, 1.3, -0.5, 2.0)] {
            let m = monodromy(&lat(j1, j2, d, f)).unwrap();
            assert!(m.unitarity_defect() < 1e-10);
            assert!((m.det() - Complex::new(1.0, 0.0)).norm() < 1e-10);
            assert!((m.eigenvalues.0.conj() - m.eigenvalues.1).norm() < 1e-10);
            assert!((m.eigenvalues.0.norm() - 1.0).abs() < 1e-10);
        }
    }

    /// Fixed-step classical RK4 at ten times the adaptive resolution.
    #[test]
    fn matches_fine_fixed_step_oracle() {
        let p = lat(1.0, 0.6, 0.0, 0.1);
        let m = monodromy(&p).unwrap();
        let oracle = rk4_propagate(&p, m.integration_steps * 10);
        assert!(mat2::max_abs_diff(&m.matrix, &oracle) < 1e-9);
    }

    #[test]
    fn rejects_zero_field() {
        assert!(monodromy(&lat(1.0, 0.6, 0.0, 0.0)).is_err());
    }

    #[test]
    fn ladder_layout() {
        let s = ws_spectrum_floquet(&lat(0.76, 0.76, 0.0, 0.5), -2..=2).unwrap();
        assert_eq!(s.levels.len(), 10);
        for l in &s.levels {
            let k = l.energy / 0.5 - 0.5;
            assert!((k - k.round()).abs() < 1e-9);
        }
        let plus: Vec<f64> = s.branch(Branch::Plus).map(|l| l.energy).collect();
        assert!(plus.windows(2).all(|w| (w[1] - w[0] - 1.0).abs() < 1e-12));
    }

    #[test]
    fn single_precision_monodromy() {
        let p = Lattice::<f32>::new(0.76, 0.76, 0.0, 0.5).unwrap();
        let m = monodromy(&p).unwrap();
        assert!((m.phase() - std::f32::consts::FRAC_PI_2).abs() < 1e-4);
    }
}
