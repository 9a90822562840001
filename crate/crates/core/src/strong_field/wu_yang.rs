//! Second-order Wu-Yang propagator of the strongly driven two-level system
//! `i dU/dt = [[eps, Omega cos t], [Omega cos t, -eps]] U`, returned in the
//! complex-conjugate convention used by the spectrum formula.

use num_complex::Complex;

use crate::mat2::Mat2;
use crate::quad::{self, Primitive};
use crate::Real;

use super::special::bessel_integral;

/// The four phase functions at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WuYangPhaseSet<T> {
    pub tau: T,
    pub beta: T,
    pub phi: T,
    pub psi: T,
    pub epsilon: T,
    pub omega: T,
    pub t: T,
}

fn panels_for<T: Real>(z: T) -> usize {
    16 + 2 * z.abs().ceil().to_usize().unwrap_or(0)
}

/// Phase functions for detuning `epsilon`, drive `omega`, at `t ∈ [0, pi]`.
pub fn wu_yang_phases<T: Real>(epsilon: T, omega: T, t: T) -> WuYangPhaseSet<T> {
    let zero = T::zero();
    if epsilon == zero || t == zero {
        return WuYangPhaseSet { tau: zero, beta: zero, phi: zero, psi: zero, epsilon, omega, t };
    }
    let z = T::lit(2.0) * omega;
    let pi = T::PI();
    let panels = panels_for(z);
    let big_i = Primitive::new(move |x: T| (z * x.sin()).sin(), zero, pi, panels);
    let big_k = Primitive::new(move |x: T| (z * x.cos()).sin(), zero, pi, panels);
    let two_eps = T::lit(2.0) * epsilon;
    // J0 through the trapezoid rule keeps this path free of the range check
    let offset = T::lit(2.0) * pi * epsilon * bessel_integral(0, z);
    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(10.0));
    let integ = |g: &dyn Fn(T) -> T| quad::integrate(g, zero, t, tol, zero).value;

    let tau = epsilon * big_i.eval(t);
    let beta = epsilon * integ(&|s: T| (z * s.sin()).cos() * (two_eps * big_i.eval(s)).cos());
    let phi = -epsilon
        * integ(&|s: T| {
            let arg = offset - two_eps * big_k.eval(s);
            (z * s.sin()).cos() * (two_eps * big_i.eval(s)).sin() * arg.cos()
        });
    let psi = epsilon
        * integ(&|s: T| {
            let arg = offset - two_eps * big_k.eval(s);
            (z * s.sin()).cos() * (two_eps * big_i.eval(s)).sin() * arg.sin()
        });
    WuYangPhaseSet { tau, beta, phi, psi, epsilon, omega, t }
}

impl<T: Real> WuYangPhaseSet<T> {
    /// Propagator assembled from the four phases.
    pub fn propagator(&self) -> Mat2<T> {
        let i = Complex::new(T::zero(), T::one());
        let (st, ct) = self.tau.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        let (ss, cs) = self.psi.sin_cos();
        let a = Complex::new(ct * cp, -st * sp);
        let b = Complex::new(-st * cp, ct * sp);
        let eb = (i * self.beta).exp();
        let ebm = (-i * self.beta).exp();
        [
            [eb * (a * cs - b * ss), ebm * (a * ss + b * cs)],
            [eb * (-b.conj() * cs - a.conj() * ss), ebm * (-b.conj() * ss + a.conj() * cs)],
        ]
    }
}

/// Approximate propagator `U(t)`; unitary up to third-order terms in `epsilon`.
pub fn wu_yang_propagator<T: Real>(epsilon: T, omega: T, t: T) -> Mat2<T> {
    wu_yang_phases(epsilon, omega, t).propagator()
}
