//! Bessel functions of order 0 and 1 and the oscillatory integral
//! `I(t, z) = ∫_0^t sin(z sin x) dx`.

use crate::quad;
use crate::{Error, Real, Result};

const SERIES_LIMIT: f64 = 12.0;
const ARGUMENT_LIMIT: f64 = 700.0;

/// Bessel function of the first kind, order 0 or 1.
///
/// Uses the power series up to `|z| = 12` and the periodic integral
/// representation beyond, where the trapezoid rule converges geometrically.
pub fn bessel_j<T: Real>(order: u32, z: T) -> Result<T> {
    check(order, z)?;
    if z.abs() <= T::lit(SERIES_LIMIT) {
        Ok(bessel_series(order, z))
    } else {
        Ok(bessel_integral(order, z))
    }
}

fn check<T: Real>(order: u32, z: T) -> Result<()> {
    if order > 1 {
        return Err(Error::invalid(format!("bessel order must be 0 or 1, got {order}")));
    }
    if !z.is_finite() || z.abs() >= T::lit(ARGUMENT_LIMIT) {
        return Err(Error::invalid(format!("bessel argument must satisfy |z| < 700, got {z}")));
    }
    Ok(())
}

/// Power series `sum (-1)^k (z/2)^(2k+n) / (k! (k+n)!)`.
pub fn bessel_series<T: Real>(order: u32, z: T) -> T {
    let half = z * T::lit(0.5);
    let q = -half * half;
    let mut term = if order == 0 { T::one() } else { half };
    let mut sum = term;
    let n = T::from_usize_lossy(order as usize);
    for k in 1..200 {
        let kf = T::from_usize_lossy(k);
        term = term * q / (kf * (kf + n));
        sum += term;
        if term.abs() <= T::epsilon() * T::lit(1e-3) * sum.abs().max(T::min_positive_value()) {
            break;
        }
    }
    sum
}

/// Trapezoid rule on `(1/2pi) ∫_0^{2pi} cos(n theta - z sin theta)`.
pub fn bessel_integral<T: Real>(order: u32, z: T) -> T {
    let m = (z.abs() * T::lit(2.0)).to_usize().unwrap_or(0) + 64;
    let h = T::lit(2.0) * T::PI() / T::from_usize_lossy(m);
    let n = T::from_usize_lossy(order as usize);
    let mut s = T::zero();
    for k in 0..m {
        let th = h * T::from_usize_lossy(k);
        s += (n * th - z * th.sin()).cos();
    }
    s / T::from_usize_lossy(m)
}

/// `I(t, z) = ∫_0^t sin(z sin x) dx` by adaptive Gauss-Kronrod quadrature.
pub fn osc_integral<T: Real>(t: T, z: T) -> T {
    if t == T::zero() || z == T::zero() {
        return T::zero();
    }
    let tol = T::lit(1e-14).max(T::epsilon() * T::lit(10.0));
    quad::integrate(|x: T| (z * x.sin()).sin(), T::zero(), t, tol, T::zero()).value
}
