//! Small helpers for 2x2 complex matrices stored as nested arrays.

use num_complex::Complex;

use crate::Real;

/// Row-major 2x2 complex matrix.
pub type Mat2<T> = [[Complex<T>; 2]; 2];

pub fn identity<T: Real>() -> Mat2<T> {
    let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
    [[o, z], [z, o]]
}

pub fn mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut c = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn apply<T: Real>(a: &Mat2<T>, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn adjoint<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn det<T: Real>(a: &Mat2<T>) -> Complex<T> {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn inverse<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    let d = det(a);
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

pub fn scale<T: Real>(a: &Mat2<T>, s: Complex<T>) -> Mat2<T> {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn add<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> T {
    let mut m = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// `max |(a^dagger a - 1)_ij|`.
pub fn unitarity_defect<T: Real>(a: &Mat2<T>) -> T {
    max_abs_diff(&mul(&adjoint(a), a), &identity())
}

/// Both eigenvalues from the closed-form characteristic roots.
pub fn eigenvalues<T: Real>(a: &Mat2<T>) -> (Complex<T>, Complex<T>) {
    let half = T::lit(0.5);
    let mean = (a[0][0] + a[1][1]) * half;
    let diff = (a[0][0] - a[1][1]) * half;
    let root = (diff * diff + a[0][1] * a[1][0]).sqrt();
    (mean + root, mean - root)
}

/// Nearest unitary matrix, by averaging with the inverse adjoint until the
/// iteration settles.
pub fn polar_unitary<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    let half = Complex::new(T::lit(0.5), T::zero());
    let mut u = *a;
    for _ in 0..8 {
        let next = scale(&add(&u, &adjoint(&inverse(&u))), half);
        let change = max_abs_diff(&next, &u);
        u = next;
        if change <= T::epsilon() * T::lit(4.0) {
            break;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_restores_unitarity() {
        let c = |r: f64, i: f64| Complex::new(r, i);
        let (s, co) = (0.3f64.sin(), 0.3f64.cos());
        let u = [[c(co, 0.0), c(0.0, s)], [c(0.0, s), c(co, 0.0)]];
        let noisy = [[u[0][0] * 1.0001, u[0][1]], [u[1][0], u[1][1] * 0.9999 + c(0.0, 1e-4)]];
        let p = polar_unitary(&noisy);
        assert!(unitarity_defect(&p) < 1e-14);
        assert!(max_abs_diff(&p, &u) < 1e-3);
        let (l1, l2) = eigenvalues(&u);
        assert!((l1 * l2 - det(&u)).norm() < 1e-15);
        assert!((l1 + l2 - (u[0][0] + u[1][1])).norm() < 1e-15);
    }
}
