//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

use crate::model::ChainHamiltonian;
use crate::{Error, Real, Result};

fn pivot_floor<T: Real>(off: &[T]) -> T {
    let m = off.iter().fold(T::zero(), |m, &e| m.max(e * e));
    T::min_positive_value().max(m * T::epsilon() * T::epsilon())
}

fn count_below<T: Real>(diag: &[T], off: &[T], x: T, pivmin: T) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < T::zero() {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count<T: Real>(h: &ChainHamiltonian<T>, x: T) -> usize {
    count_below(&h.diagonal, &h.off_diagonal, x, pivot_floor(&h.off_diagonal))
}

fn gershgorin<T: Real>(diag: &[T], off: &[T]) -> (T, T) {
    let n = diag.len();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..n {
        let mut r = T::zero();
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i + 1 < n {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

struct Bisector<'a, T> {
    diag: &'a [T],
    off: &'a [T],
    pivmin: T,
    scale: T,
}

impl<T: Real> Bisector<'_, T> {
    /// Eigenvalue number `k` (0-based ascending) inside the bracket.
    fn kth(&self, k: usize, mut lo: T, mut hi: T) -> T {
        let two = T::lit(2.0);
        let tol_abs = self.scale * T::epsilon() * two + self.pivmin;
        for _ in 0..256 {
            let mid = (lo + hi) / two;
            if hi - lo <= tol_abs.max(T::epsilon() * two * mid.abs()) || mid <= lo || mid >= hi {
                break;
            }
            if count_below(self.diag, self.off, mid, self.pivmin) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) / two
    }
}

fn validate<T: Real>(h: &ChainHamiltonian<T>) -> Result<()> {
    if h.diagonal.is_empty() || h.off_diagonal.len() + 1 != h.diagonal.len() {
        return Err(Error::invalid("tridiagonal needs n diagonal and n-1 off-diagonal entries"));
    }
    if h.diagonal.iter().chain(&h.off_diagonal).any(|v| !v.is_finite()) {
        return Err(Error::invalid("tridiagonal entries must be finite"));
    }
    Ok(())
}

/// All eigenvalues in ascending order.
pub fn eigenvalues_symmetric_tridiagonal<T: Real>(h: &ChainHamiltonian<T>) -> Result<Vec<T>> {
    validate(h)?;
    let (lo, hi) = gershgorin(&h.diagonal, &h.off_diagonal);
    let widen = (hi - lo).max(T::one()) * T::epsilon() * T::lit(4.0);
    Ok(window_values(h, lo - widen, hi + widen))
}

/// Eigenvalues inside `[lo, hi)`, ascending.
pub fn eigenvalues_in_window<T: Real>(h: &ChainHamiltonian<T>, lo: T, hi: T) -> Result<Vec<T>> {
    validate(h)?;
    if !(lo < hi) {
        return Err(Error::invalid(format!("empty eigenvalue window [{lo}, {hi})")));
    }
    let (glo, ghi) = gershgorin(&h.diagonal, &h.off_diagonal);
    Ok(window_values(h, lo.max(glo - T::one()), hi.min(ghi + T::one())))
}

fn window_values<T: Real>(h: &ChainHamiltonian<T>, lo: T, hi: T) -> Vec<T> {
    if !(lo < hi) {
        return Vec::new();
    }
    let pivmin = pivot_floor(&h.off_diagonal);
    let b = Bisector {
        diag: &h.diagonal,
        off: &h.off_diagonal,
        pivmin,
        scale: lo.abs().max(hi.abs()),
    };
    let first = count_below(b.diag, b.off, lo, pivmin);
    let last = count_below(b.diag, b.off, hi, pivmin);
    (first..last).map(|k| b.kth(k, lo, hi)).collect()
}

/// Unit eigenvector for an (accurate) eigenvalue `lambda` by inverse
/// iteration with a partially pivoted tridiagonal solve.
pub fn eigenvector_inverse_iteration<T: Real>(h: &ChainHamiltonian<T>, lambda: T) -> Result<Vec<T>> {
    validate(h)?;
    let n = h.size();
    let (glo, ghi) = gershgorin(&h.diagonal, &h.off_diagonal);
    // nudge off the eigenvalue so the factorization stays finite
    let shift = lambda + (ghi - glo).max(T::one()) * T::epsilon() * T::lit(8.0);
    let mut x: Vec<T> = (0..n).map(|i| T::one() + T::lit(0.001) * T::from_usize_lossy(i % 7)).collect();
    normalize(&mut x);
    for _ in 0..6 {
        let mut y = solve_shifted(&h.diagonal, &h.off_diagonal, shift, &x);
        normalize(&mut y);
        let dot = x.iter().zip(&y).fold(T::zero(), |s, (a, b)| s + *a * *b);
        x = y;
        if (dot.abs() - T::one()).abs() < T::epsilon() * T::lit(64.0) {
            break;
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence("inverse iteration produced non-finite vector".into()));
    }
    Ok(x)
}

fn normalize<T: Real>(x: &mut [T]) {
    let n = x.iter().fold(T::zero(), |s, v| s + *v * *v).sqrt();
    if n > T::zero() {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Solves `(H - shift) y = b` with row pivoting. Fill-in leaves an upper
/// band of width three.
fn solve_shifted<T: Real>(diag: &[T], off: &[T], shift: T, b: &[T]) -> Vec<T> {
    let n = diag.len();
    let tiny = T::min_positive_value().sqrt();
    if n == 1 {
        let d = diag[0] - shift;
        return vec![b[0] / if d.abs() < tiny { tiny } else { d }];
    }
    // row i holds u0 (diagonal), u1, u2 to the right
    let mut u0 = vec![T::zero(); n];
    let mut u1 = vec![T::zero(); n];
    let mut u2 = vec![T::zero(); n];
    let mut rhs = b.to_vec();
    let mut piv = (diag[0] - shift, off[0], T::zero(), rhs[0]);
    for i in 0..n - 1 {
        let c2 = if i + 1 < n - 1 { off[i + 1] } else { T::zero() };
        let mut other = (off[i], diag[i + 1] - shift, c2, rhs[i + 1]);
        if other.0.abs() > piv.0.abs() {
            std::mem::swap(&mut piv, &mut other);
        }
        if piv.0.abs() < tiny {
            piv.0 = tiny;
        }
        let m = other.0 / piv.0;
        u0[i] = piv.0;
        u1[i] = piv.1;
        u2[i] = piv.2;
        rhs[i] = piv.3;
        piv = (other.1 - m * piv.1, other.2 - m * piv.2, T::zero(), other.3 - m * piv.3);
    }
    rhs[n - 1] = piv.3;
    let a0 = piv.0;
    u0[n - 1] = if a0.abs() < tiny { tiny } else { a0 };
    let mut y = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= u1[i] * y[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * y[i + 2];
        }
        y[i] = s / u0[i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tri(d: Vec<f64>, e: Vec<f64>) -> ChainHamiltonian<f64> {
        ChainHamiltonian::from_parts(d, e).unwrap()
    }

    /// det(H - x) through the three-term recurrence.
    fn char_poly(d: &[f64], e: &[f64], x: f64) -> f64 {
        let mut p0 = 1.0;
        let mut p1 = d[0] - x;
        for i in 1..d.len() {
            let p2 = (d[i] - x) * p1 - e[i - 1] * e[i - 1] * p0;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64)
    }

    #[test]
    fn small_examples() {
        let v = eigenvalues_symmetric_tridiagonal(&tri(vec![0.0, 0.0], vec![1.0])).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        let v = eigenvalues_symmetric_tridiagonal(&tri(vec![3.0, -1.0, 2.0, 0.5], vec![0.0; 3])).unwrap();
        for (a, b) in v.iter().zip([-1.0, 0.5, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn random_matrix_matches_characteristic_polynomial_roots() {
        let mut seed = 7u64;
        for _ in 0..5 {
            let d: Vec<f64> = (0..8).map(|_| 4.0 * lcg(&mut seed) - 2.0).collect();
            let e: Vec<f64> = (0..7).map(|_| 2.0 * lcg(&mut seed) - 1.0).collect();
            let values = eigenvalues_symmetric_tridiagonal(&tri(d.clone(), e.clone())).unwrap();
            // oracle: sign changes of the polynomial on a fine grid, refined by bisection on p itself
            let mut roots = Vec::new();
            let n = 200_000;
            let (a, b) = (-6.0, 6.0);
            let mut x0 = a;
            let mut p0 = char_poly(&d, &e, x0);
            for i in 1..=n {
                let x1 = a + (b - a) * i as f64 / n as f64;
                let p1 = char_poly(&d, &e, x1);
                if p0 == 0.0 || p0.signum() != p1.signum() {
                    let (mut lo, mut hi, plo) = (x0, x1, p0);
                    for _ in 0..100 {
                        let m = 0.5 * (lo + hi);
                        if char_poly(&d, &e, m).signum() == plo.signum() {
                            lo = m;
                        } else {
                            hi = m;
                        }
                    }
                    roots.push(0.5 * (lo + hi));
                }
                x0 = x1;
                p0 = p1;
            }
            assert_eq!(roots.len(), 8);
            for (r, v) in roots.iter().zip(&values) {
                assert!((r - v).abs() < 1e-10, "{r} vs {v}");
            }
        }
    }

    #[test]
    fn uniform_chain_matches_open_chain_cosines() {
        let j = 0.76;
        let n = 64;
        let h = crate::model::Lattice::new(j, j, 0.0, 0.0).unwrap().build_chain(n).unwrap();
        let v = eigenvalues_symmetric_tridiagonal(&h).unwrap();
        let mut want: Vec<f64> = (1..=n)
            .map(|m| 2.0 * j * (m as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in v.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn window_and_inverse_iteration() {
        let h = crate::model::Lattice::new(1.0, 0.6, 0.1, 0.2).unwrap().build_chain(200).unwrap();
        let all = eigenvalues_symmetric_tridiagonal(&h).unwrap();
        let inside = eigenvalues_in_window(&h, -1.0, 1.0).unwrap();
        let expect: Vec<f64> = all.iter().copied().filter(|&x| (-1.0..1.0).contains(&x)).collect();
        assert_eq!(inside.len(), expect.len());
        for (a, b) in inside.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-13);
        }
        for &lam in inside.iter().take(4) {
            let v = eigenvector_inverse_iteration(&h, lam).unwrap();
            let n = h.size();
            let mut res: f64 = 0.0;
            for i in 0..n {
                let mut hv = h.diagonal[i] * v[i];
                if i > 0 {
                    hv += h.off_diagonal[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    hv += h.off_diagonal[i] * v[i + 1];
                }
                res = res.max((hv - lam * v[i]).abs());
            }
            assert!(res < 1e-10, "residual {res}");
        }
    }

    proptest! {
        #[test]
        fn trace_is_preserved(d in proptest::collection::vec(-3.0..3.0f64, 1..12), seed in 0u64..1000) {
            let mut s = seed;
            let e: Vec<f64> = (1..d.len()).map(|_| 2.0 * lcg(&mut s) - 1.0).collect();
            let h = tri(d.clone(), e);
            let v = eigenvalues_symmetric_tridiagonal(&h).unwrap();
            prop_assert_eq!(v.len(), d.len());
            prop_assert!((v.iter().sum::<f64>() - d.iter().sum::<f64>()).abs() < 1e-11);
            prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
