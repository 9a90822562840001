//! Cyclic Jacobi diagonalization of small complex Hermitian matrices.

use num_complex::Complex64;

use crate::{Error, Result};

/// Eigenpairs in ascending order; `vectors[j]` belongs to `values[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl HermitianEigen {
    /// `max_j |A v_j - lambda_j v_j|`.
    pub fn max_residual(&self, a: &[Vec<Complex64>]) -> f64 {
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(&l, v)| {
                a.iter()
                    .zip(v)
                    .map(|(row, &vi)| (row.iter().zip(v).map(|(x, y)| x * y).sum::<Complex64>() - vi * l).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

fn check_hermitian(a: &[Vec<Complex64>]) -> Result<usize> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("matrix must be square"));
    }
    let scale = a.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..n {
        for j in i..n {
            if (a[i][j] - a[j][i].conj()).norm() > 1e-12 * scale {
                return Err(Error::invalid(format!("matrix is not Hermitian at ({i}, {j})")));
            }
        }
    }
    Ok(n)
}

/// All eigenpairs of a Hermitian matrix by cyclic Jacobi sweeps.
pub fn hermitian_eigen(matrix: &[Vec<Complex64>]) -> Result<HermitianEigen> {
    let n = check_hermitian(matrix)?;
    let mut a: Vec<Vec<Complex64>> = matrix.to_vec();
    // symmetrize exactly so rotations see a Hermitian matrix
    for i in 0..n {
        a[i][i] = Complex64::new(a[i][i].re, 0.0);
        for j in i + 1..n {
            let m = 0.5 * (a[i][j] + a[j][i].conj());
            a[i][j] = m;
            a[j][i] = m.conj();
        }
    }
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let frob: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut converged = n < 2;
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let r = a[p][q].norm();
                if r == 0.0 {
                    continue;
                }
                let phase = a[p][q] / r;
                let tau = (a[q][q].re - a[p][p].re) / (2.0 * r);
                let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = -sign / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // columns p, q of G: (c, s e^{-i a}) and (-s, c e^{-i a})
                let e = phase.conj();
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = x * c + y * e * s;
                    row[q] = -x * s + y * e * c;
                }
                for k in 0..n {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = x * c + y * phase * s;
                    a[q][k] = -x * s + y * phase * c;
                }
                a[p][q] = Complex64::new(0.0, 0.0);
                a[q][p] = Complex64::new(0.0, 0.0);
                for row in v.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = x * c + y * e * s;
                    row[q] = -x * s + y * e * c;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence("Jacobi sweeps did not converge".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].re.total_cmp(&a[j][j].re));
    let values = order.iter().map(|&i| a[i][i].re).collect();
    let vectors = order.iter().map(|&j| (0..n).map(|i| v[i][j]).collect()).collect();
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigen_small(matrix: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    hermitian_eigen(matrix).map(|e| e.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_pauli_y() {
        let id: Vec<Vec<Complex64>> = (0..4).map(|i| (0..4).map(|j| c((i == j) as u8 as f64, 0.0)).collect()).collect();
        assert_eq!(hermitian_eigen_small(&id).unwrap(), vec![1.0; 4]);
        let y = vec![vec![c(0.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(0.0, 0.0)]];
        let e = hermitian_eigen_small(&y).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(2.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(hermitian_eigen_small(&m), Err(Error::InvalidParameter(_))));
    }

    /// Determinant by partial-pivot LU.
    fn lu_det(mut a: Vec<Vec<Complex64>>) -> Complex64 {
        let n = a.len();
        let mut det = c(1.0, 0.0);
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k];
            for i in k + 1..n {
                let m = a[i][k] / a[k][k];
                for j in k..n {
                    let t = a[k][j];
                    a[i][j] -= m * t;
                }
            }
        }
        det
    }

    fn hermitian_from(seed: &[f64], n: usize) -> Vec<Vec<Complex64>> {
        let mut a = vec![vec![c(0.0, 0.0); n]; n];
        let mut it = seed.iter().cycle();
        for i in 0..n {
            a[i][i] = c(*it.next().unwrap(), 0.0);
            for j in i + 1..n {
                let z = c(*it.next().unwrap(), *it.next().unwrap());
                a[i][j] = z;
                a[j][i] = z.conj();
            }
        }
        a
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn trace_determinant_and_residual(seed in proptest::collection::vec(-1.0f64..1.0, 64)) {
            let n = 21;
            let a = hermitian_from(&seed, n);
            let e = hermitian_eigen(&a).unwrap();
            let tr: f64 = (0..n).map(|i| a[i][i].re).sum();
            prop_assert!((e.values.iter().sum::<f64>() - tr).abs() < 1e-11);
            let det = lu_det(a.clone());
            let prod: f64 = e.values.iter().product();
            prop_assert!((det.re - prod).abs() < 1e-9 * prod.abs().max(1.0), "{} vs {}", det, prod);
            prop_assert!(det.im.abs() < 1e-9 * prod.abs().max(1.0));
            prop_assert!(e.max_residual(&a) < 1e-10);
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
