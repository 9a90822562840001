//! Lorentzian fits of resonance peaks.

use crate::{Error, Result};

/// `height * w^2 / (w^2 + (x - center)^2)` fitted to scan data; `delta_e`
/// is the full width `2w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzFit {
    pub center: f64,
    pub delta_e: f64,
    pub height: f64,
    /// Root-mean-square misfit relative to the fitted height.
    pub residual: f64,
    pub iterations: usize,
}

impl LorentzFit {
    pub fn eval(&self, x: f64) -> f64 {
        let w = 0.5 * self.delta_e;
        let u = x - self.center;
        self.height * w * w / (w * w + u * u)
    }
}

fn model(q: &[f64; 3], x: f64) -> (f64, [f64; 3]) {
    let [a, x0, w] = *q;
    let u = x - x0;
    let d = w * w + u * u;
    let v = a * w * w / d;
    let grad = [w * w / d, 2.0 * a * w * w * u / (d * d), 2.0 * a * w * u * u / (d * d)];
    (v, grad)
}

fn cost(q: &[f64; 3], pts: &[(f64, f64)]) -> f64 {
    pts.iter().map(|&(x, y)| (model(q, x).0 - y).powi(2)).sum()
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let piv = (c..3).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..3 {
            let m = a[r][c] / a[c][c];
            for k in c..3 {
                a[r][k] -= m * a[c][k];
            }
            b[r] -= m * b[c];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Levenberg-Marquardt fit of a single Lorentzian to the `(x, y)` points
/// with `x` inside `window`. The peak must lie strictly inside the window.
pub fn lorentzian_fit(scan: &[(f64, f64)], window: (f64, f64)) -> Result<LorentzFit> {
    let pts: Vec<(f64, f64)> = scan
        .iter()
        .copied()
        .filter(|&(x, y)| x >= window.0 && x <= window.1 && x.is_finite() && y.is_finite())
        .collect();
    if pts.len() < 4 {
        return Err(Error::invalid("fewer than four scan points in the fit window"));
    }
    let (imax, &(x_peak, y_peak)) = pts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("nonempty");
    if imax == 0 || imax == pts.len() - 1 || y_peak <= 0.0 {
        return Err(Error::invalid("no interior peak in the fit window"));
    }
    // initial width from the half-maximum crossings
    let half = 0.5 * y_peak;
    let left = pts[..imax].iter().rev().find(|p| p.1 < half).map(|p| p.0).unwrap_or(pts[0].0);
    let right = pts[imax..].iter().find(|p| p.1 < half).map(|p| p.0).unwrap_or(pts[pts.len() - 1].0);
    let mut q = [y_peak, x_peak, (0.5 * (right - left)).max(1e-6 * (window.1 - window.0))];
    let mut c = cost(&q, &pts);
    let mut lambda = 1e-3;
    for it in 1..=500 {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for &(x, y) in &pts {
            let (v, g) = model(&q, x);
            let r = v - y;
            for i in 0..3 {
                jtr[i] -= g[i] * r;
                for k in 0..3 {
                    jtj[i][k] += g[i] * g[k];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj;
            for i in 0..3 {
                a[i][i] += lambda * jtj[i][i].max(1e-300);
            }
            if let Some(step) = solve3(a, jtr) {
                let trial = [q[0] + step[0], q[1] + step[1], q[2] + step[2]];
                let ct = cost(&trial, &pts);
                if ct.is_finite() && ct <= c {
                    let rel = (0..3).map(|i| step[i].abs() / (q[i].abs() + 1e-12)).fold(0.0, f64::max);
                    let dc = c - ct;
                    q = trial;
                    c = ct;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    if rel < 1e-12 || dc <= 1e-15 * c {
                        return Ok(finish(q, c, pts.len(), it));
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            // no downhill step at any damping: at a minimum to working precision
            return Ok(finish(q, c, pts.len(), it));
        }
    }
    Err(Error::NonConvergence("Lorentzian fit did not converge in 500 iterations".into()))
}

fn finish(q: [f64; 3], c: f64, n: usize, iterations: usize) -> LorentzFit {
    let rms = (c / n as f64).sqrt();
    LorentzFit {
        center: q[1],
        delta_e: 2.0 * q[2].abs(),
        height: q[0],
        residual: rms / q[0].abs(),
        iterations,
    }
}
