//! Tight-binding parameters of the two lowest continuum bands.

use super::bands::ContinuumBands;
use crate::{Error, Result};

/// Fitted two-band model `offset +- sqrt(delta^2 + j1^2 + j2^2 + 2 j1 j2 cos k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TightBindingFit {
    pub j1: f64,
    pub j2: f64,
    /// `|delta|`; the sign sits in `delta_sign`.
    pub delta: f64,
    /// `+1` when the lowest band lives mostly on the A half-cell.
    pub delta_sign: f64,
    pub offset: f64,
    /// Root-mean-square misfit over both bands.
    pub residual: f64,
    /// Combined width of the two bands.
    pub bandwidth: f64,
    /// Set when the misfit exceeds 10% of the bandwidth.
    pub warning: Option<String>,
}

impl TightBindingFit {
    pub fn relative_residual(&self) -> f64 {
        self.residual / self.bandwidth
    }

    pub fn bands(&self, k: f64) -> (f64, f64) {
        let s = self.half_splitting(k);
        (self.offset - s, self.offset + s)
    }

    fn half_splitting(&self, k: f64) -> f64 {
        (self.delta * self.delta + self.j1 * self.j1 + self.j2 * self.j2 + 2.0 * self.j1 * self.j2 * k.cos())
            .max(0.0)
            .sqrt()
    }
}

/// Fits the two-band model to the two lowest bands with uniform weights.
///
/// Band energies fix the offset, `j1 j2` and `delta^2 + j1^2 + j2^2`. The
/// lowest band's site polarization separates `delta` from the hoppings,
/// and its Wannier centre tells which bond is intracell: a centre on the
/// origin bond means `j1 >= j2`.
pub fn fit_tight_binding(bands: &ContinuumBands) -> Result<TightBindingFit> {
    let n = bands.k.len();
    if n < 4 || bands.n_bands() < 2 || bands.lower_polarization.len() != n {
        return Err(Error::invalid("need two bands and polarizations on at least four k points"));
    }
    let lo: Vec<f64> = bands.energies.iter().map(|e| e[0]).collect();
    let hi: Vec<f64> = bands.energies.iter().map(|e| e[1]).collect();
    if lo.iter().zip(&hi).any(|(a, b)| b <= a) {
        return Err(Error::Degenerate("the two lowest bands touch".into()));
    }
    let offset = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).sum::<f64>() / n as f64;
    let half: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).collect();
    // least squares for s^2 = A + B cos k
    let (mut sc, mut scc, mut sy, mut syc) = (0.0, 0.0, 0.0, 0.0);
    for (&k, &s) in bands.k.iter().zip(&half) {
        let c = k.cos();
        sc += c;
        scc += c * c;
        sy += s * s;
        syc += s * s * c;
    }
    let nf = n as f64;
    let det = nf * scc - sc * sc;
    if det.abs() < 1e-300 {
        return Err(Error::Degenerate("k grid does not separate the cosine term".into()));
    }
    let a = (scc * sy - sc * syc) / det;
    let b = (nf * syc - sc * sy) / det;
    // polarization of the lower band is delta / s(k)
    let (num, den) = bands
        .lower_polarization
        .iter()
        .zip(&half)
        .fold((0.0, 0.0), |(nu, de), (&p, &s)| (nu + p / s, de + 1.0 / (s * s)));
    let delta_signed = num / den;
    let d2 = delta_signed * delta_signed;
    let p = (a - d2).max(0.0);
    let b = b.abs();
    // refine on the splitting itself: s^2 = delta^2 + u^2 cos^2(k/2) + v^2 sin^2(k/2)
    let (u, v) = refine_sum_difference(&bands.k, &half, d2, (p + b).max(0.0).sqrt(), (p - b).max(0.0).sqrt());
    let (strong, weak) = (0.5 * (u + v), 0.5 * (u - v));
    let (j1, j2) = if bands.lower_wannier_center.abs() < 0.25 { (strong, weak) } else { (weak, strong) };
    let mut fit = TightBindingFit {
        j1,
        j2,
        delta: delta_signed.abs(),
        delta_sign: if delta_signed < 0.0 { -1.0 } else { 1.0 },
        offset,
        residual: 0.0,
        bandwidth: hi.iter().copied().fold(f64::MIN, f64::max) - lo.iter().copied().fold(f64::MAX, f64::min),
        warning: None,
    };
    let sq: f64 = bands
        .k
        .iter()
        .zip(lo.iter().zip(&hi))
        .map(|(&k, (&l, &h))| {
            let (ml, mh) = fit.bands(k);
            (ml - l).powi(2) + (mh - h).powi(2)
        })
        .sum();
    fit.residual = (sq / (2.0 * nf)).sqrt();
    if fit.relative_residual() > 0.1 {
        fit.warning = Some(format!(
            "tight-binding fit residual is {:.1}% of the bandwidth; the bands are far from the tight-binding regime",
            100.0 * fit.relative_residual()
        ));
    }
    Ok(fit)
}

/// Gauss-Newton with step damping on `(u, v) = (j1 + j2, |j1 - j2|)`.
fn refine_sum_difference(k: &[f64], half: &[f64], d2: f64, u0: f64, v0: f64) -> (f64, f64) {
    let model = |u: f64, v: f64, k: f64| {
        let (c2, s2) = ((0.5 * k).cos().powi(2), (0.5 * k).sin().powi(2));
        let s = (d2 + u * u * c2 + v * v * s2).max(1e-300).sqrt();
        (s, [u * c2 / s, v * s2 / s])
    };
    let cost = |u: f64, v: f64| k.iter().zip(half).map(|(&k, &h)| (model(u, v, k).0 - h).powi(2)).sum::<f64>();
    let (mut u, mut v) = (u0.max(1e-8), v0.max(1e-8));
    let mut c = cost(u, v);
    for _ in 0..200 {
        let (mut a, mut g) = ([[0.0; 2]; 2], [0.0; 2]);
        for (&kk, &h) in k.iter().zip(half) {
            let (s, d) = model(u, v, kk);
            for i in 0..2 {
                g[i] += d[i] * (h - s);
                for j in 0..2 {
                    a[i][j] += d[i] * d[j];
                }
            }
        }
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let du = (a[1][1] * g[0] - a[0][1] * g[1]) / det;
        let dv = (a[0][0] * g[1] - a[1][0] * g[0]) / det;
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-6 {
            let (nu, nv) = ((u + t * du).abs(), (v + t * dv).abs());
            let nc = cost(nu, nv);
            if nc <= c {
                moved = (nu - u).abs() + (nv - v).abs() > 1e-15 * (u + v);
                u = nu;
                v = nv;
                c = nc;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (u, v.min(u))
}
