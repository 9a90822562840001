//! Time-averaged upper-band population of an initially full lower band.
//!
//! A lower-band Bloch state at `kappa0` stays a Bloch state under a static
//! field, with amplitudes `c(t)` obeying `i dc/dt = h(kappa0 - F t) c`. The
//! band populations of the chain follow from this two-level equation, which
//! is solved with the fourth-order Magnus scheme and closed-form 2x2
//! exponentials. Because `h(kappa - pi) = sigma_z h(kappa) sigma_z`, one
//! Bloch period `T_B = pi/F` of propagators serves every later period.

use num_complex::Complex64;
use rayon::prelude::*;

use super::bloch::{bloch_hamiltonian, bloch_vectors, check_gapped};
use crate::mat2::{self, Mat2};
use crate::{Error, LatticeParams, Result};

const ALPHA1: f64 = (3.0 - 2.0 * 1.732_050_807_568_877_2) / 12.0;
const ALPHA2: f64 = (3.0 + 2.0 * 1.732_050_807_568_877_2) / 12.0;
const NODE1: f64 = 0.5 - 0.288_675_134_594_812_9;
const NODE2: f64 = 0.5 + 0.288_675_134_594_812_9;

/// Upper-band population over time and its average.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    /// Quasimomentum-averaged upper-band population at each time.
    pub p_upper: Vec<f64>,
    /// Average of `p_upper` over all sampled times.
    pub p_upper_mean: f64,
    pub f: f64,
    pub params: LatticeParams,
}

/// `exp(-i tau H)` for Hermitian 2x2 `H`.
fn expm_hermitian(h: &Mat2<f64>, tau: f64) -> Mat2<f64> {
    let a0 = 0.5 * (h[0][0].re + h[1][1].re);
    let nz = 0.5 * (h[0][0].re - h[1][1].re);
    let nx = h[0][1].re;
    let ny = -h[0][1].im;
    let r = (nx * nx + ny * ny + nz * nz).sqrt();
    let (s, c) = (tau * r).sin_cos();
    let sinc = if r > 0.0 { s / r } else { tau };
    let i = Complex64::new(0.0, 1.0);
    let ph = Complex64::from_polar(1.0, -tau * a0);
    let m = [
        [Complex64::new(c, 0.0) - i * sinc * nz, -i * sinc * Complex64::new(nx, -ny)],
        [-i * sinc * Complex64::new(nx, ny), Complex64::new(c, 0.0) + i * sinc * nz],
    ];
    mat2::scale(&m, ph)
}

fn combine(a: &Mat2<f64>, wa: f64, b: &Mat2<f64>, wb: f64) -> Mat2<f64> {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            m[r][c] = a[r][c] * wa + b[r][c] * wb;
        }
    }
    m
}

/// Cumulative propagators `U(t_j)` at `t_j = j T_B / steps`, `j = 1..=steps`.
fn period_propagators(p: &LatticeParams, f: f64, kappa0: f64, steps: usize) -> Vec<Mat2<f64>> {
    let period = std::f64::consts::PI / f;
    let h = period / steps as f64;
    let mut u = mat2::identity::<f64>();
    let mut out = Vec::with_capacity(steps);
    for j in 0..steps {
        let t = j as f64 * h;
        let h1 = bloch_hamiltonian(p, kappa0 - f * (t + NODE1 * h));
        let h2 = bloch_hamiltonian(p, kappa0 - f * (t + NODE2 * h));
        let first = expm_hermitian(&combine(&h1, 2.0 * ALPHA2, &h2, 2.0 * ALPHA1), 0.5 * h);
        let second = expm_hermitian(&combine(&h1, 2.0 * ALPHA1, &h2, 2.0 * ALPHA2), 0.5 * h);
        u = mat2::mul(&second, &mat2::mul(&first, &u));
        out.push(u);
    }
    out
}

fn sigma_z_power(v: [Complex64; 2], p: usize) -> [Complex64; 2] {
    if p % 2 == 0 {
        v
    } else {
        [v[0], -v[1]]
    }
}

/// Steps per Bloch period such that doubling changes the one-period
/// propagator by less than `1e-10`.
fn steps_per_period(p: &LatticeParams, f: f64) -> Result<usize> {
    let period = std::f64::consts::PI / f;
    let rmax = (p.delta * p.delta + (p.j1 + p.j2) * (p.j1 + p.j2)).sqrt();
    let mut steps = 64usize;
    while (steps as f64) < 4.0 * period * rmax {
        steps *= 2;
    }
    // the hardest starting point has kappa(t) crossing the gap mid-step; test two
    let probes = [0.0, 0.3];
    let mut prev: Vec<Mat2<f64>> = probes.iter().map(|&k| *period_propagators(p, f, k, steps).last().unwrap()).collect();
    for _ in 0..12 {
        let next: Vec<Mat2<f64>> = probes.iter().map(|&k| *period_propagators(p, f, k, 2 * steps).last().unwrap()).collect();
        let change = prev.iter().zip(&next).map(|(a, b)| mat2::max_abs_diff(a, b)).fold(0.0, f64::max);
        steps *= 2;
        prev = next;
        if change < 1e-10 {
            return Ok(steps);
        }
    }
    Err(Error::NonConvergence(format!("band dynamics did not settle at f={f}")))
}

/// Upper-band population of one initial quasimomentum at `periods * steps`
/// sample times.
fn trace_for_kappa(p: &LatticeParams, f: f64, kappa0: f64, periods: usize, steps: usize) -> Vec<f64> {
    let props = period_propagators(p, f, kappa0, steps);
    let period = std::f64::consts::PI / f;
    let uppers: Vec<[Complex64; 2]> = (1..=steps)
        .map(|j| bloch_vectors(p, kappa0 - f * period * j as f64 / steps as f64).1)
        .collect();
    let full = props[steps - 1];
    let mut c = bloch_vectors(p, kappa0).0;
    let mut out = Vec::with_capacity(periods * steps);
    for per in 0..periods {
        let d = sigma_z_power(c, per);
        for j in 0..steps {
            let v = mat2::apply(&props[j], d);
            let u = uppers[j];
            out.push((u[0].conj() * v[0] + u[1].conj() * v[1]).norm_sqr());
        }
        // c at the start of the next period: sigma_z^per U(T_B) sigma_z^per c
        c = sigma_z_power(mat2::apply(&full, d), per);
    }
    out
}

/// Upper-band population averaged over `kappa_grid` initial quasimomenta
/// (uniform in the reduced zone) and over `n_bloch_periods` periods of
/// `T_B = pi/F`, with `F = p.f`.
pub fn mean_upper_population(p: &LatticeParams, n_bloch_periods: usize, kappa_grid: usize) -> Result<PopulationTrace> {
    p.require_field()?;
    check_gapped(p)?;
    if n_bloch_periods == 0 || kappa_grid == 0 {
        return Err(Error::invalid("need at least one Bloch period and one quasimomentum"));
    }
    let f = p.f;
    let steps = steps_per_period(p, f)?;
    let kappas: Vec<f64> = (0..kappa_grid)
        .map(|m| -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * m as f64 / kappa_grid as f64)
        .collect();
    let traces: Vec<Vec<f64>> = kappas
        .par_iter()
        .map(|&k| trace_for_kappa(p, f, k, n_bloch_periods, steps))
        .collect();
    let samples = n_bloch_periods * steps;
    let mut p_upper = vec![0.0; samples];
    for t in &traces {
        for (acc, v) in p_upper.iter_mut().zip(t) {
            *acc += v;
        }
    }
    p_upper.iter_mut().for_each(|v| *v /= kappa_grid as f64);
    let dt = std::f64::consts::PI / f / steps as f64;
    let times = (1..=samples).map(|j| j as f64 * dt).collect();
    let p_upper_mean = p_upper.iter().sum::<f64>() / samples as f64;
    Ok(PopulationTrace { times, p_upper, p_upper_mean, f, params: *p })
}

/// `mean_upper_population` over a list of `1/F` values, in parallel, in
/// input order.
pub fn resonance_scan(
    p: &LatticeParams,
    inv_f: &[f64],
    n_bloch_periods: usize,
    kappa_grid: usize,
) -> Result<Vec<(f64, f64)>> {
    inv_f
        .par_iter()
        .map(|&z| {
            let at = p.with_field(1.0 / z)?;
            Ok((z, mean_upper_population(&at, n_bloch_periods, kappa_grid)?.p_upper_mean))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::bloch::band_projectors;
    use crate::dynamics::chain::{propagate, ChainState, PropagationOptions, RampProtocol};

    #[test]
    fn closed_form_exponential_is_unitary_and_exact_for_diagonal() {
        let h = bloch_hamiltonian(&LatticeParams::new(0.3, 0.9, 0.2, 0.0).unwrap(), 0.4);
        let u = expm_hermitian(&h, 0.7);
        assert!(mat2::unitarity_defect(&u) < 1e-14);
        let d = [[Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(-0.2, 0.0)]];
        let e = expm_hermitian(&d, 2.0);
        assert!((e[0][0] - Complex64::from_polar(1.0, -1.0)).norm() < 1e-15);
        assert!((e[1][1] - Complex64::from_polar(1.0, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn population_stays_in_unit_interval() {
        let p = LatticeParams::new(0.76, 0.76, 0.4, 1.0 / 3.0).unwrap();
        let tr = mean_upper_population(&p, 5, 8).unwrap();
        assert!(tr.p_upper.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
        assert!((0.0..=1.0).contains(&tr.p_upper_mean));
    }

    /// Chain propagation of a broad lower-band packet at fixed kappa0.
    #[test]
    fn agrees_with_chain_propagation() {
        let p = LatticeParams::new(0.76, 0.76, 0.4, 0.5).unwrap();
        let n = 1024;
        let (lo, up) = band_projectors(&p, n).unwrap();
        let basis = lo.basis();
        // Bloch state at the grid kappa closest to 0.3 with a wide envelope
        let m = basis.kappas().iter().enumerate().min_by(|a, b| (a.1 - 0.3).abs().partial_cmp(&(b.1 - 0.3).abs()).unwrap()).unwrap().0;
        let kappa0 = basis.kappas()[m];
        let u = bloch_vectors(&p, kappa0).0;
        let chain = p.build_chain(n).unwrap();
        let mut psi: Vec<Complex64> = (0..n)
            .map(|i| {
                let x = chain.position(i);
                let env = (-(x * x) / (2.0 * 40.0f64.powi(2))).exp();
                u[i % 2] * Complex64::from_polar(env, kappa0 * x)
            })
            .collect();
        psi = lo.apply(&psi);
        let nrm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|a| *a /= nrm);
        let steps = 64;
        let period = std::f64::consts::PI / p.f;
        let times: Vec<f64> = (1..=2 * steps).map(|j| j as f64 * period / steps as f64).collect();
        let opts = PropagationOptions::default();
        let out = propagate(&ChainState::new(psi, 0.0), &p, &RampProtocol::Constant(p.f), &times, &opts).unwrap();
        let reduced = trace_for_kappa(&p, p.f, kappa0, 2, 1024);
        for (j, s) in out.iter().enumerate() {
            let chain_pop = up.population(&s.amplitudes);
            let k_pop = reduced[(j + 1) * 1024 / steps - 1];
            assert!((chain_pop - k_pop).abs() < 2e-3, "j={j}: {chain_pop} vs {k_pop}");
        }
    }
}
