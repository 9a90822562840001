//! Unitary propagation of chain states under a static or ramped field.
//!
//! Each exponential `exp(-i H tau)` of the real tridiagonal Hamiltonian is
//! applied through a Chebyshev expansion whose coefficients are Bessel
//! functions `J_k(b tau)`; time-dependent fields use the fourth-order
//! commutator-free Magnus scheme, which needs two such exponentials per step.

use num_complex::Complex64;

use crate::{Error, LatticeParams, Result};

/// Complex amplitudes on the chain sites at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl ChainState {
    pub fn new(amplitudes: Vec<Complex64>, time: f64) -> Self {
        Self { amplitudes, time }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Field schedule `F(t)`; after `duration` the field stays at its end value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RampProtocol {
    Constant(f64),
    /// `F` linear in time.
    LinearField { start: f64, end: f64, duration: f64 },
    /// `1/F` linear in time; `start` and `end` are values of `1/F`.
    LinearInverseField { start: f64, end: f64, duration: f64 },
}

impl RampProtocol {
    pub fn field(&self, t: f64) -> f64 {
        match *self {
            RampProtocol::Constant(f) => f,
            RampProtocol::LinearField { start, end, duration } => {
                let s = (t / duration).clamp(0.0, 1.0);
                start + (end - start) * s
            }
            RampProtocol::LinearInverseField { start, end, duration } => {
                let s = (t / duration).clamp(0.0, 1.0);
                1.0 / (start + (end - start) * s)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, RampProtocol::Constant(_))
    }

    /// Largest field reached by the schedule.
    pub fn max_field(&self) -> f64 {
        match *self {
            RampProtocol::Constant(f) => f,
            RampProtocol::LinearField { start, end, .. } => start.max(end),
            RampProtocol::LinearInverseField { start, end, .. } => 1.0 / start.min(end),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RampProtocol::Constant(f) => f > 0.0 && f.is_finite(),
            RampProtocol::LinearField { start, end, duration } | RampProtocol::LinearInverseField { start, end, duration } => {
                start > 0.0 && end > 0.0 && start.is_finite() && end.is_finite() && duration > 0.0 && duration.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("field schedule must stay positive and finite: {self:?}")))
        }
    }
}

/// Tilted chain split as `H(F) = H0 + F X`.
#[derive(Debug, Clone)]
pub struct TiltedChain {
    /// On-site staggering `-+delta`.
    pub stagger: Vec<f64>,
    /// Site positions.
    pub x: Vec<f64>,
    pub hopping: Vec<f64>,
}

impl TiltedChain {
    pub fn new(p: &LatticeParams, n_sites: usize) -> Result<Self> {
        let flat = p.with_field(0.0)?.build_chain(n_sites)?;
        let x = (0..n_sites).map(|i| flat.position(i)).collect();
        Ok(Self { stagger: flat.diagonal, x, hopping: flat.off_diagonal })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn diag(&self, f: f64, i: usize) -> f64 {
        self.stagger[i] + f * self.x[i]
    }

    /// `out = (H(F) - shift) v * scale`.
    fn apply_shifted(&self, f: f64, shift: f64, scale: f64, v: &[Complex64], out: &mut [Complex64]) {
        let n = v.len();
        for i in 0..n {
            let mut s = v[i] * (self.diag(f, i) - shift);
            if i > 0 {
                s += v[i - 1] * self.hopping[i - 1];
            }
            if i + 1 < n {
                s += v[i + 1] * self.hopping[i];
            }
            out[i] = s * scale;
        }
    }

    /// `<psi| H(F) |psi>`.
    pub fn energy(&self, f: f64, psi: &[Complex64]) -> f64 {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_shifted(f, 0.0, 1.0, psi, &mut out);
        psi.iter().zip(&out).map(|(a, b)| (a.conj() * b).re).sum()
    }

    fn bounds(&self, f: f64) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.hopping[i - 1].abs();
            }
            if i + 1 < n {
                r += self.hopping[i].abs();
            }
            lo = lo.min(self.diag(f, i) - r);
            hi = hi.max(self.diag(f, i) + r);
        }
        (lo, hi)
    }
}

/// `J_0(x) .. J_kmax(x)` by Miller's backward recurrence.
pub fn bessel_sequence(x: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = kmax.max(x.ceil() as usize);
    let mut start = top + 40 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        // cur = J_k, next = J_{k+1}
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if k - 1 <= kmax {
            out[k - 1] = cur;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += cur;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// Work buffers for repeated Chebyshev exponentials.
struct Expm {
    prev: Vec<Complex64>,
    cur: Vec<Complex64>,
    next: Vec<Complex64>,
    acc: Vec<Complex64>,
}

impl Expm {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self { prev: z.clone(), cur: z.clone(), next: z.clone(), acc: z }
    }

    /// `psi <- exp(-i H(F) tau) psi`.
    fn apply(&mut self, chain: &TiltedChain, f: f64, tau: f64, psi: &mut [Complex64]) {
        let (lo, hi) = chain.bounds(f);
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo) * (1.0 + 1e-12) + 1e-12;
        let x = half * tau;
        let kmax = (x + 12.0 * x.cbrt() + 30.0).ceil() as usize;
        let j = bessel_sequence(x, kmax);
        let mut terms = kmax;
        while terms > x.ceil() as usize + 1 && j[terms].abs() < 1e-18 {
            terms -= 1;
        }
        let scale = 1.0 / half;
        self.prev.copy_from_slice(psi);
        for (a, p) in self.acc.iter_mut().zip(&self.prev) {
            *a = p * j[0];
        }
        if terms >= 1 {
            chain.apply_shifted(f, center, scale, &self.prev, &mut self.cur);
            let c1 = Complex64::new(0.0, -2.0 * j[1]);
            for (a, c) in self.acc.iter_mut().zip(&self.cur) {
                *a += c * c1;
            }
        }
        // (-i)^k cycles through 1, -i, -1, i
        let phases = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        for k in 2..=terms {
            chain.apply_shifted(f, center, scale, &self.cur, &mut self.next);
            let c = phases[k % 4] * (2.0 * j[k]);
            for ((nx, pv), a) in self.next.iter_mut().zip(&self.prev).zip(self.acc.iter_mut()) {
                *nx = *nx * 2.0 - pv;
                *a += *nx * c;
            }
            std::mem::swap(&mut self.prev, &mut self.cur);
            std::mem::swap(&mut self.cur, &mut self.next);
        }
        let global = Complex64::from_polar(1.0, -center * tau);
        for (p, a) in psi.iter_mut().zip(&self.acc) {
            *p = a * global;
        }
    }
}

/// Knobs of [`propagate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    /// Largest change of the final amplitudes allowed when the step halves.
    pub tolerance: f64,
    /// Number of sites at each chain end that must stay empty.
    pub edge_sites: usize,
    pub edge_threshold: f64,
    pub max_halvings: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, edge_sites: 10, edge_threshold: 1e-10, max_halvings: 10 }
    }
}

const ALPHA1: f64 = (3.0 - 2.0 * 1.732_050_807_568_877_2) / 12.0;
const ALPHA2: f64 = (3.0 + 2.0 * 1.732_050_807_568_877_2) / 12.0;
const NODE1: f64 = 0.5 - 0.288_675_134_594_812_9;
const NODE2: f64 = 0.5 + 0.288_675_134_594_812_9;

fn check_edges(psi: &[Complex64], opts: &PropagationOptions, t: f64) -> Result<()> {
    let n = psi.len();
    let k = opts.edge_sites.min(n / 2);
    let edge: f64 = psi[..k].iter().chain(&psi[n - k..]).map(|a| a.norm_sqr()).sum();
    if edge > opts.edge_threshold {
        return Err(Error::EdgeContamination(format!(
            "density {edge:.3e} within {k} sites of the chain ends at t={t:.6}"
        )));
    }
    Ok(())
}

fn run(
    chain: &TiltedChain,
    ramp: &RampProtocol,
    start: &ChainState,
    t_grid: &[f64],
    max_step: f64,
    opts: &PropagationOptions,
) -> Result<Vec<ChainState>> {
    let mut psi = start.amplitudes.clone();
    let mut t = start.time;
    let mut expm = Expm::new(psi.len());
    let mut out = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        let span = target - t;
        let steps = if span > 0.0 { (span / max_step).ceil().max(1.0) as usize } else { 0 };
        let h = if steps > 0 { span / steps as f64 } else { 0.0 };
        for _ in 0..steps {
            if ramp.is_constant() {
                expm.apply(chain, ramp.field(t), h, &mut psi);
            } else {
                let f1 = ramp.field(t + NODE1 * h);
                let f2 = ramp.field(t + NODE2 * h);
                // the factor with weights (alpha2, alpha1) acts first
                expm.apply(chain, 2.0 * (ALPHA2 * f1 + ALPHA1 * f2), 0.5 * h, &mut psi);
                expm.apply(chain, 2.0 * (ALPHA1 * f1 + ALPHA2 * f2), 0.5 * h, &mut psi);
            }
            t += h;
            check_edges(&psi, opts, t)?;
        }
        t = target.max(t);
        out.push(ChainState { amplitudes: psi.clone(), time: t });
    }
    Ok(out)
}

/// Evolves `state` to each time of `t_grid` (ascending, not before
/// `state.time`) under the chain of `p` with field schedule `ramp`; the
/// field entry of `p` is not used.
///
/// For ramps the step is halved until the final amplitudes change by less
/// than `opts.tolerance`. A constant field needs no refinement since the
/// Chebyshev exponential is exact for any step.
pub fn propagate(
    state: &ChainState,
    p: &LatticeParams,
    ramp: &RampProtocol,
    t_grid: &[f64],
    opts: &PropagationOptions,
) -> Result<Vec<ChainState>> {
    ramp.validate()?;
    if t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid.first().is_some_and(|&t| t < state.time) {
        return Err(Error::invalid("output times must be ascending and not before the state time"));
    }
    let chain = TiltedChain::new(p, state.amplitudes.len())?;
    check_edges(&state.amplitudes, opts, state.time)?;
    let (lo, hi) = chain.bounds(ramp.max_field());
    let half = 0.5 * (hi - lo);
    let mut max_step = 40.0 / half.max(1e-12);
    if !ramp.is_constant() {
        // a Bloch period is pi / F; keep several Magnus steps in it
        max_step = max_step.min(std::f64::consts::PI / (16.0 * ramp.max_field()));
    }
    let mut best = run(&chain, ramp, state, t_grid, max_step, opts)?;
    if ramp.is_constant() || t_grid.is_empty() {
        return Ok(best);
    }
    for _ in 0..opts.max_halvings {
        max_step *= 0.5;
        let finer = run(&chain, ramp, state, t_grid, max_step, opts)?;
        let a = &best.last().expect("non-empty grid").amplitudes;
        let b = &finer.last().expect("non-empty grid").amplitudes;
        let change = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        best = finer;
        if change < opts.tolerance {
            return Ok(best);
        }
    }
    Err(Error::NonConvergence(format!(
        "propagation did not settle to {} after {} step halvings",
        opts.tolerance, opts.max_halvings
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::eigenvalues_symmetric_tridiagonal;

    fn lat(j1: f64, j2: f64, d: f64) -> LatticeParams {
        LatticeParams::new(j1, j2, d, 0.0).unwrap()
    }

    fn gaussian(n: usize, center: f64, sigma: f64, k: f64) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| {
                let d = i as f64 - center;
                Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), k * i as f64)
            })
            .collect();
        let nrm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= nrm);
        v
    }

    #[test]
    fn bessel_sequence_matches_special_function() {
        for x in [0.5, 3.2, 10.0, 40.0] {
            let j = bessel_sequence(x, 60);
            let j0 = crate::strong_field::bessel_j(0, x).unwrap();
            let j1 = crate::strong_field::bessel_j(1, x).unwrap();
            assert!((j[0] - j0).abs() < 1e-12 && (j[1] - j1).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn decoupled_sites_only_gain_phases() {
        let p = lat(0.0, 0.0, 0.3);
        let psi = gaussian(64, 32.0, 3.0, 0.2);
        let s = ChainState::new(psi.clone(), 0.0);
        let out = propagate(&s, &p, &RampProtocol::Constant(0.1), &[7.3], &PropagationOptions::default()).unwrap();
        let chain = TiltedChain::new(&p, 64).unwrap();
        for (i, (a, b)) in psi.iter().zip(&out[0].amplitudes).enumerate() {
            let want = a * Complex64::from_polar(1.0, -chain.diag(0.1, i) * 7.3);
            assert!((want - b).norm() < 1e-12);
        }
    }

    #[test]
    fn matches_spectral_reconstruction() {
        // eigen-decomposition oracle on a small chain
        let p = lat(1.0, 0.6, 0.2);
        let f = 0.3;
        let n = 40;
        let h = p.with_field(f).unwrap().build_chain(n).unwrap();
        let vals = eigenvalues_symmetric_tridiagonal(&h).unwrap();
        let psi = gaussian(n, 20.0, 2.0, 0.5);
        let t = 3.7;
        let mut want = vec![Complex64::new(0.0, 0.0); n];
        for &lam in &vals {
            let v = crate::spectra::eigenvector_inverse_iteration(&h, lam).unwrap();
            let ov: Complex64 = v.iter().zip(&psi).map(|(a, b)| b * *a).sum();
            for i in 0..n {
                want[i] += ov * v[i] * Complex64::from_polar(1.0, -lam * t);
            }
        }
        let opts = PropagationOptions { edge_threshold: 1.0, ..Default::default() };
        let got = propagate(&ChainState::new(psi, 0.0), &p, &RampProtocol::Constant(f), &[t], &opts).unwrap();
        for (a, b) in want.iter().zip(&got[0].amplitudes) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn uniform_chain_revives_after_two_bloch_periods() {
        let p = lat(0.76, 0.76, 0.0);
        let f = 0.4;
        let psi = gaussian(256, 128.0, 6.0, 0.3);
        let period = 2.0 * std::f64::consts::PI / f;
        let out = propagate(&ChainState::new(psi.clone(), 0.0), &p, &RampProtocol::Constant(f), &[period, 3.0 * period], &PropagationOptions::default()).unwrap();
        for s in &out {
            let d0: Vec<f64> = psi.iter().map(|a| a.norm_sqr()).collect();
            let d = s.density();
            let diff = d0.iter().zip(&d).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(diff < 1e-6, "t={} diff={diff}", s.time);
        }
    }

    #[test]
    fn conserves_norm_and_energy() {
        let p = lat(1.0, 0.6, 0.0);
        let f = 0.2;
        let psi = gaussian(256, 128.0, 8.0, 0.0);
        let chain = TiltedChain::new(&p, 256).unwrap();
        let e0 = chain.energy(f, &psi);
        let tb = std::f64::consts::PI / f;
        let times: Vec<f64> = (1..=20).map(|k| k as f64 * tb).collect();
        let out = propagate(&ChainState::new(psi, 0.0), &p, &RampProtocol::Constant(f), &times, &PropagationOptions::default()).unwrap();
        for s in &out {
            assert!((s.norm() - 1.0).abs() < 1e-8);
            assert!((chain.energy(f, &s.amplitudes) - e0).abs() < 1e-8);
        }
    }

    #[test]
    fn ramp_refines_and_keeps_norm() {
        let p = lat(1.0, 0.6, 0.0);
        let ramp = RampProtocol::LinearInverseField { start: 5.0, end: 4.0, duration: 60.0 };
        let psi = gaussian(256, 128.0, 8.0, 0.0);
        let out = propagate(&ChainState::new(psi, 0.0), &p, &ramp, &[30.0, 60.0], &PropagationOptions::default()).unwrap();
        assert!((out[1].norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn edge_contamination_detected() {
        let p = lat(1.0, 1.0, 0.1);
        let psi = gaussian(64, 16.0, 2.0, 0.0);
        let err = propagate(&ChainState::new(psi, 0.0), &p, &RampProtocol::Constant(0.01), &[50.0], &PropagationOptions::default());
        assert!(matches!(err, Err(Error::EdgeContamination(_))));
    }
}
