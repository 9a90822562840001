//! One-dimensional quadrature: adaptive Gauss-Kronrod, Gauss-Legendre rules
//! and tabulated primitives for nested integrals.

use crate::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub value: T,
    /// Sum of the local Kronrod-minus-Gauss error estimates.
    pub error: T,
    pub intervals: usize,
    /// `false` when the interval budget ran out before the tolerance was met.
    pub converged: bool,
}

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let center = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let s = f(center - dx) + f(center + dx);
        kronrod += s * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss += s * T::lit(WG[j / 2]);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive 7/15-point Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
) -> Quadrature<T> {
    const MAX_INTERVALS: usize = 4000;
    if a == b {
        return Quadrature { value: T::zero(), error: T::zero(), intervals: 0, converged: true };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut value = v;
    let mut error = e;
    loop {
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            break;
        }
        if parts.len() >= MAX_INTERVALS {
            return Quadrature { value, error, intervals: parts.len(), converged: false };
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, pv, pe) = parts.swap_remove(idx);
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine resolution
            parts.push((lo, hi, pv, T::zero()));
            error -= pe;
            continue;
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        value = value - pv + v1 + v2;
        error = error - pe + e1 + e2;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
        if error < T::zero() {
            error = parts.iter().fold(T::zero(), |s, p| s + p.3);
        }
    }
    Quadrature { value, error, intervals: parts.len(), converged: true }
}

/// Convenience wrapper returning only the value at absolute tolerance `tol`.
pub fn integrate_abs<T: Real, F: FnMut(T) -> T>(f: F, a: T, b: T, tol: T) -> T {
    integrate(f, a, b, tol, T::zero()).value
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_usize_lossy(n);
    let eps = T::epsilon() * T::lit(4.0);
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess, refined by Newton on P_n
        let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= eps {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_lossy(n);
    (p1, nf * (x * p1 - p0) / (x * x - T::one()))
}

/// Fixed Gauss-Legendre rule mapped onto arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> T {
        let c = (a + b) * T::lit(0.5);
        let h = (b - a) * T::lit(0.5);
        let mut s = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += *w * f(c + h * *x);
        }
        s * h
    }
}

/// Tabulated primitive `P(x) = ∫_a^x f` of a smooth integrand.
///
/// The range is cut into equal panels; panel sums are accumulated once and a
/// partial panel is integrated on demand with the same Gauss rule, so each
/// evaluation costs one rule application.
pub struct Primitive<T, F> {
    f: F,
    a: T,
    h: T,
    cumulative: Vec<T>,
    rule: GaussRule<T>,
}

impl<T: Real, F: Fn(T) -> T> Primitive<T, F> {
    pub fn new(f: F, a: T, b: T, panels: usize) -> Self {
        let panels = panels.max(1);
        let rule = GaussRule::new(20);
        let h = (b - a) / T::from_usize_lossy(panels);
        let mut cumulative = Vec::with_capacity(panels + 1);
        let mut acc = T::zero();
        cumulative.push(acc);
        for k in 0..panels {
            let lo = a + h * T::from_usize_lossy(k);
            acc += rule.integrate(&f, lo, lo + h);
            cumulative.push(acc);
        }
        Self { f, a, h, cumulative, rule }
    }

    pub fn eval(&self, x: T) -> T {
        let last = self.cumulative.len() - 1;
        let pos = ((x - self.a) / self.h).floor();
        let k = if pos <= T::zero() {
            0
        } else {
            pos.to_usize().unwrap_or(last).min(last)
        };
        let lo = self.a + self.h * T::from_usize_lossy(k);
        if x == lo {
            return self.cumulative[k];
        }
        self.cumulative[k] + self.rule.integrate(&self.f, lo, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x: f64| 3.0 * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-14, 0.0);
        assert!((q.value - (8.0 + 1.0 - 4.0 + 1.0 + 3.0)).abs() < 1e-13, "{}", q.value);
        assert!(q.converged);
    }

    #[test]
    fn handles_kink_and_sqrt_endpoint() {
        let q = integrate(|x: f64| x.cos().abs(), 0.0, 3.0, 1e-13, 0.0);
        let exact = 1.0 + (1.0 - 3.0f64.sin());
        assert!((q.value - exact).abs() < 1e-12);
        let q = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-13, 0.0);
        assert!((q.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two_and_integrate_degree_2n_minus_1() {
        for n in [1usize, 2, 5, 16, 20] {
            let (x, w) = gauss_legendre::<f64>(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13);
            let deg = 2 * n - 2;
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((m - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn primitive_matches_closed_form() {
        let p = Primitive::new(|x: f64| x.cos(), 0.0, 3.0, 12);
        for &x in &[0.0, 0.1, 1.0, 1.2345, 2.999, 3.0] {
            assert!((p.eval(x) - x.sin()).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn works_in_single_precision() {
        let q = integrate(|x: f32| x.exp(), 0.0, 1.0, 1e-6, 0.0);
        assert!((q.value - (1.0f32.exp() - 1.0)).abs() < 1e-5);
    }
}
