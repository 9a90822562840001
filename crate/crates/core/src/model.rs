//! Lattice parameters, Bloch bands and the truncated tilted chain.
//!
//! Sites alternate A, B. Cell `l` holds `A_l` at `x = 2l - 1/2` and `B_l` at
//! `x = 2l + 1/2`; `j1` couples the two sites of a cell and `j2` couples
//! neighbouring cells. With this labelling `j1 > j2, delta = 0` is the
//! dimerization whose Bloch bands have zero Zak phase.

use crate::quad;
use crate::{Error, Real, Result};

/// Tight-binding parameters plus the Stark field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice<T> {
    pub j1: T,
    pub j2: T,
    pub delta: T,
    pub f: T,
}

impl<T: Real> Lattice<T> {
    /// Validated constructor. Hoppings must be non-negative and `f >= 0`.
    pub fn new(j1: T, j2: T, delta: T, f: T) -> Result<Self> {
        let all_finite = [j1, j2, delta, f].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::invalid("lattice parameters must be finite"));
        }
        if j1 < T::zero() || j2 < T::zero() {
            return Err(Error::invalid(format!("hoppings must be non-negative, got j1={j1}, j2={j2}")));
        }
        if f < T::zero() {
            return Err(Error::invalid(format!("field must be non-negative, got f={f}")));
        }
        Ok(Self { j1, j2, delta, f })
    }

    /// Same lattice at another field strength.
    pub fn with_field(&self, f: T) -> Result<Self> {
        Self::new(self.j1, self.j2, self.delta, f)
    }

    /// Same lattice at another on-site offset.
    pub fn with_delta(&self, delta: T) -> Result<Self> {
        Self::new(self.j1, self.j2, delta, self.f)
    }

    /// Errors unless the field is strictly positive.
    pub fn require_field(&self) -> Result<()> {
        if self.f > T::zero() {
            Ok(())
        } else {
            Err(Error::invalid(format!("operation needs f > 0, got f={}", self.f)))
        }
    }

    /// Dimerization parameter `(j2 - j1)/f`.
    pub fn epsilon1(&self) -> T {
        (self.j2 - self.j1) / self.f
    }

    /// Staggering parameter `delta/f`.
    pub fn epsilon2(&self) -> T {
        self.delta / self.f
    }

    /// Drive amplitude `(j1 + j2)/f`, which is `2J/f` for equal hoppings.
    pub fn omega(&self) -> T {
        (self.j1 + self.j2) / self.f
    }

    pub fn has_equal_hoppings(&self) -> bool {
        self.j1 == self.j2
    }

    /// Lower and upper Bloch band energies at quasimomentum `kappa`.
    ///
    /// `kappa` is folded into the reduced zone `[-pi/2, pi/2)` first.
    pub fn bloch_dispersion(&self, kappa: T) -> (T, T) {
        let k = kappa.wrap_centered(T::PI());
        let two = T::lit(2.0);
        let e2 = self.delta * self.delta
            + self.j1 * self.j1
            + self.j2 * self.j2
            + two * self.j1 * self.j2 * (two * k).cos();
        let e = e2.max(T::zero()).sqrt();
        (-e, e)
    }

    pub fn band_sample(&self, kappa: T) -> BlochBandSample<T> {
        let kappa = kappa.wrap_centered(T::PI());
        let (e_minus, e_plus) = self.bloch_dispersion(kappa);
        BlochBandSample { kappa, e_minus, e_plus }
    }

    /// Mean energy `C` of the upper band, `(1/pi) * integral of E_+` over the
    /// reduced zone. The lower band has mean `-C`.
    pub fn band_mean_energy(&self) -> T {
        // E_+ is even in kappa; the only kink sits at the zone edge.
        let q = quad::integrate(
            |k| self.bloch_dispersion(k).1,
            T::zero(),
            T::FRAC_PI_2(),
            T::lit(1e-13).max(T::epsilon() * T::lit(8.0)),
            T::epsilon() * T::lit(16.0),
        );
        q.value * T::lit(2.0) / T::PI()
    }

    /// Tilted chain of `n_sites` sites with cells centred on `l = 0`.
    pub fn build_chain(&self, n_sites: usize) -> Result<ChainHamiltonian<T>> {
        if n_sites < 2 || n_sites % 2 != 0 {
            return Err(Error::invalid(format!("n_sites must be even and >= 2, got {n_sites}")));
        }
        let cells = n_sites / 2;
        let first_cell = -((cells / 2) as i64);
        let mut diagonal = Vec::with_capacity(n_sites);
        for c in 0..cells {
            let l = T::from_i64_lossy(first_cell + c as i64);
            let x = T::lit(2.0) * l;
            diagonal.push(self.f * (x - T::lit(0.5)) - self.delta);
            diagonal.push(self.f * (x + T::lit(0.5)) + self.delta);
        }
        let off_diagonal = (0..n_sites - 1)
            .map(|i| if i % 2 == 0 { self.j1 } else { self.j2 })
            .collect();
        Ok(ChainHamiltonian { diagonal, off_diagonal, first_cell })
    }
}

/// One point of the two Bloch bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochBandSample<T> {
    pub kappa: T,
    pub e_minus: T,
    pub e_plus: T,
}

/// Real symmetric tridiagonal Hamiltonian of the truncated tilted chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainHamiltonian<T> {
    pub diagonal: Vec<T>,
    pub off_diagonal: Vec<T>,
    /// Index `l` of the leftmost cell.
    pub first_cell: i64,
}

impl<T: Real> ChainHamiltonian<T> {
    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    pub fn trace(&self) -> T {
        self.diagonal.iter().fold(T::zero(), |s, &d| s + d)
    }

    /// Position of site `i` in units of the nearest-site spacing.
    pub fn position(&self, i: usize) -> T {
        let l = T::from_i64_lossy(self.first_cell + (i / 2) as i64);
        let half = T::lit(0.5);
        if i % 2 == 0 {
            T::lit(2.0) * l - half
        } else {
            T::lit(2.0) * l + half
        }
    }

    /// Chain from raw diagonals, for callers that build their own matrices.
    pub fn from_parts(diagonal: Vec<T>, off_diagonal: Vec<T>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::invalid("tridiagonal needs n diagonal and n-1 off-diagonal entries"));
        }
        Ok(Self { diagonal, off_diagonal, first_cell: 0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn lat(j1: f64, j2: f64, d: f64, f: f64) -> Lattice<f64> {
        Lattice::new(j1, j2, d, f).unwrap()
    }

    /// floor(sqrt(n)) for big integers by Newton iteration.
    fn isqrt(n: &BigUint) -> BigUint {
        let mut x = n.clone();
        let mut y = (&x + 1u32) >> 1;
        while y < x {
            x = y;
            y = (&x + n / &x) >> 1;
        }
        x
    }

    #[test]
    fn dispersion_examples() {
        let (m, p) = lat(0.8, 0.8, 0.3, 0.0).bloch_dispersion(std::f64::consts::FRAC_PI_2);
        assert!((p - 0.3).abs() < 1e-15 && (m + 0.3).abs() < 1e-15);
        let (m, p) = lat(1.0, 0.6, 0.0, 0.0).bloch_dispersion(0.0);
        assert!((p - 1.6).abs() < 1e-15 && (m + 1.6).abs() < 1e-15);
    }

    #[test]
    fn dispersion_matches_big_integer_sqrt() {
        // 0.16 + 4 * 0.76^2 = 2.4704, scaled by 10^40 so the integer sqrt carries 20 digits
        let (_, p) = lat(0.76, 0.76, 0.4, 0.0).bloch_dispersion(0.0);
        let scaled = BigUint::from(24704u32) * BigUint::from(10u32).pow(36);
        let root = isqrt(&scaled);
        let digits = root.to_string();
        let oracle: f64 = format!("{}.{}", &digits[..1], &digits[1..]).parse().unwrap();
        assert!((p - oracle).abs() < 1e-15, "{p} vs {oracle}");
    }

    #[test]
    fn band_mean_examples() {
        for j in [0.1, 0.76, 1.0] {
            let c = lat(j, j, 0.0, 0.0).band_mean_energy();
            assert!((c - 4.0 * j / std::f64::consts::PI).abs() < 1e-10, "j={j}");
        }
        assert!((lat(0.0, 0.0, 0.35, 0.0).band_mean_energy() - 0.35).abs() < 1e-14);
    }

    #[test]
    fn band_mean_matches_riemann_sum() {
        let l = lat(1.0, 0.6, 0.0, 0.0);
        let n = 1_000_000;
        let h = std::f64::consts::PI / n as f64;
        let s: f64 = (0..n)
            .map(|i| l.bloch_dispersion(-std::f64::consts::FRAC_PI_2 + (i as f64 + 0.5) * h).1)
            .sum();
        let riemann = s * h / std::f64::consts::PI;
        assert!((l.band_mean_energy() - riemann).abs() < 1e-10);
    }

    #[test]
    fn single_cell_chain() {
        let c = lat(1.0, 0.6, 0.2, 0.1).build_chain(2).unwrap();
        assert_eq!(c.diagonal, vec![-0.05 - 0.2, 0.05 + 0.2]);
        assert_eq!(c.off_diagonal, vec![1.0]);
    }

    #[test]
    fn chain_layout() {
        let c = lat(0.5, 0.5, 0.0, 0.0).build_chain(6).unwrap();
        assert!(c.diagonal.iter().all(|&d| d == 0.0));
        assert!(c.off_diagonal.iter().all(|&o| o == 0.5));

        let c = lat(1.0, 0.6, 0.2, 0.1).build_chain(8).unwrap();
        let gaps: Vec<f64> = c.diagonal.windows(2).map(|w| w[1] - w[0]).collect();
        for (i, g) in gaps.iter().enumerate() {
            let want = if i % 2 == 0 { 0.1 + 0.4 } else { 0.1 - 0.4 };
            assert!((g - want).abs() < 1e-14, "gap {i}: {g}");
        }
        assert_eq!(c.off_diagonal, vec![1.0, 0.6, 1.0, 0.6, 1.0, 0.6, 1.0]);
        assert_eq!(c.first_cell, -2);
        assert!((c.trace() - c.diagonal.iter().sum::<f64>()).abs() == 0.0);
        assert!(lat(1.0, 1.0, 0.0, 0.1).build_chain(7).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Lattice::new(-1.0, 0.5, 0.0, 0.1).is_err());
        assert!(Lattice::new(1.0, 0.5, 0.0, -0.1).is_err());
        assert!(Lattice::new(1.0, f64::NAN, 0.0, 0.1).is_err());
        assert!(lat(1.0, 0.5, 0.0, 0.0).require_field().is_err());
    }

    #[test]
    fn single_precision_dispersion() {
        let l = Lattice::<f32>::new(1.0, 0.6, 0.0, 0.0).unwrap();
        assert!((l.bloch_dispersion(0.0).1 - 1.6).abs() < 1e-6);
        assert!((l.band_mean_energy() - lat(1.0, 0.6, 0.0, 0.0).band_mean_energy() as f32).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn dispersion_symmetries(j1 in 0.0..2.0f64, j2 in 0.0..2.0f64, d in -1.0..1.0f64, k in -3.0..3.0f64) {
            let a = lat(j1, j2, d, 0.0);
            let b = lat(j2, j1, d, 0.0);
            let e = a.bloch_dispersion(k).1;
            prop_assert!((e - a.bloch_dispersion(-k).1).abs() < 1e-12);
            prop_assert!((e - a.bloch_dispersion(k + std::f64::consts::PI).1).abs() < 1e-12);
            prop_assert!((e - b.bloch_dispersion(k).1).abs() < 1e-12);
            prop_assert!(e + 1e-12 >= (d * d + (j1 - j2) * (j1 - j2)).sqrt());
            let s = a.band_sample(k);
            prop_assert!(s.kappa >= -std::f64::consts::FRAC_PI_2 && s.kappa < std::f64::consts::FRAC_PI_2);
            prop_assert_eq!(s.e_plus, -s.e_minus);
        }
    }
}
