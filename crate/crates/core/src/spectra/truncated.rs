//! Wannier-Stark levels from the truncated chain, with an edge-convergence
//! check against a 25% longer chain.

use super::floquet::monodromy;
use super::tridiag::eigenvalues_in_window;
use super::{fold_half_open, Branch, LadderSpectrum, Level};
use crate::model::Lattice;
use crate::{Error, Real, Result};

fn round_up_even(x: f64) -> usize {
    let n = x.ceil().max(2.0) as usize;
    n + n % 2
}

/// Chain length that keeps localized states of the window away from the
/// chain ends: at least 512 sites and `40 (j1 + j2) / f` beyond the window.
pub fn default_chain_size<T: Real>(p: &Lattice<T>, window: (T, T)) -> usize {
    let f = p.f.to_f64().unwrap_or(1.0);
    let hop = (p.j1 + p.j2).to_f64().unwrap_or(0.0);
    let reach = window.0.abs().max(window.1.abs()).to_f64().unwrap_or(0.0);
    let localization = (40.0 * hop / f).ceil();
    let covering = 2.0 * (reach + 2.0 * f) / f + localization;
    round_up_even(512f64.max(localization).max(covering))
}

/// Truncated-chain levels inside `[lo, hi)`, tagged with branch and index by
/// matching against the Floquet fundamental level.
///
/// Levels that move by more than `1e-10` when the chain grows by 25% come
/// back with `converged = false`.
pub fn ws_spectrum_truncated<T: Real>(
    p: &Lattice<T>,
    n_sites: Option<usize>,
    window: (T, T),
) -> Result<LadderSpectrum<T>> {
    p.require_field()?;
    let (lo, hi) = window;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(format!("energy window [{lo}, {hi}) is empty or not finite")));
    }
    let n = n_sites.unwrap_or_else(|| default_chain_size(p, window));
    let chain = p.build_chain(n)?;
    let dmin = chain.diagonal.iter().fold(T::infinity(), |m, &d| m.min(d));
    let dmax = chain.diagonal.iter().fold(T::neg_infinity(), |m, &d| m.max(d));
    if lo < dmin || hi > dmax {
        return Err(Error::invalid(format!(
            "window [{lo}, {hi}) exceeds the tilt span [{dmin}, {dmax}] of a {n}-site chain"
        )));
    }
    let values = eigenvalues_in_window(&chain, lo, hi)?;

    let n_big = round_up_even(n as f64 * 1.25);
    let big = p.build_chain(n_big)?;
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(1e4) * lo.abs().max(hi.abs()).max(T::one()));
    let margin = tol * T::lit(10.0) + (hi - lo) * T::lit(1e-9);
    let reference = eigenvalues_in_window(&big, lo - margin, hi + margin)?;

    let e = monodromy(p)?.fundamental_energy(p.f);
    let two_f = T::lit(2.0) * p.f;
    let levels = values
        .into_iter()
        .map(|v| {
            let nearest = reference.iter().fold(T::infinity(), |m, &r| m.min((r - v).abs()));
            let d_plus = fold_half_open(v - e, p.f).abs();
            let d_minus = fold_half_open(v + e, p.f).abs();
            let branch = if d_plus <= d_minus { Branch::Plus } else { Branch::Minus };
            let index = ((v - branch.sign::<T>() * e) / two_f).round().to_i64().unwrap_or(0);
            Level { energy: v, branch, index, converged: nearest < tol }
        })
        .collect();
    Ok(LadderSpectrum::new(levels, p.f))
}
