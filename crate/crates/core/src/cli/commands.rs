//! Per-command resolution, evaluation and CSV rendering.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::args::{FieldArgs, LatticeArgs, PotentialArgs, Sub};
use super::config::{parse_tuple, ConfigFile};
use super::{CliError, Command, FieldSpec, Method, RunConfig};
use crate::continuum::{continuum_bands, fit_tight_binding, ContinuumPotential};
use crate::dynamics::{bloch_transfer_experiment, resonance_scan, TransferSetup};
use crate::spectra::{find_avoided_crossings, ws_spectrum_floquet, ws_spectrum_truncated};
use crate::strong_field::{spectrum_bm, spectrum_expansion, spectrum_wu_yang, ExpansionOrder};
use crate::weak_field::{adiabatic_spectrum, gap_estimate, AdiabaticOrder};
use crate::{Error, LadderSpectrum, LatticeParams};

fn lattice(a: LatticeArgs, file: &ConfigFile) -> Result<LatticeParams, CliError> {
    let j1 = file.require(a.j1, "j1")?;
    let j2 = file.require(a.j2, "j2")?;
    let delta = file.require(a.delta, "delta")?;
    Ok(LatticeParams::new(j1, j2, delta, 0.0)?)
}

fn field(a: FieldArgs, file: &ConfigFile) -> Result<FieldSpec, CliError> {
    let f: Option<f64> = file.pick(a.f, "f")?;
    let sweep: Option<String> = file.pick(a.inv_f, "inv_f")?;
    match (f, sweep) {
        (Some(_), Some(_)) => Err(CliError::config("give either --f or --inv-f, not both")),
        (None, None) => Err(CliError::config("missing field: give --f or --inv-f min:max:count")),
        (Some(f), None) => {
            if !(f > 0.0 && f.is_finite()) {
                return Err(CliError::config(format!("--f must be positive and finite, got {f}")));
            }
            Ok(FieldSpec::Single(f))
        }
        (None, Some(s)) => {
            let v: Vec<f64> = parse_tuple(&s, 3, "--inv-f")?;
            let count = v[2];
            if !(v[0] > 0.0 && v[1] > v[0] && v[1].is_finite()) {
                return Err(CliError::config(format!("--inv-f needs 0 < min < max, got `{s}`")));
            }
            if !(count >= 2.0 && count.fract() == 0.0 && count <= 1e7) {
                return Err(CliError::config(format!("--inv-f count must be an integer of at least 2, got `{s}`")));
            }
            Ok(FieldSpec::InverseSweep { min: v[0], max: v[1], count: count as usize })
        }
    }
}

fn potential(a: PotentialArgs, file: &ConfigFile) -> Result<(ContinuumPotential, usize, usize), CliError> {
    let pot = ContinuumPotential::new(
        file.pick_or(a.v0, "v0", -0.117)?,
        file.pick_or(a.v1, "v1", -0.15)?,
        file.pick_or(a.v2, "v2", 0.3)?,
        file.pick_or(a.phi1, "phi1", 0.0)?,
        file.pick_or(a.phi2, "phi2", 0.0)?,
    )?;
    let cutoff = file.pick_or(a.cutoff, "cutoff", 41)?;
    if cutoff < 21 || cutoff % 2 == 0 || cutoff > 101 {
        return Err(CliError::config(format!("--cutoff must be odd and within 21..=101, got {cutoff}")));
    }
    let n_k = file.pick_or(a.n_k, "n_k", 128)?;
    if n_k < 4 {
        return Err(CliError::config("--n-k must be at least 4"));
    }
    Ok((pot, cutoff, n_k))
}

fn positive(v: usize, flag: &str) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::config(format!("--{flag} must be at least 1")));
    }
    Ok(v)
}

pub(super) fn resolve(sub: Sub, file: &ConfigFile) -> Result<Command, CliError> {
    Ok(match sub {
        Sub::Bands { lattice: l, n_points } => Command::Bands {
            lattice: lattice(l, file)?,
            n_points: positive(file.pick_or(n_points, "n_points", 256)?, "n-points")?,
        },
        Sub::Spectrum { lattice: l, field: fa, method, scaled, n_range, n_sites } => {
            let method = Method::parse(&file.pick_or(method, "method", "floquet".to_string())?)?;
            let nr: Vec<i64> = parse_tuple(&file.pick_or(n_range, "n_range", "-2:2".to_string())?, 2, "--n-range")?;
            if nr[0] > nr[1] || nr[1] - nr[0] > 10_000 {
                return Err(CliError::config("--n-range must be `min:max` with min <= max and at most 10000 apart"));
            }
            let n_sites = file.pick(n_sites, "n_sites")?;
            if n_sites.is_some_and(|n| n < 2 || n % 2 == 1) {
                return Err(CliError::config("--n-sites must be even and at least 2"));
            }
            Command::Spectrum {
                lattice: lattice(l, file)?,
                field: field(fa, file)?,
                method,
                scaled: file.switch(scaled, "scaled")?,
                n_range: (nr[0], nr[1]),
                n_sites,
            }
        }
        Sub::Crossings { lattice: l, field: fa } => match field(fa, file)? {
            FieldSpec::InverseSweep { min, max, count } => {
                Command::Crossings { lattice: lattice(l, file)?, range: (min, max), resolution: count.max(100) }
            }
            FieldSpec::Single(_) => return Err(CliError::config("crossings needs a range --inv-f min:max:resolution")),
        },
        Sub::GapEstimate { lattice: l, field: fa } => Command::GapEstimate { lattice: lattice(l, file)?, field: field(fa, file)? },
        Sub::Resonances { lattice: l, field: fa, periods, kappa_grid } => Command::Resonances {
            lattice: lattice(l, file)?,
            field: field(fa, file)?,
            periods: positive(file.pick_or(periods, "periods", 20)?, "periods")?,
            kappa_grid: positive(file.pick_or(kappa_grid, "kappa_grid", 64)?, "kappa-grid")?,
        },
        Sub::Transfer { lattice: l, inv_f, periods, n_sites, sigma, kappa0, samples_per_period } => {
            let d = TransferSetup::default();
            let ramp: Vec<f64> = match file.pick(inv_f, "inv_f")? {
                Some(s) => parse_tuple(&s, 2, "--inv-f")?,
                None => vec![d.inv_f_start, d.inv_f_end],
            };
            let setup = TransferSetup {
                inv_f_start: ramp[0],
                inv_f_end: ramp[1],
                duration_periods: file.pick_or(periods, "periods", d.duration_periods)?,
                n_sites: file.pick_or(n_sites, "n_sites", d.n_sites)?,
                sigma_cells: file.pick_or(sigma, "sigma", d.sigma_cells)?,
                kappa0: file.pick_or(kappa0, "kappa0", d.kappa0)?,
                samples_per_period: positive(file.pick_or(samples_per_period, "samples_per_period", d.samples_per_period)?, "samples-per-period")?,
            };
            if !(setup.inv_f_start > 0.0 && setup.inv_f_end > 0.0) {
                return Err(CliError::config("--inv-f ramp endpoints must be positive"));
            }
            Command::Transfer { lattice: lattice(l, file)?, setup }
        }
        Sub::ContinuumBands { potential: pa, n_bands } => {
            let (potential, cutoff, n_k) = potential(pa, file)?;
            let n_bands = positive(file.pick_or(n_bands, "n_bands", 2)?, "n-bands")?;
            if n_bands > cutoff {
                return Err(CliError::config("--n-bands cannot exceed --cutoff"));
            }
            Command::ContinuumBands { potential, cutoff, n_k, n_bands }
        }
        Sub::TbFit { potential: pa } => {
            let (potential, cutoff, n_k) = potential(pa, file)?;
            Command::TbFit { potential, cutoff, n_k }
        }
    })
}

/// Fixed 17-significant-digit rendering.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn spectrum_at(
    p: &LatticeParams,
    method: Method,
    n_range: (i64, i64),
    n_sites: Option<usize>,
) -> Result<LadderSpectrum, Error> {
    let r = n_range.0..=n_range.1;
    match method {
        Method::Truncated => {
            let two_f = 2.0 * p.f;
            let window = (two_f * n_range.0 as f64 - p.f, two_f * n_range.1 as f64 + p.f);
            let s = ws_spectrum_truncated(p, n_sites, window)?;
            let levels = s
                .levels
                .into_iter()
                .filter(|l| l.converged && r.contains(&l.index))
                .collect();
            Ok(LadderSpectrum::new(levels, s.field))
        }
        Method::Floquet => ws_spectrum_floquet(p, r),
        Method::WuYang => spectrum_wu_yang(p, r),
        Method::Expansion => spectrum_expansion(p, r, ExpansionOrder::Third),
        Method::ExpansionFirst => spectrum_expansion(p, r, ExpansionOrder::First),
        Method::Bm => spectrum_bm(p, r),
        Method::Adiabatic => {
            let order = if p.delta == 0.0 { AdiabaticOrder::Second } else { AdiabaticOrder::First };
            adiabatic_spectrum(p, r, order)
        }
    }
}

fn write_output(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| CliError::from(Error::Io(format!("cannot write {}: {e}", p.display())))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::from(Error::Io(e.to_string())))
        }
    }
}

fn companion_path(p: &Path) -> PathBuf {
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    p.with_file_name(format!("{stem}_kappa.csv"))
}

pub(super) fn execute(config: &RunConfig) -> Result<(), CliError> {
    let out = config.output.as_deref();
    let mut csv = String::new();
    match &config.command {
        Command::Bands { lattice, n_points } => {
            csv.push_str("kappa,e_minus,e_plus\n");
            for i in 0..*n_points {
                let k = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * i as f64 / *n_points as f64;
                let (lo, hi) = lattice.bloch_dispersion(k);
                let _ = writeln!(csv, "{},{},{}", num(k), num(lo), num(hi));
            }
        }
        Command::Spectrum { lattice, field, method, scaled, n_range, n_sites } => {
            let points = field.inv_f_points();
            // the fundamental interval needs the neighbouring ladder indices only
            let range = if *scaled { (-1, 1) } else { *n_range };
            let results: Vec<Result<LadderSpectrum, Error>> = points
                .par_iter()
                .map(|&z| spectrum_at(&lattice.with_field(1.0 / z)?, *method, range, *n_sites))
                .collect();
            csv.push_str("inv_f,energy,scaled_energy,branch,n,method\n");
            let mut skipped = 0usize;
            for (z, res) in points.iter().zip(results) {
                let s = match res {
                    Ok(s) => s,
                    Err(Error::OutOfValidity(_)) if points.len() > 1 => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                for l in &s.levels {
                    let scaled_e = l.energy / s.field;
                    if *scaled && !(scaled_e > -1.0 && scaled_e <= 1.0) {
                        continue;
                    }
                    let _ = writeln!(csv, "{},{},{},{},{},{}", num(*z), num(l.energy), num(scaled_e), l.branch, l.index, method.name());
                }
            }
            if skipped > 0 {
                eprintln!("warning=out-of-validity message={skipped} sweep points skipped where {} does not apply", method.name());
            }
        }
        Command::Crossings { lattice, range, resolution } => {
            let found = find_avoided_crossings(lattice, *range, *resolution)?;
            csv.push_str("inv_f_star,gap,branch_pair\n");
            for c in found {
                let _ = writeln!(csv, "{},{},{}-{}", num(c.inv_f_star), num(c.gap), c.branch_pair.0, c.branch_pair.1);
            }
        }
        Command::GapEstimate { lattice, field } => {
            let points = field.inv_f_points();
            let rows = points
                .par_iter()
                .map(|&z| gap_estimate(&lattice.with_field(1.0 / z)?))
                .collect::<Result<Vec<_>, Error>>()?;
            csv.push_str("inv_f,theta0,ratio,gap\n");
            for (z, g) in points.iter().zip(rows) {
                let _ = writeln!(csv, "{},{},{},{}", num(*z), num(g.theta0), num(g.ratio), num(g.gap));
            }
        }
        Command::Resonances { lattice, field, periods, kappa_grid } => {
            let rows = resonance_scan(lattice, &field.inv_f_points(), *periods, *kappa_grid)?;
            csv.push_str("inv_f,p_upper_mean\n");
            for (z, v) in rows {
                let _ = writeln!(csv, "{},{}", num(z), num(v));
            }
        }
        Command::Transfer { lattice, setup } => {
            let path = out.ok_or_else(|| CliError::config("transfer writes two files; give --output"))?;
            let tr = bloch_transfer_experiment(lattice, setup)?;
            if !tr.adiabatic {
                eprintln!("warning=non-adiabatic message=ramp lasts fewer than 50 Bloch periods");
            }
            csv.push_str("time,site,density\n");
            for (t, row) in tr.times.iter().zip(&tr.density) {
                let ts = num(*t);
                for (i, d) in row.iter().enumerate() {
                    let _ = writeln!(csv, "{ts},{i},{}", num(*d));
                }
            }
            let mut side = String::from("time,mean_kappa,p_upper\n");
            for ((t, k), p) in tr.times.iter().zip(&tr.mean_kappa).zip(&tr.p_upper) {
                let _ = writeln!(side, "{},{},{}", num(*t), num(*k), num(*p));
            }
            write_output(Some(&companion_path(path)), &side)?;
            write_output(Some(path), &csv)?;
            println!("transfer_fraction={}", num(tr.transfer_fraction));
            return Ok(());
        }
        Command::ContinuumBands { potential, cutoff, n_k, n_bands } => {
            let b = continuum_bands(potential, *n_k, *cutoff, *n_bands)?;
            csv.push_str("k,band_index,energy\n");
            for (k, e) in b.k.iter().zip(&b.energies) {
                for (j, v) in e.iter().enumerate() {
                    let _ = writeln!(csv, "{},{},{}", num(*k), j + 1, num(*v));
                }
            }
        }
        Command::TbFit { potential, cutoff, n_k } => {
            let fit = fit_tight_binding(&continuum_bands(potential, *n_k, *cutoff, 2)?)?;
            if let Some(w) = &fit.warning {
                eprintln!("warning=poor-tight-binding message={w}");
            }
            csv.push_str("j1,j2,delta,offset,residual\n");
            let _ = writeln!(csv, "{},{},{},{},{}", num(fit.j1), num(fit.j2), num(fit.delta), num(fit.offset), num(fit.residual));
        }
    }
    write_output(out, &csv)
}

#[cfg(test)]
mod tests {
    use super::super::RunConfig;
    use super::*;

    fn cfg(args: &[&str]) -> Result<RunConfig, CliError> {
        RunConfig::from_args(std::iter::once("wannier-stark").chain(args.iter().copied()))
    }

    #[test]
    fn resolves_sweep_and_defaults() {
        let c = cfg(&["spectrum", "--j1", "1", "--j2", "0.6", "--delta", "0", "--inv-f", "0.5:14:500", "--scaled"]).unwrap();
        match c.command {
            Command::Spectrum { field, method, scaled, n_range, .. } => {
                assert_eq!(field, FieldSpec::InverseSweep { min: 0.5, max: 14.0, count: 500 });
                assert_eq!(method, Method::Floquet);
                assert!(scaled);
                assert_eq!(n_range, (-2, 2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_errors_have_code_two() {
        for args in [
            &["bands", "--j1", "1"][..],
            &["spectrum", "--j1", "1", "--j2", "1", "--delta", "0", "--inv-f", "1:2:1"],
            &["spectrum", "--j1", "1", "--j2", "1", "--delta", "0", "--f", "0.5", "--method", "magic"],
            &["bands", "--j1", "-1", "--j2", "1", "--delta", "0"],
            &["frobnicate"],
        ] {
            let e = cfg(args).unwrap_err();
            assert_eq!(e.code, 2, "{args:?}");
            assert!(!e.to_string().contains('\n'));
        }
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(CliError::from(Error::NonConvergence("x".into())).code, 3);
        assert_eq!(CliError::from(Error::EdgeContamination("x".into())).code, 4);
        assert_eq!(CliError::from(Error::OutOfValidity("x".into())).code, 2);
    }

    #[test]
    fn companion_name() {
        assert_eq!(companion_path(Path::new("/tmp/run/fig6.csv")), PathBuf::from("/tmp/run/fig6_kappa.csv"));
    }
}
