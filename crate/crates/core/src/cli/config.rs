//! `key = value` run manifests and flag/file merging.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use super::CliError;

const KNOWN_KEYS: &[&str] = &[
    "j1", "j2", "delta", "f", "inv_f", "method", "scaled", "n_range", "n_sites", "n_points", "periods",
    "kappa_grid", "sigma", "kappa0", "samples_per_period", "v0", "v1", "v2", "phi1", "phi2", "cutoff", "n_k",
    "n_bands", "output", "workers",
];

/// Parsed manifest; keys are normalized to snake case.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("config line {}: expected `key = value`", i + 1)))?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::config(format!("config line {}: unknown key `{key}`", i + 1)));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::config(format!("config line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag value if given, else the parsed file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| CliError::config(format!("config key `{key}`: cannot parse `{s}`"))),
        }
    }

    pub fn pick_or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, CliError> {
        self.pick(flag, key)?
            .ok_or_else(|| CliError::config(format!("missing `--{}` (flag or config key `{key}`)", key.replace('_', "-"))))
    }

    /// Boolean switches: a set flag wins, otherwise `true`/`false` from the file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        self.pick(None, key).map(|v| v.unwrap_or(false))
    }
}

/// `a:b` or `a:b:c` split into numbers.
pub fn parse_tuple<T: FromStr>(s: &str, parts: usize, what: &str) -> Result<Vec<T>, CliError> {
    let items: Vec<&str> = s.split(':').collect();
    if items.len() != parts {
        return Err(CliError::config(format!("{what} expects {parts} `:`-separated values, got `{s}`")));
    }
    items
        .iter()
        .map(|x| x.trim().parse().map_err(|_| CliError::config(format!("{what}: cannot parse `{x}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_precedence() {
        let c = ConfigFile::parse("# run\nj1 = 1.0\nn-range = -3:3  # ladder\n\nscaled = true\n").unwrap();
        assert_eq!(c.pick::<f64>(None, "j1").unwrap(), Some(1.0));
        assert_eq!(c.pick(Some(2.0), "j1").unwrap(), Some(2.0));
        assert_eq!(c.raw("n_range"), Some("-3:3"));
        assert!(c.switch(false, "scaled").unwrap());
        assert!(c.require::<f64>(None, "j2").is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(ConfigFile::parse("j1 1.0").is_err());
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("j1 = 1\nj1 = 2").is_err());
        assert!(ConfigFile::parse("j1 = one").unwrap().pick::<f64>(None, "j1").is_err());
    }

    #[test]
    fn tuples() {
        assert_eq!(parse_tuple::<f64>("0.5:14:500", 3, "sweep").unwrap(), vec![0.5, 14.0, 500.0]);
        assert!(parse_tuple::<f64>("0.5:14", 3, "sweep").is_err());
    }
}
