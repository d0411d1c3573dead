use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

/// Every key accepted in a config file; flags carry the same names.
pub const KEYS: &[&str] = &[
    "out",
    "n",
    "p",
    "s",
    "q",
    "kappa",
    "N",
    "L",
    "eps",
    "T",
    "family",
    "seed",
    "hardy-constant",
    "tol-point",
    "tol-refine",
    "tol-partition",
    "tol-duality",
    "tol-blowup",
];

/// Tolerance defaults, overridable through the keys of the same name.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("tol-point", 2.0),
    ("tol-refine", 0.15),
    ("tol-partition", 1e-12),
    ("tol-duality", 1e-10),
    ("tol-blowup", 0.15),
];

/// Merged key-value settings: config file first, flags on top.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn load<'a>(
        path: Option<&Path>,
        overrides: impl IntoIterator<Item = (&'a str, Option<&'a String>)>,
    ) -> Result<Self> {
        let mut settings = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("cannot read config file {}", p.display()))?;
                Self::parse(&text).with_context(|| format!("in config file {}", p.display()))?
            }
            None => Self::default(),
        };
        for (key, value) in overrides {
            if let Some(v) = value {
                settings
                    .values
                    .insert(key.to_string(), v.trim().to_string());
            }
        }
        Ok(settings)
    }

    /// `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                bail!("line {}: unknown key `{key}`", lineno + 1);
            }
            if values
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                bail!("line {}: duplicate key `{key}`", lineno + 1);
            }
        }
        Ok(Self { values })
    }

    /// Keeps only output and tolerance keys.
    pub fn shared_only(&self) -> Self {
        let values = self
            .values
            .iter()
            .filter(|(k, _)| k.as_str() == "out" || k.starts_with("tol-"))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Self { values }
    }

    pub fn echo(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            Some(v) => parse_f64(key, v),
            None => Ok(default),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            Some(v) => v
                .parse()
                .map_err(|_| anyhow!("`{key}` must be a nonnegative integer, got `{v}`")),
            None => Ok(default),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.raw(key) {
            Some(v) => v
                .parse()
                .map_err(|_| anyhow!("`{key}` must be a nonnegative integer, got `{v}`")),
            None => Ok(default),
        }
    }

    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.raw(key) {
            Some(v) => {
                let list = v
                    .split(',')
                    .map(|item| parse_f64(key, item.trim()))
                    .collect::<Result<Vec<_>>>()?;
                if list.is_empty() {
                    bail!("`{key}` must not be empty");
                }
                Ok(list)
            }
            None => Ok(default.to_vec()),
        }
    }

    pub fn tolerance(&self, key: &str) -> Result<f64> {
        let default = DEFAULT_TOLERANCES
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| anyhow!("no tolerance named `{key}`"))?;
        let tol = self.f64_or(key, default)?;
        if !(tol > 0.0) {
            bail!("`{key}` must be positive, got {tol}");
        }
        Ok(tol)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| anyhow!("`{key}` must be a number, got `{v}`"))?;
    if !x.is_finite() {
        bail!("`{key}` must be finite, got `{v}`");
    }
    Ok(x)
}
