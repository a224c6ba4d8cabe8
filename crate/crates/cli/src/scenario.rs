use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Every key a scenario file may set.
pub const KNOWN_KEYS: &[&str] = &[
    "scenario.name",
    "seed",
    "output.dir",
    "output.every",
    "manifold.kind",
    "manifold.dim",
    "manifold.K",
    "manifold.fd_step",
    "tube.kind",
    "tube.R",
    "tube.theta0",
    "tube.amplitude",
    "grid.T",
    "grid.Ntau",
    "grid.Nsigma",
    "evolution.dt",
    "evolution.gauge_ceiling",
    "jacobi.T",
    "jacobi.dt",
    "jacobi.lambda",
    "jacobi.transverse_dim",
    "index.T",
    "index.N",
    "index.fields",
    "index.breaks",
    "index.eps",
    "index.trace",
    "sweep.lambda",
];

pub const BUILTINS: &[&str] = &["flat_ring", "sphere_sweep", "equator"];

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("key `{key}`: cannot parse `{value}` as {expected}")]
    BadValue { key: String, value: String, expected: &'static str },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read scenario {path}: {message}")]
    Io { path: String, message: String },
}

pub type ScenarioResult<T> = std::result::Result<T, ScenarioError>;

/// A parsed `key = value` scenario. Keys are kept sorted so the canonical
/// text, and with it the hash, does not depend on line order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    values: BTreeMap<String, String>,
}

impl Scenario {
    pub fn parse(text: &str) -> ScenarioResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| ScenarioError::Syntax {
                line,
                text: raw.to_string(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ScenarioError::Syntax {
                    line,
                    text: raw.to_string(),
                });
            }
            if !KNOWN_KEYS.contains(&key) {
                return Err(ScenarioError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ScenarioError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
        }
        Ok(Self { values })
    }

    /// A file path, or the name of a built-in scenario when no such file exists.
    pub fn load(spec: &str) -> ScenarioResult<Self> {
        let path = Path::new(spec);
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
                path: spec.to_string(),
                message: e.to_string(),
            })?;
            return Self::parse(&text);
        }
        let name = spec.strip_prefix("builtin:").unwrap_or(spec);
        match builtin(name) {
            Some(text) => Self::parse(text),
            None => Err(ScenarioError::Io {
                path: spec.to_string(),
                message: format!("no such file and no built-in scenario (built-ins: {})", BUILTINS.join(", ")),
            }),
        }
    }

    pub fn set(&mut self, key: &str, value: impl fmt::Display) -> ScenarioResult<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(ScenarioError::UnknownKey {
                line: 0,
                key: key.to_string(),
            });
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, expected: &'static str) -> ScenarioResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| ScenarioError::BadValue {
                key: key.to_string(),
                value: v.clone(),
                expected,
            }),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str, expected: &'static str) -> ScenarioResult<T> {
        self.get(key, expected)?.ok_or_else(|| ScenarioError::Missing(key.to_string()))
    }

    pub fn real(&self, key: &str) -> ScenarioResult<Option<f64>> {
        let v: Option<f64> = self.get(key, "a real number")?;
        match v {
            Some(x) if !x.is_finite() => Err(ScenarioError::BadValue {
                key: key.to_string(),
                value: self.values[key].clone(),
                expected: "a finite real number",
            }),
            other => Ok(other),
        }
    }

    /// A real that must be strictly positive when present.
    pub fn positive(&self, key: &str) -> ScenarioResult<Option<f64>> {
        match self.real(key)? {
            Some(x) if x <= 0.0 => Err(ScenarioError::Invalid(format!("`{key}` must be positive, got {x}"))),
            other => Ok(other),
        }
    }

    pub fn real_list(&self, key: &str) -> ScenarioResult<Option<Vec<f64>>> {
        self.values.get(key).map(|v| parse_list(key, v)).transpose()
    }

    pub fn name(&self) -> String {
        self.raw("scenario.name").unwrap_or("scenario").to_string()
    }

    pub fn seed(&self) -> ScenarioResult<u64> {
        Ok(self.get("seed", "an unsigned integer")?.unwrap_or(0))
    }

    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(self.raw("output.dir").unwrap_or("out"))
    }

    /// Sorted `key = value` lines.
    pub fn canonical(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// SHA-256 of [`Self::canonical`] as lowercase hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Parses `a, b, c` (brackets optional).
pub fn parse_list(key: &str, text: &str) -> ScenarioResult<Vec<f64>> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    let items: Vec<f64> = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| ScenarioError::BadValue {
                key: key.to_string(),
                value: text.to_string(),
                expected: "a comma-separated list of reals",
            })
        })
        .collect::<ScenarioResult<_>>()?;
    if items.is_empty() {
        return Err(ScenarioError::BadValue {
            key: key.to_string(),
            value: text.to_string(),
            expected: "a non-empty list",
        });
    }
    Ok(items)
}

pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "flat_ring" => Some(FLAT_RING),
        "sphere_sweep" => Some(SPHERE_SWEEP),
        "equator" => Some(EQUATOR),
        _ => None,
    }
}

const FLAT_RING: &str = "\
scenario.name = flat_ring
manifold.kind = flat
manifold.dim = 4
tube.kind = breathing_ring
tube.R = 1
grid.T = 1
grid.Nsigma = 128
jacobi.T = 1
jacobi.dt = 1e-3
index.T = 1
index.N = 400
index.fields = 3
seed = 1
";

const SPHERE_SWEEP: &str = "\
scenario.name = sphere_sweep
manifold.kind = round_sphere
manifold.dim = 4
manifold.K = 1
jacobi.T = 7
jacobi.dt = 1e-3
sweep.lambda = 0.25, 1, 4
seed = 1
";

const EQUATOR: &str = "\
scenario.name = equator
manifold.kind = product_time_sphere
manifold.dim = 3
manifold.K = 1
tube.kind = equator
grid.T = 2
grid.Nsigma = 64
jacobi.T = 2
jacobi.dt = 1e-3
index.T = 2
index.N = 400
index.fields = 2
seed = 7
";
