use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use heegner_core::arith::is_fundamental_discriminant;
use serde_json::Value;

/// Bad flags, bad config file, or parameters that fail validation. Maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "usage error: {}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

/// One experiment: a command name and a flat parameter map.
///
/// Keys use underscores (`D_range`, `c_max`); the matching flags use dashes.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub out_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
}

pub const DEFAULT_OUT: &str = "heegner-out";
pub const DEFAULT_CACHE: &str = ".heegner-cache";

impl ExperimentConfig {
    /// Parameters from an optional JSON file, then flags on top.
    pub fn load(command: &str, file: Option<&Path>, flags: Vec<(String, Value)>) -> anyhow::Result<Self> {
        let mut params = BTreeMap::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| UsageError(format!("config {} is not valid JSON: {e}", path.display())))?;
            let Value::Object(map) = value else {
                return usage(format!("config {} must be a JSON object", path.display()));
            };
            for (k, v) in map {
                params.insert(k.replace('-', "_"), v);
            }
        }
        if let Some(c) = params.remove("command") {
            if c.as_str() != Some(command) {
                return usage(format!("config is for command {c}, not {command}"));
            }
        }
        for (k, v) in flags {
            params.insert(k.replace('-', "_"), v);
        }
        let out_dir = match params.remove("out") {
            Some(v) => PathBuf::from(as_string(&v, "out")?),
            None => PathBuf::from(DEFAULT_OUT),
        };
        let no_cache = match params.remove("no_cache") {
            Some(Value::Bool(b)) => b,
            Some(v) => return usage(format!("no_cache must be a boolean, got {v}")),
            None => false,
        };
        let cache_dir = match params.remove("cache") {
            Some(v) => Some(PathBuf::from(as_string(&v, "cache")?)),
            None => Some(PathBuf::from(DEFAULT_CACHE)),
        };
        let cfg = ExperimentConfig { command: command.to_string(), params, out_dir, cache_dir: cache_dir.filter(|_| !no_cache) };
        for (k, v) in &cfg.params {
            if k == "tol" || k.ends_with("_tol") {
                let x = cfg.f64(k, 1.0)?;
                if !(x > 0.0 && x.is_finite()) {
                    return usage(format!("tolerance {k} must be positive, got {v}"));
                }
            }
        }
        Ok(cfg)
    }

    /// Config with no file and no flags, for driving commands from code.
    pub fn defaults(command: &str, out_dir: &Path) -> Self {
        ExperimentConfig { command: command.to_string(), params: BTreeMap::new(), out_dir: out_dir.to_path_buf(), cache_dir: None }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    /// Parameters echoed into failure records.
    pub fn params_json(&self) -> Value {
        Value::Object(self.params.clone().into_iter().collect())
    }

    pub fn f64(&self, key: &str, default: f64) -> anyhow::Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => scalar_f64(v, key),
        }
    }

    pub fn u64(&self, key: &str, default: u64) -> anyhow::Result<u64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => scalar_u64(v, key),
        }
    }

    pub fn string(&self, key: &str) -> anyhow::Result<Option<String>> {
        self.params.get(key).map(|v| as_string(v, key)).transpose()
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> anyhow::Result<Vec<f64>> {
        let v = match self.params.get(key) {
            None => default.to_vec(),
            Some(v) => list(v, key)?.iter().map(|x| scalar_f64(x, key)).collect::<anyhow::Result<_>>()?,
        };
        nonempty(v, key)
    }

    pub fn i64_list(&self, key: &str, default: &[i64]) -> anyhow::Result<Vec<i64>> {
        let v = match self.params.get(key) {
            None => default.to_vec(),
            Some(v) => list(v, key)?.iter().map(|x| scalar_i64(x, key)).collect::<anyhow::Result<_>>()?,
        };
        nonempty(v, key)
    }

    pub fn u64_list(&self, key: &str, default: &[u64]) -> anyhow::Result<Vec<u64>> {
        let v = self.i64_list(key, &default.iter().map(|&x| x as i64).collect::<Vec<_>>())?;
        v.into_iter()
            .map(|x| if x > 0 { Ok(x as u64) } else { usage(format!("{key} entries must be positive, got {x}")) })
            .collect()
    }

    /// `D` values (positive, `-D` a fundamental discriminant) from `D` or `D_range`.
    ///
    /// Listed values must be fundamental; a range is filtered and must keep at least one value.
    pub fn discriminants(&self, default: &[u64]) -> anyhow::Result<Vec<u64>> {
        match (self.params.get("D"), self.params.get("D_range")) {
            (Some(_), Some(_)) => usage("give either D or D_range, not both"),
            (None, Some(r)) => {
                let (a, b) = parse_range(r)?;
                let ds: Vec<u64> = (a..=b).filter(|&d| is_fundamental_discriminant(-(d as i64))).collect();
                if ds.is_empty() {
                    return usage(format!("D_range {a}:{b} contains no fundamental discriminants"));
                }
                Ok(ds)
            }
            _ => {
                let ds = self.u64_list("D", default)?;
                for &d in &ds {
                    if !is_fundamental_discriminant(-(d as i64)) {
                        return usage(format!("-{d} is not a fundamental discriminant"));
                    }
                }
                Ok(ds)
            }
        }
    }
}

fn nonempty<T>(v: Vec<T>, key: &str) -> anyhow::Result<Vec<T>> {
    if v.is_empty() {
        usage(format!("{key} is empty"))
    } else {
        Ok(v)
    }
}

fn as_string(v: &Value, key: &str) -> anyhow::Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => usage(format!("{key} must be a string, got {v}")),
    }
}

/// A JSON array, a single number, or a comma separated string.
fn list(v: &Value, key: &str) -> anyhow::Result<Vec<Value>> {
    match v {
        Value::Array(a) => Ok(a.clone()),
        Value::Number(_) => Ok(vec![v.clone()]),
        Value::String(s) => Ok(s.split(',').map(|x| Value::String(x.trim().to_string())).collect()),
        _ => usage(format!("{key} must be a list, got {v}")),
    }
}

fn scalar_f64(v: &Value, key: &str) -> anyhow::Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    };
    match x {
        Some(x) if x.is_finite() => Ok(x),
        _ => usage(format!("{key}: expected a number, got {v}")),
    }
}

fn scalar_i64(v: &Value, key: &str) -> anyhow::Result<i64> {
    let x = match v {
        Value::Number(n) => n.as_i64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    };
    x.map_or_else(|| usage(format!("{key}: expected an integer, got {v}")), Ok)
}

fn scalar_u64(v: &Value, key: &str) -> anyhow::Result<u64> {
    match scalar_i64(v, key)? {
        x if x >= 0 => Ok(x as u64),
        x => usage(format!("{key} must be nonnegative, got {x}")),
    }
}

/// `"a:b"` with `1 <= a <= b`.
fn parse_range(v: &Value) -> anyhow::Result<(u64, u64)> {
    let s = as_string(v, "D_range")?;
    let parsed = s.split_once(':').and_then(|(a, b)| Some((a.trim().parse::<u64>().ok()?, b.trim().parse::<u64>().ok()?)));
    match parsed {
        Some((a, b)) if a >= 1 && a <= b => Ok((a, b)),
        _ => usage(format!("D_range must look like a:b with 1 <= a <= b, got {s:?}")),
    }
}
