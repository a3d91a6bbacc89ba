//! Line-oriented `key = value` configuration and per-experiment schemas.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use ncmult_core::Exponent;

/// Schema violations and malformed input. Maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    Text,
    IntList,
    FloatList,
    /// Comma separated exponents, `inf` allowed.
    ExpList,
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

pub const fn param(key: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Param {
    Param { key, kind, default, help }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    IntList(Vec<i64>),
    FloatList(Vec<f64>),
    ExpList(Vec<Exponent>),
}

pub fn parse_exponent(s: &str) -> Option<Exponent> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Some(Exponent::Infinity),
        t => t.parse::<f64>().ok().and_then(|p| Exponent::new(p).ok()),
    }
}

fn split_list(raw: &str) -> impl Iterator<Item = &str> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_value(p: &Param, raw: &str) -> Result<Value, UsageError> {
    let bad = || usage(format!("invalid value `{raw}` for key `{}`", p.key));
    let raw = raw.trim();
    Ok(match p.kind {
        Kind::Int => Value::Int(raw.parse().map_err(|_| bad())?),
        Kind::Float => Value::Float(raw.parse().map_err(|_| bad())?),
        Kind::Text => Value::Text(raw.to_string()),
        Kind::IntList => Value::IntList(split_list(raw).map(|s| s.parse().map_err(|_| bad())).collect::<Result<_, _>>()?),
        Kind::FloatList => Value::FloatList(split_list(raw).map(|s| s.parse().map_err(|_| bad())).collect::<Result<_, _>>()?),
        Kind::ExpList => Value::ExpList(split_list(raw).map(|s| parse_exponent(s).ok_or_else(bad)).collect::<Result<_, _>>()?),
    })
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, UsageError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| usage(format!("config line {}: expected `key = value`", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(usage(format!("config line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Resolved configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub params: Params,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params {
    values: BTreeMap<&'static str, (String, Value)>,
}

impl Params {
    /// Defaults from the schema, then `pairs` in order (later wins). Returns the
    /// seed if a `seed` key was given.
    pub fn resolve(schema: &[Param], pairs: &[(String, String)]) -> Result<(Params, Option<u64>), UsageError> {
        let mut values = BTreeMap::new();
        for p in schema {
            values.insert(p.key, (p.default.to_string(), parse_value(p, p.default)?));
        }
        let mut seed = None;
        for (k, v) in pairs {
            if k == "seed" {
                seed = Some(v.trim().parse().map_err(|_| usage(format!("invalid value `{v}` for key `seed`")))?);
                continue;
            }
            let p = schema.iter().find(|p| p.key == k).ok_or_else(|| {
                let known: Vec<&str> = schema.iter().map(|p| p.key).collect();
                usage(format!("unknown key `{k}` (accepted: seed, {})", known.join(", ")))
            })?;
            values.insert(p.key, (v.trim().to_string(), parse_value(p, v)?));
        }
        Ok((Params { values }, seed))
    }

    fn get(&self, key: &str) -> &Value {
        &self.values.get(key).unwrap_or_else(|| panic!("parameter `{key}` missing from schema")).1
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.get(key) {
            Value::Int(v) => *v,
            v => panic!("parameter `{key}` is {v:?}, not an integer"),
        }
    }

    /// Nonnegative integer, rejected as a usage error otherwise.
    pub fn count(&self, key: &str) -> Result<usize, UsageError> {
        usize::try_from(self.int(key)).map_err(|_| usage(format!("`{key}` must be nonnegative")))
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.get(key) {
            Value::Float(v) => *v,
            v => panic!("parameter `{key}` is {v:?}, not a float"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.get(key) {
            Value::Text(v) => v,
            v => panic!("parameter `{key}` is {v:?}, not text"),
        }
    }

    pub fn ints(&self, key: &str) -> &[i64] {
        match self.get(key) {
            Value::IntList(v) => v,
            v => panic!("parameter `{key}` is {v:?}, not an integer list"),
        }
    }

    pub fn counts(&self, key: &str) -> Result<Vec<usize>, UsageError> {
        self.ints(key).iter().map(|&v| usize::try_from(v).map_err(|_| usage(format!("`{key}` entries must be nonnegative")))).collect()
    }

    pub fn floats(&self, key: &str) -> &[f64] {
        match self.get(key) {
            Value::FloatList(v) => v,
            v => panic!("parameter `{key}` is {v:?}, not a float list"),
        }
    }

    pub fn exps(&self, key: &str) -> &[Exponent] {
        match self.get(key) {
            Value::ExpList(v) => v,
            v => panic!("parameter `{key}` is {v:?}, not an exponent list"),
        }
    }

    /// `key = raw` lines in key order, as written to the manifest.
    pub fn raw_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, (raw, _))| (*k, raw.as_str()))
    }
}
