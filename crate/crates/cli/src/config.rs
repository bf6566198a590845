use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sturm,
    Density,
    Heat,
    Decompose,
    Example1,
    Example2,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Sturm,
        Kind::Density,
        Kind::Heat,
        Kind::Decompose,
        Kind::Example1,
        Kind::Example2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Sturm => "sturm",
            Kind::Density => "density",
            Kind::Heat => "heat",
            Kind::Decompose => "decompose",
            Kind::Example1 => "example1",
            Kind::Example2 => "example2",
        }
    }

    /// Parameter keys accepted by this kind.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Kind::Sturm => &["m_range", "trials", "max_degree"],
            Kind::Density => &["gap", "band", "trials", "window", "dx"],
            Kind::Heat => &["gap", "band", "window", "dx", "t_max", "steps"],
            Kind::Decompose => &["gap", "band", "window", "dx"],
            Kind::Example1 => &["intervals", "alpha", "epsilon", "window", "dx"],
            Kind::Example2 => &["k", "window"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// The on-disk form; every field is optional so that flags can fill gaps.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: Option<Kind>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub parameters: BTreeMap<String, Value>,
}

impl ExperimentConfig {
    /// File values first, then `overrides` on top. Unknown keys are rejected.
    pub fn resolve(
        kind: Kind,
        file: ConfigFile,
        seed: Option<u64>,
        output_dir: Option<PathBuf>,
        overrides: Vec<(&'static str, Value)>,
    ) -> Result<Self, ConfigError> {
        if let Some(k) = file.kind {
            if k != kind {
                return bad(format!("config file is for `{k}` but `{kind}` was requested"));
            }
        }
        let mut parameters = file.parameters;
        for (key, value) in overrides {
            parameters.insert(key.to_string(), value);
        }
        if let Some(key) = parameters.keys().find(|k| !kind.keys().contains(&k.as_str())) {
            return bad(format!(
                "unknown parameter `{key}` for `{kind}` (accepted: {})",
                kind.keys().join(", ")
            ));
        }
        Ok(Self {
            kind,
            seed: seed.or(file.seed).unwrap_or(0),
            output_dir: output_dir
                .or(file.output_dir)
                .unwrap_or_else(|| PathBuf::from("gapwave-out")),
            parameters,
        })
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.parameters.get(key) {
            None => Ok(default),
            Some(Value::Float(x)) if x.is_finite() => Ok(*x),
            Some(Value::Integer(n)) => Ok(*n as f64),
            Some(v) => bad(format!("`{key}` must be a number, got {v}")),
        }
    }

    pub fn positive_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let x = self.f64_or(key, default)?;
        if x > 0.0 {
            Ok(x)
        } else {
            bad(format!("`{key}` must be positive, got {x}"))
        }
    }

    pub fn count_or(&self, key: &str, default: u32) -> Result<u32, ConfigError> {
        match self.parameters.get(key) {
            None => Ok(default),
            Some(Value::Integer(n)) if *n > 0 && *n <= u32::MAX as i64 => Ok(*n as u32),
            Some(v) => bad(format!("`{key}` must be a positive integer, got {v}")),
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> Result<&'a str, ConfigError> {
        match self.parameters.get(key) {
            None => Ok(default),
            Some(Value::String(s)) => Ok(s),
            Some(v) => bad(format!("`{key}` must be a string, got {v}")),
        }
    }
}

/// `"1..8"` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<(u32, u32), ConfigError> {
    let parse = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| ConfigError(format!("bad range `{s}`")))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if lo == 0 || hi < lo {
        return bad(format!("range `{s}` must satisfy 1 ≤ lo ≤ hi"));
    }
    Ok((lo, hi))
}

/// `"10-13,40-46"`.
pub fn parse_intervals(s: &str) -> Result<Vec<(i64, i64)>, ConfigError> {
    s.split(',')
        .map(|part| {
            let (a, b) = part
                .trim()
                .split_once('-')
                .ok_or_else(|| ConfigError(format!("bad interval `{part}`")))?;
            let a: i64 = a
                .trim()
                .parse()
                .map_err(|_| ConfigError(format!("bad interval `{part}`")))?;
            let b: i64 = b
                .trim()
                .parse()
                .map_err(|_| ConfigError(format!("bad interval `{part}`")))?;
            if b <= a {
                return bad(format!("empty interval `{part}`"));
            }
            Ok((a, b))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: ConfigFile =
            toml::from_str("kind = \"density\"\nseed = 4\n[parameters]\ngap = 2\nband = 6\n").unwrap();
        let cfg =
            ExperimentConfig::resolve(Kind::Density, file, Some(9), None, vec![("gap", Value::Float(3.0))]).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.f64_or("gap", 1.0).unwrap(), 3.0);
        assert_eq!(cfg.count_or("band", 8).unwrap(), 6);
    }

    #[test]
    fn rejects_unknown_kind_and_keys() {
        assert!(toml::from_str::<ConfigFile>("kind = \"bogus\"").is_err());
        let file: ConfigFile = toml::from_str("[parameters]\nfoo = 1\n").unwrap();
        assert!(ExperimentConfig::resolve(Kind::Heat, file, None, None, vec![]).is_err());
        let file: ConfigFile = toml::from_str("kind = \"heat\"").unwrap();
        assert!(ExperimentConfig::resolve(Kind::Sturm, file, None, None, vec![]).is_err());
    }

    #[test]
    fn ranges_and_intervals() {
        assert_eq!(parse_range("1..8").unwrap(), (1, 8));
        assert_eq!(parse_range("1..=8").unwrap(), (1, 8));
        assert_eq!(parse_range("3").unwrap(), (3, 3));
        assert!(parse_range("5..2").is_err());
        assert_eq!(parse_intervals("10-13, 40-46").unwrap(), vec![(10, 13), (40, 46)]);
        assert!(parse_intervals("4-4").is_err());
    }
}
