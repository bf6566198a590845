use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;

pub const SCHEMA: &str = gapwave::SCHEMA;

/// One asserted invariant: `value <relation> bound`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=",
            bound,
            pass: value <= bound,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=",
            bound,
            pass: value >= bound,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<",
            bound,
            pass: value < bound,
        }
    }

    pub fn equals(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "==",
            bound,
            pass: value == bound,
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn write_json(path: &Path, v: &Value) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, v)?;
    use std::io::Write;
    writeln!(w)?;
    Ok(())
}

pub fn summary(cfg: &ExperimentConfig, out: &Outcome) -> Value {
    json!({
        "schema": SCHEMA,
        "kind": cfg.kind,
        "seed": cfg.seed,
        "parameters": cfg.parameters,
        "pass": out.pass(),
        "checks": out.checks,
        "results": out.results,
        "artifacts": out.artifacts,
    })
}

/// Writes `summary.json` and, when a check failed, `failures.json`.
pub fn write_reports(cfg: &ExperimentConfig, out: &Outcome) -> anyhow::Result<Value> {
    fs::create_dir_all(&cfg.output_dir)?;
    let s = summary(cfg, out);
    write_json(&cfg.output_dir.join("summary.json"), &s)?;
    let failures: Vec<&Check> = out.checks.iter().filter(|c| !c.pass).collect();
    let failures_path = cfg.output_dir.join("failures.json");
    if failures.is_empty() {
        if failures_path.exists() {
            fs::remove_file(&failures_path)?;
        }
    } else {
        write_json(
            &failures_path,
            &json!({ "schema": SCHEMA, "kind": cfg.kind, "seed": cfg.seed, "failures": failures }),
        )?;
    }
    Ok(s)
}

/// Failure record for a run that stopped on a numerical error.
pub fn write_error(cfg: &ExperimentConfig, err: &str) -> anyhow::Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    write_json(
        &cfg.output_dir.join("failures.json"),
        &json!({ "schema": SCHEMA, "kind": cfg.kind, "seed": cfg.seed, "error": err }),
    )
}
