//! Check records and the machine-readable report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// How a measured value is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass when `measured ≤ tolerance`.
    AtMost,
    /// Pass when `measured > tolerance`.
    Exceeds,
    /// Pass when `measured ≥ tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub measured: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn compare(
        name: &str,
        anchor: &str,
        measured: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let ok = measured.is_finite()
            && match comparison {
                Comparison::AtMost => measured <= tolerance,
                Comparison::Exceeds => measured > tolerance,
                Comparison::AtLeast => measured >= tolerance,
            };
        Self {
            name: name.to_string(),
            anchor: anchor.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            tolerance,
            comparison,
            detail: None,
        }
    }

    pub fn at_most(name: &str, anchor: &str, measured: f64, tolerance: f64) -> Self {
        Self::compare(name, anchor, measured, tolerance, Comparison::AtMost)
    }

    pub fn exceeds(name: &str, anchor: &str, measured: f64, threshold: f64) -> Self {
        Self::compare(name, anchor, measured, threshold, Comparison::Exceeds)
    }

    pub fn at_least(name: &str, anchor: &str, measured: f64, threshold: f64) -> Self {
        Self::compare(name, anchor, measured, threshold, Comparison::AtLeast)
    }

    /// Boolean check: measured is the number of violations, tolerance zero.
    pub fn holds(name: &str, anchor: &str, violations: usize) -> Self {
        Self::at_most(name, anchor, violations as f64, 0.0)
    }

    /// A check whose computation itself failed.
    pub fn errored(name: &str, anchor: &str, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.to_string(),
            anchor: anchor.to_string(),
            status: Status::Fail,
            measured: f64::NAN,
            tolerance: 0.0,
            comparison: Comparison::AtMost,
            detail: Some(err.to_string()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

fn finite_or_null(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

impl Report {
    pub fn new(command: impl Into<String>, checks: Vec<CheckRecord>) -> Self {
        let pass = checks.iter().all(CheckRecord::passed);
        Self {
            command: command.into(),
            version: crate::VERSION.to_string(),
            checks,
            pass,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// JSON value with object keys in sorted order; non-finite numbers
    /// become `null`.
    pub fn to_value(&self) -> serde_json::Value {
        let checks = self
            .checks
            .iter()
            .map(|c| {
                let mut m = serde_json::Map::new();
                m.insert("name".into(), c.name.clone().into());
                m.insert("anchor".into(), c.anchor.clone().into());
                m.insert(
                    "status".into(),
                    serde_json::to_value(c.status).unwrap_or_default(),
                );
                m.insert("measured".into(), finite_or_null(c.measured));
                m.insert("tolerance".into(), finite_or_null(c.tolerance));
                m.insert(
                    "comparison".into(),
                    serde_json::to_value(c.comparison).unwrap_or_default(),
                );
                if let Some(d) = &c.detail {
                    m.insert("detail".into(), d.clone().into());
                }
                serde_json::Value::Object(m)
            })
            .collect();
        let mut m = serde_json::Map::new();
        m.insert("command".into(), self.command.clone().into());
        m.insert("version".into(), self.version.clone().into());
        m.insert("checks".into(), serde_json::Value::Array(checks));
        m.insert("pass".into(), self.pass.into());
        serde_json::Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        sorted_json(&self.to_value())
    }

    /// `name,anchor,status,measured,tolerance,comparison,detail`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,anchor,status,measured,tolerance,comparison,detail\n");
        for c in &self.checks {
            let status = if c.passed() { "pass" } else { "fail" };
            let cmp = match c.comparison {
                Comparison::AtMost => "at_most",
                Comparison::Exceeds => "exceeds",
                Comparison::AtLeast => "at_least",
            };
            let _ = writeln!(
                out,
                "{},{},{status},{:e},{:e},{cmp},{}",
                csv_field(&c.name),
                csv_field(&c.anchor),
                c.measured,
                c.tolerance,
                csv_field(c.detail.as_deref().unwrap_or(""))
            );
        }
        out
    }
}

/// Pretty JSON with keys sorted at every level.
pub fn sorted_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&sort_keys(v)).unwrap_or_default();
    s.push('\n');
    s
}

fn sort_keys(v: &serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(m) => {
            let mut entries: Vec<(&String, &serde_json::Value)> = m.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            let mut out = serde_json::Map::new();
            for (k, v) in entries {
                out.insert(k.clone(), sort_keys(v));
            }
            serde_json::Value::Object(out)
        }
        serde_json::Value::Array(a) => serde_json::Value::Array(a.iter().map(sort_keys).collect()),
        other => other.clone(),
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
