use serde::Serialize;
use serde_json::Value;

use crate::{Format, EXIT_OK, EXIT_PROPERTY};

pub const TOOL: &str = "robust-risk";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Arguments as given, program name excluded.
    pub argv: Vec<String>,
    pub scenario: String,
    /// SHA-256 of the canonical scenario (and payoff file, if any).
    pub input_digest: String,
    pub results: Value,
    pub summary: Summary,
}

impl Report {
    pub fn new(
        command: &str,
        argv: Vec<String>,
        scenario: String,
        input_digest: String,
        results: Value,
        checks: Vec<Check>,
    ) -> Self {
        Report {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            argv,
            scenario,
            input_digest,
            results,
            summary: Summary {
                passed: checks.iter().all(|c| c.passed),
                checks,
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.passed {
            EXIT_OK
        } else {
            EXIT_PROPERTY
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Text => self.to_text(),
        }
    }

    fn to_text(&self) -> String {
        let mut out = format!(
            "{} {}  {}\nscenario  {}\ndigest    {}\n\nresults\n",
            self.tool, self.version, self.command, self.scenario, self.input_digest
        );
        let mut rows = Vec::new();
        flatten("", &self.results, &mut rows);
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            out.push_str(&format!("  {k:width$}  {v}\n"));
        }
        let verdict = if self.summary.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("\nsummary   {verdict}\n"));
        for c in &self.summary.checks {
            out.push_str(&format!("  [{}] {}\n", if c.passed { "pass" } else { "FAIL" }, c.name));
        }
        out
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, child, rows);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, rows);
            }
        }
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}
