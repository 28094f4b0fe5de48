//! Report serialization and exit codes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::verify::{CheckResult, ScanReport, SuiteResult};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Meta {
    pub version: String,
    /// Seconds since the epoch; left null so that repeated runs are byte-identical.
    pub timestamp: Option<String>,
    pub config: BTreeMap<String, String>,
}

impl Meta {
    pub fn new(config: BTreeMap<String, String>, stamp: bool) -> Self {
        let timestamp = stamp.then(|| {
            SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs().to_string()).unwrap_or_default()
        });
        Self { version: env!("CARGO_PKG_VERSION").to_string(), timestamp, config }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub meta: Meta,
    pub checks: Vec<CheckResult>,
    pub scans: Vec<ScanReport>,
}

impl Report {
    /// Checks are sorted by id so that output does not depend on scheduling.
    pub fn new(meta: Meta, suite: SuiteResult) -> Self {
        let mut checks = suite.checks;
        checks.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        Self { meta, checks, scans: suite.scans }
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures().is_empty() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn to_json(&self) -> Value {
        let failed: Vec<&str> = self.failures().iter().map(|c| c.check_id.as_str()).collect();
        json!({
            "meta": self.meta,
            "checks": self.checks,
            "scans": self.scans,
            "summary": {
                "total": self.checks.len(),
                "passed": self.checks.len() - failed.len(),
                "failed": failed,
            },
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check_id", "expected", "computed", "tolerance", "pass", "runtime_ms", "provenance"])
            .map_err(csv_err)?;
        for c in &self.checks {
            w.write_record([
                c.check_id.as_str(),
                &c.expected,
                &c.computed,
                &c.tolerance,
                if c.pass { "true" } else { "false" },
                &c.runtime_ms.to_string(),
                &c.provenance,
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.to_json())? + "\n"),
            Format::Csv => self.to_csv(),
        }
    }

    /// One line per check.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} {}  expected {}  computed {}\n", c.check_id, c.expected, c.computed));
        }
        for r in &self.scans {
            s.push_str(&format!(
                "scan ({},{}) {}x{}: h0(0) = {:.15e}, best off origin {:.15e}, margin {:e} (error {:e})\n",
                r.field.0, r.field.1, r.grid.0, r.grid.1, r.h0_at_origin, r.max_off_origin, r.margin, r.error
            ));
        }
        s.push_str(&format!("{} checks, {} failed\n", self.checks.len(), self.failures().len()));
        s
    }
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    std::io::Error::other(e.to_string()).into()
}

/// Write the report to `path` (or stdout) and return the exit code.
pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> Result<i32> {
    let body = report.render(format)?;
    match path {
        Some(p) => std::fs::write(p, body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(report.exit_code())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(id: &str, pass: bool) -> CheckResult {
        CheckResult {
            check_id: id.into(),
            expected: "1".into(),
            computed: if pass { "1" } else { "2" }.into(),
            tolerance: "exact".into(),
            pass,
            runtime_ms: 0,
            provenance: "test".into(),
        }
    }

    #[test]
    fn empty_report_passes() {
        let r = Report::new(Meta::new(BTreeMap::new(), false), SuiteResult::default());
        assert_eq!(r.exit_code(), EXIT_PASS);
        let v: Value = serde_json::from_str(&r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["checks"].as_array().unwrap().len(), 0);
        assert!(v["meta"]["timestamp"].is_null());
    }

    #[test]
    fn failing_check_sets_exit_code() {
        let suite = SuiteResult { checks: vec![check("b", true), check("a", false)], scans: vec![] };
        let r = Report::new(Meta::new(BTreeMap::new(), false), suite);
        assert_eq!(r.exit_code(), EXIT_FAIL);
        assert_eq!(r.checks[0].check_id, "a");
        let v = r.to_json();
        assert_eq!(v["summary"]["failed"][0], "a");
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("check_id,expected"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn csv_quotes_commas() {
        let mut c = check("x", true);
        c.computed = "(10,26,12)".into();
        let r = Report::new(Meta::new(BTreeMap::new(), false), SuiteResult { checks: vec![c], scans: vec![] });
        assert!(r.to_csv().unwrap().contains("\"(10,26,12)\""));
    }
}
