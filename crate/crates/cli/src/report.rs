//! Verification reports: one record per check, rendered either as a
//! human-readable table or as tab-separated machine records.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Records,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub check: String,
    pub params: Vec<(String, String)>,
    pub value: f64,
    pub tol: Option<f64>,
    pub status: Status,
}

impl Record {
    /// A gating check: passes iff `value < tol`.
    pub fn below(check: &str, value: f64, tol: f64) -> Self {
        Record {
            check: check.into(),
            params: Vec::new(),
            value,
            tol: Some(tol),
            status: if value < tol { Status::Pass } else { Status::Fail },
        }
    }

    /// A gating check: passes iff `value ≤ bound`.
    pub fn at_most(check: &str, value: f64, bound: f64) -> Self {
        Record {
            status: if value <= bound { Status::Pass } else { Status::Fail },
            ..Record::below(check, value, bound)
        }
    }

    pub fn info(check: &str, value: f64) -> Self {
        Record {
            check: check.into(),
            params: Vec::new(),
            value,
            tol: None,
            status: Status::Info,
        }
    }

    /// A failed stage that produced no number.
    pub fn error(stage: &str, message: &str) -> Self {
        Record {
            check: format!("{stage}-error"),
            params: vec![("message".into(), message.replace(['\t', '\n'], " "))],
            value: f64::NAN,
            tol: None,
            status: Status::Fail,
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    /// Downgrades a gating check to an informational one.
    pub fn informational(mut self) -> Self {
        self.status = Status::Info;
        self
    }
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub verb: String,
    pub seed: u64,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(verb: &str, seed: u64) -> Self {
        Report {
            verb: verb.into(),
            seed,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    /// Tab-separated `check, params, value, tol, status` lines.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#verb\t{}\tseed={}", self.verb, self.seed);
        for r in &self.records {
            let params = if r.params.is_empty() {
                "-".to_string()
            } else {
                r.params
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(";")
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.check,
                params,
                num(r.value),
                r.tol.map_or("-".to_string(), num),
                r.status.as_str()
            );
        }
        let _ = writeln!(out, "#overall\t{}", if self.passed() { "pass" } else { "fail" });
        out
    }

    pub fn to_text(&self) -> String {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut out = format!("cocycle {} (seed {}, generated at unix time {stamp})\n\n", self.verb, self.seed);
        let width = self.records.iter().map(|r| r.check.len()).max().unwrap_or(5).max(5);
        let _ = writeln!(out, "{:<width$}  {:>24}  {:>10}  {:<6}  params", "check", "value", "tol", "status");
        for r in &self.records {
            let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(
                out,
                "{:<width$}  {:>24}  {:>10}  {:<6}  {}",
                r.check,
                num(r.value),
                r.tol.map_or("-".to_string(), |t| format!("{t:.1e}")),
                r.status.as_str(),
                params.join(" ")
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(
            out,
            "\n{} checks, {} failed: {}",
            self.records.iter().filter(|r| r.status != Status::Info).count(),
            failed,
            if failed == 0 { "PASS" } else { "FAIL" }
        );
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Records => self.to_records(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_layout() {
        let mut r = Report::new("demo", 3);
        r.push(Record::below("gap", 0.5, 1.0).with("n", 2));
        r.push(Record::info("note", 1.0 / 3.0));
        let text = r.to_records();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "gap\tn=2\t5.0000000000000000e-1\t1.0000000000000000e0\tpass");
        assert_eq!(lines[2], "note\t-\t3.3333333333333331e-1\t-\tinfo");
        assert_eq!(lines[3], "#overall\tpass");
        r.push(Record::below("bad", 2.0, 1.0));
        assert!(!r.passed());
        assert!(Record::below("nan", f64::NAN, 1.0).status == Status::Fail);
    }
}
