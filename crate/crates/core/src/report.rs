//! Per-estimate verification records shared by every checker.

use alloc::string::String;
use alloc::vec::Vec;

/// One evaluated instance of an estimate: `lhs ≤ C · rhs` with `C` stripped.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    /// Translation size, time, exponent or other sweep variable.
    pub h: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl ReportRow {
    pub fn new(label: impl Into<String>, h: f64, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        ReportRow { label: label.into(), h, lhs, rhs, ratio, pass: ratio.is_finite() }
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub target: String,
    pub rows: Vec<ReportRow>,
    /// Fitted constants, logged for regression tracking.
    pub fitted: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub pass: bool,
    /// The metric that decided the verdict (largest ratio, drift, slack...).
    pub worst: f64,
    pub worst_label: String,
}

impl VerificationReport {
    pub fn new(target: impl Into<String>) -> Self {
        VerificationReport {
            target: target.into(),
            rows: Vec::new(),
            fitted: Vec::new(),
            notes: Vec::new(),
            pass: true,
            worst: 0.0,
            worst_label: String::new(),
        }
    }

    pub fn push(&mut self, row: ReportRow) {
        if !row.pass {
            self.pass = false;
        }
        self.rows.push(row);
    }

    pub fn fit(&mut self, name: impl Into<String>, value: f64) {
        self.fitted.push((name.into(), value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn fail(&mut self, text: impl Into<String>) {
        self.pass = false;
        self.notes.push(text.into());
    }

    pub fn set_worst(&mut self, label: impl Into<String>, value: f64) {
        self.worst = value;
        self.worst_label = label.into();
    }

    /// Largest ratio over rows whose label starts with `prefix`.
    pub fn max_ratio(&self, prefix: &str) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.label.starts_with(prefix))
            .fold(0.0, |m, r| m.max(r.ratio))
    }

    pub fn fitted_value(&self, name: &str) -> Option<f64> {
        self.fitted.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// `PASS|FAIL <target> <worst metric>`.
    pub fn verdict_line(&self) -> String {
        alloc::format!(
            "{} {} {}={:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.target,
            if self.worst_label.is_empty() { "worst" } else { &self.worst_label },
            self.worst
        )
    }
}
