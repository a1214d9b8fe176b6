//! Report records and their JSON and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use fockrel_core::checks::{Bound, CheckReport};
use fockrel_core::symbols::ClassificationResult;
use serde::Serialize;

use crate::config::{pair, ConjugationRecord, Pair, TripleRecord};
use crate::runner::Outcome;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub run: RunInfo,
    pub results: Vec<ResultRecord>,
    pub summary: Summary,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunInfo {
    #[serde(rename = "N")]
    pub truncation: usize,
    pub budget: usize,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub checks: Vec<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    /// Failures declared expected.
    pub expected_failures: usize,
    /// Outcomes disagreeing with the classifier prediction.
    pub inconsistent: usize,
    pub pass_rate: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Parameters {
    #[serde(flatten)]
    pub triple: TripleRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugation: Option<ConjugationRecord>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MetricRecord {
    pub value: f64,
    pub bound: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    pub within: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ClassificationRecord {
    pub kind: &'static str,
    pub matches: bool,
    pub canonical: BTreeMap<&'static str, Pair>,
    pub diagnostics: BTreeMap<&'static str, f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub witness: String,
}

impl From<&ClassificationResult> for ClassificationRecord {
    fn from(c: &ClassificationResult) -> Self {
        Self {
            kind: c.kind.as_str(),
            matches: c.matches(),
            canonical: c.canonical.iter().map(|(k, v)| (*k, pair(*v))).collect(),
            diagnostics: c.diagnostics.iter().copied().collect(),
            witness: c.witness.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ResultRecord {
    pub set_index: usize,
    pub check_name: String,
    pub claim: &'static str,
    pub parameters: Parameters,
    pub truncation: usize,
    pub degree_budget: usize,
    pub metrics: BTreeMap<String, MetricRecord>,
    pub passed: bool,
    pub tolerance_used: f64,
    pub classification: Option<ClassificationRecord>,
    pub predicted: Option<bool>,
    pub consistent: bool,
    pub expect_fail: bool,
    pub notes: Vec<String>,
}

fn metric_record(value: f64, bound: Bound, within: bool) -> MetricRecord {
    let (bound, limit) = match bound {
        Bound::AtMost(b) => ("at_most", Some(b)),
        Bound::AtLeast(b) => ("at_least", Some(b)),
        Bound::Equals(b) => ("equals", Some(b)),
        Bound::Info => ("info", None),
    };
    MetricRecord {
        value,
        bound,
        limit,
        within,
    }
}

impl ResultRecord {
    pub fn new(outcome: &Outcome) -> Self {
        let r: &CheckReport = &outcome.report;
        Self {
            set_index: outcome.set_index,
            check_name: r.check_name.clone(),
            claim: r.claim,
            parameters: Parameters {
                triple: TripleRecord::from_triple(&r.triple),
                conjugation: r.conjugation.as_ref().map(ConjugationRecord::from_params),
            },
            truncation: r.truncation,
            degree_budget: r.degree_budget,
            metrics: r
                .metrics
                .iter()
                .map(|(k, m)| (k.clone(), metric_record(m.value, m.bound, m.within())))
                .collect(),
            passed: r.passed,
            tolerance_used: r.tolerance_used,
            classification: r.classification.as_ref().map(ClassificationRecord::from),
            predicted: r.predicted,
            consistent: r.consistent,
            expect_fail: outcome.expect_fail,
            notes: r.notes.clone(),
        }
    }
}

impl Report {
    pub fn new(run: RunInfo, outcomes: &[Outcome]) -> Self {
        let results: Vec<ResultRecord> = outcomes.iter().map(ResultRecord::new).collect();
        let passed = results.iter().filter(|r| r.passed).count();
        let total = results.len();
        let summary = Summary {
            passed,
            failed: total - passed,
            expected_failures: outcomes.iter().filter(|o| !o.report.passed && o.expect_fail).count(),
            inconsistent: results.iter().filter(|r| !r.consistent).count(),
            pass_rate: if total == 0 { 0.0 } else { passed as f64 / total as f64 },
        };
        Self { run, results, summary }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values always serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "N = {}, budget = {}", self.run.truncation, self.run.budget);
        for r in &self.results {
            let status = match (r.passed, r.expect_fail) {
                (true, false) => "PASS",
                (false, true) => "XFAIL",
                (true, true) => "XPASS",
                (false, false) => "FAIL",
            };
            let _ = writeln!(
                out,
                "{status:<5} {:<16} set {:<3} [{}]{}",
                r.check_name,
                r.set_index,
                r.claim,
                if r.consistent {
                    ""
                } else {
                    " (disagrees with classifier)"
                }
            );
            for (name, m) in &r.metrics {
                let limit = m.limit.map(|l| format!(" {} {l:e}", m.bound)).unwrap_or_default();
                let flag = if m.within { "" } else { "  <-- out of bound" };
                let _ = writeln!(out, "      {name:<30} {:<12.4e}{limit}{flag}", m.value);
            }
            for note in &r.notes {
                let _ = writeln!(out, "      note: {note}");
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "summary: {} passed, {} failed ({} expected), {} inconsistent",
            s.passed, s.failed, s.expected_failures, s.inconsistent
        );
        out
    }
}
