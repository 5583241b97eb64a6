use serde::{Deserialize, Serialize};

use super::classify::{Reason, RootCounts, Status, Verdict};
use crate::algebra::{GenericityReport, NcPolynomial, TermRecord};
use crate::config::Config;

pub const SCHEMA: &str = "hsolv_report_v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorEcho {
    pub text: String,
    pub degree: usize,
    pub terms: Vec<TermRecord>,
}

impl OperatorEcho {
    pub fn new(text: &str, p: &NcPolynomial) -> Self {
        OperatorEcho { text: text.into(), degree: p.degree(), terms: p.to_records() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEcho {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

/// The single self-describing output document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub config: Config,
    pub operator: Option<OperatorEcho>,
    pub genericity: Option<GenericityReport>,
    pub roots: Vec<[f64; 2]>,
    pub counts: Option<RootCounts>,
    pub verdict: Option<Status>,
    pub hypothesis: Option<String>,
    pub reasons: Vec<Reason>,
    /// command-specific payload
    pub numerics: serde_json::Value,
    pub error: Option<ErrorEcho>,
}

impl Report {
    pub fn new(command: &str, config: &Config) -> Self {
        Report {
            schema: SCHEMA.into(),
            command: command.into(),
            config: *config,
            operator: None,
            genericity: None,
            roots: vec![],
            counts: None,
            verdict: None,
            hypothesis: None,
            reasons: vec![],
            numerics: serde_json::Value::Null,
            error: None,
        }
    }

    pub fn with_verdict(mut self, v: &Verdict) -> Self {
        self.genericity = v.genericity.clone();
        if let Some(g) = &v.genericity {
            self.roots = g.roots.clone();
        }
        self.counts = Some(v.root_counts);
        self.verdict = Some(v.status);
        self.hypothesis = v.hypothesis.clone();
        self.reasons = v.reasons.clone();
        self.numerics = serde_json::json!({ "top_matches": v.top_matches, "scans": v.scans });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
