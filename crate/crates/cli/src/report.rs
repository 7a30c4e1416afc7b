//! Check results and the versioned machine-readable report.
//!
//! The machine-readable JSON is byte-deterministic for a fixed scenario and
//! seed: it carries no timestamps or wall-clock fields (those appear only
//! in the human-readable output).

use crate::scenario::Scenario;
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One named check with its measured value and threshold.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<Vec<f64>>,
}

impl CheckResult {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::AtMost,
            pass: value <= threshold,
            worst_point: None,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison: Comparison::AtLeast,
            pass: value >= threshold,
            worst_point: None,
        }
    }

    pub fn boolean(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            threshold: 1.0,
            comparison: Comparison::AtLeast,
            pass,
            worst_point: None,
        }
    }

    pub fn with_worst_point(mut self, point: Option<Vec<f64>>) -> Self {
        self.worst_point = point;
        self
    }
}

/// Everything a scenario run produced.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub scenario: Scenario,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<String>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(
        scenario: Scenario,
        checks: Vec<CheckResult>,
        classification: Option<String>,
        notes: Vec<String>,
    ) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        Self {
            schema_version: SCHEMA_VERSION,
            scenario,
            checks,
            classification,
            notes,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable rendering; `wall` is appended here and deliberately
    /// kept out of the machine-readable bytes.
    pub fn render_human(&self, wall: std::time::Duration) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "scenario: {} (dimension {})\n",
            self.scenario.kind_name(),
            self.scenario.dimension()
        ));
        for check in &self.checks {
            let cmp = match check.comparison {
                Comparison::AtMost => "<=",
                Comparison::AtLeast => ">=",
            };
            out.push_str(&format!(
                "  [{}] {}: {:.3e} {} {:.3e}\n",
                if check.pass { "PASS" } else { "FAIL" },
                check.name,
                check.value,
                cmp,
                check.threshold
            ));
            if let Some(p) = &check.worst_point {
                out.push_str(&format!("         worst sample at {p:?}\n"));
            }
        }
        if let Some(class) = &self.classification {
            out.push_str(&format!("classification: {class}\n"));
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out.push_str(&format!(
            "result: {} ({} checks, {:.1} ms)\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len(),
            wall.as_secs_f64() * 1e3
        ));
        out
    }
}

/// Description of the machine-readable schema, for `report-format`.
pub fn schema_description(version: &str) -> Option<String> {
    if version != SCHEMA_VERSION {
        return None;
    }
    Some(format!(
        "report schema version {SCHEMA_VERSION}\n\
         fields:\n\
         \x20 schema_version: string, currently \"{SCHEMA_VERSION}\"\n\
         \x20 scenario:       echo of the parsed scenario (kind tag plus its parameters,\n\
         \x20                 with seed/sample/tolerance overrides applied)\n\
         \x20 checks:         array of per-check records, one per verified quantity:\n\
         \x20                   name:        check identifier (residual maxima, flags, ...)\n\
         \x20                   value:       measured value (residual norm, factor error, ...)\n\
         \x20                   threshold:   the bound the value is compared against\n\
         \x20                   comparison:  \"<=\" or \">=\"\n\
         \x20                   pass:        boolean verdict for this check\n\
         \x20                   worst_point: chart coordinates of the worst sample (optional)\n\
         \x20 classification: none | conformal | homothetic | killing (when applicable)\n\
         \x20 notes:          free-form remarks (domain restrictions, root ambiguity, ...)\n\
         \x20 pass:           conjunction of all checks; exit code 0 iff true\n\
         numbers are serialized with full round-trip precision; reports are\n\
         byte-identical for identical scenario and seed (no wall-clock fields)\n"
    ))
}
