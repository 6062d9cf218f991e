//! Verification records: the two sides of an identity or inequality, the
//! tolerance it was checked at and the outcome.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Computed and recorded, not asserted.
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<(String, String)>,
}

impl VerificationReport {
    fn new(check: &str, instance: impl Into<String>, lhs: f64, rhs: f64, relation: Relation, tolerance: f64) -> Self {
        let ok = match relation {
            Relation::Le => lhs <= rhs + tolerance,
            Relation::Ge => lhs + tolerance >= rhs,
            Relation::Eq => (lhs - rhs).abs() <= tolerance,
        };
        Self {
            check: check.to_string(),
            instance: instance.into(),
            lhs,
            rhs,
            relation,
            tolerance,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            notes: Vec::new(),
        }
    }

    /// `lhs <= rhs + tolerance`.
    pub fn le(check: &str, instance: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(check, instance, lhs, rhs, Relation::Le, tolerance)
    }

    /// `lhs >= rhs - tolerance`.
    pub fn ge(check: &str, instance: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(check, instance, lhs, rhs, Relation::Ge, tolerance)
    }

    /// `|lhs - rhs| <= tolerance`.
    pub fn eq(check: &str, instance: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(check, instance, lhs, rhs, Relation::Eq, tolerance)
    }

    /// Exact integer comparison; the recorded sides are the integers as f64.
    pub fn exact(check: &str, instance: impl Into<String>, lhs: u128, rhs: u128, relation: Relation) -> Self {
        let ok = match relation {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        };
        let mut r = Self::new(check, instance, lhs as f64, rhs as f64, relation, 0.0);
        r.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        r.notes.push(("exact".into(), format!("{lhs} vs {rhs}")));
        r
    }

    pub fn report_only(check: &str, instance: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let mut r = Self::new(check, instance, lhs, rhs, Relation::Ge, 0.0);
        r.verdict = Verdict::ReportOnly;
        r
    }

    pub fn note(mut self, key: &str, value: impl ToString) -> Self {
        self.notes.push((key.to_string(), value.to_string()));
        self
    }

    /// Re-evaluates a floating-point comparison with a new tolerance. Exact
    /// and report-only entries are left alone.
    pub fn with_tolerance(self, tolerance: f64) -> Self {
        if self.verdict == Verdict::ReportOnly || self.notes.iter().any(|(k, _)| k == "exact") {
            return self;
        }
        let notes = self.notes;
        let mut r = Self::new(&self.check, self.instance, self.lhs, self.rhs, self.relation, tolerance);
        r.notes = notes;
        r
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::Le => "<=",
            Relation::Eq => "==",
            Relation::Ge => ">=",
        };
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::ReportOnly => "INFO",
        };
        write!(
            f,
            "[{verdict}] {} {}: {:.12e} {rel} {:.12e} (tol {:.0e})",
            self.check, self.instance, self.lhs, self.rhs, self.tolerance
        )
    }
}
