//! Machine-readable verification reports.

use std::fmt;

use serde::Serialize;

use crate::symmetry::ConventionProfile;

/// Outcome of one verification sweep.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub check: String,
    pub n: usize,
    pub tested: u64,
    pub failed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<ConventionProfile>,
}

impl VerifyReport {
    pub fn new(check: impl Into<String>, n: usize) -> Self {
        Self {
            check: check.into(),
            n,
            tested: 0,
            failed: 0,
            first_counterexample: None,
            profile: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: n={} tested={} failed={}{}",
            self.check,
            self.n,
            self.tested,
            self.failed,
            match &self.first_counterexample {
                Some(ce) => format!(" first_counterexample={ce}"),
                None => String::new(),
            }
        )
    }
}
