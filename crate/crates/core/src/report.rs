use serde::{Deserialize, Serialize};

/// Outcome of a single numerical check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    /// Value produced by the path under test.
    pub computed: f64,
    /// Independent reference value, when the check has one.
    pub reference: Option<f64>,
    /// Signed discrepancy `computed - reference` (or the check's own margin).
    pub discrepancy: f64,
    /// Combined standard error for Monte Carlo checks.
    pub stderr: Option<f64>,
    /// Acceptance threshold applied to `discrepancy`.
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, passed: bool, computed: f64) -> Self {
        Self {
            check: check.into(),
            passed,
            computed,
            reference: None,
            discrepancy: 0.0,
            stderr: None,
            tolerance: 0.0,
            seed: None,
            notes: Vec::new(),
        }
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self.discrepancy = self.computed - reference;
        self
    }

    pub fn with_discrepancy(mut self, discrepancy: f64) -> Self {
        self.discrepancy = discrepancy;
        self
    }

    pub fn with_stderr(mut self, stderr: f64) -> Self {
        self.stderr = Some(stderr);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}
