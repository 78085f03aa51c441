//! Outcome of one verification run.

use std::collections::BTreeMap;
use std::fmt;

/// Failures kept per report; the total is still counted.
pub const MAX_RECORDED_FAILURES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    /// No admissible parameter point was checked.
    Vacuous,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Vacuous => "vacuous",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One failed check: the parameter point, the coefficient index (or the
/// offending non-integral index) and the observed value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub params: BTreeMap<String, String>,
    pub index: String,
    pub residue: String,
}

impl Failure {
    pub fn new(params: &[(&str, String)], index: impl ToString, residue: impl ToString) -> Self {
        Failure {
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            index: index.to_string(),
            residue: residue.to_string(),
        }
    }
}

/// Status is derived, never set: any failure means `Fail`, zero checks
/// means `Vacuous`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub id: String,
    pub kind: String,
    pub checks_run: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    pub notes: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn new(id: impl Into<String>, kind: impl Into<String>) -> Self {
        VerificationReport {
            id: id.into(),
            kind: kind.into(),
            checks_run: 0,
            failure_count: 0,
            failures: Vec::new(),
            notes: BTreeMap::new(),
        }
    }

    pub fn status(&self) -> Status {
        if self.failure_count > 0 {
            Status::Fail
        } else if self.checks_run == 0 {
            Status::Vacuous
        } else {
            Status::Pass
        }
    }

    /// Records one check and whether it held.
    pub fn check(&mut self, ok: bool, failure: impl FnOnce() -> Failure) {
        self.checks_run += 1;
        if !ok {
            self.fail(failure());
        }
    }

    /// Records a failure that is not tied to a coefficient comparison (an
    /// integrality violation, say).
    pub fn fail(&mut self, failure: Failure) {
        self.failure_count += 1;
        if self.failures.len() < MAX_RECORDED_FAILURES {
            self.failures.push(failure);
        }
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.notes.insert(key.into(), value.to_string());
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks_run += other.checks_run;
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < MAX_RECORDED_FAILURES {
                self.failures.push(f);
            }
        }
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<24} {:<8} checks={} failures={}",
            self.id,
            self.status(),
            self.checks_run,
            self.failure_count
        )
    }
}
