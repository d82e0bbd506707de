//! Outcome type shared by the `verify_*` operations.
//!
//! A report is a flat list of named checks. A report passes iff every check
//! passed; the first failing check carries enough detail to reproduce the
//! violation (the offending sample, rendered exactly).

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn new() -> Self {
        VerifyReport { checks: Vec::new() }
    }

    pub fn record(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn pass(&mut self, name: &str, detail: impl Into<String>) {
        self.record(name, true, detail);
    }

    pub fn fail(&mut self, name: &str, detail: impl Into<String>) {
        self.record(name, false, detail);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// Folds another report into this one, prefixing its check names.
    pub fn absorb(&mut self, prefix: &str, other: VerifyReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
    }
}
