//! Report document: a flat, ordered list of claim entries. Serialization
//! is fully determined by the config and seed; nothing time- or
//! machine-dependent enters the document.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ReportEntry {
    /// Stable claim identifier, `suite.check` shaped.
    pub claim: String,
    /// What the check asserts, in plain language.
    pub statement: String,
    /// "pass", "fail" or "unsupported".
    pub status: String,
    /// Witness values, counts and bounds backing the status.
    pub evidence: String,
    /// Reproducer seed, present on failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ReportEntry {
    pub fn checked(
        claim: impl Into<String>,
        statement: impl Into<String>,
        passed: bool,
        evidence: impl Into<String>,
        seed: u64,
    ) -> Self {
        ReportEntry {
            claim: claim.into(),
            statement: statement.into(),
            status: if passed { "pass" } else { "fail" }.into(),
            evidence: evidence.into(),
            seed: (!passed).then_some(seed),
        }
    }

    pub fn unsupported(
        claim: impl Into<String>,
        statement: impl Into<String>,
        reason: impl Into<String>,
    ) -> Self {
        ReportEntry {
            claim: claim.into(),
            statement: statement.into(),
            status: "unsupported".into(),
            evidence: reason.into(),
            seed: None,
        }
    }
}

/// Folds a library verification report into entries, one per named check.
pub fn from_verify(
    prefix: &str,
    statement: &str,
    report: &orekit_core::VerifyReport,
    seed: u64,
) -> Vec<ReportEntry> {
    report
        .checks
        .iter()
        .map(|c| {
            ReportEntry::checked(
                format!("{prefix}.{}", c.name),
                statement.to_string(),
                c.passed,
                c.detail.clone(),
                seed,
            )
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct ReportDoc {
    pub scenario: String,
    pub seed: u64,
    pub entries: Vec<ReportEntry>,
    pub failures: usize,
}

impl ReportDoc {
    pub fn new(scenario: String, seed: u64, entries: Vec<ReportEntry>) -> Self {
        let failures = entries.iter().filter(|e| e.status == "fail").count();
        ReportDoc {
            scenario,
            seed,
            entries,
            failures,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}
