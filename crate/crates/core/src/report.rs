//! Report objects shared by the verification suites and the CLI. Text and
//! structured renderings are generated from the same data, so they cannot
//! diverge.

use serde::{Deserialize, Serialize};

/// One pass/fail line of a suite.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CheckLine {
    pub key: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckLine {
    pub fn new(key: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        CheckLine {
            key: key.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Aggregated result of a verification suite.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SuiteReport {
    pub title: String,
    pub checks: Vec<CheckLine>,
    pub notes: Vec<String>,
    /// Work items skipped with the reason (typically cap refusals).
    pub skipped: Vec<String>,
}

impl SuiteReport {
    pub fn new(title: impl Into<String>) -> Self {
        SuiteReport {
            title: title.into(),
            checks: Vec::new(),
            notes: Vec::new(),
            skipped: Vec::new(),
        }
    }

    pub fn check(&mut self, key: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckLine::new(key, pass, detail));
    }

    pub fn push(&mut self, line: CheckLine) {
        self.checks.push(line);
    }

    pub fn extend(&mut self, lines: impl IntoIterator<Item = CheckLine>) {
        self.checks.extend(lines);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn skip(&mut self, reason: impl Into<String>) {
        self.skipped.push(reason.into());
    }

    pub fn passed_count(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failed_count(&self) -> usize {
        self.checks.len() - self.passed_count()
    }

    pub fn all_passed(&self) -> bool {
        self.failed_count() == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Merges another report in as a sub-section.
    pub fn absorb(&mut self, other: SuiteReport) {
        for line in other.checks {
            self.checks.push(CheckLine {
                key: format!("{}: {}", other.title, line.key),
                ..line
            });
        }
        for note in other.notes {
            self.notes.push(format!("{}: {note}", other.title));
        }
        for s in other.skipped {
            self.skipped.push(format!("{}: {s}", other.title));
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== {} ==\n", self.title));
        for line in &self.checks {
            out.push_str(&format!(
                "[{}] {}{}\n",
                if line.pass { "pass" } else { "FAIL" },
                line.key,
                if line.detail.is_empty() {
                    String::new()
                } else {
                    format!(" — {}", line.detail)
                }
            ));
        }
        for s in &self.skipped {
            out.push_str(&format!("[skip] {s}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} skipped\n",
            self.passed_count(),
            self.failed_count(),
            self.skipped.len()
        ));
        out
    }
}
