//! Itemized pass/fail reports for the library's verification routines.
//!
//! Several operations in this crate exist to *check* a structural property
//! rather than to compute a value (orbit/stabilizer identities, action
//! equivalences, known counterexamples).  They all return a [`CheckReport`]:
//! a named list of sub-checks, each recording what was expected and what was
//! actually computed, so a failure is diagnosable without re-running anything.

use serde::{Deserialize, Serialize};

/// One verified fact: a label, the expected value, the computed value, and
/// whether they agreed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckItem {
    pub label: String,
    pub passed: bool,
    pub expected: String,
    pub computed: String,
}

impl CheckItem {
    /// Record a comparison of two displayable values.
    pub fn compare<T: PartialEq + std::fmt::Debug>(label: &str, expected: T, computed: T) -> Self {
        CheckItem {
            label: label.to_string(),
            passed: expected == computed,
            expected: format!("{expected:?}"),
            computed: format!("{computed:?}"),
        }
    }

    /// Record a bare condition that must hold.
    pub fn require(label: &str, holds: bool) -> Self {
        CheckItem {
            label: label.to_string(),
            passed: holds,
            expected: "true".to_string(),
            computed: format!("{holds}"),
        }
    }
}

/// A named bundle of [`CheckItem`]s.  `passed` is the conjunction of all
/// items.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn new(name: &str, items: Vec<CheckItem>) -> Self {
        let passed = items.iter().all(|it| it.passed);
        CheckReport { name: name.to_string(), passed, items }
    }

    /// The labels of every failed item, for terse diagnostics.
    pub fn failures(&self) -> Vec<&str> {
        self.items.iter().filter(|it| !it.passed).map(|it| it.label.as_str()).collect()
    }
}
