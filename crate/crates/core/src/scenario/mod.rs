//! Scenario files, the runner, and the report format.

mod report;
mod run;
mod spec;

pub use report::{to_report_string, write_report, ScenarioResult, ARTIFACT, ARTIFACT_VERSION};
pub use run::run_scenario;
pub use spec::{
    parse_scenario, BoxSpec, ScenarioSpec, StateSpec, DEFAULT_TRIALS, FORMAT_VERSION, SCENARIOS,
};

use serde::Serialize;

/// Structured error for anything a user can feed the runner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: String,
    /// JSON pointer into the scenario, `line L, column C`, or a file path.
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: &str, location: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.to_string(),
            location: location.to_string(),
            message: message.into(),
        }
    }

    pub fn at(mut self, location: &str) -> Self {
        if self.location.is_empty() {
            self.location = location.to_string();
        }
        self
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.location.is_empty() {
            write!(f, "{}: {}", self.kind, self.message)
        } else {
            write!(f, "{} at {}: {}", self.kind, self.location, self.message)
        }
    }
}

impl std::error::Error for Diagnostic {}
