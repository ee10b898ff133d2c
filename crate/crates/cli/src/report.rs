use kleislikit::{Error, ValidationReport, Violation};
use serde::Serialize;
use serde_json::Value;

/// Success, even when the condition under test is false.
pub const EXIT_OK: u8 = 0;
/// The input parsed but violates the laws of its kind.
pub const EXIT_VIOLATIONS: u8 = 1;
/// Unreadable input, dangling ids, or a size guard refusal.
pub const EXIT_STRUCTURAL: u8 = 2;
/// Independent characterisations disagreed, or the engine caught itself
/// contradicting a result it relies on.
pub const EXIT_DEFECT: u8 = 3;

/// The JSON document every subcommand prints on standard output.
/// `schema/report.schema.json` describes it.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    /// The answer of the check, or `null` for constructions.
    pub condition: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Vec<bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    pub witnesses: Vec<Value>,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub exit: u8,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            condition: None,
            conditions: None,
            agree: None,
            witnesses: Vec::new(),
            violations: Vec::new(),
            error: None,
            exit: EXIT_OK,
        }
    }

    pub fn condition(mut self, holds: bool) -> Self {
        self.condition = Some(holds);
        self
    }

    pub fn witness(mut self, w: impl Serialize) -> Self {
        self.witnesses
            .push(serde_json::to_value(w).expect("witnesses serialize"));
        self
    }

    /// Record a profile; disagreement is a defect.
    pub fn profile(mut self, conditions: &[bool]) -> Self {
        let agree = conditions.iter().all(|&c| c == conditions[0]);
        self.condition = Some(conditions[0]);
        self.conditions = Some(conditions.to_vec());
        self.agree = Some(agree);
        if !agree {
            self.exit = self.exit.max(EXIT_DEFECT);
            self.error = Some("independent characterisations disagree".into());
        }
        self
    }

    /// Attach law violations; any violation raises the exit code to 1.
    pub fn violations(mut self, r: ValidationReport) -> Self {
        for s in r.structural {
            self.violations.push(Violation::new("structure", vec![]).with_detail(s));
            self.exit = self.exit.max(EXIT_STRUCTURAL);
        }
        if !r.violations.is_empty() {
            self.exit = self.exit.max(EXIT_VIOLATIONS);
        }
        self.violations.extend(r.violations);
        self
    }

    /// Turn an engine error into a report with the matching exit code.
    pub fn failed(command: &'static str, e: Error) -> Self {
        let mut r = Report::new(command);
        r.error = Some(e.to_string());
        match e {
            Error::Invalid { report, .. } => {
                r = r.violations(report);
                r.exit = r.exit.max(EXIT_VIOLATIONS);
            }
            Error::Defect(_) => r.exit = EXIT_DEFECT,
            _ => r.exit = EXIT_STRUCTURAL,
        }
        r
    }

    pub fn defect(mut self, msg: impl Into<String>) -> Self {
        self.error = Some(msg.into());
        self.exit = self.exit.max(EXIT_DEFECT);
        self
    }
}
