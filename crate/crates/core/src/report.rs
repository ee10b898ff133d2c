use std::fmt;

use serde::{Deserialize, Serialize};

/// One failed law instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Which law, e.g. `identity`, `associativity`, `naturality`, `coherence_1`.
    pub law: String,
    /// The ids the law was instantiated at.
    pub at: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Violation {
    pub fn new(law: impl Into<String>, at: Vec<String>) -> Self {
        Violation {
            law: law.into(),
            at,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({})", self.law, self.at.join(", "))?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

/// Result of checking a value against the laws of its kind.
///
/// Structural problems (dangling references, tables that cannot even be
/// read) are kept apart from law violations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub structural: Vec<String>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_valid(&self) -> bool {
        self.structural.is_empty() && self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn structural(&mut self, msg: impl Into<String>) {
        self.structural.push(msg.into());
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.structural.extend(other.structural);
        self.violations.extend(other.violations);
    }

    /// Prefix every entry with a context label, used when nesting reports.
    pub fn scoped(mut self, scope: &str) -> Self {
        for s in &mut self.structural {
            *s = format!("{scope}: {s}");
        }
        for v in &mut self.violations {
            v.law = format!("{scope}.{}", v.law);
        }
        self
    }

    pub fn violations_of<'a>(&'a self, law: &'a str) -> impl Iterator<Item = &'a Violation> + 'a {
        self.violations.iter().filter(move |v| v.law == law)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let mut first = true;
        for s in &self.structural {
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            write!(f, "{s}")?;
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i >= 8 {
                write!(f, "; ... {} more", self.violations.len() - 8)?;
                break;
            }
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
