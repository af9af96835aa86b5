use std::fmt;

use serde::Serialize;

/// Outcome of a validation pass. Defects are data, not failures.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub defects: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.defects.is_empty()
    }

    pub(crate) fn push(&mut self, defect: impl Into<String>) {
        self.defects.push(defect.into());
    }

    pub(crate) fn extend(&mut self, other: ValidationReport) {
        self.defects.extend(other.defects);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, d) in self.defects.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "defect: {d}")?;
        }
        Ok(())
    }
}
