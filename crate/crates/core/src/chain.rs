//! Numeric records of inequality chains: each step is a pair of real numbers
//! that must satisfy `lhs <= rhs` (or `lhs = rhs`) up to a relative tolerance.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Eq,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Le => "le",
            Relation::Eq => "eq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
}

impl ChainStep {
    pub fn le(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            relation: Relation::Le,
        }
    }

    pub fn eq(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            relation: Relation::Eq,
        }
    }

    fn scale(&self) -> f64 {
        match self.relation {
            Relation::Le => self.lhs.abs().max(self.rhs.abs()),
            // equalities between quantities near zero are judged absolutely
            Relation::Eq => self.lhs.abs().max(self.rhs.abs()).max(1.0),
        }
    }

    /// `(rhs - lhs) / scale` for inequalities, `-|rhs - lhs| / scale` for
    /// equalities. Nonnegative means the step holds exactly.
    pub fn relative_slack(&self) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            return 0.0;
        }
        match self.relation {
            Relation::Le => (self.rhs - self.lhs) / s,
            Relation::Eq => -(self.rhs - self.lhs).abs() / s,
        }
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.lhs.is_finite() && self.rhs.is_finite() && self.relative_slack() >= -rel_tol
    }
}

/// An ordered list of steps for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// Human-readable parameters, enough to reproduce the run.
    pub context: String,
    pub steps: Vec<ChainStep>,
}

impl ChainReport {
    pub fn new(context: impl Into<String>) -> Self {
        Self {
            context: context.into(),
            steps: Vec::new(),
        }
    }

    pub fn push(&mut self, step: ChainStep) {
        self.steps.push(step);
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.steps.iter().all(|s| s.holds(rel_tol))
    }

    pub fn failures(&self, rel_tol: f64) -> impl Iterator<Item = &ChainStep> {
        self.steps.iter().filter(move |s| !s.holds(rel_tol))
    }

    pub fn step(&self, label: &str) -> Option<&ChainStep> {
        self.steps.iter().find(|s| s.label == label)
    }

    pub fn min_slack(&self) -> f64 {
        self.steps
            .iter()
            .map(ChainStep::relative_slack)
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_semantics() {
        assert!(ChainStep::le("a", 1.0, 2.0).holds(0.0));
        assert!(!ChainStep::le("a", 2.0, 1.0).holds(1e-8));
        assert!(ChainStep::le("a", 1.0 + 1e-12, 1.0).holds(1e-8));
        assert!(ChainStep::le("zero", 0.0, 0.0).holds(0.0));
        assert!(ChainStep::eq("e", 1e-14, 0.0).holds(1e-10));
        assert!(!ChainStep::eq("e", 3.0, 3.1).holds(1e-8));
        assert!(!ChainStep::le("nan", f64::NAN, 1.0).holds(1.0));
    }
}
