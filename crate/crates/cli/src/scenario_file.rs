//! TOML scenario files.
//!
//! ```toml
//! prior = 0.5
//!
//! [principal]
//! r00 = 1.0
//! r01 = 0.0
//! r10 = 0.0
//! r11 = 1.0
//!
//! [agent]
//! v00 = 1.25
//! v01 = -0.25
//! v10 = 0.25
//! v11 = 0.75
//!
//! [agent_signal]
//! q0 = 0.8
//! q1 = 0.8
//!
//! [constraint]
//! posteriors = [0.35, 0.55]   # or: signal = [p0, p1]
//! ```

use std::fmt;
use std::path::Path;

use persuade_core::{
    BinarySignal, ConstraintDraft, Issue, PayoffMatrix, Preferences, Scenario, ScenarioDraft,
};
use serde::Deserialize;

/// Input the user can fix: unreadable or malformed files, invalid values,
/// bad flags. Maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

impl InputError {
    pub fn new(msg: impl Into<String>) -> Self {
        InputError(msg.into())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    prior: Option<f64>,
    principal: RawPrincipal,
    agent: RawAgent,
    agent_signal: RawSignal,
    constraint: Option<RawConstraint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrincipal {
    r00: f64,
    r01: f64,
    r10: f64,
    r11: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgent {
    v00: f64,
    v01: f64,
    v10: f64,
    v11: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignal {
    q0: f64,
    q1: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    posteriors: Option<[f64; 2]>,
    signal: Option<[f64; 2]>,
}

/// Parsed but not yet validated scenario. `prior` and `constraint` may be
/// absent for commands that do not need them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub prior: Option<f64>,
    pub principal: PayoffMatrix<f64>,
    pub agent: PayoffMatrix<f64>,
    pub agent_signal: (f64, f64),
    pub constraint: Option<ConstraintDraft<f64>>,
}

fn issue_text(issues: &[Issue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {}: {}", i.field(), i))
        .collect::<Vec<_>>()
        .join("\n")
}

impl ScenarioSpec {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| InputError::new(e.to_string()))?;
        let constraint = match raw.constraint {
            None => None,
            Some(RawConstraint {
                posteriors: Some([lo, hi]),
                signal: None,
            }) => Some(ConstraintDraft::Posteriors(lo, hi)),
            Some(RawConstraint {
                posteriors: None,
                signal: Some([p0, p1]),
            }) => Some(ConstraintDraft::Signal(p0, p1)),
            Some(_) => return Err(InputError::new(
                "constraint: give exactly one of `posteriors = [low, high]` or `signal = [p0, p1]`",
            )),
        };
        let p = raw.principal;
        let a = raw.agent;
        Ok(ScenarioSpec {
            prior: raw.prior,
            principal: PayoffMatrix::new(p.r00, p.r01, p.r10, p.r11),
            agent: PayoffMatrix::new(a.v00, a.v01, a.v10, a.v11),
            agent_signal: (raw.agent_signal.q0, raw.agent_signal.q1),
            constraint,
        })
    }

    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError::new(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| InputError::new(format!("{}: {e}", path.display())))
    }

    /// Draft with placeholders for the optional parts, used to validate the
    /// players and the agent signal alone.
    fn draft(&self) -> ScenarioDraft<f64> {
        let prior = self.prior.unwrap_or(0.5);
        ScenarioDraft {
            prior,
            principal: self.principal,
            agent: self.agent,
            agent_signal: self.agent_signal,
            constraint: self
                .constraint
                .unwrap_or(ConstraintDraft::Posteriors(prior, prior)),
        }
    }

    /// Preferences and agent signal; prior and constraint are ignored.
    pub fn players(&self) -> Result<(Preferences<f64>, BinarySignal<f64>), InputError> {
        let report = self.draft().validate();
        let relevant: Vec<Issue> = report
            .issues
            .into_iter()
            .filter(|i| matches!(i.field(), "principal" | "agent" | "agent_signal"))
            .collect();
        if !relevant.is_empty() {
            return Err(InputError::new(format!(
                "invalid scenario:\n{}",
                issue_text(&relevant)
            )));
        }
        let prefs = Preferences::new(self.principal, self.agent)
            .map_err(|e| InputError::new(e.to_string()))?;
        let signal = BinarySignal::new(self.agent_signal.0, self.agent_signal.1)
            .map_err(|e| InputError::new(format!("agent_signal: {e}")))?;
        Ok((prefs, signal))
    }

    pub fn scenario(&self) -> Result<Scenario<f64>, InputError> {
        let mut missing = Vec::new();
        if self.prior.is_none() {
            missing.push("  prior: missing");
        }
        if self.constraint.is_none() {
            missing.push("  constraint: missing");
        }
        if !missing.is_empty() {
            return Err(InputError::new(format!(
                "invalid scenario:\n{}",
                missing.join("\n")
            )));
        }
        let draft = self.draft();
        let report = draft.validate();
        if !report.is_ok() {
            return Err(InputError::new(format!(
                "invalid scenario:\n{}",
                issue_text(&report.issues)
            )));
        }
        draft.build().map_err(|e| InputError::new(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"
prior = 0.5
[principal]
r00 = 1.0
r01 = 0.0
r10 = 0.0
r11 = 1.0
[agent]
v00 = 1.25
v01 = -0.25
v10 = 0.25
v11 = 0.75
[agent_signal]
q0 = 0.8
q1 = 0.8
[constraint]
posteriors = [0.35, 0.55]
"#;

    #[test]
    fn parses_full_file() {
        let spec = ScenarioSpec::parse(REFERENCE).unwrap();
        let s = spec.scenario().unwrap();
        assert_eq!(s.prior.get(), 0.5);
        assert_eq!(s.constraint.max_high.get(), 0.55);
    }

    #[test]
    fn signal_constraint_converts_at_prior() {
        let text = REFERENCE.replace("posteriors = [0.35, 0.55]", "signal = [0.9, 0.9]");
        let s = ScenarioSpec::parse(&text).unwrap().scenario().unwrap();
        assert!((s.constraint.max_high.get() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn errors_name_fields() {
        let text = REFERENCE.replace("q1 = 0.8", "q1 = 0.1");
        let err = ScenarioSpec::parse(&text).unwrap().scenario().unwrap_err();
        assert!(err.0.contains("agent_signal"), "{err}");

        let text = REFERENCE.replace("r11 = 1.0", "r11 = \"x\"");
        let err = ScenarioSpec::parse(&text).unwrap_err();
        assert!(err.0.contains("line") && err.0.contains("r11"), "{err}");

        let text = REFERENCE.replace("posteriors = [0.35, 0.55]", "posteriors = [0.6, 0.7]");
        let err = ScenarioSpec::parse(&text).unwrap().scenario().unwrap_err();
        assert!(err.0.contains("constraint"), "{err}");
    }

    #[test]
    fn players_ignore_missing_prior() {
        let text = REFERENCE.replace("prior = 0.5", "");
        let spec = ScenarioSpec::parse(&text).unwrap();
        assert!(spec.players().is_ok());
        assert!(spec.scenario().unwrap_err().0.contains("prior: missing"));
    }
}
