use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("realization {realization} has zero probability under the given prior and signal")]
    ZeroProbabilityRealization { realization: u8 },

    #[error("belief {0} is outside [0, 1]")]
    BeliefOutOfRange(f64),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("prior {prior} is not bracketed by posteriors [{low}, {high}]")]
    InvalidBracket { prior: f64, low: f64, high: f64 },

    #[error("prior {0} is degenerate; only the uninformative split is Bayes-plausible")]
    DegeneratePrior(f64),

    #[error("payoff matrix violates the single-crossing assumption: {0}")]
    AssumptionViolated(String),

    #[error("principal and agent cutoffs coincide; there is no disagreement interval")]
    AlignedPreferences,

    #[error("weak signal is not Blackwell-dominated by the strong signal")]
    NotBlackwellOrdered,

    #[error("new preferences are not more misaligned: {0}")]
    NotMoreMisaligned(String),

    #[error("payoff edit does not match declared case {case}: {reason}")]
    CaseMismatch { case: u8, reason: String },

    #[error("points are not sorted by belief")]
    UnsortedPoints,

    #[error("sample count {got} is below the minimum {min}")]
    InvalidSampleCount { got: usize, min: usize },

    #[error("invalid scenario:\n{0}")]
    InvalidScenario(ValidationReport),
}

pub type Result<T> = std::result::Result<T, Error>;
