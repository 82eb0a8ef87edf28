//! Public-signal design when a principal may delegate a binary decision to a
//! privately informed, misaligned agent.
//!
//! Everything is generic over [`Scalar`]: `f64`, `f32` and the exact
//! [`Rational`] type. Aliases for the common instantiations live here.

pub mod delegation;
pub mod design;
pub mod error;
pub mod model;
pub mod oracle;
pub mod piecewise;
pub mod policy;
pub mod sampling;
pub mod scalar;

pub use delegation::{
    compare_agent_informativeness, compare_misalignment, delegation_stage_payoff,
    exante_delegation_payoff, final_posteriors, find_informativeness_paradox, necessary_condition,
    optimal_delegation, principal_shift_comparison, strict_delegation, Comparison,
    DelegationDecision, ShiftCase,
};
pub use design::{
    breakpoints, convexifiable, design_report, h_piecewise, intermediate_slope, optimal_design,
    rho, DesignRegime, DesignReport, DesignSolution, Discontinuity, PiecewiseH,
};
pub use error::{Error, Result};
pub use model::{
    action_payoff, agent_action, blackwell_leq, cutoff, delegation_envelope, disagreement_interval,
    non_delegation_envelope, posteriors_of_signal, principal_action, principal_preferred_action,
    signal_from_posteriors, update_belief, validate_scenario, Action, Belief, BinarySignal, Bit,
    BlackwellConstraint, ConstraintDraft, Issue, Line, PayoffMatrix, Player, PosteriorPair,
    Preferences, Realization, Scenario, ScenarioDraft, ValidationReport,
};
pub use piecewise::{Breakpoint, PiecewiseLinear, Segment};
pub use policy::{
    evaluate_regime, find_delegation_loss_witness, find_maximal_signal_loss_witness, regime_report,
    NoWitness, PolicyRegime, RegimeReport, Witness, WitnessSearch,
};
pub use scalar::{Rational, Scalar};

pub type BeliefF64 = Belief<f64>;
pub type SignalF64 = BinarySignal<f64>;
pub type PreferencesF64 = Preferences<f64>;
pub type ScenarioF64 = Scenario<f64>;
pub type DesignSolutionF64 = DesignSolution<f64>;

pub type BeliefF32 = Belief<f32>;
pub type ScenarioF32 = Scenario<f32>;

pub type ExactBelief = Belief<Rational>;
pub type ExactSignal = BinarySignal<Rational>;
pub type ExactPreferences = Preferences<Rational>;
pub type ExactScenario = Scenario<Rational>;
pub type ExactDesignSolution = DesignSolution<Rational>;
