//! Beliefs, binary signals, payoff matrices and the envelopes built on them.
//!
//! States, actions and signal realizations are all binary. A belief is the
//! probability of state 1. The agent's private signal is assumed to be
//! independent of the public signal conditional on the state, so the final
//! posterior is obtained by updating the interim posterior with the private
//! signal alone.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A binary outcome: an action, a signal realization, or a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Zero,
    One,
}

pub type Action = Bit;
pub type Realization = Bit;

impl Bit {
    pub fn index(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Probability that the state is 1.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Belief<S>(S);

impl<S: Scalar> Belief<S> {
    pub fn new(value: S) -> Result<Self> {
        if value < S::zero() || value > S::one() {
            return Err(Error::BeliefOutOfRange(value.to_f64_lossy()));
        }
        Ok(Belief(value))
    }

    /// Clamps into `[0, 1]`; for values produced by Bayes' rule that may sit an
    /// ulp outside the unit interval.
    pub fn clamped(value: S) -> Self {
        Belief(value.clamp_unit())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Belief::clamped(S::ratio(num, den))
    }

    pub fn get(self) -> S {
        self.0
    }

    pub fn is_degenerate(self) -> bool {
        self.0.approx_eq(S::zero()) || self.0.approx_eq(S::one())
    }
}

impl<S: Scalar> fmt::Display for Belief<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An affine function of belief, `intercept + slope * belief`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line<S> {
    pub intercept: S,
    pub slope: S,
}

impl<S: Scalar> Line<S> {
    pub fn eval(&self, x: S) -> S {
        self.intercept + self.slope * x
    }

    /// Line through `(0, at_zero)` and `(1, at_one)`.
    pub fn through_unit(at_zero: S, at_one: S) -> Self {
        Line {
            intercept: at_zero,
            slope: at_one - at_zero,
        }
    }

    /// Belief where the two lines cross, if they are not parallel.
    pub fn crossing(&self, other: &Line<S>) -> Option<S> {
        let ds = self.slope - other.slope;
        if ds == S::zero() {
            return None;
        }
        Some((other.intercept - self.intercept) / ds)
    }

    pub fn approx_eq(&self, other: &Line<S>) -> bool {
        self.intercept.approx_eq(other.intercept) && self.slope.approx_eq(other.slope)
    }
}

/// Payoffs indexed `u{state}{action}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PayoffMatrix<S> {
    pub u00: S,
    pub u01: S,
    pub u10: S,
    pub u11: S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixViolation {
    /// One action is weakly better in both states.
    DominantAction(Action),
    /// Both inequalities reversed: the player wants to mismatch the state.
    StateMismatching,
}

impl<S: Scalar> PayoffMatrix<S> {
    pub fn new(u00: S, u01: S, u10: S, u11: S) -> Self {
        PayoffMatrix { u00, u01, u10, u11 }
    }

    pub fn from_f64(u: [f64; 4]) -> Self {
        PayoffMatrix::new(
            S::from_f64_lossy(u[0]),
            S::from_f64_lossy(u[1]),
            S::from_f64_lossy(u[2]),
            S::from_f64_lossy(u[3]),
        )
    }

    pub fn get(&self, state: Bit, action: Action) -> S {
        match (state, action) {
            (Bit::Zero, Bit::Zero) => self.u00,
            (Bit::Zero, Bit::One) => self.u01,
            (Bit::One, Bit::Zero) => self.u10,
            (Bit::One, Bit::One) => self.u11,
        }
    }

    pub fn check(&self) -> Option<MatrixViolation> {
        let gain0 = self.u00 > self.u01;
        let gain1 = self.u11 > self.u10;
        match (gain0, gain1) {
            (true, true) => None,
            (true, false) => Some(MatrixViolation::DominantAction(Bit::Zero)),
            (false, true) => Some(MatrixViolation::DominantAction(Bit::One)),
            (false, false) => Some(MatrixViolation::StateMismatching),
        }
    }

    /// Payoff of `action` as a function of belief.
    pub fn line(&self, action: Action) -> Line<S> {
        match action {
            Bit::Zero => Line::through_unit(self.u00, self.u10),
            Bit::One => Line::through_unit(self.u01, self.u11),
        }
    }

    /// Largest absolute difference between any two entries.
    pub fn spread(&self) -> S {
        let v = [self.u00, self.u01, self.u10, self.u11];
        let hi = v.iter().copied().fold(v[0], S::max_of);
        let lo = v.iter().copied().fold(v[0], S::min_of);
        hi - lo
    }
}

/// Belief at which the player switches from action 0 to action 1.
pub fn cutoff<S: Scalar>(matrix: &PayoffMatrix<S>) -> Result<Belief<S>> {
    let gain0 = matrix.u00 - matrix.u01;
    let gain1 = matrix.u11 - matrix.u10;
    if gain0 <= S::zero() || gain1 <= S::zero() {
        return Err(Error::AssumptionViolated(format!(
            "u00 - u01 = {gain0}, u11 - u10 = {gain1}; both must be positive"
        )));
    }
    Ok(Belief::clamped(gain0 / (gain0 + gain1)))
}

pub fn action_payoff<S: Scalar>(matrix: &PayoffMatrix<S>, action: Action, belief: Belief<S>) -> S {
    let mu = belief.get();
    (S::one() - mu) * matrix.get(Bit::Zero, action) + mu * matrix.get(Bit::One, action)
}

/// Conditional accuracies of a binary signal: `t0 = Pr(s=0 | state 0)`,
/// `t1 = Pr(s=1 | state 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinarySignal<S> {
    t0: S,
    t1: S,
}

impl<S: Scalar> BinarySignal<S> {
    /// Accepts `t0 + t1 >= 1`. Any pair with `t0 + t1 = 1` carries no
    /// information and is normalized to `(1/2, 1/2)`.
    pub fn new(t0: S, t1: S) -> Result<Self> {
        let unit = |t: S| t >= S::zero() && t <= S::one();
        if !unit(t0) || !unit(t1) {
            return Err(Error::InvalidSignal(format!(
                "accuracies ({t0}, {t1}) must lie in [0, 1]"
            )));
        }
        let sum = t0 + t1;
        if sum.approx_eq(S::one()) {
            return Ok(Self::uninformative());
        }
        if sum < S::one() {
            return Err(Error::InvalidSignal(format!(
                "t0 + t1 = {sum} < 1; realization 1 would be bad news"
            )));
        }
        Ok(BinarySignal { t0, t1 })
    }

    pub fn symmetric(q: S) -> Result<Self> {
        Self::new(q, q)
    }

    pub fn uninformative() -> Self {
        BinarySignal {
            t0: S::half(),
            t1: S::half(),
        }
    }

    pub fn t0(&self) -> S {
        self.t0
    }

    pub fn t1(&self) -> S {
        self.t1
    }

    pub fn is_uninformative(&self) -> bool {
        (self.t0 + self.t1).approx_eq(S::one())
    }

    /// Strictly informative: `t0 + t1 > 1` beyond tolerance.
    pub fn is_informative(&self) -> bool {
        (self.t0 + self.t1).definitely_gt(S::one())
    }

    /// `Pr(s | state)`.
    pub fn likelihood(&self, realization: Realization, state: Bit) -> S {
        match (state, realization) {
            (Bit::Zero, Bit::Zero) => self.t0,
            (Bit::Zero, Bit::One) => S::one() - self.t0,
            (Bit::One, Bit::Zero) => S::one() - self.t1,
            (Bit::One, Bit::One) => self.t1,
        }
    }

    /// `Pr(s)` under `prior`.
    pub fn realization_prob(&self, prior: Belief<S>, realization: Realization) -> S {
        let mu = prior.get();
        (S::one() - mu) * self.likelihood(realization, Bit::Zero)
            + mu * self.likelihood(realization, Bit::One)
    }
}

/// Two posteriors with the probability of the high one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PosteriorPair<S> {
    pub low: Belief<S>,
    pub high: Belief<S>,
    pub prob_high: S,
}

impl<S: Scalar> PosteriorPair<S> {
    /// Builds the Bayes-plausible pair around `prior`; `low = high` collapses
    /// to the degenerate split at the prior.
    pub fn around(prior: Belief<S>, low: Belief<S>, high: Belief<S>) -> Result<Self> {
        let (mu, lo, hi) = (prior.get(), low.get(), high.get());
        if lo.definitely_gt(mu) || mu.definitely_gt(hi) {
            return Err(bracket_error(prior, low, high));
        }
        if hi - lo <= S::tolerance() || hi <= lo {
            return Ok(PosteriorPair {
                low: prior,
                high: prior,
                prob_high: S::zero(),
            });
        }
        let prob_high = ((mu - lo) / (hi - lo)).clamp_unit();
        Ok(PosteriorPair {
            low,
            high,
            prob_high,
        })
    }

    /// Mean of the posteriors; equals the prior for Bayes-plausible pairs.
    pub fn mean(&self) -> S {
        self.prob_high * self.high.get() + (S::one() - self.prob_high) * self.low.get()
    }

    pub fn spread(&self) -> S {
        self.high.get() - self.low.get()
    }

    /// Expectation of `f` over the two posteriors.
    pub fn expect(&self, mut f: impl FnMut(Belief<S>) -> S) -> S {
        let p = self.prob_high;
        if p == S::zero() {
            return f(self.low);
        }
        if p == S::one() {
            return f(self.high);
        }
        p * f(self.high) + (S::one() - p) * f(self.low)
    }
}

fn bracket_error<S: Scalar>(prior: Belief<S>, low: Belief<S>, high: Belief<S>) -> Error {
    Error::InvalidBracket {
        prior: prior.get().to_f64_lossy(),
        low: low.get().to_f64_lossy(),
        high: high.get().to_f64_lossy(),
    }
}

/// Bayes posterior after observing `realization`.
pub fn update_belief<S: Scalar>(
    prior: Belief<S>,
    signal: &BinarySignal<S>,
    realization: Realization,
) -> Result<Belief<S>> {
    let mu = prior.get();
    let joint_one = mu * signal.likelihood(realization, Bit::One);
    let total = signal.realization_prob(prior, realization);
    if total <= S::zero() {
        return Err(Error::ZeroProbabilityRealization {
            realization: realization.index(),
        });
    }
    Ok(Belief::clamped(joint_one / total))
}

/// Both posteriors of `signal` at `prior`. A realization with zero probability
/// leaves its posterior at the prior.
pub fn posteriors_of_signal<S: Scalar>(
    prior: Belief<S>,
    signal: &BinarySignal<S>,
) -> PosteriorPair<S> {
    let low = update_belief(prior, signal, Bit::Zero).unwrap_or(prior);
    let high = update_belief(prior, signal, Bit::One).unwrap_or(prior);
    PosteriorPair {
        low,
        high,
        prob_high: signal.realization_prob(prior, Bit::One).clamp_unit(),
    }
}

/// Inverse of [`posteriors_of_signal`]: the signal that splits `prior` into
/// `low` and `high`.
pub fn signal_from_posteriors<S: Scalar>(
    prior: Belief<S>,
    low: Belief<S>,
    high: Belief<S>,
) -> Result<BinarySignal<S>> {
    let (mu, lo, hi) = (prior.get(), low.get(), high.get());
    if lo.definitely_gt(mu) || mu.definitely_gt(hi) {
        return Err(bracket_error(prior, low, high));
    }
    if (hi - lo) <= S::tolerance() {
        return Ok(BinarySignal::uninformative());
    }
    if prior.is_degenerate() {
        return Err(Error::DegeneratePrior(mu.to_f64_lossy()));
    }
    let w = ((mu - lo) / (hi - lo)).clamp_unit();
    let t1 = (w * hi / mu).clamp_unit();
    let t0 = ((S::one() - w) * (S::one() - lo) / (S::one() - mu)).clamp_unit();
    BinarySignal::new(t0, t1)
}

/// True iff the posterior interval of `a` lies inside that of `b` at `prior`.
pub fn blackwell_leq<S: Scalar>(
    a: &BinarySignal<S>,
    b: &BinarySignal<S>,
    prior: Belief<S>,
) -> bool {
    let pa = posteriors_of_signal(prior, a);
    let pb = posteriors_of_signal(prior, b);
    !pb.low.get().definitely_gt(pa.low.get()) && !pa.high.get().definitely_gt(pb.high.get())
}

/// Principal and agent payoff matrices, both satisfying single crossing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Preferences<S> {
    principal: PayoffMatrix<S>,
    agent: PayoffMatrix<S>,
    principal_cutoff: Belief<S>,
    agent_cutoff: Belief<S>,
}

impl<S: Scalar> Preferences<S> {
    pub fn new(principal: PayoffMatrix<S>, agent: PayoffMatrix<S>) -> Result<Self> {
        let principal_cutoff =
            cutoff(&principal).map_err(|e| Error::AssumptionViolated(format!("principal: {e}")))?;
        let agent_cutoff =
            cutoff(&agent).map_err(|e| Error::AssumptionViolated(format!("agent: {e}")))?;
        Ok(Preferences {
            principal,
            agent,
            principal_cutoff,
            agent_cutoff,
        })
    }

    pub fn principal(&self) -> &PayoffMatrix<S> {
        &self.principal
    }

    pub fn agent(&self) -> &PayoffMatrix<S> {
        &self.agent
    }

    pub fn principal_cutoff(&self) -> Belief<S> {
        self.principal_cutoff
    }

    pub fn agent_cutoff(&self) -> Belief<S> {
        self.agent_cutoff
    }

    pub fn is_aligned(&self) -> bool {
        self.principal_cutoff
            .get()
            .approx_eq(self.agent_cutoff.get())
    }

    /// Same principal, agent replaced.
    pub fn with_agent(&self, agent: PayoffMatrix<S>) -> Result<Self> {
        Preferences::new(self.principal, agent)
    }

    pub fn with_principal(&self, principal: PayoffMatrix<S>) -> Result<Self> {
        Preferences::new(principal, self.agent)
    }
}

pub fn disagreement_interval<S: Scalar>(prefs: &Preferences<S>) -> (Belief<S>, Belief<S>) {
    let (p, a) = (prefs.principal_cutoff(), prefs.agent_cutoff());
    if p <= a {
        (p, a)
    } else {
        (a, p)
    }
}

/// The action the principal takes on the wider belief range, if any.
pub fn principal_preferred_action<S: Scalar>(prefs: &Preferences<S>) -> Option<Action> {
    let (p, a) = (prefs.principal_cutoff().get(), prefs.agent_cutoff().get());
    if p.definitely_lt(a) {
        Some(Bit::One)
    } else if p.definitely_gt(a) {
        Some(Bit::Zero)
    } else {
        None
    }
}

/// The agent's choice at `belief`; indifference resolves to the
/// principal-preferred action (to action 1 when the players are aligned).
pub fn agent_action<S: Scalar>(prefs: &Preferences<S>, belief: Belief<S>) -> Action {
    let (mu, cut) = (belief.get(), prefs.agent_cutoff().get());
    if mu.definitely_lt(cut) {
        Bit::Zero
    } else if mu.definitely_gt(cut) {
        Bit::One
    } else {
        principal_preferred_action(prefs).unwrap_or(Bit::One)
    }
}

/// The principal's own best action; action 1 at her cutoff.
pub fn principal_action<S: Scalar>(prefs: &Preferences<S>, belief: Belief<S>) -> Action {
    if belief.get().definitely_lt(prefs.principal_cutoff().get()) {
        Bit::Zero
    } else {
        Bit::One
    }
}

/// `V_N`: the principal's payoff when she acts herself.
pub fn non_delegation_envelope<S: Scalar>(prefs: &Preferences<S>, belief: Belief<S>) -> S {
    let m = prefs.principal();
    action_payoff(m, Bit::Zero, belief).max_of(action_payoff(m, Bit::One, belief))
}

/// `V_D`: the principal's payoff when the agent acts at `belief`.
pub fn delegation_envelope<S: Scalar>(prefs: &Preferences<S>, belief: Belief<S>) -> S {
    action_payoff(prefs.principal(), agent_action(prefs, belief), belief)
}

/// Posterior bracket `[max_low, max_high]` of the most informative public
/// signal the designer may use, at the scenario prior.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlackwellConstraint<S> {
    pub max_low: Belief<S>,
    pub max_high: Belief<S>,
}

impl<S: Scalar> BlackwellConstraint<S> {
    pub fn new(max_low: Belief<S>, max_high: Belief<S>) -> Result<Self> {
        if max_low > max_high {
            return Err(Error::InvalidBracket {
                prior: f64::NAN,
                low: max_low.get().to_f64_lossy(),
                high: max_high.get().to_f64_lossy(),
            });
        }
        Ok(BlackwellConstraint { max_low, max_high })
    }

    /// Posteriors of the maximal signal `(p0, p1)` at `prior`.
    pub fn from_signal(prior: Belief<S>, signal: &BinarySignal<S>) -> Self {
        let pair = posteriors_of_signal(prior, signal);
        BlackwellConstraint {
            max_low: pair.low,
            max_high: pair.high,
        }
    }

    pub fn to_signal(&self, prior: Belief<S>) -> Result<BinarySignal<S>> {
        signal_from_posteriors(prior, self.max_low, self.max_high)
    }

    pub fn brackets(&self, prior: Belief<S>) -> bool {
        !self.max_low.get().definitely_gt(prior.get())
            && !prior.get().definitely_gt(self.max_high.get())
    }
}

/// A validated problem instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario<S> {
    pub prior: Belief<S>,
    pub prefs: Preferences<S>,
    pub agent_signal: BinarySignal<S>,
    pub constraint: BlackwellConstraint<S>,
}

impl<S: Scalar> Scenario<S> {
    pub fn new(
        prior: Belief<S>,
        prefs: Preferences<S>,
        agent_signal: BinarySignal<S>,
        constraint: BlackwellConstraint<S>,
    ) -> Result<Self> {
        let mut report = ValidationReport::default();
        if !agent_signal.is_informative() {
            report.issues.push(Issue::AgentSignalUninformative);
        }
        if !constraint.brackets(prior) {
            report.issues.push(Issue::ConstraintNotBracketing {
                prior: prior.get().to_f64_lossy(),
                low: constraint.max_low.get().to_f64_lossy(),
                high: constraint.max_high.get().to_f64_lossy(),
            });
        }
        if !report.is_ok() {
            return Err(Error::InvalidScenario(report));
        }
        Ok(Scenario {
            prior,
            prefs,
            agent_signal,
            constraint,
        })
    }

    /// Maximal-signal posteriors as a Bayes-plausible pair.
    pub fn maximal_split(&self) -> PosteriorPair<S> {
        PosteriorPair::around(
            self.prior,
            self.constraint.max_low,
            self.constraint.max_high,
        )
        .expect("scenario constraint brackets the prior")
    }

    pub fn with_prior_and_constraint(
        &self,
        prior: Belief<S>,
        constraint: BlackwellConstraint<S>,
    ) -> Result<Self> {
        Scenario::new(prior, self.prefs, self.agent_signal, constraint)
    }
}

/// Unvalidated scenario as read from a file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioDraft<S> {
    pub prior: S,
    pub principal: PayoffMatrix<S>,
    pub agent: PayoffMatrix<S>,
    pub agent_signal: (S, S),
    pub constraint: ConstraintDraft<S>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstraintDraft<S> {
    /// `[max_low, max_high]` posteriors at the prior.
    Posteriors(S, S),
    /// `(p0, p1)` accuracies of the maximal signal.
    Signal(S, S),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Player {
    Principal,
    Agent,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Principal => "principal",
            Player::Agent => "agent",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Issue {
    PriorOutOfRange(f64),
    DominantAction { player: Player, action: Action },
    StateMismatching { player: Player },
    AgentSignalOutOfRange,
    AgentSignalUninformative,
    ConstraintSignalInvalid,
    ConstraintOutOfRange,
    ConstraintNotBracketing { prior: f64, low: f64, high: f64 },
}

impl Issue {
    /// Scenario-file field the issue refers to.
    pub fn field(&self) -> &'static str {
        match self {
            Issue::PriorOutOfRange(_) => "prior",
            Issue::DominantAction { player, .. } | Issue::StateMismatching { player } => {
                match player {
                    Player::Principal => "principal",
                    Player::Agent => "agent",
                }
            }
            Issue::AgentSignalOutOfRange | Issue::AgentSignalUninformative => "agent_signal",
            Issue::ConstraintSignalInvalid
            | Issue::ConstraintOutOfRange
            | Issue::ConstraintNotBracketing { .. } => "constraint",
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::PriorOutOfRange(p) => write!(f, "prior {p} is outside [0, 1]"),
            Issue::DominantAction { player, action } => {
                write!(f, "{player} has dominant action {action}")
            }
            Issue::StateMismatching { player } => {
                write!(
                    f,
                    "{player} prefers to mismatch the state (both inequalities reversed)"
                )
            }
            Issue::AgentSignalOutOfRange => write!(f, "agent signal accuracies must lie in [0, 1]"),
            Issue::AgentSignalUninformative => write!(f, "agent signal must satisfy q0 + q1 > 1"),
            Issue::ConstraintSignalInvalid => {
                write!(
                    f,
                    "maximal signal must satisfy p0 + p1 >= 1 with entries in [0, 1]"
                )
            }
            Issue::ConstraintOutOfRange => {
                write!(
                    f,
                    "constraint posteriors must satisfy 0 <= low <= high <= 1"
                )
            }
            Issue::ConstraintNotBracketing { prior, low, high } => {
                write!(
                    f,
                    "constraint [{low}, {high}] does not bracket prior {prior}"
                )
            }
        }
    }
}

/// Structured validation outcome.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "ok");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", issue.field(), issue)?;
        }
        Ok(())
    }
}

fn matrix_issue<S: Scalar>(player: Player, m: &PayoffMatrix<S>) -> Option<Issue> {
    m.check().map(|v| match v {
        MatrixViolation::DominantAction(action) => Issue::DominantAction { player, action },
        MatrixViolation::StateMismatching => Issue::StateMismatching { player },
    })
}

/// Checks single crossing for both players, signal ranges, and that the
/// constraint brackets the prior. Never panics.
pub fn validate_scenario<S: Scalar>(draft: &ScenarioDraft<S>) -> ValidationReport {
    let mut issues = Vec::new();
    let prior_ok = draft.prior >= S::zero() && draft.prior <= S::one();
    if !prior_ok {
        issues.push(Issue::PriorOutOfRange(draft.prior.to_f64_lossy()));
    }
    issues.extend(matrix_issue(Player::Principal, &draft.principal));
    issues.extend(matrix_issue(Player::Agent, &draft.agent));

    let (q0, q1) = draft.agent_signal;
    match BinarySignal::new(q0, q1) {
        Ok(s) if s.is_informative() => {}
        Ok(_) => issues.push(Issue::AgentSignalUninformative),
        Err(_) => {
            let unit = |t: S| t >= S::zero() && t <= S::one();
            if unit(q0) && unit(q1) {
                issues.push(Issue::AgentSignalUninformative);
            } else {
                issues.push(Issue::AgentSignalOutOfRange);
            }
        }
    }

    match draft.constraint {
        ConstraintDraft::Posteriors(lo, hi) => {
            let unit = |t: S| t >= S::zero() && t <= S::one();
            if !unit(lo) || !unit(hi) || lo > hi {
                issues.push(Issue::ConstraintOutOfRange);
            } else if prior_ok && (lo.definitely_gt(draft.prior) || draft.prior.definitely_gt(hi)) {
                issues.push(Issue::ConstraintNotBracketing {
                    prior: draft.prior.to_f64_lossy(),
                    low: lo.to_f64_lossy(),
                    high: hi.to_f64_lossy(),
                });
            }
        }
        ConstraintDraft::Signal(p0, p1) => {
            if BinarySignal::new(p0, p1).is_err() {
                issues.push(Issue::ConstraintSignalInvalid);
            }
        }
    }
    ValidationReport { issues }
}

impl<S: Scalar> ScenarioDraft<S> {
    pub fn validate(&self) -> ValidationReport {
        validate_scenario(self)
    }

    pub fn build(&self) -> Result<Scenario<S>> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(Error::InvalidScenario(report));
        }
        let prior = Belief::new(self.prior)?;
        let prefs = Preferences::new(self.principal, self.agent)?;
        let agent_signal = BinarySignal::new(self.agent_signal.0, self.agent_signal.1)?;
        let constraint = match self.constraint {
            ConstraintDraft::Posteriors(lo, hi) => {
                BlackwellConstraint::new(Belief::new(lo)?, Belief::new(hi)?)?
            }
            ConstraintDraft::Signal(p0, p1) => {
                BlackwellConstraint::from_signal(prior, &BinarySignal::new(p0, p1)?)
            }
        };
        Scenario::new(prior, prefs, agent_signal, constraint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn b(x: f64) -> Belief<f64> {
        Belief::new(x).unwrap()
    }

    fn sym(q: f64) -> BinarySignal<f64> {
        BinarySignal::symmetric(q).unwrap()
    }

    fn reference() -> Preferences<f64> {
        Preferences::new(
            PayoffMatrix::new(1.0, 0.0, 0.0, 1.0),
            PayoffMatrix::new(1.25, -0.25, 0.25, 0.75),
        )
        .unwrap()
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} != {b}");
    }

    #[test]
    fn update_examples() {
        close(
            update_belief(b(0.5), &sym(0.8), Bit::One).unwrap().get(),
            0.8,
        );
        close(
            update_belief(b(0.5), &sym(0.8), Bit::Zero).unwrap().get(),
            0.2,
        );
        close(
            update_belief(b(3.0 / 7.0), &sym(0.8), Bit::One)
                .unwrap()
                .get(),
            0.75,
        );
    }

    #[test]
    fn update_exact_in_rationals() {
        let prior = Belief::<Rational>::ratio(3, 7);
        let s = BinarySignal::symmetric(Rational::ratio(4, 5)).unwrap();
        assert_eq!(
            update_belief(prior, &s, Bit::One).unwrap().get(),
            Rational::ratio(3, 4)
        );
    }

    #[test]
    fn update_zero_probability_is_error() {
        let s = BinarySignal::new(1.0, 0.5).unwrap();
        assert_eq!(
            update_belief(b(0.0), &s, Bit::One),
            Err(Error::ZeroProbabilityRealization { realization: 1 })
        );
    }

    #[test]
    fn posteriors_examples() {
        let p = posteriors_of_signal(b(0.5), &sym(0.8));
        close(p.low.get(), 0.2);
        close(p.high.get(), 0.8);
        close(p.prob_high, 0.5);

        let p = posteriors_of_signal(b(0.6), &sym(0.8));
        close(p.low.get(), 3.0 / 11.0);
        close(p.high.get(), 6.0 / 7.0);
        close(p.prob_high, 0.56);

        let p = posteriors_of_signal(b(0.5), &sym(0.5));
        close(p.low.get(), 0.5);
        close(p.high.get(), 0.5);
        close(p.prob_high, 0.5);
    }

    #[test]
    fn degenerate_prior_updates_return_prior() {
        let p = posteriors_of_signal(b(0.0), &BinarySignal::new(1.0, 0.7).unwrap());
        assert_eq!(p.low.get(), 0.0);
        assert_eq!(p.high.get(), 0.0);
        assert_eq!(p.prob_high, 0.0);
    }

    #[test]
    fn signal_from_posteriors_examples() {
        let s = signal_from_posteriors(b(0.5), b(0.2), b(0.8)).unwrap();
        close(s.t0(), 0.8);
        close(s.t1(), 0.8);

        let s = signal_from_posteriors(b(0.5), b(3.0 / 7.0), b(0.55)).unwrap();
        assert!((s.t0() - 0.470588).abs() < 1e-6);
        assert!((s.t1() - 0.647059).abs() < 1e-6);
        let back = posteriors_of_signal(b(0.5), &s);
        close(back.low.get(), 3.0 / 7.0);
        close(back.high.get(), 0.55);

        let s = signal_from_posteriors(b(0.5), b(0.5), b(0.5)).unwrap();
        assert_eq!((s.t0(), s.t1()), (0.5, 0.5));
    }

    #[test]
    fn signal_from_posteriors_errors() {
        assert!(matches!(
            signal_from_posteriors(b(0.5), b(0.6), b(0.8)),
            Err(Error::InvalidBracket { .. })
        ));
        assert_eq!(
            signal_from_posteriors(b(0.0), b(0.0), b(0.3)),
            Err(Error::DegeneratePrior(0.0))
        );
    }

    #[test]
    fn uninformative_pairs_normalize() {
        let s = BinarySignal::new(0.3, 0.7).unwrap();
        assert_eq!((s.t0(), s.t1()), (0.5, 0.5));
        assert!(BinarySignal::new(0.3, 0.6).is_err());
        assert!(BinarySignal::new(1.2, 0.6).is_err());
    }

    #[test]
    fn cutoff_examples() {
        close(
            cutoff(&PayoffMatrix::new(1.0, 0.0, 0.0, 1.0))
                .unwrap()
                .get(),
            0.5,
        );
        close(
            cutoff(&PayoffMatrix::new(1.25, -0.25, 0.25, 0.75))
                .unwrap()
                .get(),
            0.75,
        );
        close(
            cutoff(&PayoffMatrix::new(2.0, 0.0, 0.0, 1.0))
                .unwrap()
                .get(),
            2.0 / 3.0,
        );
        assert!(matches!(
            cutoff(&PayoffMatrix::new(1.0, 0.0, 1.0, 0.5)),
            Err(Error::AssumptionViolated(_))
        ));
    }

    #[test]
    fn action_payoff_examples() {
        let id = PayoffMatrix::new(1.0, 0.0, 0.0, 1.0);
        close(action_payoff(&id, Bit::One, b(0.8)), 0.8);
        close(action_payoff(&id, Bit::Zero, b(0.2)), 0.8);
        let agent = PayoffMatrix::new(1.25, -0.25, 0.25, 0.75);
        close(action_payoff(&agent, Bit::Zero, b(0.0)), 1.25);
    }

    #[test]
    fn envelope_examples() {
        let p = reference();
        close(non_delegation_envelope(&p, b(0.5)), 0.5);
        close(non_delegation_envelope(&p, b(0.9)), 0.9);
        close(non_delegation_envelope(&p, b(0.1)), 0.9);
        close(delegation_envelope(&p, b(0.6)), 0.4);
        close(delegation_envelope(&p, b(0.75)), 0.75);
        close(delegation_envelope(&p, b(0.8)), 0.8);
    }

    #[test]
    fn interval_and_preferred_action() {
        let p = reference();
        let (lo, hi) = disagreement_interval(&p);
        close(lo.get(), 0.5);
        close(hi.get(), 0.75);
        assert_eq!(principal_preferred_action(&p), Some(Bit::One));

        let swapped = Preferences::new(*p.agent(), *p.principal()).unwrap();
        let (lo, hi) = disagreement_interval(&swapped);
        close(lo.get(), 0.5);
        close(hi.get(), 0.75);
        assert_eq!(principal_preferred_action(&swapped), Some(Bit::Zero));

        let same = Preferences::new(*p.principal(), *p.principal()).unwrap();
        let (lo, hi) = disagreement_interval(&same);
        assert_eq!(lo, hi);
        assert_eq!(principal_preferred_action(&same), None);
    }

    #[test]
    fn blackwell_examples() {
        assert!(blackwell_leq(&sym(0.55), &sym(0.8), b(0.5)));
        assert!(!blackwell_leq(&sym(0.8), &sym(0.55), b(0.5)));
        assert!(blackwell_leq(&sym(0.8), &sym(0.8), b(0.5)));
    }

    fn draft(principal: [f64; 4]) -> ScenarioDraft<f64> {
        ScenarioDraft {
            prior: 0.5,
            principal: PayoffMatrix::from_f64(principal),
            agent: PayoffMatrix::new(1.25, -0.25, 0.25, 0.75),
            agent_signal: (0.8, 0.8),
            constraint: ConstraintDraft::Posteriors(0.35, 0.55),
        }
    }

    #[test]
    fn validation_taxonomy() {
        assert!(validate_scenario(&draft([1.0, 0.0, 0.0, 1.0])).is_ok());
        assert_eq!(
            validate_scenario(&draft([1.0, 0.0, 1.0, 0.5])).issues,
            vec![Issue::DominantAction {
                player: Player::Principal,
                action: Bit::Zero
            }]
        );
        assert_eq!(
            validate_scenario(&draft([0.0, 1.0, 1.0, 0.0])).issues,
            vec![Issue::StateMismatching {
                player: Player::Principal
            }]
        );
    }

    #[test]
    fn validation_rejects_uninformative_agent_and_bad_bracket() {
        let mut d = draft([1.0, 0.0, 0.0, 1.0]);
        d.agent_signal = (0.5, 0.5);
        d.constraint = ConstraintDraft::Posteriors(0.6, 0.7);
        let r = validate_scenario(&d);
        assert_eq!(r.issues.len(), 2);
        assert!(d.build().is_err());
        assert!(r.to_string().contains("agent_signal"));
    }

    #[test]
    fn constraint_from_signal() {
        let mut d = draft([1.0, 0.0, 0.0, 1.0]);
        d.constraint = ConstraintDraft::Signal(0.9, 0.9);
        let s = d.build().unwrap();
        close(s.constraint.max_low.get(), 0.1);
        close(s.constraint.max_high.get(), 0.9);
        let sig = s.constraint.to_signal(s.prior).unwrap();
        close(sig.t0(), 0.9);
    }
}
