//! The delegation stage: given an interim posterior, should the principal act
//! herself or hand the decision to the privately informed agent?

use crate::error::{Error, Result};
use crate::model::{
    blackwell_leq, delegation_envelope, disagreement_interval, non_delegation_envelope,
    posteriors_of_signal, principal_preferred_action, Belief, BinarySignal, Bit, PayoffMatrix,
    PosteriorPair, Preferences,
};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelegationDecision<S> {
    pub delegate: bool,
    /// Delegation beats direct action by more than the tolerance.
    pub strict: bool,
    pub delegation_payoff: S,
    pub direct_payoff: S,
}

impl<S: Scalar> DelegationDecision<S> {
    /// Optimal delegation-stage payoff `H`.
    pub fn payoff(&self) -> S {
        if self.delegate {
            self.delegation_payoff
        } else {
            self.direct_payoff
        }
    }
}

/// Agent's posteriors after his private signal, with `prob_high = Pr(s2 = 1)`
/// at the interim belief.
pub fn final_posteriors<S: Scalar>(
    interim: Belief<S>,
    agent_signal: &BinarySignal<S>,
) -> PosteriorPair<S> {
    posteriors_of_signal(interim, agent_signal)
}

/// `E_{s2}[V_D(final posterior)]`.
pub fn exante_delegation_payoff<S: Scalar>(
    interim: Belief<S>,
    agent_signal: &BinarySignal<S>,
    prefs: &Preferences<S>,
) -> S {
    final_posteriors(interim, agent_signal).expect(|b| delegation_envelope(prefs, b))
}

/// Delegation is strictly valuable iff the final posteriors land on opposite
/// sides of the disagreement interval.
pub fn strict_delegation<S: Scalar>(
    interim: Belief<S>,
    agent_signal: &BinarySignal<S>,
    prefs: &Preferences<S>,
) -> bool {
    let finals = final_posteriors(interim, agent_signal);
    let (lo, hi) = disagreement_interval(prefs);
    finals.low.get().definitely_lt(lo.get()) && finals.high.get().definitely_gt(hi.get())
}

/// The final posteriors must be further apart than the disagreement interval
/// is long.
pub fn necessary_condition<S: Scalar>(
    agent_signal: &BinarySignal<S>,
    interim: Belief<S>,
    prefs: &Preferences<S>,
) -> bool {
    let finals = final_posteriors(interim, agent_signal);
    let (lo, hi) = disagreement_interval(prefs);
    finals.spread().definitely_gt(hi.get() - lo.get())
}

/// Compares delegation with direct action. Ties go to direct action.
pub fn optimal_delegation<S: Scalar>(
    interim: Belief<S>,
    agent_signal: &BinarySignal<S>,
    prefs: &Preferences<S>,
) -> DelegationDecision<S> {
    let delegation_payoff = exante_delegation_payoff(interim, agent_signal, prefs);
    let direct_payoff = non_delegation_envelope(prefs, interim);
    let strict = delegation_payoff.definitely_gt(direct_payoff);
    DelegationDecision {
        delegate: strict,
        strict,
        delegation_payoff,
        direct_payoff,
    }
}

/// `H(interim) = max(E[V_D], V_N)`, evaluated pointwise.
pub fn delegation_stage_payoff<S: Scalar>(
    interim: Belief<S>,
    agent_signal: &BinarySignal<S>,
    prefs: &Preferences<S>,
) -> S {
    optimal_delegation(interim, agent_signal, prefs).payoff()
}

/// Delegation-stage outcomes before and after a change of agent signal or
/// preferences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison<S> {
    pub before: DelegationDecision<S>,
    pub after: DelegationDecision<S>,
}

impl<S: Scalar> Comparison<S> {
    fn new(before: DelegationDecision<S>, after: DelegationDecision<S>) -> Self {
        Comparison { before, after }
    }

    pub fn delegation_delta(&self) -> S {
        self.after.delegation_payoff - self.before.delegation_payoff
    }

    pub fn stage_delta(&self) -> S {
        self.after.payoff() - self.before.payoff()
    }

    pub fn unchanged(&self) -> bool {
        self.delegation_delta().approx_eq(S::zero()) && self.stage_delta().approx_eq(S::zero())
    }

    pub fn weakly_decreasing(&self) -> bool {
        !self.delegation_delta().definitely_gt(S::zero())
            && !self.stage_delta().definitely_gt(S::zero())
    }

    pub fn weakly_increasing(&self) -> bool {
        !self.delegation_delta().definitely_lt(S::zero())
            && !self.stage_delta().definitely_lt(S::zero())
    }

    /// The delegation payoff strictly drops while `H` is unchanged: a better
    /// informed agent hurts only a principal who is forced to delegate.
    pub fn is_informativeness_paradox(&self) -> bool {
        self.delegation_delta().definitely_lt(S::zero()) && self.stage_delta().approx_eq(S::zero())
    }
}

/// Delegation payoffs under a weaker and a Blackwell-stronger agent signal.
pub fn compare_agent_informativeness<S: Scalar>(
    interim: Belief<S>,
    weak: &BinarySignal<S>,
    strong: &BinarySignal<S>,
    prefs: &Preferences<S>,
) -> Result<Comparison<S>> {
    // Containment of posterior intervals does not depend on the prior.
    if !blackwell_leq(weak, strong, Belief::clamped(S::half())) {
        return Err(Error::NotBlackwellOrdered);
    }
    Ok(Comparison::new(
        optimal_delegation(interim, weak, prefs),
        optimal_delegation(interim, strong, prefs),
    ))
}

/// Same principal, an agent whose disagreement interval contains the old one.
pub fn compare_misalignment<S: Scalar>(
    interim: Belief<S>,
    agent_signal: &BinarySignal<S>,
    prefs: &Preferences<S>,
    more_misaligned: &Preferences<S>,
) -> Result<Comparison<S>> {
    if prefs.principal() != more_misaligned.principal() {
        return Err(Error::NotMoreMisaligned("principal payoffs differ".into()));
    }
    let (lo, hi) = disagreement_interval(prefs);
    let (nlo, nhi) = disagreement_interval(more_misaligned);
    if nlo.get().definitely_gt(lo.get()) || nhi.get().definitely_lt(hi.get()) {
        return Err(Error::NotMoreMisaligned(format!(
            "[{nlo}, {nhi}] does not contain [{lo}, {hi}]"
        )));
    }
    Ok(Comparison::new(
        optimal_delegation(interim, agent_signal, prefs),
        optimal_delegation(interim, agent_signal, more_misaligned),
    ))
}

/// How a principal-side payoff edit widens the disagreement interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftCase {
    /// Payoffs for the agent-preferred action are lowered.
    LowerAgentPreferred,
    /// Payoffs for the agent's less preferred action are raised.
    RaiseAgentLessPreferred,
}

impl ShiftCase {
    pub fn number(self) -> u8 {
        match self {
            ShiftCase::LowerAgentPreferred => 1,
            ShiftCase::RaiseAgentLessPreferred => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(ShiftCase::LowerAgentPreferred),
            2 => Some(ShiftCase::RaiseAgentLessPreferred),
            _ => None,
        }
    }
}

fn column<S: Scalar>(m: &PayoffMatrix<S>, action: Bit) -> [S; 2] {
    [m.get(Bit::Zero, action), m.get(Bit::One, action)]
}

/// Misalignment induced by a change of the principal's payoffs. Case 1
/// weakly lowers both payoffs, case 2 weakly raises them.
pub fn principal_shift_comparison<S: Scalar>(
    interim: Belief<S>,
    agent_signal: &BinarySignal<S>,
    prefs: &Preferences<S>,
    shifted: &Preferences<S>,
    case: ShiftCase,
) -> Result<Comparison<S>> {
    let mismatch = |reason: &str| Error::CaseMismatch {
        case: case.number(),
        reason: reason.to_string(),
    };
    if prefs.agent() != shifted.agent() {
        return Err(mismatch("agent payoffs differ"));
    }
    let (old, new) = (prefs.principal(), shifted.principal());
    if old != new {
        let Some(preferred) = principal_preferred_action(prefs) else {
            return Err(mismatch(
                "aligned preferences have no agent-preferred action",
            ));
        };
        let agent_preferred = preferred.flip();
        let (edited, fixed) = match case {
            ShiftCase::LowerAgentPreferred => (agent_preferred, preferred),
            ShiftCase::RaiseAgentLessPreferred => (preferred, agent_preferred),
        };
        if column(old, fixed) != column(new, fixed) {
            return Err(mismatch("payoffs of the other action changed"));
        }
        let moved_right_way = column(old, edited)
            .iter()
            .zip(column(new, edited))
            .all(|(&o, n)| match case {
                ShiftCase::LowerAgentPreferred => n <= o,
                ShiftCase::RaiseAgentLessPreferred => n >= o,
            });
        if !moved_right_way {
            return Err(mismatch("edit moves payoffs in the wrong direction"));
        }
        let (lo, hi) = disagreement_interval(prefs);
        let (nlo, nhi) = disagreement_interval(shifted);
        if nlo.get().definitely_gt(lo.get()) || nhi.get().definitely_lt(hi.get()) {
            return Err(mismatch("disagreement interval does not expand"));
        }
    }
    Ok(Comparison::new(
        optimal_delegation(interim, agent_signal, prefs),
        optimal_delegation(interim, agent_signal, shifted),
    ))
}

/// Searches symmetric agent accuracies on a grid for a pair `q_weak < q_strong`
/// exhibiting [`Comparison::is_informativeness_paradox`] at `interim`.
pub fn find_informativeness_paradox<S: Scalar>(
    interim: Belief<S>,
    prefs: &Preferences<S>,
    steps: usize,
) -> Option<(S, S, Comparison<S>)> {
    let steps = steps.max(2);
    // Strictly informative accuracies in (1/2, 1).
    let q_at =
        |i: usize| S::half() + S::half() * S::from_usize_lossy(i) / S::from_usize_lossy(steps + 1);
    for i in 1..=steps {
        let weak = BinarySignal::symmetric(q_at(i)).ok()?;
        for j in (i + 1)..=steps {
            let strong = BinarySignal::symmetric(q_at(j)).ok()?;
            let cmp = compare_agent_informativeness(interim, &weak, &strong, prefs).ok()?;
            if cmp.is_informativeness_paradox() {
                return Some((q_at(i), q_at(j), cmp));
            }
        }
    }
    None
}
