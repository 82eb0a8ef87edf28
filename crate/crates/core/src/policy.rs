//! Policy regimes that take one of the principal's tools away, and searches
//! for instances where doing so strictly hurts her.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::delegation::exante_delegation_payoff;
use crate::design::{design_report_with, h_piecewise, split_payoff, PiecewiseH};
use crate::error::Result;
use crate::model::{
    disagreement_interval, non_delegation_envelope, Belief, BinarySignal, Bit, BlackwellConstraint,
    PosteriorPair, Preferences, Scenario,
};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyRegime {
    /// Optimal signal and optimal delegation.
    OptimalJoint,
    /// Every decision goes to the agent ("human in the loop"); the signal is
    /// still designed for that objective.
    MandatedDelegation,
    /// The public signal must be the maximal one; delegation stays optional.
    MandatedMaximalSignal,
    /// No public signal at all.
    NoAlgorithm,
    /// Maximal signal, principal always acts herself.
    NoHuman,
}

impl PolicyRegime {
    pub const ALL: [PolicyRegime; 5] = [
        PolicyRegime::OptimalJoint,
        PolicyRegime::MandatedDelegation,
        PolicyRegime::MandatedMaximalSignal,
        PolicyRegime::NoAlgorithm,
        PolicyRegime::NoHuman,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyRegime::OptimalJoint => "optimal-joint",
            PolicyRegime::MandatedDelegation => "mandated-delegation",
            PolicyRegime::MandatedMaximalSignal => "mandated-maximal-signal",
            PolicyRegime::NoAlgorithm => "no-algorithm",
            PolicyRegime::NoHuman => "no-human",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        PolicyRegime::ALL.into_iter().find(|r| r.as_str() == s)
    }

    /// Delegation rule after the public signal.
    pub fn delegation_rule(self) -> DelegationRule {
        match self {
            PolicyRegime::MandatedDelegation => DelegationRule::Always,
            PolicyRegime::NoHuman => DelegationRule::Never,
            _ => DelegationRule::Optimal,
        }
    }
}

impl std::fmt::Display for PolicyRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelegationRule {
    Always,
    Never,
    Optimal,
}

/// Best Bayes-plausible split when the principal must always delegate.
///
/// The ex-ante delegation payoff is affine between its knots and takes the
/// larger one-sided limit at each knot, so the optimum uses only the
/// constraint posteriors, the prior and the knots `ρ_low`, `ρ_high`.
pub fn delegation_only_design<S: Scalar>(
    scenario: &Scenario<S>,
    h: &PiecewiseH<S>,
) -> (PosteriorPair<S>, S) {
    let prior = scenario.prior;
    let (a, b) = (scenario.constraint.max_low, scenario.constraint.max_high);
    let candidates: Vec<Belief<S>> = [a, b, prior, h.rho_low, h.rho_high]
        .into_iter()
        .filter(|x| *x >= a && *x <= b)
        .collect();
    let mut best: Option<(PosteriorPair<S>, S)> = None;
    for &lo in candidates.iter().filter(|x| **x <= prior) {
        for &hi in candidates.iter().filter(|x| **x >= prior) {
            let Ok(split) = PosteriorPair::around(prior, lo, hi) else {
                continue;
            };
            let value = split.expect(|x| h.delegation_payoff(x));
            let better = match &best {
                None => true,
                Some((bs, bv)) => {
                    value.definitely_gt(*bv)
                        || (value.approx_eq(*bv) && split.spread() > bs.spread())
                }
            };
            if better {
                best = Some((split, value));
            }
        }
    }
    best.expect("the degenerate split at the prior is always a candidate")
}

/// Expected principal payoff under `regime`.
pub fn evaluate_regime<S: Scalar>(scenario: &Scenario<S>, regime: PolicyRegime) -> Result<S> {
    let h = h_piecewise(&scenario.agent_signal, &scenario.prefs);
    evaluate_regime_with(scenario, &h, regime)
}

pub fn evaluate_regime_with<S: Scalar>(
    scenario: &Scenario<S>,
    h: &PiecewiseH<S>,
    regime: PolicyRegime,
) -> Result<S> {
    let prior = scenario.prior;
    let (a, b) = (scenario.constraint.max_low, scenario.constraint.max_high);
    Ok(match regime {
        PolicyRegime::OptimalJoint => {
            design_report_with(scenario, h.clone())?
                .solution
                .expected_payoff
        }
        PolicyRegime::MandatedDelegation => delegation_only_design(scenario, h).1,
        PolicyRegime::MandatedMaximalSignal => split_payoff(h, prior, a, b)?.1,
        PolicyRegime::NoAlgorithm => h.eval(prior),
        PolicyRegime::NoHuman => PosteriorPair::around(prior, a, b)?
            .expect(|x| non_delegation_envelope(&scenario.prefs, x)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeRow<S> {
    pub regime: PolicyRegime,
    pub payoff: S,
    /// 1 for the best payoff; ties share a rank.
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeReport<S> {
    pub rows: Vec<RegimeRow<S>>,
    /// `OptimalJoint` is at least every other regime.
    pub optimal_dominates: bool,
}

impl<S: Scalar> RegimeReport<S> {
    pub fn payoff(&self, regime: PolicyRegime) -> S {
        self.rows
            .iter()
            .find(|r| r.regime == regime)
            .map(|r| r.payoff)
            .expect("every regime is evaluated")
    }
}

pub fn regime_report<S: Scalar>(scenario: &Scenario<S>) -> Result<RegimeReport<S>> {
    let h = h_piecewise(&scenario.agent_signal, &scenario.prefs);
    let mut payoffs = Vec::with_capacity(PolicyRegime::ALL.len());
    for regime in PolicyRegime::ALL {
        payoffs.push((regime, evaluate_regime_with(scenario, &h, regime)?));
    }
    let mut distinct: Vec<S> = Vec::new();
    let mut sorted: Vec<S> = payoffs.iter().map(|p| p.1).collect();
    sorted.sort_by(|x, y| y.partial_cmp(x).expect("finite payoffs"));
    for v in sorted {
        if distinct.last().is_none_or(|l: &S| !l.approx_eq(v)) {
            distinct.push(v);
        }
    }
    let rows: Vec<RegimeRow<S>> = payoffs
        .iter()
        .map(|&(regime, payoff)| RegimeRow {
            regime,
            payoff,
            rank: 1 + distinct
                .iter()
                .position(|d| d.approx_eq(payoff))
                .unwrap_or(0),
        })
        .collect();
    let optimal = payoffs[0].1;
    let optimal_dominates = payoffs.iter().all(|(_, p)| !p.definitely_gt(optimal));
    Ok(RegimeReport {
        rows,
        optimal_dominates,
    })
}

/// An instance where a policy restriction strictly lowers the principal's
/// payoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness<S> {
    /// For the delegation-loss search the prior is the interim belief and the
    /// constraint is degenerate.
    pub scenario: Scenario<S>,
    pub interim_or_prior: Belief<S>,
    pub payoff_gap: S,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoWitness {
    /// Cutoffs coincide.
    AlignedPreferences,
    /// `q0 = 1` or `q1 = 1`: one private realization reveals the state.
    StateRevealingSignal,
    /// Preconditions hold but the search found no positive gap.
    NotFound { best_gap: f64 },
}

impl NoWitness {
    /// True when the search was not applicable, as opposed to failing.
    pub fn precondition_failed(&self) -> bool {
        !matches!(self, NoWitness::NotFound { .. })
    }
}

impl std::fmt::Display for NoWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoWitness::AlignedPreferences => write!(f, "preferences are aligned"),
            NoWitness::StateRevealingSignal => {
                write!(f, "agent signal has a state-revealing realization")
            }
            NoWitness::NotFound { best_gap } => {
                write!(f, "no positive gap found (best gap {best_gap:e})")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessSearch {
    /// Points per axis of the deterministic grid stage.
    pub grid: usize,
    pub refine_rounds: usize,
    pub refine_samples: usize,
    pub seed: u64,
}

impl Default for WitnessSearch {
    fn default() -> Self {
        WitnessSearch {
            grid: 200,
            refine_rounds: 8,
            refine_samples: 32,
            seed: 0,
        }
    }
}

fn check_preconditions<S: Scalar>(
    prefs: &Preferences<S>,
    signal: &BinarySignal<S>,
) -> std::result::Result<(), NoWitness> {
    if prefs.is_aligned() {
        return Err(NoWitness::AlignedPreferences);
    }
    if signal.t0() >= S::one() || signal.t1() >= S::one() {
        return Err(NoWitness::StateRevealingSignal);
    }
    Ok(())
}

/// Interim belief whose final posterior after `realization` equals `target`.
fn interim_for_final<S: Scalar>(signal: &BinarySignal<S>, realization: Bit, target: S) -> S {
    let one = S::one();
    let l1 = signal.likelihood(realization, Bit::One);
    let l0 = signal.likelihood(realization, Bit::Zero);
    (l0 * target / (l0 * target + l1 * (one - target))).clamp_unit()
}

fn unit_grid<S: Scalar>(n: usize) -> impl Iterator<Item = S> {
    (1..=n).map(move |i| S::from_usize_lossy(i) / S::from_usize_lossy(n + 1))
}

/// Searches for an interim belief at which delegating is strictly worse than
/// acting directly. Candidates: a uniform grid of interim beliefs, interim
/// beliefs that send one final posterior into the disagreement interval, then
/// seeded random refinement around the best point.
pub fn find_delegation_loss_witness<S: Scalar>(
    prefs: &Preferences<S>,
    agent_signal: &BinarySignal<S>,
    search: &WitnessSearch,
) -> std::result::Result<Witness<S>, NoWitness> {
    check_preconditions(prefs, agent_signal)?;
    let gap = |x: S| {
        let b = Belief::clamped(x);
        non_delegation_envelope(prefs, b) - exante_delegation_payoff(b, agent_signal, prefs)
    };
    let (lo, hi) = disagreement_interval(prefs);
    let mut candidates: Vec<S> = unit_grid(search.grid).collect();
    for t in unit_grid::<S>(search.grid) {
        let f = lo.get() + (hi.get() - lo.get()) * t;
        candidates.push(interim_for_final(agent_signal, Bit::Zero, f));
        candidates.push(interim_for_final(agent_signal, Bit::One, f));
    }
    let mut best = candidates
        .into_iter()
        .map(|x| (x, gap(x)))
        .fold(None::<(S, S)>, |acc, c| match acc {
            Some(a) if a.1 >= c.1 => Some(a),
            _ => Some(c),
        })
        .expect("grid is non-empty");

    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut width = 1.0 / (search.grid as f64 + 1.0);
    for _ in 0..search.refine_rounds {
        for _ in 0..search.refine_samples {
            let offset: f64 = rng.random_range(-1.0..=1.0) * width;
            let x = (best.0 + S::from_f64_lossy(offset)).clamp_unit();
            let g = gap(x);
            if g > best.1 {
                best = (x, g);
            }
        }
        width *= 0.5;
    }

    let (x, g) = best;
    if !g.definitely_gt(S::zero()) {
        return Err(NoWitness::NotFound {
            best_gap: g.to_f64_lossy(),
        });
    }
    let interim = Belief::clamped(x);
    let scenario = Scenario::new(
        interim,
        *prefs,
        *agent_signal,
        BlackwellConstraint::new(interim, interim).expect("degenerate bracket"),
    )
    .expect("preconditions guarantee an informative agent signal");
    Ok(Witness {
        scenario,
        interim_or_prior: interim,
        payoff_gap: g,
    })
}

/// Searches for a prior and Blackwell constraint under which releasing no
/// public signal strictly beats releasing the maximal one.
///
/// Grid stage over (prior, low, high), then the construction that places the
/// prior just inside the closed side of `ρ` with the constraint straddling
/// it, then seeded random refinement.
pub fn find_maximal_signal_loss_witness<S: Scalar>(
    prefs: &Preferences<S>,
    agent_signal: &BinarySignal<S>,
    search: &WitnessSearch,
) -> std::result::Result<Witness<S>, NoWitness> {
    check_preconditions(prefs, agent_signal)?;
    let h = h_piecewise(agent_signal, prefs);
    let rho = h.rho.expect("non-aligned preferences have ρ").get();

    // gap = H(prior) - E[H] under the maximal split
    let gap = |p: S, lo: S, hi: S| -> Option<S> {
        let (p, lo, hi) = (Belief::clamped(p), Belief::clamped(lo), Belief::clamped(hi));
        let (_, maximal) = split_payoff(&h, p, lo, hi).ok()?;
        Some(h.eval(p) - maximal)
    };
    let mut best: Option<((S, S, S), S)> = None;
    let consider = |p: S, lo: S, hi: S, best: &mut Option<((S, S, S), S)>| {
        if let Some(g) = gap(p, lo, hi) {
            if best.as_ref().is_none_or(|b| g > b.1) {
                *best = Some(((p, lo, hi), g));
            }
        }
    };

    let m = (search.grid / 12).max(4);
    for p in unit_grid::<S>(search.grid) {
        for j in 0..m {
            let lo = p * S::from_usize_lossy(j) / S::from_usize_lossy(m);
            for k in 1..=m {
                let hi = p + (S::one() - p) * S::from_usize_lossy(k) / S::from_usize_lossy(m);
                consider(p, lo, hi, &mut best);
            }
        }
    }

    // H takes its upper value at ρ from the side where the prior should sit.
    let closed_side = if h.h.left_limit(rho).definitely_lt(h.h.right_limit(rho)) {
        S::one()
    } else {
        -S::one()
    };
    let mut eps = S::ratio(1, 10);
    for _ in 0..12 {
        for k in 1..=4i64 {
            let p = rho + closed_side * eps;
            let across = rho - closed_side * eps * S::ratio(k, 4);
            let beyond = p + closed_side * eps * S::ratio(k, 4);
            let (lo, hi) = if closed_side > S::zero() {
                (across, beyond)
            } else {
                (beyond, across)
            };
            if p > S::zero() && p < S::one() && lo >= S::zero() && hi <= S::one() {
                consider(p, lo, hi, &mut best);
            }
        }
        eps = eps * S::ratio(1, 3);
    }

    let mut best = best.expect("grid is non-empty");
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut width = 0.05;
    for _ in 0..search.refine_rounds {
        for _ in 0..search.refine_samples {
            let (p, lo, hi) = best.0;
            let mut jitter =
                |x: S| (x + S::from_f64_lossy(rng.random_range(-1.0..=1.0) * width)).clamp_unit();
            let (np, nlo, nhi) = (jitter(p), jitter(lo), jitter(hi));
            if nlo <= np && np <= nhi {
                if let Some(g) = gap(np, nlo, nhi) {
                    if g > best.1 {
                        best = ((np, nlo, nhi), g);
                    }
                }
            }
        }
        width *= 0.5;
    }

    let ((p, lo, hi), g) = best;
    if !g.definitely_gt(S::zero()) {
        return Err(NoWitness::NotFound {
            best_gap: g.to_f64_lossy(),
        });
    }
    let prior = Belief::clamped(p);
    let constraint =
        BlackwellConstraint::new(Belief::clamped(lo), Belief::clamped(hi)).expect("lo <= hi");
    let scenario = Scenario::new(prior, *prefs, *agent_signal, constraint)
        .expect("preconditions guarantee an informative agent signal");
    Ok(Witness {
        scenario,
        interim_or_prior: prior,
        payoff_gap: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PayoffMatrix;

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

    fn aligned() -> Preferences<f64> {
        Preferences::new(*reference().principal(), *reference().principal()).unwrap()
    }

    fn scenario(prefs: Preferences<f64>, prior: f64, lo: f64, hi: f64) -> Scenario<f64> {
        Scenario::new(
            b(prior),
            prefs,
            sym(0.8),
            BlackwellConstraint::new(b(lo), b(hi)).unwrap(),
        )
        .unwrap()
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} != {b}");
    }

    #[test]
    fn regime_examples() {
        let s = scenario(reference(), 0.5, 0.35, 0.55);
        close(
            evaluate_regime(&s, PolicyRegime::OptimalJoint).unwrap(),
            0.8,
        );
        close(
            evaluate_regime(&s, PolicyRegime::MandatedMaximalSignal).unwrap(),
            0.7625,
        );
        close(evaluate_regime(&s, PolicyRegime::NoAlgorithm).unwrap(), 0.8);
    }

    #[test]
    fn report_straddling_constraint() {
        let r = regime_report(&scenario(reference(), 0.5, 0.35, 0.55)).unwrap();
        assert!(r.optimal_dominates);
        close(r.payoff(PolicyRegime::OptimalJoint), 0.8);
        close(r.payoff(PolicyRegime::NoAlgorithm), 0.8);
        assert!(r.payoff(PolicyRegime::MandatedMaximalSignal) < 0.8);
        let rank = |g| r.rows.iter().find(|x| x.regime == g).unwrap().rank;
        assert_eq!(rank(PolicyRegime::OptimalJoint), 1);
        assert_eq!(rank(PolicyRegime::NoAlgorithm), 1);
        assert!(rank(PolicyRegime::MandatedMaximalSignal) > 1);
    }

    #[test]
    fn report_wide_constraint() {
        let r = regime_report(&scenario(reference(), 0.5, 0.1, 0.9)).unwrap();
        close(r.payoff(PolicyRegime::OptimalJoint), 0.9);
        close(r.payoff(PolicyRegime::MandatedMaximalSignal), 0.9);
        close(r.payoff(PolicyRegime::NoHuman), 0.9);
        close(r.payoff(PolicyRegime::NoAlgorithm), 0.8);
        close(r.payoff(PolicyRegime::MandatedDelegation), 0.85);
    }

    #[test]
    fn report_aligned_delegation_ties_optimal() {
        let r = regime_report(&scenario(aligned(), 0.5, 0.3, 0.7)).unwrap();
        close(
            r.payoff(PolicyRegime::MandatedDelegation),
            r.payoff(PolicyRegime::OptimalJoint),
        );
    }

    #[test]
    fn maximal_with_uninformative_constraint_is_no_algorithm() {
        let s = scenario(reference(), 0.6, 0.6, 0.6);
        close(
            evaluate_regime(&s, PolicyRegime::MandatedMaximalSignal).unwrap(),
            evaluate_regime(&s, PolicyRegime::NoAlgorithm).unwrap(),
        );
    }

    #[test]
    fn delegation_loss_witness_examples() {
        let w = find_delegation_loss_witness(&reference(), &sym(0.8), &WitnessSearch::default())
            .unwrap();
        assert!(w.payoff_gap > 0.1 - 1e-9, "gap {}", w.payoff_gap);
        let g = non_delegation_envelope(&reference(), b(0.9))
            - exante_delegation_payoff(b(0.9), &sym(0.8), &reference());
        close(g, 0.1);

        assert_eq!(
            find_delegation_loss_witness(&aligned(), &sym(0.8), &WitnessSearch::default()),
            Err(NoWitness::AlignedPreferences)
        );
        let revealing = BinarySignal::new(0.8, 1.0).unwrap();
        assert_eq!(
            find_delegation_loss_witness(&reference(), &revealing, &WitnessSearch::default()),
            Err(NoWitness::StateRevealingSignal)
        );
    }

    #[test]
    fn maximal_signal_loss_witness_examples() {
        let w =
            find_maximal_signal_loss_witness(&reference(), &sym(0.8), &WitnessSearch::default())
                .unwrap();
        assert!(w.payoff_gap >= 0.0375 - 1e-12, "gap {}", w.payoff_gap);
        let s = w.scenario;
        let again = evaluate_regime(&s, PolicyRegime::NoAlgorithm).unwrap()
            - evaluate_regime(&s, PolicyRegime::MandatedMaximalSignal).unwrap();
        close(again, w.payoff_gap);

        assert_eq!(
            find_maximal_signal_loss_witness(&aligned(), &sym(0.8), &WitnessSearch::default()),
            Err(NoWitness::AlignedPreferences)
        );
    }

    #[test]
    fn witness_search_is_deterministic() {
        let s = WitnessSearch {
            seed: 7,
            ..WitnessSearch::default()
        };
        let a = find_maximal_signal_loss_witness(&reference(), &sym(0.7), &s);
        let b = find_maximal_signal_loss_witness(&reference(), &sym(0.7), &s);
        assert_eq!(a, b);
    }
}
