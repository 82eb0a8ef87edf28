//! Independent numerical checks: brute-force design search, Monte Carlo
//! simulation of the full pipeline, and direct enumeration of the delegation
//! comparison.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::delegation::{delegation_stage_payoff, exante_delegation_payoff, optimal_delegation};
use crate::design::DesignSolution;
use crate::error::{Error, Result};
use crate::model::{
    agent_action, non_delegation_envelope, principal_action, update_belief, Belief, BinarySignal,
    Bit, PayoffMatrix, Preferences, Scenario,
};
use crate::policy::{DelegationRule, PolicyRegime};
use crate::scalar::Scalar;

pub const MIN_MC_SAMPLES: usize = 1000;

/// Two-sided 99% normal quantile.
const Z_99: f64 = 2.5758293035489004;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridResult<S> {
    pub best_low: Belief<S>,
    pub best_high: Belief<S>,
    pub best_payoff: S,
    /// Largest spacing between adjacent grid points on either side.
    pub grid_step: S,
}

/// Interim belief at which the final posterior on the principal-preferred
/// side lands exactly on the agent's cutoff, found by bisection.
fn indifference_interim<S: Scalar>(scenario: &Scenario<S>) -> Option<S> {
    let prefs = &scenario.prefs;
    if prefs.is_aligned() {
        return None;
    }
    let target = prefs.agent_cutoff().get();
    // Principal prefers action 1 when her cutoff is below the agent's; the
    // agent is then pivotal on the high realization.
    let realization = if prefs.principal_cutoff() < prefs.agent_cutoff() {
        Bit::One
    } else {
        Bit::Zero
    };
    let signal = &scenario.agent_signal;
    let final_at = |x: S| update_belief(Belief::clamped(x), signal, realization).map(|b| b.get());
    let (mut lo, mut hi) = (S::zero(), S::one());
    for _ in 0..200 {
        let mid = (lo + hi) / S::two();
        if mid == lo || mid == hi {
            break;
        }
        match final_at(mid) {
            Ok(f) if f < target => lo = mid,
            Ok(_) => hi = mid,
            Err(_) => break,
        }
    }
    // Prefer the endpoint whose final posterior is on the agent's tie.
    let pick = [lo, hi]
        .into_iter()
        .min_by(|a, b| {
            let da = final_at(*a).map(|f| (f - target).abs()).unwrap_or(S::one());
            let db = final_at(*b).map(|f| (f - target).abs()).unwrap_or(S::one());
            da.partial_cmp(&db).expect("finite")
        })
        .expect("two candidates");
    Some(pick)
}

fn axis<S: Scalar>(from: S, to: S, n: usize, extra: &[S]) -> Vec<S> {
    let mut v: Vec<S> = (0..n)
        .map(|i| {
            if i + 1 == n {
                to
            } else {
                from + (to - from) * S::from_usize_lossy(i) / S::from_usize_lossy(n - 1)
            }
        })
        .collect();
    v.extend(extra.iter().copied().filter(|x| *x >= from && *x <= to));
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    v.dedup();
    v
}

/// Exhaustive search over splits of the prior within the constraint, with
/// `n` points per side. The indifference interim and the prior are added to
/// both axes. Near-ties (within the scalar tolerance) go to the wider split.
pub fn grid_optimal_design<S: Scalar>(scenario: &Scenario<S>, n: usize) -> GridResult<S> {
    let n = n.max(2);
    let prior = scenario.prior.get();
    let (a, b) = (
        scenario.constraint.max_low.get(),
        scenario.constraint.max_high.get(),
    );
    let mut extra = vec![prior];
    extra.extend(indifference_interim(scenario));
    let lows = axis(a, prior, n, &extra);
    let highs = axis(prior, b, n, &extra);

    let stage =
        |x: S| delegation_stage_payoff(Belief::clamped(x), &scenario.agent_signal, &scenario.prefs);
    let h_low: Vec<S> = lows.par_iter().map(|&x| stage(x)).collect();
    let h_high: Vec<S> = highs.par_iter().map(|&x| stage(x)).collect();
    let at_prior = stage(prior);

    // (payoff, low, high)
    type Cand<S> = (S, S, S);
    let better = |cand: &Cand<S>, best: &Cand<S>| {
        cand.0.definitely_gt(best.0)
            || (cand.0.approx_eq(best.0) && cand.2 - cand.1 > best.2 - best.1)
    };
    let rows: Vec<Cand<S>> = lows
        .par_iter()
        .zip(h_low.par_iter())
        .map(|(&lo, &hl)| {
            let mut best: Cand<S> = (at_prior, prior, prior);
            for (&hi, &hh) in highs.iter().zip(h_high.iter()) {
                let cand = if lo == prior || hi == prior {
                    (at_prior, prior, prior)
                } else {
                    let w = (prior - lo) / (hi - lo);
                    (w * hh + (S::one() - w) * hl, lo, hi)
                };
                if better(&cand, &best) {
                    best = cand;
                }
            }
            best
        })
        .collect();
    let mut best: Cand<S> = (at_prior, prior, prior);
    for cand in rows {
        if better(&cand, &best) {
            best = cand;
        }
    }
    let step = |v: &[S]| {
        v.windows(2)
            .map(|w| w[1] - w[0])
            .fold(S::zero(), |m, d| if d > m { d } else { m })
    };
    let (sl, sh) = (step(&lows), step(&highs));
    GridResult {
        best_low: Belief::clamped(best.1),
        best_high: Belief::clamped(best.2),
        best_payoff: best.0,
        grid_step: if sl > sh { sl } else { sh },
    }
}

/// Whether delegating at `interim` strictly beats acting directly, computed
/// by enumerating (state, agent realization) events and reading each
/// player's best action off expected payoffs.
pub fn brute_force_strict_delegation(
    interim: f64,
    agent_signal: &BinarySignal<f64>,
    principal: &PayoffMatrix<f64>,
    agent: &PayoffMatrix<f64>,
) -> bool {
    let expected = |m: &PayoffMatrix<f64>, p1: f64, action: Bit| {
        (1.0 - p1) * m.get(Bit::Zero, action) + p1 * m.get(Bit::One, action)
    };
    let direct = [Bit::Zero, Bit::One]
        .into_iter()
        .map(|act| expected(principal, interim, act))
        .fold(f64::NEG_INFINITY, f64::max);

    let mut delegated = 0.0;
    for s in [Bit::Zero, Bit::One] {
        let joint1 = interim * agent_signal.likelihood(s, Bit::One);
        let joint0 = (1.0 - interim) * agent_signal.likelihood(s, Bit::Zero);
        let total = joint0 + joint1;
        if total <= 0.0 {
            continue;
        }
        let post = joint1 / total;
        let diff = expected(agent, post, Bit::One) - expected(agent, post, Bit::Zero);
        let act = if diff.abs() <= 1e-12 {
            // Agent indifferent: the principal's choice at this belief.
            if expected(principal, post, Bit::One) >= expected(principal, post, Bit::Zero) {
                Bit::One
            } else {
                Bit::Zero
            }
        } else if diff > 0.0 {
            Bit::One
        } else {
            Bit::Zero
        };
        delegated += joint0 * principal.get(Bit::Zero, act) + joint1 * principal.get(Bit::One, act);
    }
    delegated > direct + 1e-12
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Half-width of the 99% normal confidence interval.
    pub half_width: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    pub fn contains(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.half_width
    }
}

fn delegates<S: Scalar>(rule: DelegationRule, interim: Belief<S>, scenario: &Scenario<S>) -> bool {
    match rule {
        DelegationRule::Always => true,
        DelegationRule::Never => false,
        DelegationRule::Optimal => {
            optimal_delegation(interim, &scenario.agent_signal, &scenario.prefs).delegate
        }
    }
}

/// Simulates state, public realization, private realization and the final
/// action; returns the mean principal payoff with a 99% interval.
pub fn mc_pipeline_payoff(
    scenario: &Scenario<f64>,
    design: &DesignSolution<f64>,
    regime: PolicyRegime,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidSampleCount {
            got: samples,
            min: MIN_MC_SAMPLES,
        });
    }
    let rule = regime.delegation_rule();
    let prefs = &scenario.prefs;
    let public = &design.signal;
    let private = &scenario.agent_signal;

    // action[s1][s2]; the principal acts on the interim belief when she keeps
    // the decision.
    let mut action = [[Bit::Zero; 2]; 2];
    for s1 in [Bit::Zero, Bit::One] {
        let Ok(interim) = update_belief(scenario.prior, public, s1) else {
            continue;
        };
        let delegate = delegates(rule, interim, scenario);
        for s2 in [Bit::Zero, Bit::One] {
            action[s1.index() as usize][s2.index() as usize] = if delegate {
                let post = update_belief(interim, private, s2).unwrap_or(interim);
                agent_action(prefs, post)
            } else {
                principal_action(prefs, interim)
            };
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng, p: f64| rng.random::<f64>() < p;
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for i in 0..samples {
        let state = Bit::from(draw(&mut rng, scenario.prior.get()));
        let s1 = Bit::from(draw(&mut rng, public.likelihood(Bit::One, state)));
        let s2 = Bit::from(draw(&mut rng, private.likelihood(Bit::One, state)));
        let act = action[s1.index() as usize][s2.index() as usize];
        let x = prefs.principal().get(state, act);
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let sd = (m2 / (samples - 1) as f64).sqrt();
    Ok(McEstimate {
        mean,
        half_width: Z_99 * sd / (samples as f64).sqrt(),
        samples,
        seed,
    })
}

/// Exact expectation of the pipeline simulated by [`mc_pipeline_payoff`].
pub fn analytic_pipeline_payoff<S: Scalar>(
    scenario: &Scenario<S>,
    design: &DesignSolution<S>,
    regime: PolicyRegime,
) -> S {
    let rule = regime.delegation_rule();
    let mut total = S::zero();
    for s1 in [Bit::Zero, Bit::One] {
        let p = design.signal.realization_prob(scenario.prior, s1);
        let Ok(interim) = update_belief(scenario.prior, &design.signal, s1) else {
            continue;
        };
        let value = if delegates(rule, interim, scenario) {
            exante_delegation_payoff(interim, &scenario.agent_signal, &scenario.prefs)
        } else {
            non_delegation_envelope(&scenario.prefs, interim)
        };
        total = total + p * value;
    }
    total
}

pub fn brute_force_strict_delegation_for(
    interim: f64,
    agent_signal: &BinarySignal<f64>,
    prefs: &Preferences<f64>,
) -> bool {
    brute_force_strict_delegation(interim, agent_signal, prefs.principal(), prefs.agent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::optimal_design;
    use crate::model::BlackwellConstraint;

    fn b(x: f64) -> Belief<f64> {
        Belief::new(x).unwrap()
    }

    fn reference_scenario(prior: f64, lo: f64, hi: f64) -> Scenario<f64> {
        let prefs = Preferences::new(
            PayoffMatrix::new(1.0, 0.0, 0.0, 1.0),
            PayoffMatrix::new(1.25, -0.25, 0.25, 0.75),
        )
        .unwrap();
        Scenario::new(
            b(prior),
            prefs,
            BinarySignal::symmetric(0.8).unwrap(),
            BlackwellConstraint::new(b(lo), b(hi)).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn indifference_interim_matches_three_sevenths() {
        let s = reference_scenario(0.5, 0.35, 0.55);
        let x = indifference_interim(&s).unwrap();
        assert!((x - 3.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn grid_finds_one_sided_split() {
        let g = grid_optimal_design(&reference_scenario(0.5, 0.35, 0.55), 400);
        assert!((g.best_payoff - 0.8).abs() < 1e-12, "{}", g.best_payoff);
        assert!((g.best_low.get() - 3.0 / 7.0).abs() < 1e-12);
        assert!((g.best_high.get() - 0.55).abs() < 1e-12);
    }

    #[test]
    fn grid_finds_maximal_split() {
        let g = grid_optimal_design(&reference_scenario(0.5, 0.1, 0.9), 400);
        assert!((g.best_payoff - 0.9).abs() < 1e-12);
        assert_eq!((g.best_low.get(), g.best_high.get()), (0.1, 0.9));
    }

    #[test]
    fn brute_force_delegation_matches_examples() {
        let s = reference_scenario(0.5, 0.35, 0.55);
        assert!(brute_force_strict_delegation_for(
            0.5,
            &s.agent_signal,
            &s.prefs
        ));
        assert!(!brute_force_strict_delegation_for(
            0.9,
            &s.agent_signal,
            &s.prefs
        ));
        assert!(!brute_force_strict_delegation_for(
            0.1,
            &s.agent_signal,
            &s.prefs
        ));
    }

    #[test]
    fn mc_agrees_with_analytic() {
        let s = reference_scenario(0.5, 0.35, 0.55);
        let d = optimal_design(&s).unwrap();
        let est = mc_pipeline_payoff(&s, &d, PolicyRegime::OptimalJoint, 20_000, 11).unwrap();
        let exact = analytic_pipeline_payoff(&s, &d, PolicyRegime::OptimalJoint);
        assert!((exact - 0.8).abs() < 1e-12);
        assert!(est.contains(exact), "{est:?} vs {exact}");
        let again = mc_pipeline_payoff(&s, &d, PolicyRegime::OptimalJoint, 20_000, 11).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn mc_rejects_small_samples() {
        let s = reference_scenario(0.5, 0.35, 0.55);
        let d = optimal_design(&s).unwrap();
        assert!(matches!(
            mc_pipeline_payoff(&s, &d, PolicyRegime::OptimalJoint, 999, 0),
            Err(Error::InvalidSampleCount { got: 999, .. })
        ));
    }
}
