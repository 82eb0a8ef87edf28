//! Information design: the delegation-stage payoff `H` as a function of the
//! interim posterior, its discontinuity `ρ`, and the optimal public signal
//! under a Blackwell constraint.
//!
//! With the agent's signal fixed, the ex-ante delegation payoff has three
//! affine pieces in the interim belief:
//!
//! * below `ρ_low` both final posteriors sit below the agent cutoff, so the
//!   agent always picks action 0 and the principal earns `U0`;
//! * above `ρ_high` both sit above it and the principal earns `U1`;
//! * in between the agent follows his signal, and the principal earns
//!   `(1 - x)(q0 r00 + (1 - q0) r01) + x((1 - q1) r10 + q1 r11)`.
//!
//! `ρ_low` is the interim belief at which the high final posterior equals the
//! agent cutoff, `ρ_high` the one at which the low final posterior does. At
//! either knot the agent is indifferent after one realization and picks the
//! principal-preferred action, which fixes on which side each knot is closed.
//! `H = max(ex-ante delegation, V_N)` then has a single possible jump, at
//! `ρ` (`ρ_low` when action 1 is principal-preferred, `ρ_high` otherwise), and
//! is convex on either side of it. That is why the optimal split only ever
//! uses the constraint posteriors and `ρ`.

use crate::error::{Error, Result};
use crate::model::{
    non_delegation_envelope, principal_preferred_action, signal_from_posteriors, Belief,
    BinarySignal, Bit, Line, PosteriorPair, Preferences, Scenario,
};
use crate::piecewise::{Breakpoint, PiecewiseLinear};
use crate::scalar::Scalar;

/// Interim beliefs at which the high (`.0`) and low (`.1`) final posterior
/// equals `agent_cutoff`.
fn raw_breakpoints<S: Scalar>(agent_signal: &BinarySignal<S>, agent_cutoff: S) -> (S, S) {
    let (q0, q1, c) = (agent_signal.t0(), agent_signal.t1(), agent_cutoff);
    let one = S::one();
    let low = (one - q0) * c / ((one - q0) * c + q1 * (one - c));
    let high = q0 * c / (q0 * c + (one - q1) * (one - c));
    (low.clamp_unit(), high.clamp_unit())
}

/// `(ρ_low, ρ_high)`.
pub fn breakpoints<S: Scalar>(
    agent_signal: &BinarySignal<S>,
    prefs: &Preferences<S>,
) -> Result<(Belief<S>, Belief<S>)> {
    if prefs.is_aligned() {
        return Err(Error::AlignedPreferences);
    }
    let (lo, hi) = raw_breakpoints(agent_signal, prefs.agent_cutoff().get());
    Ok((Belief::clamped(lo), Belief::clamped(hi)))
}

/// The interim belief at which one more principal-preferred private
/// realization leaves the agent exactly indifferent.
pub fn rho<S: Scalar>(agent_signal: &BinarySignal<S>, prefs: &Preferences<S>) -> Result<Belief<S>> {
    let (lo, hi) = breakpoints(agent_signal, prefs)?;
    Ok(match principal_preferred_action(prefs) {
        Some(Bit::One) => lo,
        _ => hi,
    })
}

/// Slope of the ex-ante delegation payoff between `ρ_low` and `ρ_high`:
/// `r10 - r01 + (r01 - r00) q0 + (r11 - r10) q1`.
pub fn intermediate_slope<S: Scalar>(agent_signal: &BinarySignal<S>, prefs: &Preferences<S>) -> S {
    intermediate_line(agent_signal, prefs).slope
}

/// The ex-ante delegation payoff on the section where the agent follows his
/// signal.
pub fn intermediate_line<S: Scalar>(
    agent_signal: &BinarySignal<S>,
    prefs: &Preferences<S>,
) -> Line<S> {
    let r = prefs.principal();
    let (q0, q1) = (agent_signal.t0(), agent_signal.t1());
    let one = S::one();
    let at_zero = q0 * r.u00 + (one - q0) * r.u01;
    let at_one = (one - q1) * r.u10 + q1 * r.u11;
    Line::through_unit(at_zero, at_one)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Discontinuity<S> {
    pub at: Belief<S>,
    pub left_limit: S,
    pub value: S,
    pub right_limit: S,
}

impl<S: Scalar> From<&Breakpoint<S>> for Discontinuity<S> {
    fn from(b: &Breakpoint<S>) -> Self {
        Discontinuity {
            at: Belief::clamped(b.at),
            left_limit: b.left_limit,
            value: b.value,
            right_limit: b.right_limit,
        }
    }
}

/// Closed-form `H` together with the ex-ante delegation payoff it is built
/// from.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseH<S> {
    pub h: PiecewiseLinear<S>,
    pub delegation: PiecewiseLinear<S>,
    pub principal_cutoff: Belief<S>,
    pub agent_cutoff: Belief<S>,
    pub rho_low: Belief<S>,
    pub rho_high: Belief<S>,
    /// `None` when the players are aligned.
    pub rho: Option<Belief<S>>,
    pub intermediate: Line<S>,
    pub discontinuity: Option<Discontinuity<S>>,
}

impl<S: Scalar> PiecewiseH<S> {
    pub fn eval(&self, interim: Belief<S>) -> S {
        self.h.eval(interim.get())
    }

    pub fn delegation_payoff(&self, interim: Belief<S>) -> S {
        self.delegation.eval(interim.get())
    }

    /// Breakpoint beliefs of `H` strictly inside `(0, 1)`.
    pub fn interior_breakpoints(&self) -> Vec<Belief<S>> {
        self.h
            .breakpoints()
            .iter()
            .filter(|b| b.at > S::zero() && b.at < S::one())
            .map(|b| Belief::clamped(b.at))
            .collect()
    }
}

/// Builds `H` segment by segment. Handles both orderings of `ρ` and the
/// principal cutoff, and aligned preferences (no jump).
pub fn h_piecewise<S: Scalar>(
    agent_signal: &BinarySignal<S>,
    prefs: &Preferences<S>,
) -> PiecewiseH<S> {
    let r = prefs.principal();
    let u0 = r.line(Bit::Zero);
    let u1 = r.line(Bit::One);
    let mid_line = intermediate_line(agent_signal, prefs);
    let (rho_low, rho_high) = raw_breakpoints(agent_signal, prefs.agent_cutoff().get());
    let preferred = principal_preferred_action(prefs);
    // Indifferent agent picks the principal-preferred action; for aligned
    // players either action pays the principal the same.
    let tie_to_one = preferred != Some(Bit::Zero);

    let delegation_piece = move |x: S| -> Line<S> {
        if x < rho_low {
            u0
        } else if x < rho_high {
            mid_line
        } else {
            u1
        }
    };
    let delegation_value = move |x: S| -> S {
        let line = if x.approx_eq(rho_low) && x.approx_eq(rho_high) {
            // Both final posteriors at the cutoff only happens for a degenerate signal.
            if tie_to_one {
                u1
            } else {
                u0
            }
        } else if x.approx_eq(rho_low) {
            if tie_to_one {
                mid_line
            } else {
                u0
            }
        } else if x.approx_eq(rho_high) {
            if tie_to_one {
                u1
            } else {
                mid_line
            }
        } else {
            delegation_piece(x)
        };
        line.eval(x)
    };
    let delegation =
        PiecewiseLinear::from_knots([rho_low, rho_high], delegation_piece, delegation_value);

    let pc = prefs.principal_cutoff().get();
    let direct_piece = move |x: S| if x < pc { u0 } else { u1 };
    let direct_value = |x: S| non_delegation_envelope(prefs, Belief::clamped(x));

    let mut knots = vec![rho_low, rho_high, pc];
    knots.extend(mid_line.crossing(&u0));
    knots.extend(mid_line.crossing(&u1));
    let h = PiecewiseLinear::from_knots(
        knots,
        |m| {
            let d = delegation_piece(m);
            let n = direct_piece(m);
            if d.eval(m) > n.eval(m) {
                d
            } else {
                n
            }
        },
        |x| delegation_value(x).max_of(direct_value(x)),
    );

    let discontinuity = h.jumps().next().map(Discontinuity::from);
    let rho = match preferred {
        Some(Bit::One) => Some(Belief::clamped(rho_low)),
        Some(Bit::Zero) => Some(Belief::clamped(rho_high)),
        None => None,
    };
    PiecewiseH {
        h,
        delegation,
        principal_cutoff: prefs.principal_cutoff(),
        agent_cutoff: prefs.agent_cutoff(),
        rho_low: Belief::clamped(rho_low),
        rho_high: Belief::clamped(rho_high),
        rho,
        intermediate: mid_line,
        discontinuity,
    }
}

/// A belief paired with a payoff, as used in the convexification test.
pub type Point<S> = (Belief<S>, S);

/// Whether the three points lie on the graph of a weakly convex continuous
/// function: trivially so when the middle point is not strictly between the
/// outer two in belief, otherwise iff it lies weakly below their chord.
pub fn convexifiable<S: Scalar>(low: Point<S>, middle: Point<S>, high: Point<S>) -> Result<bool> {
    let (x0, y0) = (low.0.get(), low.1);
    let (xm, ym) = (middle.0.get(), middle.1);
    let (x1, y1) = (high.0.get(), high.1);
    if x0 > x1 {
        return Err(Error::UnsortedPoints);
    }
    if !(x0.definitely_lt(xm) && xm.definitely_lt(x1)) {
        return Ok(true);
    }
    let chord = y0 + (y1 - y0) * (xm - x0) / (x1 - x0);
    Ok(!ym.definitely_gt(chord))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DesignRegime {
    /// Constraint posteriors; the maximal signal is optimal.
    Maximal,
    /// High posterior at the constraint, low posterior at `ρ`.
    OneSidedHigh,
    /// Low posterior at the constraint, high posterior at `ρ`.
    OneSidedLow,
    /// Prior equals `ρ`; no information is released.
    Uninformative,
    /// No disagreement interval; the maximal signal is optimal.
    AlignedTrivial,
}

impl DesignRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            DesignRegime::Maximal => "maximal",
            DesignRegime::OneSidedHigh => "one-sided-high",
            DesignRegime::OneSidedLow => "one-sided-low",
            DesignRegime::Uninformative => "uninformative",
            DesignRegime::AlignedTrivial => "aligned-trivial",
        }
    }
}

impl std::fmt::Display for DesignRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignSolution<S> {
    pub low_posterior: Belief<S>,
    pub high_posterior: Belief<S>,
    /// Probability of the high public realization.
    pub prob_high: S,
    pub signal: BinarySignal<S>,
    pub expected_payoff: S,
    pub regime: DesignRegime,
}

impl<S: Scalar> DesignSolution<S> {
    pub fn split(&self) -> PosteriorPair<S> {
        PosteriorPair {
            low: self.low_posterior,
            high: self.high_posterior,
            prob_high: self.prob_high,
        }
    }
}

/// Expected `H` of the Bayes-plausible split of `prior` into `low`/`high`.
pub fn split_payoff<S: Scalar>(
    h: &PiecewiseH<S>,
    prior: Belief<S>,
    low: Belief<S>,
    high: Belief<S>,
) -> Result<(PosteriorPair<S>, S)> {
    let split = PosteriorPair::around(prior, low, high)?;
    Ok((split, split.expect(|b| h.eval(b))))
}

fn solution<S: Scalar>(
    h: &PiecewiseH<S>,
    prior: Belief<S>,
    low: Belief<S>,
    high: Belief<S>,
    regime: DesignRegime,
) -> Result<DesignSolution<S>> {
    let (split, expected_payoff) = split_payoff(h, prior, low, high)?;
    let signal = signal_from_posteriors(prior, split.low, split.high)?;
    Ok(DesignSolution {
        low_posterior: split.low,
        high_posterior: split.high,
        prob_high: split.prob_high,
        signal,
        expected_payoff,
        regime,
    })
}

/// Everything the closed-form solver looked at, for reporting.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignReport<S> {
    pub solution: DesignSolution<S>,
    pub h: PiecewiseH<S>,
    pub rho: Option<Belief<S>>,
    pub h_at_max_low: S,
    pub h_at_max_high: S,
    pub h_at_rho: Option<S>,
    /// `None` when the players are aligned.
    pub convexifiable: Option<bool>,
    pub maximal_payoff: S,
}

/// Optimal public signal for a validated scenario.
pub fn optimal_design<S: Scalar>(scenario: &Scenario<S>) -> Result<DesignSolution<S>> {
    design_report(scenario).map(|r| r.solution)
}

pub fn design_report<S: Scalar>(scenario: &Scenario<S>) -> Result<DesignReport<S>> {
    let h = h_piecewise(&scenario.agent_signal, &scenario.prefs);
    design_report_with(scenario, h)
}

/// As [`design_report`] with a prebuilt `H` for the scenario's preferences and
/// agent signal.
pub fn design_report_with<S: Scalar>(
    scenario: &Scenario<S>,
    h: PiecewiseH<S>,
) -> Result<DesignReport<S>> {
    let prior = scenario.prior;
    let (a, b) = (scenario.constraint.max_low, scenario.constraint.max_high);
    let (h_a, h_b) = (h.eval(a), h.eval(b));
    let (_, maximal_payoff) = split_payoff(&h, prior, a, b)?;
    let h_at_rho = h.rho.map(|r| h.eval(r));

    let (low, high, regime, convex) = if prior.is_degenerate() {
        (prior, prior, DesignRegime::Uninformative, None)
    } else {
        match h.rho {
            None => (a, b, DesignRegime::AlignedTrivial, None),
            Some(rho) => {
                let straddles =
                    a.get().definitely_lt(rho.get()) && rho.get().definitely_lt(b.get());
                let convex = convexifiable((a, h_a), (rho, h.eval(rho)), (b, h_b))?;
                if !straddles || convex {
                    (a, b, DesignRegime::Maximal, Some(convex))
                } else if prior.get().definitely_gt(rho.get()) {
                    (rho, b, DesignRegime::OneSidedHigh, Some(convex))
                } else if prior.get().definitely_lt(rho.get()) {
                    (a, rho, DesignRegime::OneSidedLow, Some(convex))
                } else {
                    (prior, prior, DesignRegime::Uninformative, Some(convex))
                }
            }
        }
    };
    let solution = solution(&h, prior, low, high, regime)?;
    Ok(DesignReport {
        solution,
        rho: h.rho,
        h_at_max_low: h_a,
        h_at_max_high: h_b,
        h_at_rho,
        convexifiable: convex,
        maximal_payoff,
        h,
    })
}
