//! One-dimensional parameter sweeps emitted as CSV.

use persuade_core::design::{design_report_with, h_piecewise, PiecewiseH};
use persuade_core::policy::{delegation_only_design, evaluate_regime_with, DelegationRule};
use persuade_core::{
    optimal_delegation, Belief, ConstraintDraft, PayoffMatrix, PolicyRegime, PosteriorPair,
    Scenario,
};

use crate::scenario_file::{InputError, ScenarioSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepField {
    Prior,
    Interim,
    /// Both agent-signal accuracies at once.
    Q,
    Q0,
    Q1,
    Principal(usize),
    Agent(usize),
    /// Agent cutoff, reached by rescaling `v00` with the other entries fixed.
    AgentCutoff,
    ConstraintLow,
    ConstraintHigh,
}

const MATRIX_KEYS: [&str; 4] = ["00", "01", "10", "11"];

impl SweepField {
    pub fn parse(s: &str) -> Result<Self, InputError> {
        let field = match s {
            "prior" => SweepField::Prior,
            "interim" => SweepField::Interim,
            "q" => SweepField::Q,
            "q0" => SweepField::Q0,
            "q1" => SweepField::Q1,
            "agent_cutoff" => SweepField::AgentCutoff,
            "constraint_low" => SweepField::ConstraintLow,
            "constraint_high" => SweepField::ConstraintHigh,
            _ => {
                let idx = |rest: &str| MATRIX_KEYS.iter().position(|k| *k == rest);
                match (s.get(..1), s.get(1..).and_then(idx)) {
                    (Some("r"), Some(i)) => SweepField::Principal(i),
                    (Some("v"), Some(i)) => SweepField::Agent(i),
                    _ => {
                        return Err(InputError::new(format!(
                            "unknown sweep field `{s}` (expected prior, interim, q, q0, q1, r00..r11, v00..v11, \
                             agent_cutoff, constraint_low or constraint_high)"
                        )))
                    }
                }
            }
        };
        Ok(field)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Regime(PolicyRegime),
    /// Ex-ante payoff of delegating at the interim belief.
    DelegationPayoff,
    DirectPayoff,
    /// Better of the two.
    StagePayoff,
}

impl Metric {
    pub fn parse(s: &str) -> Result<Self, InputError> {
        Ok(match s {
            "delegation-payoff" => Metric::DelegationPayoff,
            "direct-payoff" => Metric::DirectPayoff,
            "delegation-stage-payoff" => Metric::StagePayoff,
            _ => Metric::Regime(PolicyRegime::parse(s).ok_or_else(|| {
                InputError::new(format!(
                    "unknown regime `{s}` (expected optimal-joint, mandated-delegation, mandated-maximal-signal, \
                     no-algorithm, no-human, delegation-payoff, direct-payoff or delegation-stage-payoff)"
                ))
            })?),
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Regime(r) => r.as_str(),
            Metric::DelegationPayoff => "delegation-payoff",
            Metric::DirectPayoff => "direct-payoff",
            Metric::StagePayoff => "delegation-stage-payoff",
        }
    }

    fn needs_scenario(self) -> bool {
        matches!(self, Metric::Regime(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub field: SweepField,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub metrics: Vec<Metric>,
    /// Interim belief for the delegation metrics; defaults to the prior.
    pub interim: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub metric: Metric,
    pub payoff: f64,
    /// Shape of the public signal used.
    pub design: &'static str,
    /// Ex-ante probability that the decision goes to the agent.
    pub delegate: f64,
}

pub fn grid_values(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n)
            .map(|i| {
                if i + 1 == n {
                    to
                } else {
                    from + (to - from) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn apply(
    spec: &mut ScenarioSpec,
    interim: &mut Option<f64>,
    field: SweepField,
    x: f64,
) -> Result<(), InputError> {
    let set = |m: &mut PayoffMatrix<f64>, i: usize| match i {
        0 => m.u00 = x,
        1 => m.u01 = x,
        2 => m.u10 = x,
        _ => m.u11 = x,
    };
    match field {
        SweepField::Prior => spec.prior = Some(x),
        SweepField::Interim => *interim = Some(x),
        SweepField::Q => spec.agent_signal = (x, x),
        SweepField::Q0 => spec.agent_signal.0 = x,
        SweepField::Q1 => spec.agent_signal.1 = x,
        SweepField::Principal(i) => set(&mut spec.principal, i),
        SweepField::Agent(i) => set(&mut spec.agent, i),
        SweepField::AgentCutoff => {
            if !(x > 0.0 && x < 1.0) {
                return Err(InputError::new(format!(
                    "agent_cutoff {x} must lie in (0, 1)"
                )));
            }
            let a = &mut spec.agent;
            a.u00 = a.u01 + (a.u11 - a.u10) * x / (1.0 - x);
        }
        SweepField::ConstraintLow | SweepField::ConstraintHigh => {
            let prior = spec.prior.unwrap_or(0.5);
            let (lo, hi) = match spec.constraint {
                Some(ConstraintDraft::Posteriors(lo, hi)) => (lo, hi),
                Some(ConstraintDraft::Signal(..)) => {
                    return Err(InputError::new(
                        "constraint_low/constraint_high sweeps need a `posteriors` constraint",
                    ))
                }
                None => (prior, prior),
            };
            spec.constraint = Some(if field == SweepField::ConstraintLow {
                ConstraintDraft::Posteriors(x, hi)
            } else {
                ConstraintDraft::Posteriors(lo, x)
            });
        }
    }
    Ok(())
}

fn split_shape(split: &PosteriorPair<f64>, scenario: &Scenario<f64>) -> &'static str {
    let tol = 1e-12;
    if (split.high.get() - split.low.get()).abs() <= tol {
        "uninformative"
    } else if (split.low.get() - scenario.constraint.max_low.get()).abs() <= tol
        && (split.high.get() - scenario.constraint.max_high.get()).abs() <= tol
    {
        "maximal"
    } else {
        "partial"
    }
}

fn delegation_probability(
    split: &PosteriorPair<f64>,
    scenario: &Scenario<f64>,
    rule: DelegationRule,
) -> f64 {
    split.expect(|x| {
        let d = match rule {
            DelegationRule::Always => true,
            DelegationRule::Never => false,
            DelegationRule::Optimal => {
                optimal_delegation(x, &scenario.agent_signal, &scenario.prefs).delegate
            }
        };
        if d {
            1.0
        } else {
            0.0
        }
    })
}

fn regime_row(
    scenario: &Scenario<f64>,
    h: &PiecewiseH<f64>,
    regime: PolicyRegime,
) -> Result<(f64, &'static str, f64), InputError> {
    let err = |e: persuade_core::Error| InputError::new(e.to_string());
    let payoff = evaluate_regime_with(scenario, h, regime).map_err(err)?;
    let degenerate =
        PosteriorPair::around(scenario.prior, scenario.prior, scenario.prior).map_err(err)?;
    let (split, design) = match regime {
        PolicyRegime::OptimalJoint => {
            let r = design_report_with(scenario, h.clone()).map_err(err)?;
            (r.solution.split(), r.solution.regime.as_str())
        }
        PolicyRegime::MandatedDelegation => {
            let split = delegation_only_design(scenario, h).0;
            (split, split_shape(&split, scenario))
        }
        PolicyRegime::MandatedMaximalSignal | PolicyRegime::NoHuman => {
            (scenario.maximal_split(), "maximal")
        }
        PolicyRegime::NoAlgorithm => (degenerate, "uninformative"),
    };
    Ok((
        payoff,
        design,
        delegation_probability(&split, scenario, regime.delegation_rule()),
    ))
}

pub fn sweep(base: &ScenarioSpec, cfg: &SweepConfig) -> Result<Vec<SweepRow>, InputError> {
    if cfg.steps == 0 {
        return Err(InputError::new("--steps must be at least 1"));
    }
    if cfg.metrics.is_empty() {
        return Err(InputError::new(
            "--regimes must name at least one regime or metric",
        ));
    }
    let mut rows = Vec::with_capacity(cfg.steps * cfg.metrics.len());
    for x in grid_values(cfg.from, cfg.to, cfg.steps) {
        let mut spec = *base;
        let mut interim = cfg.interim;
        apply(&mut spec, &mut interim, cfg.field, x)?;
        let at =
            |e: InputError| InputError::new(format!("at {} = {x}: {e}", field_name(cfg.field)));
        let (prefs, signal) = spec.players().map_err(at)?;
        let scenario = if cfg.metrics.iter().any(|m| m.needs_scenario()) {
            Some(spec.scenario().map_err(at)?)
        } else {
            None
        };
        let h = h_piecewise(&signal, &prefs);
        for &metric in &cfg.metrics {
            let (payoff, design, delegate) = match metric {
                Metric::Regime(regime) => {
                    regime_row(scenario.as_ref().expect("built above"), &h, regime).map_err(at)?
                }
                _ => {
                    let mu = interim.or(spec.prior).ok_or_else(|| {
                        InputError::new("delegation metrics need --interim or a prior in the file")
                    })?;
                    let mu = Belief::new(mu).map_err(|_| {
                        at(InputError::new(format!("interim {mu} is outside [0, 1]")))
                    })?;
                    let d = optimal_delegation(mu, &signal, &prefs);
                    let payoff = match metric {
                        Metric::DelegationPayoff => d.delegation_payoff,
                        Metric::DirectPayoff => d.direct_payoff,
                        _ => d.payoff(),
                    };
                    let delegate = match metric {
                        Metric::DelegationPayoff => 1.0,
                        Metric::DirectPayoff => 0.0,
                        _ => f64::from(u8::from(d.delegate)),
                    };
                    (payoff, "interim", delegate)
                }
            };
            rows.push(SweepRow {
                value: x,
                metric,
                payoff,
                design,
                delegate,
            });
        }
    }
    Ok(rows)
}

fn field_name(field: SweepField) -> String {
    match field {
        SweepField::Prior => "prior".into(),
        SweepField::Interim => "interim".into(),
        SweepField::Q => "q".into(),
        SweepField::Q0 => "q0".into(),
        SweepField::Q1 => "q1".into(),
        SweepField::Principal(i) => format!("r{}", MATRIX_KEYS[i]),
        SweepField::Agent(i) => format!("v{}", MATRIX_KEYS[i]),
        SweepField::AgentCutoff => "agent_cutoff".into(),
        SweepField::ConstraintLow => "constraint_low".into(),
        SweepField::ConstraintHigh => "constraint_high".into(),
    }
}

/// Seventeen significant digits, so values survive a text round trip.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("value,regime,payoff,design,delegate\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(r.value),
            r.metric.as_str(),
            fmt_float(r.payoff),
            r.design,
            fmt_float(r.delegate)
        ));
    }
    out
}
