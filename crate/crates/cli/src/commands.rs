use std::fmt::Write as _;

use persuade_core::oracle::{
    analytic_pipeline_payoff, grid_optimal_design, mc_pipeline_payoff, MIN_MC_SAMPLES,
};
use persuade_core::{
    design_report, final_posteriors, find_delegation_loss_witness,
    find_maximal_signal_loss_witness, h_piecewise, necessary_condition, optimal_delegation,
    regime_report, Belief, BinarySignal, NoWitness, PolicyRegime, Preferences, Scenario, Witness,
    WitnessSearch,
};
use serde_json::{json, Value};

use crate::scenario_file::{InputError, ScenarioSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
        }
    }
}

/// Output of one command in both renderings.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub text: String,
    pub status: Status,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report {
            json,
            text,
            status: Status::Ok,
        }
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            serde_json::to_string_pretty(&self.json).expect("report values are finite")
        } else {
            self.text.clone()
        }
    }
}

fn belief(x: f64, what: &str) -> Result<Belief<f64>, InputError> {
    Belief::new(x).map_err(|_| InputError::new(format!("{what}: {x} is outside [0, 1]")))
}

pub fn delegate(spec: &ScenarioSpec, interim: Option<f64>) -> Result<Report, InputError> {
    let (prefs, signal) = spec.players()?;
    let interim = interim
        .or(spec.prior)
        .ok_or_else(|| InputError::new("--interim is required when the file has no prior"))?;
    let interim = belief(interim, "interim")?;
    let decision = optimal_delegation(interim, &signal, &prefs);
    let finals = final_posteriors(interim, &signal);
    let necessary = necessary_condition(&signal, interim, &prefs);
    let consistent = !decision.strict || necessary;
    let choice = if decision.delegate {
        "delegate"
    } else {
        "direct"
    };

    let json = json!({
        "interim": interim.get(),
        "decision": choice,
        "strict_delegation": decision.strict,
        "delegation_payoff": decision.delegation_payoff,
        "direct_payoff": decision.direct_payoff,
        "stage_payoff": decision.payoff(),
        "final_posteriors": { "low": finals.low.get(), "high": finals.high.get() },
        "necessary_condition": necessary,
        "necessary_condition_consistent": consistent,
    });
    let mut text = String::new();
    let _ = writeln!(text, "interim belief       {}", interim.get());
    let _ = writeln!(text, "decision             {choice}");
    let _ = writeln!(text, "delegation payoff    {}", decision.delegation_payoff);
    let _ = writeln!(text, "direct payoff        {}", decision.direct_payoff);
    let _ = writeln!(text, "stage payoff (H)     {}", decision.payoff());
    let _ = writeln!(
        text,
        "final posteriors     {} / {}",
        finals.low.get(),
        finals.high.get()
    );
    let _ = writeln!(text, "strict delegation    {}", decision.strict);
    let _ = writeln!(
        text,
        "spread condition     {} ({})",
        necessary,
        if consistent { "consistent" } else { "VIOLATED" }
    );
    let mut report = Report::ok(json, text);
    if !consistent {
        report.status = Status::CheckFailed;
    }
    Ok(report)
}

pub fn design(spec: &ScenarioSpec) -> Result<Report, InputError> {
    let scenario = spec.scenario()?;
    let r = design_report(&scenario).map_err(|e| InputError::new(e.to_string()))?;
    let sol = &r.solution;
    let json = json!({
        "regime": sol.regime.as_str(),
        "low_posterior": sol.low_posterior.get(),
        "high_posterior": sol.high_posterior.get(),
        "prob_high": sol.prob_high,
        "signal": { "p0": sol.signal.t0(), "p1": sol.signal.t1() },
        "expected_payoff": sol.expected_payoff,
        "maximal_payoff": r.maximal_payoff,
        "rho": r.rho.map(|x| x.get()),
        "convexifiable": r.convexifiable,
        "h_at_max_low": r.h_at_max_low,
        "h_at_rho": r.h_at_rho,
        "h_at_max_high": r.h_at_max_high,
    });
    let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| x.to_string());
    let mut text = String::new();
    let _ = writeln!(text, "regime               {}", sol.regime);
    let _ = writeln!(
        text,
        "posteriors           {} / {} (prob high {})",
        sol.low_posterior.get(),
        sol.high_posterior.get(),
        sol.prob_high
    );
    let _ = writeln!(
        text,
        "signal p0, p1        {}, {}",
        sol.signal.t0(),
        sol.signal.t1()
    );
    let _ = writeln!(text, "expected payoff      {}", sol.expected_payoff);
    let _ = writeln!(text, "maximal signal       {}", r.maximal_payoff);
    let _ = writeln!(text, "rho                  {}", opt(r.rho.map(|x| x.get())));
    let _ = writeln!(
        text,
        "convexifiable        {}",
        r.convexifiable.map_or("n/a".to_string(), |c| c.to_string())
    );
    let _ = writeln!(
        text,
        "H at low/rho/high    {} / {} / {}",
        r.h_at_max_low,
        opt(r.h_at_rho),
        r.h_at_max_high
    );
    Ok(Report::ok(json, text))
}

pub fn regimes(spec: &ScenarioSpec) -> Result<Report, InputError> {
    let scenario = spec.scenario()?;
    let r = regime_report(&scenario).map_err(|e| InputError::new(e.to_string()))?;
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| json!({ "regime": row.regime.as_str(), "payoff": row.payoff, "rank": row.rank }))
        .collect();
    let mut text = String::new();
    for row in &r.rows {
        let _ = writeln!(
            text,
            "{:<24} {:<22} rank {}",
            row.regime.as_str(),
            row.payoff,
            row.rank
        );
    }
    let mut report = Report::ok(
        json!({ "regimes": rows, "optimal_dominates": r.optimal_dominates }),
        text,
    );
    if !r.optimal_dominates {
        report.status = Status::CheckFailed;
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// Delegating at some interim belief is strictly worse than acting.
    DelegationLoss,
    /// Withholding the public signal strictly beats the maximal signal.
    MaximalSignalLoss,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::DelegationLoss => "delegation-loss",
            WitnessKind::MaximalSignalLoss => "maximal-signal-loss",
        }
    }

    pub fn search(
        self,
        prefs: &Preferences<f64>,
        signal: &BinarySignal<f64>,
        search: &WitnessSearch,
    ) -> Result<Witness<f64>, NoWitness> {
        match self {
            WitnessKind::DelegationLoss => find_delegation_loss_witness(prefs, signal, search),
            WitnessKind::MaximalSignalLoss => {
                find_maximal_signal_loss_witness(prefs, signal, search)
            }
        }
    }
}

pub fn witness(spec: &ScenarioSpec, kind: WitnessKind, seed: u64) -> Result<Report, InputError> {
    let (prefs, signal) = spec.players()?;
    let search = WitnessSearch {
        seed,
        ..WitnessSearch::default()
    };
    Ok(match kind.search(&prefs, &signal, &search) {
        Ok(w) => {
            let c = w.scenario.constraint;
            let json = json!({
                "kind": kind.as_str(),
                "found": true,
                "belief": w.interim_or_prior.get(),
                "constraint": [c.max_low.get(), c.max_high.get()],
                "payoff_gap": w.payoff_gap,
                "seed": seed,
            });
            let label = match kind {
                WitnessKind::DelegationLoss => "interim",
                WitnessKind::MaximalSignalLoss => "prior",
            };
            let mut text = format!("witness ({})\n", kind.as_str());
            let _ = writeln!(text, "{label:<20} {}", w.interim_or_prior.get());
            if kind == WitnessKind::MaximalSignalLoss {
                let _ = writeln!(
                    text,
                    "constraint           [{}, {}]",
                    c.max_low.get(),
                    c.max_high.get()
                );
            }
            let _ = writeln!(text, "payoff gap           {}", w.payoff_gap);
            Report::ok(json, text)
        }
        Err(none) => {
            let reason = match none {
                NoWitness::AlignedPreferences => "aligned-preferences",
                NoWitness::StateRevealingSignal => "state-revealing-signal",
                NoWitness::NotFound { .. } => "not-found",
            };
            let best_gap = match none {
                NoWitness::NotFound { best_gap } => Some(best_gap),
                _ => None,
            };
            let json = json!({
                "kind": kind.as_str(),
                "found": false,
                "reason": reason,
                "best_gap": best_gap,
                "seed": seed,
            });
            Report {
                json,
                text: format!("no witness ({}): {none}\n", kind.as_str()),
                status: if none.precondition_failed() {
                    Status::Ok
                } else {
                    Status::CheckFailed
                },
            }
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub grid_n: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

pub const GRID_TOLERANCE: f64 = 1e-9;
pub const MC_FLOOR: f64 = 0.003;

struct Check {
    name: &'static str,
    delta: f64,
    bound: f64,
}

pub fn oracle_check(spec: &ScenarioSpec, opts: OracleOptions) -> Result<Report, InputError> {
    if opts.mc_samples < MIN_MC_SAMPLES {
        return Err(InputError::new(format!(
            "--mc-samples {} is below the minimum {MIN_MC_SAMPLES}",
            opts.mc_samples
        )));
    }
    if opts.grid_n < 2 {
        return Err(InputError::new("--grid-n must be at least 2"));
    }
    let scenario: Scenario<f64> = spec.scenario()?;
    let report = design_report(&scenario).map_err(|e| InputError::new(e.to_string()))?;
    let sol = &report.solution;
    let grid = grid_optimal_design(&scenario, opts.grid_n);
    let analytic = analytic_pipeline_payoff(&scenario, sol, PolicyRegime::OptimalJoint);
    let mc = mc_pipeline_payoff(
        &scenario,
        sol,
        PolicyRegime::OptimalJoint,
        opts.mc_samples,
        opts.seed,
    )
    .map_err(|e| InputError::new(e.to_string()))?;

    let h = h_piecewise(&scenario.agent_signal, &scenario.prefs);
    let fidelity = (0..=1000)
        .map(|i| {
            let x = Belief::clamped(i as f64 / 1000.0);
            let pointwise = optimal_delegation(x, &scenario.agent_signal, &scenario.prefs).payoff();
            (h.eval(x) - pointwise).abs()
        })
        .fold(0.0, f64::max);

    let checks = [
        Check {
            name: "grid-vs-closed-form",
            delta: (grid.best_payoff - sol.expected_payoff).abs(),
            bound: GRID_TOLERANCE,
        },
        Check {
            name: "pipeline-vs-closed-form",
            delta: (analytic - sol.expected_payoff).abs(),
            bound: 1e-12,
        },
        Check {
            name: "mc-vs-analytic",
            delta: (mc.mean - analytic).abs(),
            bound: (3.0 * mc.half_width).max(MC_FLOOR),
        },
        Check {
            name: "piecewise-vs-pointwise",
            delta: fidelity,
            bound: 1e-10,
        },
    ];
    let all_pass = checks.iter().all(|c| c.delta <= c.bound);
    let mut text = String::new();
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| {
            let pass = c.delta <= c.bound;
            let _ = writeln!(
                text,
                "{} {:<24} delta {:.3e} (bound {:.1e})",
                if pass { "PASS" } else { "FAIL" },
                c.name,
                c.delta,
                c.bound
            );
            json!({ "name": c.name, "pass": pass, "delta": c.delta, "bound": c.bound })
        })
        .collect();
    let _ = writeln!(
        text,
        "closed form {} | grid {} | mc {} +/- {} ({} samples, seed {})",
        sol.expected_payoff, grid.best_payoff, mc.mean, mc.half_width, mc.samples, mc.seed
    );
    let json = json!({
        "checks": rows,
        "closed_form": sol.expected_payoff,
        "grid": { "best_payoff": grid.best_payoff, "low": grid.best_low.get(), "high": grid.best_high.get(), "step": grid.grid_step },
        "mc": { "mean": mc.mean, "half_width": mc.half_width, "samples": mc.samples, "seed": mc.seed },
        "analytic": analytic,
        "pass": all_pass,
    });
    Ok(Report {
        json,
        text,
        status: if all_pass {
            Status::Ok
        } else {
            Status::CheckFailed
        },
    })
}
