//! Figure data: envelope and delegation-stage curves on a uniform grid, plus
//! exact breakpoint annotations.

use std::path::{Path, PathBuf};

use persuade_core::piecewise::{Breakpoint, PiecewiseLinear};
use persuade_core::{
    action_payoff, delegation_envelope, disagreement_interval, h_piecewise,
    non_delegation_envelope, optimal_delegation, Belief, BinarySignal, Bit, Preferences,
};
use serde_json::{json, Value};

use crate::scenario_file::InputError;
use crate::sweep::fmt_float;

pub const GRID_POINTS: usize = 1000;

pub const ENVELOPES: &str = "envelopes.csv";
pub const DELEGATION_STAGE: &str = "delegation_stage.csv";
pub const ANNOTATIONS: &str = "annotations.json";

pub fn grid() -> impl Iterator<Item = f64> {
    (0..GRID_POINTS).map(|i| i as f64 / (GRID_POINTS - 1) as f64)
}

pub fn envelopes_csv(prefs: &Preferences<f64>) -> String {
    let mut out = String::from("belief,action0,action1,direct,delegated\n");
    for x in grid() {
        let b = Belief::clamped(x);
        let row = [
            x,
            action_payoff(prefs.principal(), Bit::Zero, b),
            action_payoff(prefs.principal(), Bit::One, b),
            non_delegation_envelope(prefs, b),
            delegation_envelope(prefs, b),
        ];
        out.push_str(&row.map(fmt_float).join(","));
        out.push('\n');
    }
    out
}

pub fn delegation_stage_csv(prefs: &Preferences<f64>, signal: &BinarySignal<f64>) -> String {
    let mut out = String::from("belief,delegation_payoff,direct_payoff,stage_payoff,delegate\n");
    for x in grid() {
        let d = optimal_delegation(Belief::clamped(x), signal, prefs);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(x),
            fmt_float(d.delegation_payoff),
            fmt_float(d.direct_payoff),
            fmt_float(d.payoff()),
            u8::from(d.delegate)
        ));
    }
    out
}

fn breakpoint_json(b: &Breakpoint<f64>) -> Value {
    json!({
        "at": b.at,
        "value": b.value,
        "left_limit": b.left_limit,
        "right_limit": b.right_limit,
        "kind": if b.is_jump() { "jump" } else { "kink" },
    })
}

fn interior(f: &PiecewiseLinear<f64>) -> Vec<Value> {
    f.breakpoints()
        .iter()
        .filter(|b| b.at > 0.0 && b.at < 1.0)
        .map(breakpoint_json)
        .collect()
}

pub fn annotations(prefs: &Preferences<f64>, signal: &BinarySignal<f64>) -> Value {
    let h = h_piecewise(signal, prefs);
    let (lo, hi) = disagreement_interval(prefs);
    json!({
        "principal_cutoff": h.principal_cutoff.get(),
        "agent_cutoff": h.agent_cutoff.get(),
        "disagreement_interval": [lo.get(), hi.get()],
        "rho": h.rho.map(|r| r.get()),
        "delegation_payoff_knots": { "rho_low": h.rho_low.get(), "rho_high": h.rho_high.get() },
        "intermediate_line": { "intercept": h.intermediate.intercept, "slope": h.intermediate.slope },
        "delegation_payoff_breakpoints": interior(&h.delegation),
        "stage_payoff_breakpoints": interior(&h.h),
        "stage_payoff_segments": h.h.segments().iter().map(|s| json!({
            "start": s.start, "end": s.end, "intercept": s.line.intercept, "slope": s.line.slope,
        })).collect::<Vec<_>>(),
        "discontinuity": h.discontinuity.map(|d| json!({
            "at": d.at.get(), "left_limit": d.left_limit, "value": d.value, "right_limit": d.right_limit,
        })),
    })
}

/// Writes the three figure files into `dir`, creating it if needed.
pub fn write_figures(
    dir: &Path,
    prefs: &Preferences<f64>,
    signal: &BinarySignal<f64>,
) -> Result<Vec<PathBuf>, InputError> {
    let unwritable = |e: std::io::Error| InputError::new(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(unwritable)?;
    let files = [
        (ENVELOPES, envelopes_csv(prefs)),
        (DELEGATION_STAGE, delegation_stage_csv(prefs, signal)),
        (
            ANNOTATIONS,
            serde_json::to_string_pretty(&annotations(prefs, signal)).expect("finite values")
                + "\n",
        ),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body)
            .map_err(|e| InputError::new(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
