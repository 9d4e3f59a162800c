//! Resonance records as JSON.
//!
//! `{z_target, l, e_r, gamma, converged, stability: {max_deviation, plateau, grid}}`
//! with every real number rounded to 12 significant digits.

use serde_json::{json, Value};

use crate::resonance::{Resonance, StabilityReport};

/// `x` rounded to 12 significant digits.
pub fn significant(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    json!(rounded)
}

fn stability_json(report: &StabilityReport) -> Value {
    let grid: Vec<Value> = report
        .grid
        .iter()
        .map(|p| {
            let mut v = json!({
                "lambda": significant(p.lambda),
                "theta": significant(p.theta),
                "n": p.n,
                "e_r": significant(p.energy.re),
                "gamma": significant(-2.0 * p.energy.im),
                "converged": p.converged,
            });
            if let Some(f) = &p.failure {
                v["failure"] = json!(f);
            }
            v
        })
        .collect();
    json!({
        "max_deviation": significant(report.max_deviation),
        "plateau": report.plateau,
        "grid": grid,
    })
}

pub fn resonance_json(r: &Resonance) -> Value {
    json!({
        "z_target": significant(r.z_target),
        "l": r.l,
        "e_r": significant(r.e_r()),
        "gamma": significant(r.gamma()),
        "converged": r.converged,
        "stability": r.stability.as_ref().map(stability_json),
    })
}

/// Pretty-printed JSON array, newline-terminated.
pub fn resonances_to_json(list: &[Resonance]) -> String {
    let values: Vec<Value> = list.iter().map(resonance_json).collect();
    let mut text = serde_json::to_string_pretty(&Value::Array(values)).expect("json values serialize");
    text.push('\n');
    text
}
