//! `summary.txt`: one `key = value` line per metric.

use std::fmt::Write;

use hrom_core::metrics::Metrics;
use hrom_core::LEGS;

pub fn render_metrics(m: &Metrics) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| writeln!(out, "{k} = {v}").expect("write to string");
    line("samples", m.samples.to_string());
    line("duration", m.duration.to_string());
    line("forward_displacement", m.forward_displacement.to_string());
    line("lateral_displacement", m.lateral_displacement.to_string());
    line("roll_rms", m.roll_rms.to_string());
    line("roll_max", m.roll_max.to_string());
    line("cone_violations", m.cone_violations.to_string());
    line("unilateral_violations", m.unilateral_violations.to_string());
    for leg in LEGS {
        line(&format!("slip.{}", leg.label()), m.slip[leg.index()].to_string());
    }
    for leg in LEGS {
        line(&format!("lateral_excursion.{}", leg.label()), m.lateral_excursion[leg.index()].to_string());
    }
    line("min_foot_separation", m.min_foot_separation.to_string());
    line("gait_cycles", m.gait_cycles.to_string());
    line("mpc_warnings", m.mpc_warnings.to_string());
    out
}

/// Reads `key = value` lines back; comments and blank lines are skipped.
pub fn parse_summary(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| {
            let l = l.split('#').next()?.trim();
            let (k, v) = l.split_once('=')?;
            Some((k.trim().to_owned(), v.trim().to_owned()))
        })
        .collect()
}
