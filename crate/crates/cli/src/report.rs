//! Metric tables for one or more scenarios, as Markdown and JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use astsm_core::metrics::{
    compare_report, recovery_time, MetricRatios, MetricsError, DEFAULT_BAND, DEFAULT_CHATTER_WINDOW,
    DEFAULT_RECOVERY_TOLERANCE,
};
use astsm_core::TrajectoryLogD;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ratios {
    pub settling_time: Option<f64>,
    pub overshoot: Option<f64>,
    pub steady_state_error: Option<f64>,
    pub rmse: Option<f64>,
    pub control_total_variation: Option<f64>,
    pub control_energy: Option<f64>,
}

impl From<MetricRatios<f64>> for Ratios {
    fn from(r: MetricRatios<f64>) -> Self {
        Self {
            settling_time: r.settling_time,
            overshoot: r.overshoot,
            steady_state_error: r.steady_state_error,
            rmse: r.rmse,
            control_total_variation: r.control_total_variation,
            control_energy: r.control_energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub label: String,
    pub controller: String,
    pub axis: String,
    /// `None` when the axis never settles or has no step.
    pub settling_time: Option<f64>,
    pub overshoot: f64,
    pub steady_state_error: f64,
    pub rmse: f64,
    pub control_total_variation: f64,
    pub control_energy: f64,
    /// Seconds from disturbance onset; absent without a disturbance or when never recovered.
    pub recovery_time: Option<f64>,
    pub alpha_peak: f64,
    pub vs_astsm: Option<Ratios>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub band: f64,
    pub chatter_window: f64,
    pub disturbance_onset: Option<f64>,
    pub recovery_tolerance: f64,
    pub rows: Vec<Row>,
}

pub fn scenario_report(logs: &BTreeMap<String, TrajectoryLogD>) -> Result<ScenarioReport, MetricsError> {
    let table = compare_report(logs, DEFAULT_BAND, DEFAULT_CHATTER_WINDOW)?;
    let first = logs.values().next().ok_or(MetricsError::EmptyLog)?;
    let onset = if first.disturbance.enabled { first.disturbance.onset() } else { None };
    let mut rows = Vec::with_capacity(table.rows.len());
    for r in table.rows {
        let log = &logs[&r.label];
        let recovery = match onset {
            Some(t0) => recovery_time(log, r.axis, t0, DEFAULT_RECOVERY_TOLERANCE)?.seconds(),
            None => None,
        };
        let alpha_peak = log.rows.iter().map(|row| row.alpha[r.axis.index()]).fold(0.0, f64::max);
        rows.push(Row {
            label: r.label,
            controller: r.controller.name().to_owned(),
            axis: r.axis.name().to_owned(),
            settling_time: r.metrics.settling_time.seconds(),
            overshoot: r.metrics.overshoot,
            steady_state_error: r.metrics.steady_state_error,
            rmse: r.metrics.rmse,
            control_total_variation: r.metrics.control_total_variation,
            control_energy: r.metrics.control_energy,
            recovery_time: recovery,
            alpha_peak,
            vs_astsm: r.vs_astsm.map(Ratios::from),
        });
    }
    Ok(ScenarioReport {
        scenario: table.scenario,
        band: table.band,
        chatter_window: table.chatter_window,
        disturbance_onset: onset,
        recovery_tolerance: DEFAULT_RECOVERY_TOLERANCE,
        rows,
    })
}

fn opt(v: Option<f64>, suffix: &str) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:.3}{suffix}"))
}

fn settled(v: Option<f64>) -> String {
    v.map_or_else(|| "not settled".to_owned(), |x| format!("{x:.3}"))
}

pub fn to_markdown(reports: &[ScenarioReport]) -> String {
    let mut s = String::from("# Attitude control comparison\n");
    for rep in reports {
        let _ = writeln!(
            s,
            "\n## {}\n\nSettling band {:.0}% of the step; chattering index is the total variation of u over the last {} s.",
            rep.scenario,
            rep.band * 100.0,
            rep.chatter_window
        );
        if let Some(t0) = rep.disturbance_onset {
            let _ = writeln!(
                s,
                "Recovery is measured from the disturbance onset at {t0} s to the last exit from a {:.1} deg band.",
                rep.recovery_tolerance.to_degrees()
            );
        }
        s.push_str("\n| controller | axis | settling [s] | overshoot [%] | steady error [deg] | RMSE [deg] | TV(u) [N·m] | ∫u² [N²m²s] | recovery [s] | peak α | TV / ASTSM |\n");
        s.push_str("|---|---|---|---|---|---|---|---|---|---|---|\n");
        for r in &rep.rows {
            let recovery = if rep.disturbance_onset.is_some() {
                r.recovery_time.map_or_else(|| "not recovered".to_owned(), |x| format!("{x:.3}"))
            } else {
                "-".to_owned()
            };
            let _ = writeln!(
                s,
                "| {} | {} | {} | {:.2} | {:.4} | {:.4} | {:.4} | {:.4} | {} | {:.3} | {} |",
                r.label,
                r.axis,
                settled(r.settling_time),
                r.overshoot * 100.0,
                r.steady_state_error.to_degrees(),
                r.rmse.to_degrees(),
                r.control_total_variation,
                r.control_energy,
                recovery,
                r.alpha_peak,
                opt(r.vs_astsm.as_ref().and_then(|v| v.control_total_variation), "×"),
            );
        }
    }
    s
}

pub fn to_json(reports: &[ScenarioReport]) -> String {
    let mut text = serde_json::to_string_pretty(reports).expect("reports serialize");
    text.push('\n');
    text
}
