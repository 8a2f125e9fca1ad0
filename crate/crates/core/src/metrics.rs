//! Step-response and chattering metrics over trajectory logs.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::controllers::ControllerKind;
use crate::math::Axis;
use crate::scalar::Real;
use crate::sim::{StepEvent, TrajectoryLog};

/// Settling band as a fraction of the step magnitude.
pub const DEFAULT_BAND: f64 = 0.02;
/// Length of the post-transient chattering window at the end of a run, s.
pub const DEFAULT_CHATTER_WINDOW: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("log is empty")]
    EmptyLog,
    #[error("no reference step on the {0} axis")]
    NoStep(&'static str),
    #[error("step on the {0} axis has zero magnitude")]
    ZeroStep(&'static str),
    #[error("band fraction {0} outside (0, 1)")]
    InvalidBand(f64),
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("window [{0}, {1}] s lies outside the log span")]
    WindowOutOfRange(f64, f64),
    #[error("logs `{0}` and `{1}` do not share a time grid")]
    MismatchedGrids(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Settling<T> {
    /// Seconds after the step fired.
    At(T),
    NotSettled,
    NoStep,
}

impl<T: Real> Settling<T> {
    pub fn seconds(&self) -> Option<T> {
        match self {
            Settling::At(t) => Some(*t),
            _ => None,
        }
    }
}

/// Indices `[start, end)` of the rows belonging to each step event on `axis`.
fn event_windows<T: Real>(log: &TrajectoryLog<T>, axis: Axis) -> Vec<(StepEvent<T>, usize, usize)> {
    let events = log.schedule.events(axis);
    let first_at = |time: T| log.rows.partition_point(|r| r.t < time);
    events
        .iter()
        .enumerate()
        .map(|(i, ev)| {
            let end = events.get(i + 1).map_or(log.rows.len(), |next| first_at(next.time));
            (*ev, first_at(ev.time), end)
        })
        .collect()
}

fn angle<T: Real>(log: &TrajectoryLog<T>, k: usize, axis: Axis) -> T {
    log.rows[k].state.angles.as_vec()[axis.index()]
}

fn settling_for_event<T: Real>(log: &TrajectoryLog<T>, axis: Axis, ev: &StepEvent<T>, start: usize, end: usize, band: T) -> Settling<T> {
    if start >= end {
        return Settling::NotSettled;
    }
    let limit = band * ev.magnitude().abs();
    let err = |k: usize| (angle(log, k, axis) - ev.to).abs();
    if err(end - 1) > limit {
        return Settling::NotSettled;
    }
    match (start..end).rev().find(|&k| err(k) > limit) {
        None => Settling::At(T::zero()),
        Some(k) => {
            // linear interpolation of |e| between the last violation and the next sample
            let (e0, e1) = (err(k), err(k + 1));
            let (t0, t1) = (log.rows[k].t, log.rows[k + 1].t);
            let frac = if e0 > e1 { (e0 - limit) / (e0 - e1) } else { T::one() };
            Settling::At(t0 + (t1 - t0) * frac - ev.time)
        }
    }
}

fn check_band<T: Real>(band: T) -> Result<(), MetricsError> {
    if band > T::zero() && band < T::one() {
        Ok(())
    } else {
        Err(MetricsError::InvalidBand(band.to_f64().unwrap_or(f64::NAN)))
    }
}

/// Settling time of the worst step on `axis`, measured from each step's fire time.
pub fn settling_time<T: Real>(log: &TrajectoryLog<T>, axis: Axis, band_fraction: T) -> Result<Settling<T>, MetricsError> {
    check_band(band_fraction)?;
    if log.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    let windows = event_windows(log, axis);
    if windows.is_empty() {
        return Err(MetricsError::NoStep(axis.name()));
    }
    let mut worst = T::zero();
    for (ev, start, end) in windows {
        if ev.magnitude() == T::zero() {
            return Err(MetricsError::ZeroStep(axis.name()));
        }
        match settling_for_event(log, axis, &ev, start, end, band_fraction) {
            Settling::At(t) => worst = worst.max(t),
            other => return Ok(other),
        }
    }
    Ok(Settling::At(worst))
}

/// Largest excursion past the target in the step direction, as a fraction of the step.
pub fn overshoot<T: Real>(log: &TrajectoryLog<T>, axis: Axis) -> Result<T, MetricsError> {
    if log.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    let windows = event_windows(log, axis);
    if windows.is_empty() {
        return Err(MetricsError::NoStep(axis.name()));
    }
    let mut worst = T::zero();
    for (ev, start, end) in windows {
        let m = ev.magnitude();
        if m == T::zero() {
            return Err(MetricsError::ZeroStep(axis.name()));
        }
        let dir = m.signum();
        let peak = (start..end).map(|k| (angle(log, k, axis) - ev.to) * dir).fold(T::zero(), T::max);
        worst = worst.max(peak / m.abs());
    }
    Ok(worst)
}

/// `Σ|x_{k+1} − x_k|`
pub fn total_variation_of<T: Real>(samples: &[T]) -> T {
    samples.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Total variation of a log channel over the rows with `t ∈ [window.0, window.1]`.
pub fn total_variation<T: Real>(log: &TrajectoryLog<T>, channel: &str, window: (T, T)) -> Result<T, MetricsError> {
    if log.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    let column = TrajectoryLog::<T>::column_index(channel).ok_or_else(|| MetricsError::UnknownChannel(channel.to_owned()))?;
    let (t0, t1) = window;
    let slack = log.dt * T::lit(1e-6);
    if t0 > t1 || t0 < log.rows[0].t - slack || t1 > log.duration() + slack {
        return Err(MetricsError::WindowOutOfRange(t0.to_f64().unwrap_or(f64::NAN), t1.to_f64().unwrap_or(f64::NAN)));
    }
    let samples: Vec<T> =
        log.rows.iter().filter(|r| r.t >= t0 - slack && r.t <= t1 + slack).map(|r| r.values()[column]).collect();
    Ok(total_variation_of(&samples))
}

/// Final `length` seconds of the log.
pub fn tail_window<T: Real>(log: &TrajectoryLog<T>, length: T) -> (T, T) {
    let end = log.duration();
    ((end - length).max(T::zero()), end)
}

/// Tolerance of the disturbance recovery check, rad (0.5°).
pub const DEFAULT_RECOVERY_TOLERANCE: f64 = 0.008726646259971648;

/// Time after `onset` until `|e|` on `axis` stays within `tolerance` for the rest of the run.
///
/// Zero when the error never leaves the tolerance after onset; [`Settling::NotSettled`] when
/// the final sample is still outside it.
pub fn recovery_time<T: Real>(log: &TrajectoryLog<T>, axis: Axis, onset: T, tolerance: T) -> Result<Settling<T>, MetricsError> {
    if log.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    let i = axis.index();
    let start = log.rows.partition_point(|r| r.t < onset);
    let err = |k: usize| (log.rows[k].state.angles.as_vec()[i] - log.rows[k].reference.angles.as_vec()[i]).abs();
    match (start..log.rows.len()).rev().find(|&k| err(k) > tolerance) {
        None => Ok(Settling::At(T::zero())),
        Some(k) if k + 1 == log.rows.len() => Ok(Settling::NotSettled),
        Some(k) => Ok(Settling::At(log.rows[k + 1].t - onset)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics<T> {
    pub settling_time: Settling<T>,
    /// Fraction of the step magnitude; zero without a step.
    pub overshoot: T,
    /// `|e|` at the last sample, rad.
    pub steady_state_error: T,
    /// RMS tracking error from the first step (or the whole run) to the end, rad.
    pub rmse: T,
    /// Total variation of the axis torque over the chattering window, N·m.
    pub control_total_variation: T,
    /// `∫u² dt` of the axis torque over the run, (N·m)²·s.
    pub control_energy: T,
}

pub fn step_metrics<T: Real>(log: &TrajectoryLog<T>, axis: Axis, band: T, chatter_window: T) -> Result<StepMetrics<T>, MetricsError> {
    if log.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    let i = axis.index();
    let has_step = !log.schedule.events(axis).is_empty();
    let settling = if has_step { settling_time(log, axis, band)? } else { Settling::NoStep };
    let overshoot = if has_step { overshoot(log, axis)? } else { T::zero() };

    let first = event_windows(log, axis).first().map_or(0, |w| w.1);
    let tracking: Vec<T> =
        log.rows[first..].iter().map(|r| r.state.angles.as_vec()[i] - r.reference.angles.as_vec()[i]).collect();
    let rmse = if tracking.is_empty() {
        T::zero()
    } else {
        (tracking.iter().map(|e| *e * *e).sum::<T>() / T::from_usize(tracking.len()).unwrap()).sqrt()
    };
    let last = log.rows.last().unwrap();
    let steady_state_error = (last.state.angles.as_vec()[i] - last.reference.angles.as_vec()[i]).abs();

    let channel = format!("u{}", i + 1);
    let control_total_variation = total_variation(log, &channel, tail_window(log, chatter_window))?;
    let control_energy = log.rows.iter().map(|r| r.u[i] * r.u[i]).sum::<T>() * log.dt;

    Ok(StepMetrics { settling_time: settling, overshoot, steady_state_error, rmse, control_total_variation, control_energy })
}

/// `value / reference`, with equal values (including both zero) mapping to 1.
pub fn ratio<T: Real>(value: T, reference: T) -> Option<T> {
    if value == reference {
        Some(T::one())
    } else if reference == T::zero() {
        None
    } else {
        Some(value / reference)
    }
}

/// Per-field ratios of one controller's metrics against the ASTSM baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRatios<T> {
    pub settling_time: Option<T>,
    pub overshoot: Option<T>,
    pub steady_state_error: Option<T>,
    pub rmse: Option<T>,
    pub control_total_variation: Option<T>,
    pub control_energy: Option<T>,
}

impl<T: Real> MetricRatios<T> {
    pub fn between(m: &StepMetrics<T>, base: &StepMetrics<T>) -> Self {
        let settling = match (m.settling_time.seconds(), base.settling_time.seconds()) {
            (Some(a), Some(b)) => ratio(a, b),
            _ => None,
        };
        Self {
            settling_time: settling,
            overshoot: ratio(m.overshoot, base.overshoot),
            steady_state_error: ratio(m.steady_state_error, base.steady_state_error),
            rmse: ratio(m.rmse, base.rmse),
            control_total_variation: ratio(m.control_total_variation, base.control_total_variation),
            control_energy: ratio(m.control_energy, base.control_energy),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow<T> {
    pub label: String,
    pub controller: ControllerKind,
    pub axis: Axis,
    pub metrics: StepMetrics<T>,
    /// Present when an ASTSM log is part of the comparison.
    pub vs_astsm: Option<MetricRatios<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<T> {
    pub scenario: String,
    pub band: T,
    pub chatter_window: T,
    pub rows: Vec<ComparisonRow<T>>,
}

fn same_grid<T: Real>(a: &TrajectoryLog<T>, b: &TrajectoryLog<T>) -> bool {
    a.dt == b.dt && a.len() == b.len() && a.rows.iter().zip(&b.rows).all(|(x, y)| x.t == y.t)
}

/// Metrics for every labelled log and axis, plus ratios against the ASTSM log.
pub fn compare_report<T: Real>(logs: &BTreeMap<String, TrajectoryLog<T>>, band: T, chatter_window: T) -> Result<ComparisonReport<T>, MetricsError> {
    let mut entries = logs.iter();
    let Some((first_label, first)) = entries.next() else {
        return Err(MetricsError::EmptyLog);
    };
    for (label, log) in entries {
        if !same_grid(first, log) {
            return Err(MetricsError::MismatchedGrids(first_label.clone(), label.clone()));
        }
    }

    let baseline = logs.values().find(|l| l.controller == ControllerKind::Astsm);
    let mut rows = Vec::new();
    for (label, log) in logs {
        for axis in Axis::ALL {
            let metrics = step_metrics(log, axis, band, chatter_window)?;
            let vs_astsm = match baseline {
                Some(base) => Some(MetricRatios::between(&metrics, &step_metrics(base, axis, band, chatter_window)?)),
                None => None,
            };
            rows.push(ComparisonRow { label: label.clone(), controller: log.controller, axis, metrics, vs_astsm });
        }
    }
    Ok(ComparisonReport { scenario: first.scenario.clone(), band, chatter_window, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{EulerAngles, Vec3};
    use crate::plant::AttitudeState;
    use crate::sim::{DisturbanceProfile, LogRow, ReferenceSchedule, ReferenceStep};
    use crate::controllers::Reference;
    use proptest::prelude::*;

    /// Roll-only log sampled from `angle(t)` with one step to `target` at `t_step`.
    fn roll_log(dt: f64, n: usize, t_step: f64, target: f64, angle: impl Fn(f64) -> f64, u: impl Fn(usize) -> f64) -> TrajectoryLog<f64> {
        let mut schedule = ReferenceSchedule::empty();
        schedule.steps.push(ReferenceStep { time: t_step, axis: Axis::Roll, target });
        let rows = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                let r = if t >= t_step { target } else { 0.0 };
                LogRow {
                    t,
                    state: AttitudeState { angles: EulerAngles::new(angle(t), 0.0, 0.0), rates: Vec3::zero() },
                    reference: Reference::hold(EulerAngles::new(r, 0.0, 0.0)),
                    u: Vec3::new(u(k), 0.0, 0.0),
                    ..LogRow::default()
                }
            })
            .collect();
        TrajectoryLog { scenario: "fixture".into(), controller: ControllerKind::Astsm, dt, schedule, disturbance: DisturbanceProfile::solo_gust(), rows }
    }

    #[test]
    fn instant_settling() {
        let log = roll_log(0.01, 100, 0.2, 1.0, |t| if t >= 0.2 { 1.0 } else { 0.0 }, |_| 0.0);
        assert_eq!(settling_time(&log, Axis::Roll, 0.02).unwrap(), Settling::At(0.0));
    }

    #[test]
    fn exponential_settling() {
        let tau = 0.25;
        let step = 0.3;
        let dt = 1e-4;
        let log = roll_log(dt, 40_001, 0.0, step, |t| step - step * (-t / tau).exp(), |_| 0.0);
        let t = settling_time(&log, Axis::Roll, 0.02).unwrap().seconds().unwrap();
        assert!((t - tau * 50f64.ln()).abs() < 1e-6, "{t}");
    }

    #[test]
    fn oscillation_never_settles() {
        let log = roll_log(0.01, 500, 0.0, 1.0, |t| 1.0 + 0.5 * (20.0 * t).sin(), |_| 0.0);
        assert_eq!(settling_time(&log, Axis::Roll, 0.02).unwrap(), Settling::NotSettled);
    }

    #[test]
    fn settling_errors() {
        let log = roll_log(0.01, 10, 0.0, 1.0, |_| 1.0, |_| 0.0);
        assert_eq!(settling_time(&log, Axis::Pitch, 0.02), Err(MetricsError::NoStep("pitch")));
        assert!(matches!(settling_time(&log, Axis::Roll, 1.5), Err(MetricsError::InvalidBand(_))));
    }

    #[test]
    fn overshoot_cases() {
        let monotone = roll_log(0.01, 300, 0.0, 1.0, |t| 1.0 - (-5.0 * t).exp(), |_| 0.0);
        assert_eq!(overshoot(&monotone, Axis::Roll).unwrap(), 0.0);
        // peak at 1.15
        let peaked = roll_log(0.01, 300, 0.0, 1.0, |t| if (t - 0.5).abs() < 1e-9 { 1.15 } else { 1.0 }, |_| 0.0);
        assert!((overshoot(&peaked, Axis::Roll).unwrap() - 0.15).abs() < 1e-12);
        let under = roll_log(0.01, 300, 0.0, -1.0, |t| -0.9 * (1.0 - (-5.0 * t).exp()), |_| 0.0);
        assert_eq!(overshoot(&under, Axis::Roll).unwrap(), 0.0);
    }

    #[test]
    fn recovery_cases() {
        // error 0.1 between 1.0 and 1.3 s, target 1 held from 0
        let log = roll_log(0.01, 300, 0.0, 1.0, |t| if (1.0..1.3).contains(&t) { 1.1 } else { 1.0 }, |_| 0.0);
        let t = recovery_time(&log, Axis::Roll, 0.8, 0.05).unwrap().seconds().unwrap();
        assert!((t - 0.5).abs() < 1e-9, "{t}");
        assert_eq!(recovery_time(&log, Axis::Roll, 1.5, 0.05).unwrap(), Settling::At(0.0));
        assert_eq!(recovery_time(&log, Axis::Roll, 0.8, 0.2).unwrap(), Settling::At(0.0));
        let drift = roll_log(0.01, 300, 0.0, 1.0, |t| 1.0 + 0.1 * t, |_| 0.0);
        assert_eq!(recovery_time(&drift, Axis::Roll, 0.0, 0.05).unwrap(), Settling::NotSettled);
    }

    #[test]
    fn total_variation_examples() {
        assert_eq!(total_variation_of(&[3.0; 10]), 0.0);
        let alternating: Vec<f64> = (0..11).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(total_variation_of(&alternating), 2.0 * 10.0);
        let ramp: Vec<f64> = (0..=20).map(|k| -2.0 + 0.25 * k as f64).collect();
        assert!((total_variation_of(&ramp) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn total_variation_window_and_channel() {
        let log = roll_log(0.1, 11, 0.0, 1.0, |_| 1.0, |k| if k % 2 == 0 { 1.0 } else { -1.0 });
        assert!((total_variation(&log, "u1", (0.5, 1.0)).unwrap() - 10.0).abs() < 1e-12);
        assert!(matches!(total_variation(&log, "u9", (0.0, 1.0)), Err(MetricsError::UnknownChannel(_))));
        assert!(matches!(total_variation(&log, "u1", (0.0, 5.0)), Err(MetricsError::WindowOutOfRange(..))));
    }

    #[test]
    fn single_log_report() {
        let log = roll_log(0.1, 11, 0.0, 1.0, |_| 1.0, |_| 0.0);
        let logs = BTreeMap::from([("astsm".to_string(), log)]);
        let report = compare_report(&logs, 0.02, 0.5).unwrap();
        assert_eq!(report.rows.len(), 3);
    }

    #[test]
    fn identical_logs_have_unit_ratios() {
        let log = roll_log(0.01, 300, 0.5, 1.0, |t| if t < 0.5 { 0.0 } else { 1.0 - (-(t - 0.5) * 8.0).exp() * 1.1 }, |k| (k as f64 * 0.37).sin());
        let mut other = log.clone();
        other.controller = ControllerKind::Smc;
        let logs = BTreeMap::from([("a".to_string(), log), ("b".to_string(), other)]);
        let report = compare_report(&logs, 0.02, 1.0).unwrap();
        for row in &report.rows {
            let r = row.vs_astsm.unwrap();
            for v in [r.overshoot, r.steady_state_error, r.rmse, r.control_total_variation, r.control_energy] {
                assert_eq!(v, Some(1.0));
            }
        }
    }

    // Ten-row fixture, expected values worked out by hand.
    #[test]
    fn ten_row_fixture_ratios() {
        let dt = 0.1;
        let base_u = [0.0, 1.0, 1.0, 2.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
        let other_u = [0.0, 2.0, 0.0, 2.0, 0.0, 2.0, 0.0, 2.0, 0.0, 2.0];
        let base_angle = [0.0, 0.0, 0.5, 0.9, 1.1, 1.0, 1.0, 1.0, 1.0, 1.0];
        let other_angle = [0.0, 0.0, 0.2, 0.6, 0.8, 1.3, 1.05, 1.0, 1.0, 0.9];
        let base = roll_log(dt, 10, 0.1, 1.0, |t| base_angle[(t / dt).round() as usize], |k| base_u[k]);
        let mut other = roll_log(dt, 10, 0.1, 1.0, |t| other_angle[(t / dt).round() as usize], |k| other_u[k]);
        other.controller = ControllerKind::Pid;
        let logs = BTreeMap::from([("astsm".to_string(), base), ("pid".to_string(), other)]);
        let report = compare_report(&logs, 0.02, 0.45).unwrap();
        let pid = report.rows.iter().find(|r| r.label == "pid" && r.axis == Axis::Roll).unwrap();
        let base = report.rows.iter().find(|r| r.label == "astsm" && r.axis == Axis::Roll).unwrap();

        // overshoot: base 0.1, pid 0.3
        assert!((base.metrics.overshoot - 0.1).abs() < 1e-12);
        assert!((pid.metrics.overshoot - 0.3).abs() < 1e-12);
        // energy: base (1+1+4+1+1+1+1)·0.1 = 1.0, pid 5·4·0.1 = 2.0
        assert!((base.metrics.control_energy - 1.0).abs() < 1e-12);
        assert!((pid.metrics.control_energy - 2.0).abs() < 1e-12);
        // TV over t ∈ [0.45, 0.9] (rows 5..=9): base 1, pid 8
        assert!((base.metrics.control_total_variation - 1.0).abs() < 1e-12);
        assert!((pid.metrics.control_total_variation - 8.0).abs() < 1e-12);
        // rmse from row 1: base errors (-1,-.5,-.1,.1,0,0,0,0,0) → sqrt(1.27/9)
        assert!((base.metrics.rmse - (1.27f64 / 9.0).sqrt()).abs() < 1e-12);
        // pid errors (-1,-.8,-.4,-.2,.3,.05,0,0,-.1) → sqrt(1.9425/9)
        assert!((pid.metrics.rmse - (1.9425f64 / 9.0).sqrt()).abs() < 1e-12);
        // settling: last violation at row 4 (|e| = .1), |e| = 0 at row 5; the band edge .02 is
        // crossed 80% of the way, t = 0.48, measured from the 0.1 s step
        assert!((base.metrics.settling_time.seconds().unwrap() - 0.38).abs() < 1e-12);
        assert_eq!(pid.metrics.settling_time, Settling::NotSettled);
        assert!((pid.metrics.steady_state_error - 0.1).abs() < 1e-12);

        let r = pid.vs_astsm.unwrap();
        assert!((r.overshoot.unwrap() - 3.0).abs() < 1e-12);
        assert!((r.control_energy.unwrap() - 2.0).abs() < 1e-12);
        assert!((r.control_total_variation.unwrap() - 8.0).abs() < 1e-12);
        assert!((r.rmse.unwrap() - (1.9425f64 / 1.27).sqrt()).abs() < 1e-12);
        assert_eq!(r.settling_time, None);
        assert_eq!(r.steady_state_error, None);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = roll_log(0.1, 10, 0.0, 1.0, |_| 1.0, |_| 0.0);
        let b = roll_log(0.1, 11, 0.0, 1.0, |_| 1.0, |_| 0.0);
        let logs = BTreeMap::from([("a".to_string(), a), ("b".to_string(), b)]);
        assert!(matches!(compare_report(&logs, 0.02, 0.5), Err(MetricsError::MismatchedGrids(..))));
    }

    proptest! {
        #[test]
        fn total_variation_shift_and_scale(xs in proptest::collection::vec(-10.0..10.0f64, 2..50), c in -5.0..5.0f64, k in -4.0..4.0f64) {
            let tv = total_variation_of(&xs);
            let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
            let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
            prop_assert!((total_variation_of(&shifted) - tv).abs() < 1e-9);
            prop_assert!((total_variation_of(&scaled) - k.abs() * tv).abs() < 1e-9);
        }

        #[test]
        fn wider_band_never_settles_later(tau in 0.05..0.5f64, freq in 2.0..20.0f64, b1 in 0.01..0.3f64, b2 in 0.01..0.3f64) {
            let log = roll_log(1e-3, 3000, 0.0, 1.0, |t| 1.0 - (-t / tau).exp() * (freq * t).cos(), |_| 0.0);
            let (narrow, wide) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
            let tn = settling_time(&log, Axis::Roll, narrow).unwrap().seconds();
            let tw = settling_time(&log, Axis::Roll, wide).unwrap().seconds();
            if let (Some(tn), Some(tw)) = (tn, tw) {
                prop_assert!(tw <= tn + 1e-12);
            }
            prop_assert!(!(tn.is_some() && tw.is_none()));
        }
    }
}
