//! Grid search for the PID baseline gains on the nominal step schedule.
//!
//! Axes are tuned one at a time with the others held at their current gains.
//! A candidate is admissible when the axis settles into the 2% band within
//! 2 s with at most 20% overshoot; among those the fastest wins, with
//! overshoot as a tie breaker.
//!
//! `cargo run --release --example tune_pid`

use astsm_core::metrics::{settling_time, overshoot, DEFAULT_BAND};
use astsm_core::{run_scenario, Axis, ControllerKind, ScenarioConfigD};

const KP: [f64; 10] = [0.2, 0.3, 0.4, 0.6, 0.8, 1.0, 1.2, 1.6, 2.0, 2.4];
const KD_RATIO: [f64; 7] = [0.05, 0.08, 0.1, 0.15, 0.2, 0.3, 0.4];
const KI_RATIO: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 3.0];

/// (settling time, overshoot)
type Score = (f64, f64);
/// (kp, ki, kd)
type Gains = (f64, f64, f64);

fn round(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn score(config: &ScenarioConfigD, axis: Axis) -> Option<(f64, f64)> {
    let log = run_scenario(config).ok()?;
    let ts = settling_time(&log, axis, DEFAULT_BAND).ok()?.seconds()?;
    let os = overshoot(&log, axis).ok()?;
    (ts <= 2.0 && os <= 0.2).then_some((ts, os))
}

fn main() {
    let mut config = ScenarioConfigD::solo_nominal();
    config.scenario.controller = ControllerKind::Pid;
    for axis in Axis::ALL {
        let i = axis.index();
        let mut best: Option<(Score, Gains)> = None;
        for kp in KP {
            for kd in KD_RATIO.map(|r| round(r * kp)) {
                for ki in KI_RATIO.map(|r| round(r * kp)) {
                    let mut c = config.clone();
                    c.controller.pid.kp[i] = kp;
                    c.controller.pid.kd[i] = kd;
                    c.controller.pid.ki[i] = ki;
                    if let Some(s) = score(&c, axis) {
                        if best.is_none_or(|(b, _)| s.0 < b.0 || (s.0 == b.0 && s.1 < b.1)) {
                            best = Some((s, (kp, ki, kd)));
                        }
                    }
                }
            }
        }
        match best {
            Some(((ts, os), (kp, ki, kd))) => {
                println!("{:5}  kp {kp:<5} ki {ki:<6} kd {kd:<6}  settling {ts:.3} s  overshoot {:.1}%", axis.name(), os * 100.0);
                config.controller.pid.kp[i] = kp;
                config.controller.pid.ki[i] = ki;
                config.controller.pid.kd[i] = kd;
            }
            None => println!("{:5}  no admissible gains in the grid", axis.name()),
        }
    }
}
