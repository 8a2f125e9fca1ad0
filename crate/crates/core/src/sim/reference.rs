//! Reference schedules and injected disturbance torques as functions of time.

use serde::{Deserialize, Serialize};

use crate::controllers::Reference;
use crate::math::{Axis, EulerAngles, Vec3};
use crate::scalar::Real;

/// Angle target on one axis taking effect at `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceStep<T> {
    /// s
    pub time: T,
    pub axis: Axis,
    /// rad
    pub target: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceMode {
    /// Raw steps with zero demanded rates and accelerations.
    #[default]
    Step,
    /// Steps shaped by a second-order filter with analytic derivatives.
    Prefilter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSchedule<T> {
    #[serde(default)]
    pub mode: ReferenceMode,
    /// Prefilter natural frequency, rad/s.
    pub omega_n: T,
    /// Prefilter damping ratio.
    pub zeta: T,
    #[serde(default = "Vec::new")]
    pub steps: Vec<ReferenceStep<T>>,
}

impl<T: Real> ReferenceSchedule<T> {
    /// Roll −10° at 0.5 s, pitch +10° at 1 s, yaw +45° at 2 s.
    pub fn solo_maneuver() -> Self {
        let step = |time: f64, axis, deg: f64| ReferenceStep { time: T::lit(time), axis, target: T::lit(deg.to_radians()) };
        Self {
            mode: ReferenceMode::Step,
            omega_n: T::lit(8.0),
            zeta: T::one(),
            steps: vec![step(0.5, Axis::Roll, -10.0), step(1.0, Axis::Pitch, 10.0), step(2.0, Axis::Yaw, 45.0)],
        }
    }

    pub fn empty() -> Self {
        Self { steps: Vec::new(), ..Self::solo_maneuver() }
    }

    /// Steps on one axis with the target each one replaces.
    pub fn events(&self, axis: Axis) -> Vec<StepEvent<T>> {
        let mut previous = T::zero();
        self.steps
            .iter()
            .filter(|s| s.axis == axis)
            .map(|s| {
                let ev = StepEvent { time: s.time, from: previous, to: s.target };
                previous = s.target;
                ev
            })
            .collect()
    }
}

/// A change of target on one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepEvent<T> {
    pub time: T,
    pub from: T,
    pub to: T,
}

impl<T: Real> StepEvent<T> {
    pub fn magnitude(&self) -> T {
        self.to - self.from
    }
}

/// Unit step response of `ω²/(s² + 2ζωs + ω²)` and its first two derivatives at `tau ≥ 0`.
fn second_order_step<T: Real>(tau: T, omega: T, zeta: T) -> (T, T, T) {
    let one = T::one();
    if tau <= T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    let tol = T::lit(1e-9);
    if (zeta - one).abs() < tol {
        let e = (-omega * tau).exp();
        let wt = omega * tau;
        (one - e * (one + wt), omega * omega * tau * e, omega * omega * e * (one - wt))
    } else if zeta < one {
        let root = (one - zeta * zeta).sqrt();
        let wd = omega * root;
        let e = (-zeta * omega * tau).exp();
        let (s, c) = (wd * tau).sin_cos();
        let y = one - e * (c + zeta / root * s);
        let dy = omega / root * e * s;
        let ddy = omega / root * e * (wd * c - zeta * omega * s);
        (y, dy, ddy)
    } else {
        let root = (zeta * zeta - one).sqrt();
        let r1 = -omega * (zeta - root);
        let r2 = -omega * (zeta + root);
        let (e1, e2) = ((r1 * tau).exp(), (r2 * tau).exp());
        let span = r1 - r2;
        let y = one + (r2 * e1 - r1 * e2) / span;
        let dy = r1 * r2 * (e1 - e2) / span;
        let ddy = r1 * r2 * (r1 * e1 - r2 * e2) / span;
        (y, dy, ddy)
    }
}

/// Desired attitude at time `t`.
pub fn reference_at<T: Real>(t: T, schedule: &ReferenceSchedule<T>) -> Reference<T> {
    let mut angles = Vec3::zero();
    let mut rates = Vec3::zero();
    let mut accels = Vec3::zero();
    for axis in Axis::ALL {
        let i = axis.index();
        for ev in schedule.events(axis) {
            if ev.time > t {
                break;
            }
            match schedule.mode {
                ReferenceMode::Step => angles[i] = ev.to,
                ReferenceMode::Prefilter => {
                    let (y, dy, ddy) = second_order_step(t - ev.time, schedule.omega_n, schedule.zeta);
                    let m = ev.magnitude();
                    angles[i] = angles[i] + m * y;
                    rates[i] = rates[i] + m * dy;
                    accels[i] = accels[i] + m * ddy;
                }
            }
        }
    }
    Reference { angles: EulerAngles::from_vec(angles), rates, accels }
}

/// Constant external torque switched on at `start` (and off at `end`, if given).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Deserialize<'de>"))]
pub struct DisturbanceEvent<T> {
    /// s
    pub start: T,
    /// s; open-ended when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<T>,
    /// N·m
    pub torque: Vec3<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceProfile<T> {
    pub enabled: bool,
    #[serde(default = "Vec::new")]
    pub events: Vec<DisturbanceEvent<T>>,
}

impl<T: Real> DisturbanceProfile<T> {
    /// 0.5 N·m on all three axes from 3.0 s, disabled by default.
    pub fn solo_gust() -> Self {
        Self {
            enabled: false,
            events: vec![DisturbanceEvent { start: T::lit(3.0), end: None, torque: Vec3::splat(T::lit(0.5)) }],
        }
    }

    /// Earliest onset among the events.
    pub fn onset(&self) -> Option<T> {
        self.events.iter().map(|e| e.start).reduce(|a, b| a.min(b))
    }
}

pub fn disturbance_at<T: Real>(t: T, profile: &DisturbanceProfile<T>) -> Vec3<T> {
    if !profile.enabled {
        return Vec3::zero();
    }
    profile
        .events
        .iter()
        .filter(|e| e.start <= t && e.end.is_none_or(|end| t < end))
        .fold(Vec3::zero(), |acc, e| acc + e.torque)
}
