//! Attitude control laws sharing one sliding surface and one per-step interface.
//!
//! Every controller maps `(state, reference)` to a torque command split as
//! `u = u_eq + u_d`. Sliding controllers build `u_eq` from the nominal
//! inertia only; the plant's true inertia never reaches this module.

mod astsm;
mod atsm;
mod pid;
mod smc;

pub use astsm::{
    adapt_gains, astsm_step, supertwist_step, supertwist_step_implicit, AdaptiveParams, Astsm, AstsmState, BetaMode,
    Discretization, Effectiveness,
};
pub use atsm::{atsm_step, Atsm, AtsmParams, AtsmState};
pub use pid::{pid_step, Pid, PidParams, PidState};
pub use smc::{smc_step, Smc, SmcParams};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{EulerAngles, Mat3, Vec3};
use crate::plant::{body_gyro_torque, AttitudeState};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControllerError {
    #[error("invalid controller parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: &'static str },
}

fn invalid(key: impl Into<String>, reason: &'static str) -> ControllerError {
    ControllerError::InvalidParameter { key: key.into(), reason }
}

fn check_positive<T: Real>(key: &str, v: Vec3<T>) -> Result<(), ControllerError> {
    if v.is_finite() && v.x > T::zero() && v.y > T::zero() && v.z > T::zero() {
        Ok(())
    } else {
        Err(invalid(key, "must be > 0 componentwise"))
    }
}

fn check_non_negative<T: Real>(key: &str, v: Vec3<T>) -> Result<(), ControllerError> {
    if v.is_finite() && v.x >= T::zero() && v.y >= T::zero() && v.z >= T::zero() {
        Ok(())
    } else {
        Err(invalid(key, "must be >= 0 componentwise"))
    }
}

/// Desired attitude and its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Reference<T> {
    pub angles: EulerAngles<T>,
    pub rates: Vec3<T>,
    pub accels: Vec3<T>,
}

impl<T: Real> Reference<T> {
    pub fn hold(angles: EulerAngles<T>) -> Self {
        Self { angles, rates: Vec3::zero(), accels: Vec3::zero() }
    }

    pub fn zero() -> Self {
        Self::hold(EulerAngles::zero())
    }
}

/// Torque command of one controller step, N·m.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlOutput<T> {
    pub u_eq: Vec3<T>,
    pub u_d: Vec3<T>,
    pub u: Vec3<T>,
    /// Sliding variable at this step, rad/s.
    pub sigma: Vec3<T>,
}

impl<T: Real> ControlOutput<T> {
    pub fn compose(u_eq: Vec3<T>, u_d: Vec3<T>, sigma: Vec3<T>) -> Self {
        Self { u_eq, u_d, u: u_eq + u_d, sigma }
    }
}

/// Diagonal of the surface slope `Λ`, 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlidingParams<T> {
    pub lambda: Vec3<T>,
}

impl<T: Real> Default for SlidingParams<T> {
    fn default() -> Self {
        Self { lambda: Vec3::new(T::lit(3.89), T::lit(3.89), T::lit(4.36)) }
    }
}

impl<T: Real> SlidingParams<T> {
    pub fn validate(&self) -> Result<(), ControllerError> {
        check_positive("sliding.lambda", self.lambda)
    }
}

/// `σ = ė + Λe` with `e = Θ − Θ_d`.
pub fn sliding_surface<T: Real>(state: &AttitudeState<T>, reference: &Reference<T>, params: &SlidingParams<T>) -> Vec3<T> {
    let e = state.angles.as_vec() - reference.angles.as_vec();
    let e_dot = state.rates - reference.rates;
    e_dot + params.lambda.hadamard(e)
}

/// `σ̇ = Θ̈ − Θ̈_d + Λė` for a given plant acceleration.
pub fn sliding_surface_rate<T: Real>(
    state: &AttitudeState<T>,
    reference: &Reference<T>,
    params: &SlidingParams<T>,
    accel: Vec3<T>,
) -> Vec3<T> {
    let e_dot = state.rates - reference.rates;
    accel - reference.accels + params.lambda.hadamard(e_dot)
}

/// `u_eq = I₀(Θ̈_d − Λė) + S(ω)I₀ω` with `ω = Θ̇`.
pub fn equivalent_control<T: Real>(
    state: &AttitudeState<T>,
    reference: &Reference<T>,
    params: &SlidingParams<T>,
    nominal_inertia: &Mat3<T>,
) -> Vec3<T> {
    let e_dot = state.rates - reference.rates;
    let demanded = reference.accels - params.lambda.hadamard(e_dot);
    *nominal_inertia * demanded - body_gyro_torque(state.rates, nominal_inertia)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    Astsm,
    Smc,
    Atsm,
    Pid,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 4] = [ControllerKind::Astsm, ControllerKind::Smc, ControllerKind::Atsm, ControllerKind::Pid];

    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Astsm => "astsm",
            ControllerKind::Smc => "smc",
            ControllerKind::Atsm => "atsm",
            ControllerKind::Pid => "pid",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ControllerKind::Astsm => "ASTSM",
            ControllerKind::Smc => "SMC",
            ControllerKind::Atsm => "ATSM",
            ControllerKind::Pid => "PID",
        }
    }
}

impl std::str::FromStr for ControllerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ControllerKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown controller `{s}` (expected astsm, smc, atsm or pid)"))
    }
}

impl std::fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Adaptive gains and super-twisting integral in effect at a step.
/// Zero for controllers without adaptation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GainTrace<T> {
    pub alpha: Vec3<T>,
    pub beta: Vec3<T>,
    pub nu: Vec3<T>,
}

pub trait AttitudeController<T: Real> {
    fn kind(&self) -> ControllerKind;

    fn step(&mut self, state: &AttitudeState<T>, reference: &Reference<T>, dt: T) -> ControlOutput<T>;

    /// Gains used by the most recent [`step`](Self::step).
    fn gain_trace(&self) -> GainTrace<T> {
        GainTrace { alpha: Vec3::zero(), beta: Vec3::zero(), nu: Vec3::zero() }
    }
}

/// Tunables of all four controllers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerParams<T> {
    pub sliding: SlidingParams<T>,
    pub adaptive: AdaptiveParams<T>,
    pub smc: SmcParams<T>,
    pub atsm: AtsmParams<T>,
    pub pid: PidParams<T>,
}

impl<T: Real> Default for ControllerParams<T> {
    fn default() -> Self {
        Self {
            sliding: SlidingParams::default(),
            adaptive: AdaptiveParams::default(),
            smc: SmcParams::default(),
            atsm: AtsmParams::default(),
            pid: PidParams::default(),
        }
    }
}

impl<T: Real> ControllerParams<T> {
    pub fn validate(&self) -> Result<(), ControllerError> {
        self.sliding.validate()?;
        self.adaptive.validate()?;
        self.smc.validate()?;
        self.atsm.validate()?;
        self.pid.validate()
    }
}

/// Any of the four controllers behind one concrete type.
#[derive(Debug, Clone)]
pub enum Controller<T> {
    Astsm(Astsm<T>),
    Smc(Smc<T>),
    Atsm(Atsm<T>),
    Pid(Pid<T>),
}

impl<T: Real> Controller<T> {
    pub fn new(kind: ControllerKind, params: &ControllerParams<T>, nominal_inertia: Mat3<T>) -> Result<Self, ControllerError> {
        params.validate()?;
        if !nominal_inertia.is_diagonal() || !nominal_inertia.is_positive_definite() {
            return Err(invalid("nominal_inertia", "must be diagonal positive definite"));
        }
        Ok(match kind {
            ControllerKind::Astsm => Controller::Astsm(Astsm::new(params.sliding, params.adaptive, nominal_inertia)),
            ControllerKind::Smc => Controller::Smc(Smc::new(params.sliding, params.smc, nominal_inertia)),
            ControllerKind::Atsm => Controller::Atsm(Atsm::new(params.sliding, params.atsm, nominal_inertia)),
            ControllerKind::Pid => Controller::Pid(Pid::new(params.sliding, params.pid)),
        })
    }
}

impl<T: Real> AttitudeController<T> for Controller<T> {
    fn kind(&self) -> ControllerKind {
        match self {
            Controller::Astsm(c) => c.kind(),
            Controller::Smc(c) => c.kind(),
            Controller::Atsm(c) => c.kind(),
            Controller::Pid(c) => c.kind(),
        }
    }

    fn step(&mut self, state: &AttitudeState<T>, reference: &Reference<T>, dt: T) -> ControlOutput<T> {
        match self {
            Controller::Astsm(c) => c.step(state, reference, dt),
            Controller::Smc(c) => c.step(state, reference, dt),
            Controller::Atsm(c) => c.step(state, reference, dt),
            Controller::Pid(c) => c.step(state, reference, dt),
        }
    }

    fn gain_trace(&self) -> GainTrace<T> {
        match self {
            Controller::Astsm(c) => c.gain_trace(),
            Controller::Smc(c) => c.gain_trace(),
            Controller::Atsm(c) => c.gain_trace(),
            Controller::Pid(c) => c.gain_trace(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::{attitude_accel, PlantParams};
    use proptest::prelude::*;

    fn inertia() -> Mat3<f64> {
        PlantParams::<f64>::solo().nominal_inertia()
    }

    #[test]
    fn surface_is_zero_on_reference() {
        let r = Reference { angles: EulerAngles::new(0.1, -0.2, 0.3), rates: Vec3::new(0.5, 0.0, -1.0), accels: Vec3::zero() };
        let s = AttitudeState { angles: r.angles, rates: r.rates };
        assert_eq!(sliding_surface(&s, &r, &SlidingParams::default()), Vec3::zero());
    }

    #[test]
    fn surface_roll_error() {
        let s = AttitudeState { angles: EulerAngles::new(0.1f64, 0.0, 0.0), rates: Vec3::zero() };
        let sigma = sliding_surface(&s, &Reference::zero(), &SlidingParams::default());
        assert!((sigma.x - 0.389).abs() < 1e-15);
    }

    #[test]
    fn surface_is_linear() {
        let p = SlidingParams::default();
        let s1 = AttitudeState { angles: EulerAngles::new(0.1, -0.05, 0.2), rates: Vec3::new(0.3, 0.1, -0.2) };
        let s2 = AttitudeState { angles: EulerAngles::from_vec(s1.angles.as_vec() * 2.0), rates: s1.rates * 2.0 };
        let a = sliding_surface(&s1, &Reference::zero(), &p);
        let b = sliding_surface(&s2, &Reference::zero(), &p);
        assert!((b - a * 2.0).norm_inf() < 1e-15);
    }

    #[test]
    fn equivalent_control_at_hover() {
        let u = equivalent_control(&AttitudeState::rest(), &Reference::zero(), &SlidingParams::default(), &inertia());
        assert_eq!(u, Vec3::zero());
    }

    #[test]
    fn equivalent_control_demanded_roll_accel() {
        let r = Reference { angles: EulerAngles::zero(), rates: Vec3::zero(), accels: Vec3::new(1.0, 0.0, 0.0) };
        let u = equivalent_control(&AttitudeState::rest(), &r, &SlidingParams::default(), &inertia());
        assert!((u - Vec3::new(8.85e-3, 0.0, 0.0)).norm_inf() < 1e-18);
    }

    #[test]
    fn controller_kind_parses() {
        assert_eq!("ASTSM".parse::<ControllerKind>().unwrap(), ControllerKind::Astsm);
        assert!("lqr".parse::<ControllerKind>().is_err());
    }

    #[test]
    fn non_diagonal_nominal_inertia_is_rejected() {
        let mut i = inertia();
        i.m[0][1] = 1e-4;
        i.m[1][0] = 1e-4;
        assert!(Controller::new(ControllerKind::Astsm, &ControllerParams::<f64>::default(), i).is_err());
    }

    proptest! {
        // With the nominal plant and no disturbance, u_eq alone holds σ̇ = 0.
        #[test]
        fn equivalent_control_nulls_sliding_rate(
            angles in (-1.0..1.0f64, -1.0..1.0f64, -3.0..3.0f64),
            rates in (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
            reference in (-1.0..1.0f64, -2.0..2.0f64, -5.0..5.0f64),
        ) {
            let mut plant = PlantParams::<f64>::solo();
            plant.aero_coeffs = Vec3::zero();
            let state = AttitudeState { angles: EulerAngles::new(angles.0, angles.1, angles.2), rates: Vec3::new(rates.0, rates.1, rates.2) };
            let r = Reference { angles: EulerAngles::new(reference.0, 0.1, -0.2), rates: Vec3::new(reference.1, 0.0, 0.3), accels: Vec3::new(reference.2, 1.0, -2.0) };
            let sp = SlidingParams::default();
            let u = equivalent_control(&state, &r, &sp, &plant.nominal_inertia());
            let accel = attitude_accel(&state, u, Vec3::zero(), &plant).unwrap();
            prop_assert!(sliding_surface_rate(&state, &r, &sp, accel).norm_inf() < 1e-10);
        }
    }
}
