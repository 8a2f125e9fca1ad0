//! Per-axis PID baseline with a clamped integrator.
//!
//! `u = K_p·e + K_i·∫e + K_d·ė` with `e = Θ_d − Θ`. There is no model-based
//! part, so `u_eq` is reported as zero and `u_d = u`.

use serde::{Deserialize, Serialize};

use super::{
    check_non_negative, sliding_surface, AttitudeController, ControlOutput, ControllerError, ControllerKind, Reference,
    SlidingParams,
};
use crate::math::Vec3;
use crate::plant::AttitudeState;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidParams<T> {
    pub kp: Vec3<T>,
    pub ki: Vec3<T>,
    pub kd: Vec3<T>,
    /// Anti-windup bound on `|∫e|`, rad·s.
    pub integral_limit: Vec3<T>,
}

impl<T: Real> Default for PidParams<T> {
    /// Gains from the offline step-response search (`cargo run --release --example tune_pid`).
    fn default() -> Self {
        Self {
            kp: Vec3::new(T::lit(2.4), T::lit(2.0), T::lit(2.4)),
            ki: Vec3::new(T::lit(0.6), T::lit(0.5), T::lit(0.6)),
            kd: Vec3::new(T::lit(0.192), T::lit(0.1), T::lit(0.24)),
            integral_limit: Vec3::splat(T::lit(0.5)),
        }
    }
}

impl<T: Real> PidParams<T> {
    pub fn validate(&self) -> Result<(), ControllerError> {
        check_non_negative("pid.kp", self.kp)?;
        check_non_negative("pid.ki", self.ki)?;
        check_non_negative("pid.kd", self.kd)?;
        check_non_negative("pid.integral_limit", self.integral_limit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState<T> {
    pub integral: Vec3<T>,
}

pub fn pid_step<T: Real>(
    state: &AttitudeState<T>,
    reference: &Reference<T>,
    sliding: &SlidingParams<T>,
    params: &PidParams<T>,
    integrator: &PidState<T>,
    dt: T,
) -> (ControlOutput<T>, PidState<T>) {
    let e = reference.angles.as_vec() - state.angles.as_vec();
    let e_dot = reference.rates - state.rates;
    let limit = params.integral_limit;
    let integral = (integrator.integral + e * dt).zip_map(limit, |v, c| v.max(-c).min(c));
    let u = params.kp.hadamard(e) + params.ki.hadamard(integral) + params.kd.hadamard(e_dot);
    let sigma = sliding_surface(state, reference, sliding);
    (ControlOutput::compose(Vec3::zero(), u, sigma), PidState { integral })
}

#[derive(Debug, Clone)]
pub struct Pid<T> {
    sliding: SlidingParams<T>,
    params: PidParams<T>,
    state: PidState<T>,
}

impl<T: Real> Pid<T> {
    /// The sliding parameters only feed the logged `σ` diagnostic.
    pub fn new(sliding: SlidingParams<T>, params: PidParams<T>) -> Self {
        Self { sliding, params, state: PidState::default() }
    }

    pub fn state(&self) -> &PidState<T> {
        &self.state
    }
}

impl<T: Real> AttitudeController<T> for Pid<T> {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Pid
    }

    fn step(&mut self, state: &AttitudeState<T>, reference: &Reference<T>, dt: T) -> ControlOutput<T> {
        let (out, next) = pid_step(state, reference, &self.sliding, &self.params, &self.state, dt);
        self.state = next;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::EulerAngles;
    use proptest::prelude::*;

    fn proportional_only() -> PidParams<f64> {
        PidParams { kp: Vec3::splat(1.0), ki: Vec3::zero(), kd: Vec3::zero(), integral_limit: Vec3::splat(1.0) }
    }

    #[test]
    fn zero_error_zero_command() {
        let (out, next) = pid_step(&AttitudeState::rest(), &Reference::zero(), &SlidingParams::default(), &PidParams::default(), &PidState::default(), 1e-3);
        assert_eq!(out.u, Vec3::zero());
        assert_eq!(next.integral, Vec3::zero());
    }

    #[test]
    fn proportional_roll() {
        let r = Reference::hold(EulerAngles::new(0.1, 0.0, 0.0));
        let (out, _) = pid_step(&AttitudeState::rest(), &r, &SlidingParams::default(), &proportional_only(), &PidState::default(), 1e-3);
        assert!((out.u.x - 0.1).abs() < 1e-15);
        assert_eq!(out.u_eq, Vec3::zero());
        assert_eq!(out.u_d, out.u);
    }

    proptest! {
        #[test]
        fn integrator_respects_clamp(errors in proptest::collection::vec(-5.0..5.0f64, 1..300), limit in 0.0..0.5f64) {
            let p = PidParams { integral_limit: Vec3::splat(limit), ..PidParams::default() };
            let mut s = PidState::default();
            for e in errors {
                let r = Reference::hold(EulerAngles::new(e, -e, 0.5 * e));
                s = pid_step(&AttitudeState::rest(), &r, &SlidingParams::default(), &p, &s, 0.01).1;
                prop_assert!(s.integral.norm_inf() <= limit);
            }
        }

        #[test]
        fn odd_symmetry(e in proptest::array::uniform3(-0.5..0.5f64), de in proptest::array::uniform3(-2.0..2.0f64), i in proptest::array::uniform3(-0.4..0.4f64)) {
            let sp = SlidingParams::default();
            let p = PidParams::<f64>::default();
            let a = AttitudeState { angles: EulerAngles::from_vec(Vec3::from(e)), rates: Vec3::from(de) };
            let b = AttitudeState { angles: EulerAngles::from_vec(-Vec3::from(e)), rates: -Vec3::from(de) };
            let ua = pid_step(&a, &Reference::zero(), &sp, &p, &PidState { integral: Vec3::from(i) }, 1e-3).0.u;
            let ub = pid_step(&b, &Reference::zero(), &sp, &p, &PidState { integral: -Vec3::from(i) }, 1e-3).0.u;
            prop_assert!((ua + ub).norm_inf() < 1e-15);
        }
    }
}
