//! Twisting sliding mode baseline with a time-accelerated gain.
//!
//! ```text
//! u_d = −a(t)·[ r₁·sign(σ) + r₂·sign(σ̇) ]
//! ```
//!
//! `σ̇` is the backward difference of consecutive samples (zero on the first
//! step). The acceleration factor `a` starts at 1, grows at `accel_rate`
//! per second while `|σ|` stays outside the capture band, saturates at
//! `accel_max`, and resets to 1 once `σ` is captured.

use serde::{Deserialize, Serialize};

use super::{
    equivalent_control, invalid, sliding_surface, AttitudeController, ControlOutput, ControllerError, ControllerKind,
    Reference, SlidingParams,
};
use crate::math::{Mat3, Vec3};
use crate::plant::AttitudeState;
use crate::scalar::{sign, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtsmParams<T> {
    /// Twisting gain on `sign(σ)`, N·m.
    pub r1: T,
    /// Twisting gain on `sign(σ̇)`, N·m; must satisfy `r1 > r2`.
    pub r2: T,
    /// Growth of the acceleration factor, 1/s.
    pub accel_rate: T,
    /// Upper bound of the acceleration factor.
    pub accel_max: T,
    /// `|σ|` below which the acceleration resets, rad/s.
    pub capture: T,
}

impl<T: Real> Default for AtsmParams<T> {
    fn default() -> Self {
        Self { r1: T::lit(4.0), r2: T::lit(2.0), accel_rate: T::lit(10.0), accel_max: T::lit(3.0), capture: T::lit(0.05) }
    }
}

impl<T: Real> AtsmParams<T> {
    pub fn validate(&self) -> Result<(), ControllerError> {
        if !(self.r2.is_finite() && self.r2 > T::zero()) {
            return Err(invalid("atsm.r2", "must be > 0"));
        }
        if !(self.r1.is_finite() && self.r1 > self.r2) {
            return Err(invalid("atsm.r1", "must be > r2"));
        }
        if !(self.accel_rate.is_finite() && self.accel_rate >= T::zero()) {
            return Err(invalid("atsm.accel_rate", "must be >= 0"));
        }
        if !(self.accel_max.is_finite() && self.accel_max >= T::one()) {
            return Err(invalid("atsm.accel_max", "must be >= 1"));
        }
        if !(self.capture.is_finite() && self.capture >= T::zero()) {
            return Err(invalid("atsm.capture", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtsmState<T> {
    pub prev_sigma: Option<Vec3<T>>,
    pub accel: Vec3<T>,
}

impl<T: Real> Default for AtsmState<T> {
    fn default() -> Self {
        Self { prev_sigma: None, accel: Vec3::splat(T::one()) }
    }
}

/// Quadrant of the twisting law for one axis at acceleration `a`.
fn twisting<T: Real>(sigma: T, sigma_dot: T, a: T, params: &AtsmParams<T>) -> T {
    -a * (params.r1 * sign(sigma) + params.r2 * sign(sigma_dot))
}

pub fn atsm_step<T: Real>(
    state: &AttitudeState<T>,
    reference: &Reference<T>,
    sliding: &SlidingParams<T>,
    params: &AtsmParams<T>,
    internal: &AtsmState<T>,
    nominal_inertia: &Mat3<T>,
    dt: T,
) -> (ControlOutput<T>, AtsmState<T>) {
    let sigma = sliding_surface(state, reference, sliding);
    let sigma_dot = internal.prev_sigma.map_or_else(Vec3::zero, |prev| (sigma - prev) * (T::one() / dt));
    let mut accel = internal.accel;
    let mut u_d = Vec3::zero();
    for i in 0..3 {
        accel[i] = if sigma[i].abs() > params.capture {
            (accel[i] + params.accel_rate * dt).min(params.accel_max)
        } else {
            T::one()
        };
        u_d[i] = twisting(sigma[i], sigma_dot[i], accel[i], params);
    }
    let u_eq = equivalent_control(state, reference, sliding, nominal_inertia);
    (ControlOutput::compose(u_eq, u_d, sigma), AtsmState { prev_sigma: Some(sigma), accel })
}

#[derive(Debug, Clone)]
pub struct Atsm<T> {
    sliding: SlidingParams<T>,
    params: AtsmParams<T>,
    nominal_inertia: Mat3<T>,
    state: AtsmState<T>,
}

impl<T: Real> Atsm<T> {
    pub fn new(sliding: SlidingParams<T>, params: AtsmParams<T>, nominal_inertia: Mat3<T>) -> Self {
        Self { sliding, params, nominal_inertia, state: AtsmState::default() }
    }

    pub fn state(&self) -> &AtsmState<T> {
        &self.state
    }
}

impl<T: Real> AttitudeController<T> for Atsm<T> {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Atsm
    }

    fn step(&mut self, state: &AttitudeState<T>, reference: &Reference<T>, dt: T) -> ControlOutput<T> {
        let (out, next) = atsm_step(state, reference, &self.sliding, &self.params, &self.state, &self.nominal_inertia, dt);
        self.state = next;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::EulerAngles;
    use crate::plant::PlantParams;

    #[test]
    fn twisting_quadrants() {
        let p = AtsmParams::<f64>::default();
        assert_eq!(twisting(0.3, 0.1, 1.0, &p), -(p.r1 + p.r2));
        assert_eq!(twisting(0.3, -0.1, 1.0, &p), -(p.r1 - p.r2));
        assert_eq!(twisting(-0.3, -0.1, 1.0, &p), p.r1 + p.r2);
        assert_eq!(twisting(0.0, 0.0, 1.0, &p), 0.0);
    }

    #[test]
    fn first_step_uses_zero_sigma_rate() {
        let inertia = PlantParams::<f64>::solo().nominal_inertia();
        let p = AtsmParams { accel_rate: 0.0, ..AtsmParams::default() };
        let s = AttitudeState { angles: EulerAngles::new(0.1, 0.0, 0.0), rates: Vec3::zero() };
        let (out, next) = atsm_step(&s, &Reference::zero(), &SlidingParams::default(), &p, &AtsmState::default(), &inertia, 1e-3);
        assert_eq!(out.u_d.x, -p.r1);
        assert_eq!(next.prev_sigma, Some(out.sigma));
    }

    #[test]
    fn acceleration_grows_then_resets() {
        let inertia = PlantParams::<f64>::solo().nominal_inertia();
        let p = AtsmParams::<f64>::default();
        let sp = SlidingParams::default();
        let far = AttitudeState { angles: EulerAngles::new(0.5, 0.0, 0.0), rates: Vec3::zero() };
        let mut internal = AtsmState::default();
        for _ in 0..1000 {
            internal = atsm_step(&far, &Reference::zero(), &sp, &p, &internal, &inertia, 1e-3).1;
        }
        assert_eq!(internal.accel.x, p.accel_max);
        assert_eq!(internal.accel.y, 1.0);
        let (_, captured) = atsm_step(&AttitudeState::rest(), &Reference::zero(), &sp, &p, &internal, &inertia, 1e-3);
        assert_eq!(captured.accel.x, 1.0);
    }

    #[test]
    fn rejects_r2_above_r1() {
        let p = AtsmParams { r1: 1.0, r2: 2.0, ..AtsmParams::<f64>::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn odd_symmetry_apart_from_gyro_term() {
        let inertia = PlantParams::<f64>::solo().nominal_inertia();
        let p = AtsmParams::<f64>::default();
        let sp = SlidingParams::default();
        let a = AttitudeState { angles: EulerAngles::new(0.01, -0.02, 0.005), rates: Vec3::new(0.01, 0.03, -0.02) };
        let b = AttitudeState { angles: EulerAngles::from_vec(-a.angles.as_vec()), rates: -a.rates };
        let prev = Vec3::new(0.1, -0.3, 0.2);
        let ia = AtsmState { prev_sigma: Some(prev), accel: Vec3::new(1.5, 1.0, 2.0) };
        let ib = AtsmState { prev_sigma: Some(-prev), ..ia };
        let ua = atsm_step(&a, &Reference::zero(), &sp, &p, &ia, &inertia, 1e-3).0.u;
        let ub = atsm_step(&b, &Reference::zero(), &sp, &p, &ib, &inertia, 1e-3).0.u;
        // ω×(I₀ω) is even in ω; everything else flips sign
        let gyro = crate::plant::body_gyro_torque(a.rates, &inertia);
        assert!((ua + ub + gyro * 2.0).norm_inf() < 1e-15);
    }
}
