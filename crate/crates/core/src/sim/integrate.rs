//! Classical fixed-step Runge–Kutta integration.

use std::ops::{Add, Mul};

use crate::math::Vec3;
use crate::plant::{AttitudeState, Plant};
use crate::scalar::Real;

/// State that can be advanced along a derivative.
pub trait OdeState<T>: Copy {
    type Deriv: Copy + Add<Output = Self::Deriv> + Mul<T, Output = Self::Deriv>;

    /// `self + h·d`
    fn advance(&self, h: T, d: &Self::Deriv) -> Self;

    fn is_finite(&self) -> bool;
}

impl<T: Real> OdeState<T> for T {
    type Deriv = T;

    fn advance(&self, h: T, d: &T) -> T {
        *self + h * *d
    }

    fn is_finite(&self) -> bool {
        num_traits::Float::is_finite(*self)
    }
}

/// Time derivative of an [`AttitudeState`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AttitudeDeriv<T> {
    pub angle_rates: Vec3<T>,
    pub accels: Vec3<T>,
}

impl<T: Real> Add for AttitudeDeriv<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { angle_rates: self.angle_rates + o.angle_rates, accels: self.accels + o.accels }
    }
}

impl<T: Real> Mul<T> for AttitudeDeriv<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self { angle_rates: self.angle_rates * k, accels: self.accels * k }
    }
}

impl<T: Real> OdeState<T> for AttitudeState<T> {
    type Deriv = AttitudeDeriv<T>;

    fn advance(&self, h: T, d: &AttitudeDeriv<T>) -> Self {
        use crate::math::EulerAngles;
        AttitudeState {
            angles: EulerAngles::from_vec(self.angles.as_vec() + d.angle_rates * h),
            rates: self.rates + d.accels * h,
        }
    }

    fn is_finite(&self) -> bool {
        AttitudeState::is_finite(self)
    }
}

/// Integrated state left the finite range.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("integration produced a non-finite state")]
pub struct NonFiniteState;

pub fn rk4_step<T: Real, S: OdeState<T>>(f: impl Fn(&S) -> S::Deriv, x: &S, h: T) -> Result<S, NonFiniteState> {
    let half = h * T::half();
    let k1 = f(x);
    let k2 = f(&x.advance(half, &k1));
    let k3 = f(&x.advance(half, &k2));
    let k4 = f(&x.advance(h, &k3));
    let two = T::two();
    let next = x.advance(h / T::lit(6.0), &(k1 + k2 * two + k3 * two + k4));
    if next.is_finite() {
        Ok(next)
    } else {
        Err(NonFiniteState)
    }
}

/// One plant step with control and external torque held over the interval.
pub fn attitude_rk4_step<T: Real>(
    plant: &Plant<T>,
    state: &AttitudeState<T>,
    control_tau: Vec3<T>,
    external: Vec3<T>,
    dt: T,
) -> Result<AttitudeState<T>, NonFiniteState> {
    rk4_step(
        |s: &AttitudeState<T>| AttitudeDeriv { angle_rates: s.rates, accels: plant.accel(s, control_tau, external) },
        state,
        dt,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::{Kinematics, PlantParams};

    fn exp_decay(h: f64, steps: usize) -> f64 {
        let mut x = 1.0;
        for _ in 0..steps {
            x = rk4_step(|x: &f64| -*x, &x, h).unwrap();
        }
        x
    }

    #[test]
    fn exponential_single_step() {
        let x = exp_decay(0.1, 1);
        assert!((x - (-0.1f64).exp()).abs() < 1e-7);
        assert!((x - 0.90483742).abs() < 1e-7);
    }

    #[test]
    fn fourth_order_convergence() {
        let exact = (-1.0f64).exp();
        let coarse = (exp_decay(0.1, 10) - exact).abs();
        let fine = (exp_decay(0.05, 20) - exact).abs();
        let ratio = coarse / fine;
        assert!((16.0 * 0.8..=16.0 * 1.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn zero_field_leaves_state_unchanged() {
        let x = AttitudeState { angles: crate::math::EulerAngles::new(0.1, 0.2, 0.3), rates: Vec3::zero() };
        let next = rk4_step(|_: &AttitudeState<f64>| AttitudeDeriv::default(), &x, 0.01).unwrap();
        assert_eq!(next, x);
    }

    #[test]
    fn blow_up_is_detected() {
        assert!(rk4_step(|x: &f64| *x * 1e308, &1e10, 1.0).is_err());
    }

    #[test]
    fn plant_rest_is_fixed_point() {
        let plant = Plant::new(PlantParams::<f64>::solo(), Kinematics::Identified).unwrap();
        let x = attitude_rk4_step(&plant, &AttitudeState::rest(), Vec3::zero(), Vec3::zero(), 1e-3).unwrap();
        assert_eq!(x, AttitudeState::rest());
    }

    #[test]
    fn constant_torque_matches_closed_form() {
        let mut p = PlantParams::<f64>::solo();
        p.aero_coeffs = Vec3::zero();
        let plant = Plant::new(p, Kinematics::Identified).unwrap();
        let u = Vec3::new(1e-3, 0.0, 0.0);
        let mut x = AttitudeState::rest();
        for _ in 0..100 {
            x = attitude_rk4_step(&plant, &x, u, Vec3::zero(), 1e-3).unwrap();
        }
        let a = 1e-3 / 8.85e-3;
        assert!((x.angles.phi - 0.5 * a * 0.01).abs() < 1e-12);
        assert!((x.rates.x - a * 0.1).abs() < 1e-12);
    }
}
