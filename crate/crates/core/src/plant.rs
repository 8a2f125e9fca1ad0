//! Rigid-body attitude dynamics of the quadcopter and its motor mixing.
//!
//! The plant is the ground truth for every controller: it uses the true
//! inertia `I₀ + ΔI`, while controllers only ever see `I₀`. Rotor and
//! aerodynamic torques are treated as disturbances summed with the injected
//! external torque:
//!
//! ```text
//! Θ̈ = I⁻¹ [ −ω × (I ω) + u + d_ext + τ_p − τ_a ]
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{euler_rate_map, euler_rate_map_derivative, invert_euler_rate_map, EulerAngles, Mat3, Vec3};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlantError {
    #[error("{which} inertia matrix is not symmetric positive definite")]
    NotPositiveDefinite { which: &'static str },
    #[error("infeasible allocation: thrusts {thrusts:?} N contain a negative entry")]
    InfeasibleAllocation { thrusts: [f64; 4] },
    #[error("invalid plant parameter `{key}`: {reason}")]
    InvalidParameter { key: &'static str, reason: &'static str },
}

/// Physical constants of the airframe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantParams<T> {
    /// kg
    pub mass: T,
    /// Motor-to-centre distance `l`, m.
    pub arm_length: T,
    /// Reaction-torque coefficient `c`, m.
    pub force_to_torque: T,
    /// Diagonal of the nominal inertia `I₀`, kg·m².
    pub inertia: Vec3<T>,
    /// Symmetric inertia uncertainty `ΔI` applied to the plant only, kg·m².
    pub inertia_delta: Mat3<T>,
    /// Rotor moment of inertia `I_r`, kg·m².
    pub rotor_inertia: T,
    /// Residual rotor speed `Ω_r = −Ω₁ + Ω₂ − Ω₃ + Ω₄`, rad/s.
    pub residual_rotor_speed: T,
    /// Diagonal aerodynamic friction coefficients `k_a`, N·m·s²/rad².
    pub aero_coeffs: Vec3<T>,
    /// m/s²
    pub gravity: T,
}

impl<T: Real> PlantParams<T> {
    /// Airframe constants of the 3DR Solo with small rotor/aero defaults.
    pub fn solo() -> Self {
        Self {
            mass: T::lit(1.50),
            arm_length: T::lit(0.205),
            force_to_torque: T::lit(0.05),
            inertia: Vec3::new(T::lit(8.85e-3), T::lit(1.55e-3), T::lit(23.09e-3)),
            inertia_delta: Mat3::zero(),
            rotor_inertia: T::lit(3.4e-5),
            residual_rotor_speed: T::zero(),
            aero_coeffs: Vec3::splat(T::lit(1e-4)),
            gravity: T::lit(9.81),
        }
    }

    /// Inertia uncertainty of the Solo carrying its maximum payload.
    pub fn solo_payload_delta() -> Mat3<T> {
        let l = T::lit;
        Mat3::from_rows([
            [l(0.4825), l(0.0044), l(-0.0077)],
            [l(0.0044), l(0.2437), l(0.0115)],
            [l(-0.0077), l(0.0115), l(0.2437)],
        ])
    }

    pub fn nominal_inertia(&self) -> Mat3<T> {
        Mat3::diag(self.inertia)
    }

    pub fn true_inertia(&self) -> Mat3<T> {
        self.nominal_inertia() + self.inertia_delta
    }

    pub fn validate(&self) -> Result<(), PlantError> {
        let positive = |v: T| v.is_finite() && v > T::zero();
        if !positive(self.mass) {
            return Err(PlantError::InvalidParameter { key: "mass", reason: "must be > 0" });
        }
        if !positive(self.arm_length) {
            return Err(PlantError::InvalidParameter { key: "arm_length", reason: "must be > 0" });
        }
        if !positive(self.force_to_torque) {
            return Err(PlantError::InvalidParameter { key: "force_to_torque", reason: "must be > 0" });
        }
        if !(self.rotor_inertia.is_finite() && self.rotor_inertia >= T::zero()) {
            return Err(PlantError::InvalidParameter { key: "rotor_inertia", reason: "must be >= 0" });
        }
        if !self.residual_rotor_speed.is_finite() || !self.gravity.is_finite() {
            return Err(PlantError::InvalidParameter { key: "residual_rotor_speed", reason: "must be finite" });
        }
        let k = self.aero_coeffs;
        if !(k.is_finite() && k.x >= T::zero() && k.y >= T::zero() && k.z >= T::zero()) {
            return Err(PlantError::InvalidParameter { key: "aero_coeffs", reason: "must be >= 0 componentwise" });
        }
        if !self.nominal_inertia().is_positive_definite() {
            return Err(PlantError::NotPositiveDefinite { which: "nominal" });
        }
        if !self.true_inertia().is_positive_definite() {
            return Err(PlantError::NotPositiveDefinite { which: "true (nominal + delta)" });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MotorThrusts<T> {
    pub f1: T,
    pub f2: T,
    pub f3: T,
    pub f4: T,
}

impl<T: Real> MotorThrusts<T> {
    pub fn new(f1: T, f2: T, f3: T, f4: T) -> Self {
        Self { f1, f2, f3, f4 }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.f1, self.f2, self.f3, self.f4]
    }
}

/// Euler angles with their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AttitudeState<T> {
    pub angles: EulerAngles<T>,
    /// Euler rates `Θ̇`, rad/s.
    pub rates: Vec3<T>,
}

impl<T: Real> AttitudeState<T> {
    pub fn rest() -> Self {
        Self { angles: EulerAngles::zero(), rates: Vec3::zero() }
    }

    pub fn is_finite(&self) -> bool {
        self.angles.as_vec().is_finite() && self.rates.is_finite()
    }
}

/// Individual torque contributions acting on the airframe, N·m.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TorqueBreakdown<T> {
    pub control_tau: Vec3<T>,
    pub body_gyro: Vec3<T>,
    pub prop_gyro: Vec3<T>,
    pub aero: Vec3<T>,
    pub external: Vec3<T>,
}

impl<T: Real> TorqueBreakdown<T> {
    /// Disturbance seen by the attitude loop: `d_ext + τ_p − τ_a`.
    pub fn disturbance_total(&self) -> Vec3<T> {
        self.external + self.prop_gyro - self.aero
    }

    pub fn net(&self) -> Vec3<T> {
        self.body_gyro + self.control_tau + self.disturbance_total()
    }
}

/// Motor thrusts to body torques and total thrust.
pub fn mix<T: Real>(thrusts: MotorThrusts<T>, params: &PlantParams<T>) -> (Vec3<T>, T) {
    let MotorThrusts { f1, f2, f3, f4 } = thrusts;
    let (l, c) = (params.arm_length, params.force_to_torque);
    let tau = Vec3::new(l * (f2 - f4), l * (f3 - f1), c * (-f1 + f2 - f3 + f4));
    (tau, f1 + f2 + f3 + f4)
}

/// Inverse of [`mix`]; negative thrusts are reported as an error, not clamped.
pub fn unmix<T: Real>(tau: Vec3<T>, total_thrust: T, params: &PlantParams<T>) -> Result<MotorThrusts<T>, PlantError> {
    let (l, c) = (params.arm_length, params.force_to_torque);
    let half = T::half();
    // F1 + F3 and F2 + F4
    let odd = (total_thrust - tau.z / c) * half;
    let even = (total_thrust + tau.z / c) * half;
    let thrusts = MotorThrusts::new(
        (odd - tau.y / l) * half,
        (even + tau.x / l) * half,
        (odd + tau.y / l) * half,
        (even - tau.x / l) * half,
    );
    if thrusts.to_array().iter().any(|f| *f < T::zero()) {
        return Err(PlantError::InfeasibleAllocation {
            thrusts: thrusts.to_array().map(|f| f.to_f64().unwrap_or(f64::NAN)),
        });
    }
    Ok(thrusts)
}

/// Rigid-body coupling `f(X) = −S(ω)·I·ω`.
pub fn body_gyro_torque<T: Real>(rates: Vec3<T>, inertia: &Mat3<T>) -> Vec3<T> {
    -rates.cross(*inertia * rates)
}

pub fn prop_gyro_torque<T: Real>(rates: Vec3<T>, residual_rotor_speed: T, rotor_inertia: T) -> Vec3<T> {
    let k = rotor_inertia * residual_rotor_speed;
    Vec3::new(k * rates.y, -k * rates.x, T::zero())
}

/// Aerodynamic friction `k_a,i·|ω_i|·ω_i`; the sign follows the rate so the
/// subtracted term always opposes motion.
pub fn aero_torque<T: Real>(rates: Vec3<T>, aero_coeffs: Vec3<T>) -> Vec3<T> {
    aero_coeffs.hadamard(rates.map(|w| w.abs() * w))
}

pub fn torque_breakdown<T: Real>(
    body_rates: Vec3<T>,
    control_tau: Vec3<T>,
    external: Vec3<T>,
    params: &PlantParams<T>,
    inertia: &Mat3<T>,
) -> TorqueBreakdown<T> {
    TorqueBreakdown {
        control_tau,
        body_gyro: body_gyro_torque(body_rates, inertia),
        prop_gyro: prop_gyro_torque(body_rates, params.residual_rotor_speed, params.rotor_inertia),
        aero: aero_torque(body_rates, params.aero_coeffs),
        external,
    }
}

/// Angular acceleration `Θ̈` of the plant with `ω` identified with `Θ̇`.
pub fn attitude_accel<T: Real>(
    state: &AttitudeState<T>,
    control_tau: Vec3<T>,
    disturbance: Vec3<T>,
    params: &PlantParams<T>,
) -> Result<Vec3<T>, PlantError> {
    let inertia = params.true_inertia();
    if !inertia.is_positive_definite() {
        return Err(PlantError::NotPositiveDefinite { which: "true (nominal + delta)" });
    }
    let inv = inertia.inverse().map_err(|_| PlantError::NotPositiveDefinite { which: "true (nominal + delta)" })?;
    let torques = torque_breakdown(state.rates, control_tau, disturbance, params, &inertia);
    Ok(inv * torques.net())
}

/// How body rates relate to the Euler-rate state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kinematics {
    /// `ω = Θ̇`, the small-angle model the controllers are derived against.
    #[default]
    Identified,
    /// `ω = W(Θ)·Θ̇` with the full Euler-rate map.
    Exact,
}

/// Plant with its inertia inverse cached for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Plant<T> {
    params: PlantParams<T>,
    inertia: Mat3<T>,
    inertia_inv: Mat3<T>,
    kinematics: Kinematics,
}

impl<T: Real> Plant<T> {
    pub fn new(params: PlantParams<T>, kinematics: Kinematics) -> Result<Self, PlantError> {
        params.validate()?;
        let inertia = params.true_inertia();
        let inertia_inv = inertia
            .inverse()
            .map_err(|_| PlantError::NotPositiveDefinite { which: "true (nominal + delta)" })?;
        Ok(Self { params, inertia, inertia_inv, kinematics })
    }

    pub fn params(&self) -> &PlantParams<T> {
        &self.params
    }

    pub fn inertia(&self) -> &Mat3<T> {
        &self.inertia
    }

    pub fn kinematics(&self) -> Kinematics {
        self.kinematics
    }

    /// Body rates for the current state.
    pub fn body_rates(&self, state: &AttitudeState<T>) -> Vec3<T> {
        match self.kinematics {
            Kinematics::Identified => state.rates,
            Kinematics::Exact => match euler_rate_map(state.angles) {
                Ok(w) => w * state.rates,
                Err(_) => Vec3::splat(T::nan()),
            },
        }
    }

    pub fn torques(&self, state: &AttitudeState<T>, control_tau: Vec3<T>, external: Vec3<T>) -> TorqueBreakdown<T> {
        torque_breakdown(self.body_rates(state), control_tau, external, &self.params, &self.inertia)
    }

    /// `Θ̈`; NaN when exact kinematics meets the pitch singularity.
    pub fn accel(&self, state: &AttitudeState<T>, control_tau: Vec3<T>, external: Vec3<T>) -> Vec3<T> {
        let omega_dot = self.inertia_inv * self.torques(state, control_tau, external).net();
        match self.kinematics {
            Kinematics::Identified => omega_dot,
            Kinematics::Exact => match invert_euler_rate_map(state.angles) {
                Ok(w_inv) => {
                    let w_dot = euler_rate_map_derivative(state.angles, state.rates);
                    w_inv * (omega_dot - w_dot * state.rates)
                }
                Err(_) => Vec3::splat(T::nan()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn solo() -> PlantParams<f64> {
        PlantParams::solo()
    }

    fn vec3(r: f64) -> impl Strategy<Value = Vec3<f64>> {
        (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    /// Gaussian elimination with partial pivoting on the 4×4 mixing system.
    fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> [f64; 4] {
        for col in 0..4 {
            let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..4 {
                let f = a[row][col] / a[col][col];
                let pivot_row = a[col];
                for (x, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                    *x -= f * p;
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = [0.0; 4];
        for row in (0..4).rev() {
            let s: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
            x[row] = (b[row] - s) / a[row][row];
        }
        x
    }

    #[test]
    fn equal_thrusts_give_no_torque() {
        let (tau, total) = mix(MotorThrusts::new(2.0, 2.0, 2.0, 2.0), &solo());
        assert_eq!(tau, Vec3::zero());
        assert_eq!(total, 8.0);
    }

    #[test]
    fn single_motor_torque() {
        let (tau, total) = mix(MotorThrusts::new(0.0, 1.0, 0.0, 0.0), &solo());
        assert!((tau - Vec3::new(0.205, 0.0, 0.05)).norm_inf() < 1e-15);
        assert_eq!(total, 1.0);
    }

    #[test]
    fn hover_unmix() {
        let f = unmix(Vec3::zero(), 4.0, &solo()).unwrap();
        assert_eq!(f.to_array(), [1.0; 4]);
    }

    #[test]
    fn negative_allocation_is_reported() {
        let err = unmix(Vec3::new(10.0, 0.0, 0.0), 0.0, &solo()).unwrap_err();
        assert!(matches!(err, PlantError::InfeasibleAllocation { .. }));
    }

    #[test]
    fn unmix_matches_linear_solve() {
        let p = solo();
        let (l, c) = (p.arm_length, p.force_to_torque);
        let a = [[0.0, l, 0.0, -l], [-l, 0.0, l, 0.0], [-c, c, -c, c], [1.0, 1.0, 1.0, 1.0]];
        let (tau, total) = (Vec3::new(0.1, -0.05, 0.02), 14.7);
        let expected = solve4(a, [tau.x, tau.y, tau.z, total]);
        let got = unmix(tau, total, &p).unwrap().to_array();
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn principal_axis_spin_has_no_gyro_torque() {
        let i = solo().nominal_inertia();
        assert_eq!(body_gyro_torque(Vec3::new(3.0, 0.0, 0.0), &i), Vec3::zero());
    }

    #[test]
    fn gyro_torque_roll_component() {
        let p = solo();
        let (q, r) = (0.7, -1.3);
        let tau = body_gyro_torque(Vec3::new(0.0, q, r), &p.nominal_inertia());
        let expected = (p.inertia.y - p.inertia.z) * q * r;
        assert!((tau.x - expected).abs() < 1e-15);
    }

    #[test]
    fn prop_gyro_example() {
        let tau = prop_gyro_torque(Vec3::new(0.2, 0.1, 0.0), 100.0, 1e-4);
        assert!((tau - Vec3::new(1e-3, -2e-3, 0.0)).norm_inf() < 1e-15);
        assert_eq!(prop_gyro_torque(Vec3::new(0.2, 0.1, 0.4), 0.0, 1e-4), Vec3::zero());
    }

    #[test]
    fn aero_examples() {
        let k = Vec3::splat(0.1);
        assert_eq!(aero_torque(Vec3::zero(), k), Vec3::zero());
        assert!((aero_torque(Vec3::new(2.0, 0.0, 0.0), k) - Vec3::new(0.4, 0.0, 0.0)).norm_inf() < 1e-15);
        assert!((aero_torque(Vec3::new(-2.0, 0.0, 0.0), k) - Vec3::new(-0.4, 0.0, 0.0)).norm_inf() < 1e-15);
    }

    #[test]
    fn equilibrium_has_zero_accel() {
        let a = attitude_accel(&AttitudeState::rest(), Vec3::zero(), Vec3::zero(), &solo()).unwrap();
        assert_eq!(a, Vec3::zero());
    }

    #[test]
    fn roll_torque_accel() {
        let u = 0.02;
        let a = attitude_accel(&AttitudeState::rest(), Vec3::new(u, 0.0, 0.0), Vec3::zero(), &solo()).unwrap();
        assert!((a.x - u / 8.85e-3).abs() < 1e-12);
        assert_eq!((a.y, a.z), (0.0, 0.0));
    }

    #[test]
    fn non_positive_definite_inertia_is_rejected() {
        let mut p = solo();
        p.inertia_delta = Mat3::diag(Vec3::new(-1.0, 0.0, 0.0));
        assert!(matches!(
            attitude_accel(&AttitudeState::rest(), Vec3::zero(), Vec3::zero(), &p),
            Err(PlantError::NotPositiveDefinite { .. })
        ));
        assert!(Plant::new(p, Kinematics::Identified).is_err());
    }

    #[test]
    fn payload_delta_is_admissible() {
        let mut p = solo();
        p.inertia_delta = PlantParams::solo_payload_delta();
        assert!(p.validate().is_ok());
    }

    #[test]
    fn exact_kinematics_agrees_at_level_attitude() {
        let p = solo();
        let state = AttitudeState { angles: EulerAngles::zero(), rates: Vec3::new(0.3, -0.2, 0.1) };
        let u = Vec3::new(0.01, 0.002, -0.03);
        let a = Plant::new(p, Kinematics::Identified).unwrap().accel(&state, u, Vec3::zero());
        let b = Plant::new(p, Kinematics::Exact).unwrap();
        // At zero angles W = I but Ẇ·Θ̇ is not zero, so only compare the torque part.
        let w_dot = euler_rate_map_derivative(state.angles, state.rates);
        let corrected = b.accel(&state, u, Vec3::zero()) + w_dot * state.rates;
        assert!((a - corrected).norm_inf() < 1e-12);
    }

    proptest! {
        #[test]
        fn gyro_torque_does_no_work(w in vec3(5.0), diag in (0.001..1.0f64, 0.001..1.0f64, 0.001..1.0f64), off in vec3(0.0005)) {
            let i = Mat3::from_rows([[diag.0, off.x, off.y], [off.x, diag.1, off.z], [off.y, off.z, diag.2]]);
            let tau = body_gyro_torque(w, &i);
            prop_assert!(tau.dot(w).abs() < 1e-12);
            let iw = i * w;
            let oracle = Vec3::new(-(w.y * iw.z - w.z * iw.y), -(w.z * iw.x - w.x * iw.z), -(w.x * iw.y - w.y * iw.x));
            prop_assert!((tau - oracle).norm_inf() < 1e-15);
        }

        #[test]
        fn diagonal_gyro_expansion(w in vec3(5.0)) {
            let p = solo();
            let (ixx, iyy, izz) = (p.inertia.x, p.inertia.y, p.inertia.z);
            let tau = body_gyro_torque(w, &p.nominal_inertia());
            let expected = Vec3::new((iyy - izz) * w.y * w.z, (izz - ixx) * w.x * w.z, (ixx - iyy) * w.x * w.y);
            prop_assert!((tau - expected).norm_inf() < 1e-15);
        }

        #[test]
        fn accel_matches_scalar_equations(rates in vec3(3.0), u in vec3(0.5), d in vec3(0.5), omega_r in -200.0..200.0f64) {
            let mut p = solo();
            p.residual_rotor_speed = omega_r;
            let state = AttitudeState { angles: EulerAngles::new(0.1, -0.2, 0.3), rates };
            let a = attitude_accel(&state, u, d, &p).unwrap();
            let (ixx, iyy, izz) = (p.inertia.x, p.inertia.y, p.inertia.z);
            let (pr, qr, rr) = (rates.x, rates.y, rates.z);
            let ka = p.aero_coeffs;
            let kr = p.rotor_inertia * omega_r;
            let d_phi = d.x + kr * qr - ka.x * pr.abs() * pr;
            let d_theta = d.y - kr * pr - ka.y * qr.abs() * qr;
            let d_psi = d.z - ka.z * rr.abs() * rr;
            let expected = Vec3::new(
                (iyy - izz) / ixx * qr * rr + u.x / ixx + d_phi / ixx,
                (izz - ixx) / iyy * pr * rr + u.y / iyy + d_theta / iyy,
                (ixx - iyy) / izz * pr * qr + u.z / izz + d_psi / izz,
            );
            prop_assert!((a - expected).norm_inf() <= 1e-9 * expected.norm_inf().max(1.0));
        }

        #[test]
        fn accel_is_affine_in_inputs(rates in vec3(3.0), u1 in vec3(0.5), u2 in vec3(0.5), d1 in vec3(0.5), d2 in vec3(0.5)) {
            let mut p = solo();
            p.inertia_delta = PlantParams::solo_payload_delta();
            let state = AttitudeState { angles: EulerAngles::zero(), rates };
            let f = |u, d| attitude_accel(&state, u, d, &p).unwrap();
            let base = f(Vec3::zero(), Vec3::zero());
            let lhs = f(u1 + u2, d1 + d2) - base;
            let rhs = (f(u1, d1) - base) + (f(u2, d2) - base);
            prop_assert!((lhs - rhs).norm_inf() < 1e-12);
        }

        #[test]
        fn mix_unmix_round_trip(f in proptest::array::uniform4(1e-3..20.0f64)) {
            let p = solo();
            let thrusts = MotorThrusts::new(f[0], f[1], f[2], f[3]);
            let (tau, total) = mix(thrusts, &p);
            let back = unmix(tau, total, &p).unwrap();
            for (a, b) in back.to_array().iter().zip(f) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn aero_is_dissipative(w in vec3(10.0)) {
            let tau = aero_torque(w, solo().aero_coeffs);
            for i in 0..3 {
                prop_assert!(tau[i] * w[i] >= 0.0);
            }
        }
    }
}
