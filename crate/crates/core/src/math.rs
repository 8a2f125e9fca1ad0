//! Fixed-size 3-vectors, 3×3 matrices and Euler-angle kinematics.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Distance from `|theta| = π/2` at which the Euler-rate map is refused.
pub const SINGULARITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MathError {
    #[error("pitch angle {theta} rad is within {tolerance} rad of the ±π/2 Euler singularity")]
    EulerSingularity { theta: f64, tolerance: f64 },
    #[error("matrix is singular (determinant {det})")]
    SingularMatrix { det: f64 },
}

/// Body axis, also used as the component index of a [`Vec3`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Roll,
    Pitch,
    Yaw,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Roll, Axis::Pitch, Axis::Yaw];

    pub fn index(self) -> usize {
        match self {
            Axis::Roll => 0,
            Axis::Pitch => 1,
            Axis::Yaw => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::Roll => "roll",
            Axis::Pitch => "pitch",
            Axis::Yaw => "yaw",
        }
    }

    /// Angle symbol used in log column names.
    pub fn angle_symbol(self) -> &'static str {
        match self {
            Axis::Roll => "phi",
            Axis::Pitch => "theta",
            Axis::Yaw => "psi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(from = "[T; 3]")]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Serialize> Serialize for Vec3<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [&self.x, &self.y, &self.z].serialize(s)
    }
}

impl<T> From<[T; 3]> for Vec3<T> {
    fn from([x, y, z]: [T; 3]) -> Self {
        Self { x, y, z }
    }
}

impl<T> From<Vec3<T>> for [T; 3] {
    fn from(v: Vec3<T>) -> Self {
        [v.x, v.y, v.z]
    }
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::splat(T::zero())
    }

    pub fn splat(v: T) -> Self {
        Self::new(v, v, v)
    }

    /// Vector with `value` on `axis` and zero elsewhere.
    pub fn on_axis(axis: Axis, value: T) -> Self {
        let mut v = Self::zero();
        v[axis.index()] = value;
        v
    }

    pub fn to_array(self) -> [T; 3] {
        self.into()
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    /// Componentwise product.
    pub fn hadamard(self, other: Self) -> Self {
        Self::new(self.x * other.x, self.y * other.y, self.z * other.z)
    }

    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Self::new(f(self.x), f(self.y), f(self.z))
    }

    pub fn zip_map(self, other: Self, f: impl Fn(T, T) -> T) -> Self {
        Self::new(f(self.x, other.x), f(self.y, other.y), f(self.z, other.z))
    }

    pub fn norm_inf(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn cast<U: Real>(self) -> Vec3<U> {
        let c = |v: T| U::from_f64(v.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::nan);
        Vec3::new(c(self.x), c(self.y), c(self.z))
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

/// 3×3 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat3<T> {
    pub m: [[T; 3]; 3],
}

impl<T> From<[[T; 3]; 3]> for Mat3<T> {
    fn from(m: [[T; 3]; 3]) -> Self {
        Self { m }
    }
}

impl<T> From<Mat3<T>> for [[T; 3]; 3] {
    fn from(m: Mat3<T>) -> Self {
        m.m
    }
}

impl<T: Real> Default for Mat3<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> Mat3<T> {
    pub const fn from_rows(m: [[T; 3]; 3]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self::from_rows([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag(Vec3::splat(T::one()))
    }

    pub fn diag(d: Vec3<T>) -> Self {
        let z = T::zero();
        Self::from_rows([[d.x, z, z], [z, d.y, z], [z, z, d.z]])
    }

    pub fn diagonal(&self) -> Vec3<T> {
        Vec3::new(self.m[0][0], self.m[1][1], self.m[2][2])
    }

    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3::from(self.m[i])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Self::from_rows([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn det(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse by adjugate; fails when the determinant is zero or not finite.
    pub fn inverse(&self) -> Result<Self, MathError> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return Err(MathError::SingularMatrix { det: det.to_f64().unwrap_or(f64::NAN) });
        }
        let m = &self.m;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        let inv_det = T::one() / det;
        let mut out = Self::from_rows(adj);
        for row in out.m.iter_mut() {
            for v in row.iter_mut() {
                *v = *v * inv_det;
            }
        }
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.m[i][j] == T::zero()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.m[i][j] == self.m[j][i]))
    }

    /// Sylvester's criterion on a symmetric matrix.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() || !self.is_finite() {
            return false;
        }
        let m = &self.m;
        let minor2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        m[0][0] > T::zero() && minor2 > T::zero() && self.det() > T::zero()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }

    pub fn cast<U: Real>(&self) -> Mat3<U> {
        let c = |v: T| U::from_f64(v.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::nan);
        Mat3::from_rows(self.m.map(|row| row.map(c)))
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[i][j] + o.m[i][j];
            }
        }
        out
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o * (-T::one())
    }
}

impl<T: Real> Mul<T> for Mat3<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::from_rows(self.m.map(|row| row.map(|v| v * k)))
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = (0..3).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        out
    }
}

/// Roll, pitch and yaw in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles<T> {
    pub phi: T,
    pub theta: T,
    pub psi: T,
}

impl<T: Real> EulerAngles<T> {
    pub const fn new(phi: T, theta: T, psi: T) -> Self {
        Self { phi, theta, psi }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn as_vec(self) -> Vec3<T> {
        Vec3::new(self.phi, self.theta, self.psi)
    }

    pub fn from_vec(v: Vec3<T>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    /// Whether the angles satisfy the attitude envelope: `|phi| ≤ π/2`,
    /// `|theta|` strictly inside the singularity guard, `|psi| ≤ π`.
    pub fn within_envelope(&self) -> bool {
        let half_pi = T::FRAC_PI_2();
        self.phi.abs() <= half_pi
            && self.theta.abs() < half_pi - T::lit(SINGULARITY_TOLERANCE)
            && self.psi.abs() <= T::PI()
    }
}

/// `S(ω)` with `S(ω)·v = ω × v`.
pub fn skew<T: Real>(omega: Vec3<T>) -> Mat3<T> {
    let (p, q, r) = (omega.x, omega.y, omega.z);
    let z = T::zero();
    Mat3::from_rows([[z, -r, q], [r, z, -p], [-q, p, z]])
}

/// Body-to-earth rotation for Z-Y-X (yaw, pitch, roll) Euler angles.
pub fn rotation_matrix<T: Real>(angles: EulerAngles<T>) -> Mat3<T> {
    let (sf, cf) = angles.phi.sin_cos();
    let (st, ct) = angles.theta.sin_cos();
    let (sp, cp) = angles.psi.sin_cos();
    Mat3::from_rows([
        [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
        [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
        [-st, ct * sf, ct * cf],
    ])
}

fn guard_singularity<T: Real>(theta: T) -> Result<(), MathError> {
    let tol = T::lit(SINGULARITY_TOLERANCE);
    if theta.abs() < T::FRAC_PI_2() - tol {
        Ok(())
    } else {
        Err(MathError::EulerSingularity {
            theta: theta.to_f64().unwrap_or(f64::NAN),
            tolerance: SINGULARITY_TOLERANCE,
        })
    }
}

/// `W(Θ)` with `ω = W·Θ̇`.
pub fn euler_rate_map<T: Real>(angles: EulerAngles<T>) -> Result<Mat3<T>, MathError> {
    guard_singularity(angles.theta)?;
    let (sf, cf) = angles.phi.sin_cos();
    let (st, ct) = angles.theta.sin_cos();
    let (o, z) = (T::one(), T::zero());
    Ok(Mat3::from_rows([[o, z, -st], [z, cf, ct * sf], [z, -sf, ct * cf]]))
}

/// Closed-form `W(Θ)⁻¹`, mapping body rates back to Euler rates.
pub fn invert_euler_rate_map<T: Real>(angles: EulerAngles<T>) -> Result<Mat3<T>, MathError> {
    guard_singularity(angles.theta)?;
    let (sf, cf) = angles.phi.sin_cos();
    let (st, ct) = angles.theta.sin_cos();
    let tt = st / ct;
    let (o, z) = (T::one(), T::zero());
    Ok(Mat3::from_rows([[o, sf * tt, cf * tt], [z, cf, -sf], [z, sf / ct, cf / ct]]))
}

/// Time derivative of `W(Θ)` along `Θ̇`.
pub fn euler_rate_map_derivative<T: Real>(angles: EulerAngles<T>, rates: Vec3<T>) -> Mat3<T> {
    let (sf, cf) = angles.phi.sin_cos();
    let (st, ct) = angles.theta.sin_cos();
    let (dphi, dtheta) = (rates.x, rates.y);
    let z = T::zero();
    Mat3::from_rows([
        [z, z, -ct * dtheta],
        [z, -sf * dphi, -st * sf * dtheta + ct * cf * dphi],
        [z, -cf * dphi, -st * cf * dtheta - ct * sf * dphi],
    ])
}
