//! Quadcopter attitude dynamics, sliding-mode controllers and a fixed-step
//! closed-loop simulator.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! pin the common double-precision types.

pub mod controllers;
pub mod math;
pub mod metrics;
pub mod plant;
pub mod scalar;
pub mod sim;

pub use controllers::{AttitudeController, Controller, ControllerKind, ControllerParams};
pub use math::{Axis, EulerAngles, Mat3, Vec3};
pub use plant::{AttitudeState, Kinematics, Plant, PlantParams};
pub use scalar::Real;
pub use sim::{run_scenario, ScenarioConfig, SimError, TrajectoryLog};

pub type Vec3d = Vec3<f64>;
pub type Vec3f = Vec3<f32>;
pub type Mat3d = Mat3<f64>;
pub type Mat3f = Mat3<f32>;
pub type EulerAnglesD = EulerAngles<f64>;
pub type AttitudeStateD = AttitudeState<f64>;
pub type PlantParamsD = PlantParams<f64>;
pub type ControllerParamsD = ControllerParams<f64>;
pub type ScenarioConfigD = ScenarioConfig<f64>;
pub type ScenarioConfigF = ScenarioConfig<f32>;
pub type TrajectoryLogD = TrajectoryLog<f64>;
pub type TrajectoryLogF = TrajectoryLog<f32>;
