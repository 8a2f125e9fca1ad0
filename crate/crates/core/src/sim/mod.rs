//! Closed-loop fixed-step simulation.
//!
//! Each step reads the reference, computes the control from the current
//! state, holds `u` and the injected torque over the interval and advances
//! the plant with RK4. The controller only ever receives the nominal
//! inertia; the plant uses `I₀ + ΔI` when the scenario asks for it.

mod integrate;
mod reference;

pub use integrate::{attitude_rk4_step, rk4_step, AttitudeDeriv, NonFiniteState, OdeState};
pub use reference::{
    disturbance_at, reference_at, DisturbanceEvent, DisturbanceProfile, ReferenceMode, ReferenceSchedule, ReferenceStep,
    StepEvent,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controllers::{AttitudeController, Controller, ControllerError, ControllerKind, ControllerParams, Reference};
use crate::math::{Mat3, Vec3};
use crate::plant::{AttitudeState, Kinematics, Plant, PlantError, PlantParams};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid configuration `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error("simulation diverged at t = {t} s")]
    Diverged { t: f64 },
    #[error("attitude left the admissible envelope at t = {t} s (angles {angles:?} rad)")]
    EnvelopeViolation { t: f64, angles: [f64; 3] },
}

fn invalid(key: &str, reason: impl Into<String>) -> SimError {
    SimError::InvalidConfig { key: key.to_owned(), reason: reason.into() }
}

/// Time grid, reference, disturbance and plant/controller selection of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec<T> {
    pub name: String,
    /// s
    pub duration: T,
    /// s
    pub dt: T,
    pub controller: ControllerKind,
    /// Apply `plant.inertia_delta` to the plant.
    pub use_inertia_delta: bool,
    #[serde(default)]
    pub kinematics: Kinematics,
    /// Reserved; the built-in scenarios are deterministic.
    #[serde(default)]
    pub seed: u64,
    pub reference: ReferenceSchedule<T>,
    pub disturbance: DisturbanceProfile<T>,
}

/// A complete, self-contained run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig<T> {
    pub scenario: ScenarioSpec<T>,
    pub plant: PlantParams<T>,
    pub controller: ControllerParams<T>,
}

impl<T: Real> ScenarioConfig<T> {
    /// Nominal Solo maneuver with the ASTSM controller.
    pub fn solo_nominal() -> Self {
        let mut plant = PlantParams::solo();
        plant.inertia_delta = PlantParams::solo_payload_delta();
        Self {
            scenario: ScenarioSpec {
                name: "nominal".to_owned(),
                duration: T::lit(5.0),
                dt: T::lit(1e-3),
                controller: ControllerKind::Astsm,
                use_inertia_delta: false,
                kinematics: Kinematics::Identified,
                seed: 0,
                reference: ReferenceSchedule::solo_maneuver(),
                disturbance: DisturbanceProfile::solo_gust(),
            },
            plant,
            controller: ControllerParams::default(),
        }
    }

    /// Number of integration steps; the log has one more row.
    pub fn step_count(&self) -> usize {
        let ratio = (self.scenario.duration / self.scenario.dt).to_f64().unwrap_or(0.0);
        (ratio + 1e-9).floor() as usize
    }

    /// Plant parameters with `ΔI` zeroed unless the scenario applies it.
    pub fn effective_plant(&self) -> PlantParams<T> {
        let mut p = self.plant;
        if !self.scenario.use_inertia_delta {
            p.inertia_delta = Mat3::zero();
        }
        p
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let s = &self.scenario;
        if !(s.dt.is_finite() && s.dt > T::zero()) {
            return Err(invalid("scenario.dt", "must be > 0"));
        }
        if !(s.duration.is_finite() && s.duration >= s.dt) {
            return Err(invalid("scenario.duration", "must be >= dt"));
        }
        let mut last = T::neg_infinity();
        for (i, step) in s.reference.steps.iter().enumerate() {
            if !(step.time >= T::zero() && step.time <= s.duration) {
                return Err(invalid(&format!("scenario.reference.steps[{i}].time"), "must lie within [0, duration]"));
            }
            if step.time < last {
                return Err(invalid(&format!("scenario.reference.steps[{i}].time"), "steps must be sorted by time"));
            }
            if !step.target.is_finite() {
                return Err(invalid(&format!("scenario.reference.steps[{i}].target"), "must be finite"));
            }
            last = step.time;
        }
        if s.reference.mode == ReferenceMode::Prefilter {
            if !(s.reference.omega_n.is_finite() && s.reference.omega_n > T::zero()) {
                return Err(invalid("scenario.reference.omega_n", "must be > 0"));
            }
            if !(s.reference.zeta.is_finite() && s.reference.zeta > T::zero()) {
                return Err(invalid("scenario.reference.zeta", "must be > 0"));
            }
        }
        for (i, ev) in s.disturbance.events.iter().enumerate() {
            if !(ev.start.is_finite() && ev.start >= T::zero()) {
                return Err(invalid(&format!("scenario.disturbance.events[{i}].start"), "must be >= 0"));
            }
            if ev.end.is_some_and(|end| end.partial_cmp(&ev.start) != Some(std::cmp::Ordering::Greater)) {
                return Err(invalid(&format!("scenario.disturbance.events[{i}].end"), "must be > start"));
            }
            if !ev.torque.is_finite() {
                return Err(invalid(&format!("scenario.disturbance.events[{i}].torque"), "must be finite"));
            }
        }
        if !self.plant.inertia_delta.is_symmetric() {
            return Err(invalid("plant.inertia_delta", "must be symmetric"));
        }
        self.plant.validate()?;
        self.effective_plant().validate()?;
        self.controller.validate()?;
        Ok(())
    }
}

/// One sample of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LogRow<T> {
    pub t: T,
    pub state: AttitudeState<T>,
    pub reference: Reference<T>,
    pub sigma: Vec3<T>,
    pub u_eq: Vec3<T>,
    pub u_d: Vec3<T>,
    pub u: Vec3<T>,
    pub alpha: Vec3<T>,
    pub beta: Vec3<T>,
    pub nu: Vec3<T>,
    /// Injected external torque held over the following step.
    pub d: Vec3<T>,
}

/// Column order of [`LogRow::values`] and of the CSV export.
pub const LOG_COLUMNS: [&str; 34] = [
    "t", "phi", "theta", "psi", "p", "q", "r", "phi_d", "theta_d", "psi_d", "sig1", "sig2", "sig3", "ueq1", "ueq2",
    "ueq3", "ud1", "ud2", "ud3", "u1", "u2", "u3", "a1", "a2", "a3", "b1", "b2", "b3", "nu1", "nu2", "nu3", "d1", "d2",
    "d3",
];

impl<T: Real> LogRow<T> {
    pub fn values(&self) -> [T; 34] {
        let a = self.state.angles.as_vec();
        let w = self.state.rates;
        let r = self.reference.angles.as_vec();
        let v = [a, w, r, self.sigma, self.u_eq, self.u_d, self.u, self.alpha, self.beta, self.nu, self.d];
        let mut out = [T::zero(); 34];
        out[0] = self.t;
        for (k, vec) in v.iter().enumerate() {
            for i in 0..3 {
                out[1 + 3 * k + i] = vec[i];
            }
        }
        out
    }
}

/// Time-indexed record of a run on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog<T> {
    pub scenario: String,
    pub controller: ControllerKind,
    pub dt: T,
    pub schedule: ReferenceSchedule<T>,
    pub disturbance: DisturbanceProfile<T>,
    pub rows: Vec<LogRow<T>>,
}

impl<T: Real> TrajectoryLog<T> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn duration(&self) -> T {
        self.rows.last().map_or(T::zero(), |r| r.t)
    }

    pub fn column_index(name: &str) -> Option<usize> {
        LOG_COLUMNS.iter().position(|c| *c == name)
    }

    /// One column by its CSV name.
    pub fn channel(&self, name: &str) -> Option<Vec<T>> {
        let i = Self::column_index(name)?;
        Some(self.rows.iter().map(|r| r.values()[i]).collect())
    }

    pub fn times(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.t).collect()
    }
}

/// Runs one scenario from rest.
pub fn run_scenario<T: Real>(config: &ScenarioConfig<T>) -> Result<TrajectoryLog<T>, SimError> {
    config.validate()?;
    let spec = &config.scenario;
    let plant = Plant::new(config.effective_plant(), spec.kinematics)?;
    let mut controller = Controller::new(spec.controller, &config.controller, config.plant.nominal_inertia())?;
    let dt = spec.dt;
    let steps = config.step_count();

    let mut rows = Vec::with_capacity(steps + 1);
    let mut state = AttitudeState::rest();
    for k in 0..=steps {
        let t = T::from_usize(k).expect("step index fits scalar") * dt;
        let reference = reference_at(t, &spec.reference);
        let d = disturbance_at(t, &spec.disturbance);
        let out = controller.step(&state, &reference, dt);
        if !out.u.is_finite() {
            return Err(SimError::Diverged { t: t.to_f64().unwrap_or(f64::NAN) });
        }
        let gains = controller.gain_trace();
        rows.push(LogRow {
            t,
            state,
            reference,
            sigma: out.sigma,
            u_eq: out.u_eq,
            u_d: out.u_d,
            u: out.u,
            alpha: gains.alpha,
            beta: gains.beta,
            nu: gains.nu,
            d,
        });
        if k == steps {
            break;
        }
        let t_next = (t + dt).to_f64().unwrap_or(f64::NAN);
        state = attitude_rk4_step(&plant, &state, out.u, d, dt).map_err(|_| SimError::Diverged { t: t_next })?;
        if !state.angles.within_envelope() {
            let a = state.angles.as_vec().cast::<f64>();
            return Err(SimError::EnvelopeViolation { t: t_next, angles: a.to_array() });
        }
    }

    Ok(TrajectoryLog {
        scenario: spec.name.clone(),
        controller: spec.controller,
        dt,
        schedule: spec.reference.clone(),
        disturbance: spec.disturbance.clone(),
        rows,
    })
}
