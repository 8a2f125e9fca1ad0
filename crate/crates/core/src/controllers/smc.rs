//! First-order sliding mode baseline: `u = u_eq − K·sat(σ/φ)`.

use serde::{Deserialize, Serialize};

use super::{
    check_non_negative, check_positive, equivalent_control, sliding_surface, AttitudeController, ControlOutput,
    ControllerError, ControllerKind, Reference, SlidingParams,
};
use crate::math::{Mat3, Vec3};
use crate::plant::AttitudeState;
use crate::scalar::{sat, sign, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmcParams<T> {
    /// Switching gain `K`, N·m.
    pub gain: Vec3<T>,
    /// Boundary-layer width per axis; zero selects a pure sign switch.
    pub boundary_layer: Vec3<T>,
}

impl<T: Real> Default for SmcParams<T> {
    fn default() -> Self {
        Self { gain: Vec3::splat(T::two()), boundary_layer: Vec3::zero() }
    }
}

impl<T: Real> SmcParams<T> {
    pub fn validate(&self) -> Result<(), ControllerError> {
        check_positive("smc.gain", self.gain)?;
        check_non_negative("smc.boundary_layer", self.boundary_layer)
    }
}

/// Switching term for one axis.
fn switching<T: Real>(sigma: T, gain: T, layer: T) -> T {
    if layer > T::zero() {
        -gain * sat(sigma / layer)
    } else {
        -gain * sign(sigma)
    }
}

pub fn smc_step<T: Real>(
    state: &AttitudeState<T>,
    reference: &Reference<T>,
    sliding: &SlidingParams<T>,
    params: &SmcParams<T>,
    nominal_inertia: &Mat3<T>,
) -> ControlOutput<T> {
    let sigma = sliding_surface(state, reference, sliding);
    let mut u_d = Vec3::zero();
    for i in 0..3 {
        u_d[i] = switching(sigma[i], params.gain[i], params.boundary_layer[i]);
    }
    let u_eq = equivalent_control(state, reference, sliding, nominal_inertia);
    ControlOutput::compose(u_eq, u_d, sigma)
}

#[derive(Debug, Clone)]
pub struct Smc<T> {
    sliding: SlidingParams<T>,
    params: SmcParams<T>,
    nominal_inertia: Mat3<T>,
}

impl<T: Real> Smc<T> {
    pub fn new(sliding: SlidingParams<T>, params: SmcParams<T>, nominal_inertia: Mat3<T>) -> Self {
        Self { sliding, params, nominal_inertia }
    }
}

impl<T: Real> AttitudeController<T> for Smc<T> {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Smc
    }

    fn step(&mut self, state: &AttitudeState<T>, reference: &Reference<T>, _dt: T) -> ControlOutput<T> {
        smc_step(state, reference, &self.sliding, &self.params, &self.nominal_inertia)
    }
}
