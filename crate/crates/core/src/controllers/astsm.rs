//! Adaptive super-twisting sliding mode control.
//!
//! Per axis, with `σ` the sliding variable:
//!
//! ```text
//! u_d = −α·√|σ|·sign(σ) + ν
//! ν̇   = −(β/2)·sign(σ)
//! α̇   = ϖ·√(γ₁/2)·sign(|σ| − μ)   if α > α_m
//!     = η                          otherwise
//! β   = 2·ε·α
//! ```
//!
//! Gains and `ν` are integrated with explicit Euler at the controller rate.
//! A decreasing gain is projected onto `α_m` so one discrete step cannot
//! carry it below the threshold, where it would only recover at rate `η`.
//!
//! Evaluated explicitly at a fixed rate, the `√|σ|` term settles into a
//! period-two cycle of amplitude `(α·dt/2I)²`. Once that exceeds `μ` the
//! adaptation keeps raising `α`, which widens the cycle, and the loop runs
//! away. [`Discretization::Implicit`] instead evaluates the root at the `σ`
//! the axis would reach after one step under that same term, which has a
//! closed form and leaves `σ` on its side of zero.
//!
//! That prediction needs the axis inertia. Taking `I₀` as is caps the term
//! near `I₀·|σ|/dt`, far too weak when the real inertia is much larger, so
//! the controller keeps an online estimate of `I₀/I` per axis
//! ([`Effectiveness`]) fitted to the observed step response of `σ`.

use serde::{Deserialize, Serialize};

use super::{
    equivalent_control, invalid, sliding_surface, AttitudeController, ControlOutput, ControllerError,
    ControllerKind, GainTrace, Reference, SlidingParams,
};
use crate::math::{Mat3, Vec3};
use crate::plant::AttitudeState;
use crate::scalar::{sign, Real};

/// How `β` follows `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaMode {
    /// `β = 2εα` after every update.
    #[default]
    Algebraic,
    /// `β̇ = 2εα`, integrated with explicit Euler.
    Integrated,
}

/// Where the `√|σ|` term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discretization {
    /// At the measured `σ`.
    Explicit,
    /// At the one-step-ahead `σ`.
    #[default]
    Implicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveParams<T> {
    /// Adaptation rate `ϖ`.
    pub varpi: T,
    /// Adaptation coefficient `γ₁`.
    pub gamma1: T,
    /// `β` coupling `ε`.
    pub epsilon: T,
    /// Growth rate `η` at or below the threshold.
    pub eta: T,
    /// Gain threshold `α_m`.
    pub alpha_min: T,
    /// Dead-zone `μ` on `|σ|`, rad/s.
    pub mu: T,
    /// Initial gain `α(0)`.
    pub alpha0: T,
    #[serde(default)]
    pub beta_mode: BetaMode,
    #[serde(default)]
    pub discretization: Discretization,
    /// Step size of the `I₀/I` estimate, in `[0, 1)`; zero keeps it at 1.
    pub effectiveness_rate: T,
    /// Lower clamp on the `I₀/I` estimate, in `(0, 1]`.
    pub effectiveness_floor: T,
}

impl<T: Real> Default for AdaptiveParams<T> {
    fn default() -> Self {
        Self {
            varpi: T::lit(200.0),
            gamma1: T::lit(6.60),
            epsilon: T::lit(0.60),
            eta: T::lit(0.01),
            alpha_min: T::lit(0.01),
            mu: T::lit(0.01),
            alpha0: T::lit(0.01),
            beta_mode: BetaMode::Algebraic,
            discretization: Discretization::Implicit,
            effectiveness_rate: T::lit(0.05),
            effectiveness_floor: T::lit(1e-3),
        }
    }
}

impl<T: Real> AdaptiveParams<T> {
    /// `ϖ·√(γ₁/2)`, the magnitude of `α̇` above the threshold.
    pub fn adaptation_speed(&self) -> T {
        self.varpi * (self.gamma1 / T::two()).sqrt()
    }

    pub fn validate(&self) -> Result<(), ControllerError> {
        let fields = [
            ("adaptive.varpi", self.varpi),
            ("adaptive.gamma1", self.gamma1),
            ("adaptive.epsilon", self.epsilon),
            ("adaptive.eta", self.eta),
            ("adaptive.alpha_min", self.alpha_min),
            ("adaptive.mu", self.mu),
            ("adaptive.alpha0", self.alpha0),
        ];
        for (key, v) in fields {
            if !(v.is_finite() && v > T::zero()) {
                return Err(invalid(key, "must be > 0"));
            }
        }
        if self.alpha0 < self.alpha_min {
            return Err(invalid("adaptive.alpha0", "must be >= alpha_min"));
        }
        if !(self.effectiveness_rate >= T::zero() && self.effectiveness_rate < T::one()) {
            return Err(invalid("adaptive.effectiveness_rate", "must lie in [0, 1)"));
        }
        if !(self.effectiveness_floor > T::zero() && self.effectiveness_floor <= T::one()) {
            return Err(invalid("adaptive.effectiveness_floor", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Regularizes the normalized update against steps with no excitation.
const EXCITATION_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Sample<T> {
    sigma: Vec3<T>,
    reference: Vec3<T>,
    /// `dt·u_d/I₀` applied after this sample.
    predicted: Vec3<T>,
    /// Last observed `Δσ` and the prediction it answered.
    previous: Option<(Vec3<T>, Vec3<T>)>,
}

/// Per-axis estimate of `I₀/I`, the control effectiveness relative to the
/// nominal model.
///
/// Differencing consecutive `σ` increments against the predicted increments
/// `dt·u_d/I₀` cancels slowly varying drift; the ratio is then tracked with
/// a normalized LMS step and clamped to `[floor, 1]`. Samples across a
/// reference jump are skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effectiveness<T> {
    pub ratio: Vec3<T>,
    last: Option<Sample<T>>,
}

impl<T: Real> Default for Effectiveness<T> {
    fn default() -> Self {
        Self { ratio: Vec3::splat(T::one()), last: None }
    }
}

impl<T: Real> Effectiveness<T> {
    /// Folds in the `σ` observed after the last recorded command.
    fn observe(&mut self, sigma: Vec3<T>, reference: Vec3<T>, rate: T, floor: T) -> Option<(Vec3<T>, Vec3<T>)> {
        let last = self.last?;
        if reference != last.reference {
            return None;
        }
        let increment = sigma - last.sigma;
        if let Some((prev_increment, prev_predicted)) = last.previous {
            for i in 0..3 {
                let y = increment[i] - prev_increment[i];
                let x = last.predicted[i] - prev_predicted[i];
                let b = self.ratio[i] + rate * x * (y - self.ratio[i] * x) / (x * x + T::lit(EXCITATION_FLOOR));
                self.ratio[i] = b.max(floor).min(T::one());
            }
        }
        Some((increment, last.predicted))
    }

    /// Inertia the one-step prediction should use, `I₀/ratio`.
    pub fn inertia(&self, nominal: Vec3<T>) -> Vec3<T> {
        nominal.zip_map(self.ratio, |i, b| i / b)
    }
}

/// Per-axis adaptive gains and super-twisting integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AstsmState<T> {
    pub alpha: Vec3<T>,
    pub beta: Vec3<T>,
    /// Super-twisting integral `ν`, N·m.
    pub nu: Vec3<T>,
    pub effectiveness: Effectiveness<T>,
}

impl<T: Real> Default for AstsmState<T> {
    fn default() -> Self {
        Self { alpha: Vec3::zero(), beta: Vec3::zero(), nu: Vec3::zero(), effectiveness: Effectiveness::default() }
    }
}

impl<T: Real> AstsmState<T> {
    pub fn initial(params: &AdaptiveParams<T>) -> Self {
        let alpha = Vec3::splat(params.alpha0);
        Self { alpha, beta: alpha * (T::two() * params.epsilon), nu: Vec3::zero(), effectiveness: Effectiveness::default() }
    }
}

/// Continuous super-twisting term and the next value of its integral.
pub fn supertwist_step<T: Real>(sigma: Vec3<T>, state: &AstsmState<T>, dt: T) -> (Vec3<T>, Vec3<T>) {
    let mut u_d = Vec3::zero();
    let mut nu_next = state.nu;
    for i in 0..3 {
        let s = sign(sigma[i]);
        u_d[i] = -state.alpha[i] * sigma[i].abs().sqrt() * s + state.nu[i];
        nu_next[i] = state.nu[i] - state.beta[i] * T::half() * s * dt;
    }
    (u_d, nu_next)
}

/// Super-twisting term with the root taken at the predicted surface value.
///
/// Per axis, with `c = α·dt/I`, solves `z + c·√|z|·sign(z) = σ` for `z`
/// and returns `−α·√|z|·sign(σ) + ν`. Matches [`supertwist_step`] as
/// `c → 0`; `ν` is updated identically.
pub fn supertwist_step_implicit<T: Real>(sigma: Vec3<T>, state: &AstsmState<T>, inertia: Vec3<T>, dt: T) -> (Vec3<T>, Vec3<T>) {
    let (mut u_d, nu_next) = supertwist_step(sigma, state, dt);
    for i in 0..3 {
        let s = sigma[i].abs();
        let c = state.alpha[i] * dt / inertia[i];
        // √|z| = (−c + √(c² + 4|σ|))/2, rearranged to avoid cancellation
        let root = if s > T::zero() { T::two() * s / (c + (c * c + T::lit(4.0) * s).sqrt()) } else { T::zero() };
        u_d[i] = -state.alpha[i] * root * sign(sigma[i]) + state.nu[i];
    }
    (u_d, nu_next)
}

/// One explicit-Euler step of the gain adaptation; `ν` is carried through.
pub fn adapt_gains<T: Real>(sigma: Vec3<T>, state: &AstsmState<T>, params: &AdaptiveParams<T>, dt: T) -> AstsmState<T> {
    let speed = params.adaptation_speed();
    let coupling = T::two() * params.epsilon;
    let mut next = *state;
    for i in 0..3 {
        let alpha = state.alpha[i];
        next.alpha[i] = if alpha > params.alpha_min {
            let rate = speed * sign(sigma[i].abs() - params.mu);
            let stepped = alpha + rate * dt;
            if rate < T::zero() {
                stepped.max(params.alpha_min)
            } else {
                stepped
            }
        } else {
            alpha + params.eta * dt
        };
        next.beta[i] = match params.beta_mode {
            BetaMode::Algebraic => coupling * next.alpha[i],
            BetaMode::Integrated => state.beta[i] + coupling * alpha * dt,
        };
    }
    next
}

/// Full ASTSM step: surface, effectiveness estimate, adaptation,
/// super-twisting term, equivalent control.
///
/// Returns the command and the state for the next step. The gains in effect
/// for this step are the adapted ones, i.e. `(next.alpha, next.beta)`.
pub fn astsm_step<T: Real>(
    state: &AttitudeState<T>,
    reference: &Reference<T>,
    ctrl: &AstsmState<T>,
    sliding: &SlidingParams<T>,
    adaptive: &AdaptiveParams<T>,
    nominal_inertia: &Mat3<T>,
    dt: T,
) -> (ControlOutput<T>, AstsmState<T>) {
    let sigma = sliding_surface(state, reference, sliding);
    let target = reference.angles.as_vec();
    let nominal = nominal_inertia.diagonal();

    let mut effectiveness = ctrl.effectiveness;
    let previous =
        effectiveness.observe(sigma, target, adaptive.effectiveness_rate, adaptive.effectiveness_floor);

    let mut next = adapt_gains(sigma, ctrl, adaptive, dt);
    let (u_d, nu_next) = match adaptive.discretization {
        Discretization::Explicit => supertwist_step(sigma, &next, dt),
        Discretization::Implicit => supertwist_step_implicit(sigma, &next, effectiveness.inertia(nominal), dt),
    };
    let u_eq = equivalent_control(state, reference, sliding, nominal_inertia);

    let predicted = u_d.zip_map(nominal, |u, i| u * dt / i);
    effectiveness.last = Some(Sample { sigma, reference: target, predicted, previous });
    next.nu = nu_next;
    next.effectiveness = effectiveness;
    (ControlOutput::compose(u_eq, u_d, sigma), next)
}

#[derive(Debug, Clone)]
pub struct Astsm<T> {
    sliding: SlidingParams<T>,
    adaptive: AdaptiveParams<T>,
    nominal_inertia: Mat3<T>,
    state: AstsmState<T>,
    last: GainTrace<T>,
}

impl<T: Real> Astsm<T> {
    pub fn new(sliding: SlidingParams<T>, adaptive: AdaptiveParams<T>, nominal_inertia: Mat3<T>) -> Self {
        let state = AstsmState::initial(&adaptive);
        let last = GainTrace { alpha: state.alpha, beta: state.beta, nu: state.nu };
        Self { sliding, adaptive, nominal_inertia, state, last }
    }

    pub fn state(&self) -> &AstsmState<T> {
        &self.state
    }
}

impl<T: Real> AttitudeController<T> for Astsm<T> {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Astsm
    }

    fn step(&mut self, state: &AttitudeState<T>, reference: &Reference<T>, dt: T) -> ControlOutput<T> {
        let (out, next) =
            astsm_step(state, reference, &self.state, &self.sliding, &self.adaptive, &self.nominal_inertia, dt);
        self.last = GainTrace { alpha: next.alpha, beta: next.beta, nu: self.state.nu };
        self.state = next;
        out
    }

    fn gain_trace(&self) -> GainTrace<T> {
        self.last
    }
}
