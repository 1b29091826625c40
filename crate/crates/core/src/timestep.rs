//! Time integrators for the semi-discrete system: classical RK4 and an
//! implicit midpoint rule solved by fixed-point iteration.
//!
//! Both integrators advance any tendency closure `f(state) -> (∂h/∂t, ∂u/∂t)`
//! and preserve the linear Casimirs (mass, circulation) exactly, because a
//! step is a fixed linear combination of tendencies whose mass/circulation
//! sums vanish identically. The implicit midpoint rule with a tight
//! fixed-point tolerance approximates an energy-conserving Poisson
//! integrator; it is not exactly energy-conserving because the bracket is
//! state-dependent.

use alloc::vec::Vec;

use crate::cochain::Cochain;
use crate::swe_core::{ModelState, SweError, Tendencies};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegratorKind {
    Rk4,
    ImplicitMidpoint,
}

/// Fixed-step integrator configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub kind: IntegratorKind,
    pub dt: f64,
    /// Successive-iterate max-norm tolerance for the midpoint fixed point.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl IntegratorConfig {
    pub fn rk4(dt: f64) -> Self {
        Self { kind: IntegratorKind::Rk4, dt, tolerance: 1e-13, max_iterations: 100 }
    }

    pub fn implicit_midpoint(dt: f64, tolerance: f64, max_iterations: usize) -> Self {
        Self { kind: IntegratorKind::ImplicitMidpoint, dt, tolerance, max_iterations }
    }

    fn validate(&self) -> Result<(), TimestepError> {
        if !(self.dt > 0.0) {
            return Err(TimestepError::InvalidConfig("dt must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(TimestepError::InvalidConfig("tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TimestepError {
    InvalidConfig(&'static str),
    /// The midpoint fixed point failed to converge; carries the
    /// successive-iterate residual history.
    IntegratorDivergence { residuals: Vec<f64> },
    Model(SweError),
}

impl core::fmt::Display for TimestepError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TimestepError::InvalidConfig(m) => write!(f, "invalid integrator config: {m}"),
            TimestepError::IntegratorDivergence { residuals } => write!(
                f,
                "implicit midpoint did not converge after {} iterations (residuals {residuals:?})",
                residuals.len()
            ),
            TimestepError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for TimestepError {}

impl From<SweError> for TimestepError {
    fn from(e: SweError) -> Self {
        TimestepError::Model(e)
    }
}

/// An error raised while advancing a trajectory, tagged with the step index.
#[derive(Clone, Debug, PartialEq)]
pub struct RunError {
    pub step: usize,
    pub source: TimestepError,
}

impl core::fmt::Display for RunError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "step {} failed: {}", self.step, self.source)
    }
}

impl core::error::Error for RunError {}

fn shifted(state: &ModelState, scale: f64, t: &Tendencies, time: f64) -> ModelState {
    ModelState { u: state.u.axpy(scale, &t.du), h: state.h.axpy(scale, &t.dh), time }
}

fn max_state_diff(a: &ModelState, b: &ModelState) -> f64 {
    let d = |x: &Cochain, y: &Cochain| x.axpy(-1.0, y).max_abs();
    let du = d(&a.u, &b.u);
    let dh = d(&a.h, &b.h);
    if du > dh {
        du
    } else {
        dh
    }
}

/// Advance one step with the configured integrator.
pub fn step<F>(
    state: &ModelState,
    config: &IntegratorConfig,
    mut tendency: F,
) -> Result<ModelState, TimestepError>
where
    F: FnMut(&ModelState) -> Result<Tendencies, SweError>,
{
    config.validate()?;
    let dt = config.dt;
    let t0 = state.time;
    match config.kind {
        IntegratorKind::Rk4 => {
            let k1 = tendency(state)?;
            let k2 = tendency(&shifted(state, 0.5 * dt, &k1, t0 + 0.5 * dt))?;
            let k3 = tendency(&shifted(state, 0.5 * dt, &k2, t0 + 0.5 * dt))?;
            let k4 = tendency(&shifted(state, dt, &k3, t0 + dt))?;
            let combine = |s1: &Cochain, s2: &Cochain, s3: &Cochain, s4: &Cochain| {
                s1.scaled(dt / 6.0)
                    .axpy(dt / 3.0, s2)
                    .axpy(dt / 3.0, s3)
                    .axpy(dt / 6.0, s4)
            };
            let du = combine(&k1.du, &k2.du, &k3.du, &k4.du);
            let dh = combine(&k1.dh, &k2.dh, &k3.dh, &k4.dh);
            Ok(ModelState {
                u: state.u.axpy(1.0, &du),
                h: state.h.axpy(1.0, &dh),
                time: t0 + dt,
            })
        }
        IntegratorKind::ImplicitMidpoint => {
            // Solve m = state + (dt/2) f(m) by fixed-point iteration,
            // then take state_{n+1} = state + dt f(m).
            let mut mid = state.clone();
            mid.time = t0 + 0.5 * dt;
            let mut residuals = Vec::new();
            let mut converged = false;
            let mut k = tendency(&mid)?;
            for _ in 0..config.max_iterations {
                let next = shifted(state, 0.5 * dt, &k, t0 + 0.5 * dt);
                let resid = max_state_diff(&next, &mid);
                residuals.push(resid);
                mid = next;
                if !resid.is_finite() {
                    return Err(TimestepError::IntegratorDivergence { residuals });
                }
                if resid < config.tolerance {
                    converged = true;
                    break;
                }
                k = tendency(&mid)?;
            }
            if !converged {
                return Err(TimestepError::IntegratorDivergence { residuals });
            }
            let k = tendency(&mid)?;
            Ok(shifted(state, dt, &k, t0 + dt))
        }
    }
}

/// Advance `n_steps` steps, invoking `observe(step_index, state)` for the
/// initial state (index 0) and after every completed step. Deterministic
/// given identical inputs.
pub fn run<F, C>(
    initial: ModelState,
    config: &IntegratorConfig,
    n_steps: usize,
    mut tendency: F,
    mut observe: C,
) -> Result<ModelState, RunError>
where
    F: FnMut(&ModelState) -> Result<Tendencies, SweError>,
    C: FnMut(usize, &ModelState),
{
    let mut state = initial;
    observe(0, &state);
    for s in 1..=n_steps {
        state = step(&state, config, &mut tendency)
            .map_err(|source| RunError { step: s, source })?;
        observe(s, &state);
    }
    Ok(state)
}
