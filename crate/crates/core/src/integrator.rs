//! Fixed-step time stepping of projected vector fields.
//!
//! Projected components advance as `max(0, s + h·v)` (or the box clamp),
//! where `v` is the argument of the projection; this is the discrete
//! counterpart of the differentiated projection.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diagnostics;
use crate::dynamics::{DynamicsSpec, Family, StateLayout};
use crate::error::{Error, Result};
use crate::game::monotonicity_report;

/// Any component above this magnitude ends the run as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;
/// Stiffness above which the step is reduced to `1/(10θ)`.
pub const STIFF_THRESHOLD: f64 = 1e3;
const STIFF_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ProjectedEuler,
    /// Classical RK4 with every stage clamped. Formally first order once a
    /// projection becomes active.
    ProjectedRk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopOn {
    pub residual_threshold: f64,
    /// Consecutive steps the residual must stay below the threshold.
    pub window: usize,
}

impl StopOn {
    pub fn residual(threshold: f64) -> Self {
        Self {
            residual_threshold: threshold,
            window: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub h: f64,
    pub horizon: f64,
    pub scheme: Scheme,
    pub record_stride: usize,
    #[serde(default)]
    pub stop_on: Option<StopOn>,
    /// Reduce `h` automatically for stiff problems.
    #[serde(default = "default_true")]
    pub stiff_guard: bool,
}

fn default_true() -> bool {
    true
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            h: 1e-3,
            horizon: 10.0,
            scheme: Scheme::ProjectedEuler,
            record_stride: 1,
            stop_on: None,
            stiff_guard: true,
        }
    }
}

impl IntegratorConfig {
    pub fn new(h: f64, horizon: f64) -> Self {
        Self {
            h,
            horizon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParameter(format!("h must be positive, got {}", self.h)));
        }
        if !(self.horizon >= self.h && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "horizon {} must be finite and at least h = {}",
                self.horizon, self.h
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter("record_stride must be at least 1".into()));
        }
        if let Some(stop) = &self.stop_on {
            if !(stop.residual_threshold > 0.0) || stop.window == 0 {
                return Err(Error::InvalidParameter(
                    "stop_on needs a positive threshold and window".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReason {
    Horizon,
    Residual,
    Divergence,
}

/// Scalar evaluated at every recorded state.
pub struct Probe {
    pub name: String,
    #[allow(clippy::type_complexity)]
    pub func: Arc<dyn Fn(&DynamicsSpec, f64, &[f64]) -> f64 + Send + Sync>,
}

impl Probe {
    pub fn new(
        name: impl Into<String>,
        func: impl Fn(&DynamicsSpec, f64, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            func: Arc::new(func),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSeries {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Recorded times, spaced `h · record_stride`.
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub layout: StateLayout,
    pub terminal_reason: TerminalReason,
    /// Step actually used (after the stiffness guard).
    pub h: f64,
    pub record_stride: usize,
    pub final_time: f64,
    /// Last admissible state, recorded or not.
    pub final_state: Vec<f64>,
    pub steps: usize,
    pub probes: Vec<ProbeSeries>,
}

impl Trajectory {
    pub fn probe(&self, name: &str) -> Option<&[f64]> {
        self.probes
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.values.as_slice())
    }
}

fn clamp_into(spec: &DynamicsSpec, s: &[f64], v: &[f64], h: f64, out: &mut [f64]) {
    for (k, b) in spec.layout().bounds().iter().enumerate() {
        out[k] = b.clamp(s[k] + h * v[k]);
    }
}

fn pre(spec: &DynamicsSpec, s: &[f64]) -> Result<Vec<f64>> {
    let v = spec.pre_field(s)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Divergence("non-finite derivative".into()));
    }
    Ok(v)
}

/// One step of `scheme` from an admissible state.
pub fn step_with(spec: &DynamicsSpec, s: &[f64], h: f64, scheme: Scheme) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
    }
    let mut out = vec![0.0; s.len()];
    match scheme {
        Scheme::ProjectedEuler => {
            let k1 = pre(spec, s)?;
            clamp_into(spec, s, &k1, h, &mut out);
        }
        Scheme::ProjectedRk4 => {
            let mut stage = vec![0.0; s.len()];
            let k1 = pre(spec, s)?;
            clamp_into(spec, s, &k1, 0.5 * h, &mut stage);
            let k2 = pre(spec, &stage)?;
            clamp_into(spec, s, &k2, 0.5 * h, &mut stage);
            let k3 = pre(spec, &stage)?;
            clamp_into(spec, s, &k3, h, &mut stage);
            let k4 = pre(spec, &stage)?;
            let avg: Vec<f64> = (0..s.len())
                .map(|k| (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]) / 6.0)
                .collect();
            clamp_into(spec, s, &avg, h, &mut out);
        }
    }
    Ok(out)
}

/// One projected-Euler step.
pub fn step(spec: &DynamicsSpec, s: &[f64], h: f64) -> Result<Vec<f64>> {
    step_with(spec, s, h, Scheme::ProjectedEuler)
}

/// Lipschitz estimate of the pseudo-gradient.
pub fn stiffness(spec: &DynamicsSpec) -> f64 {
    monotonicity_report(spec.game(), STIFF_SAMPLES, 0).theta_estimate
}

/// High-frequency gain of the action channel: `1 + ‖CB‖ + ‖D‖` for parallel
/// blocks, `‖CB‖` for replacement blocks, 1 otherwise.
fn action_channel_gain(spec: &DynamicsSpec) -> f64 {
    let Some(blocks) = &spec.compensators().x else {
        return 1.0;
    };
    let cb = |b: &crate::compensators::LtiBlock| {
        if b.state_dim() == 0 {
            0.0
        } else {
            crate::linalg::spectral_norm(&(b.c() * b.b()))
        }
    };
    match spec.family() {
        Family::Pfc | Family::PartialPfc => blocks
            .iter()
            .map(|b| 1.0 + cb(b) + crate::linalg::spectral_norm(b.d()))
            .fold(1.0, f64::max),
        Family::Generalized | Family::PartialGeneralizedNocon => {
            blocks.iter().map(cb).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
        }
        _ => 1.0,
    }
}

/// Rate bound `g·(θ + λmax(ℒ))` of the estimate coupling `𝐅(𝐱) + 𝐋𝐱`, with
/// `g` the action channel's high-frequency gain; zero without estimates.
pub fn coupling_stiffness(spec: &DynamicsSpec) -> f64 {
    if !spec.family().is_partial() {
        return 0.0;
    }
    let lmax = spec.graph().spectrum().into_iter().fold(0.0_f64, f64::max);
    action_channel_gain(spec) * (stiffness(spec) + lmax)
}

/// Step size after the stiffness guards: `1/(10θ)` when `θ > 1e3`, and
/// `h·ρ <= 1` for the estimate coupling rate `ρ`.
pub fn effective_step(spec: &DynamicsSpec, config: &IntegratorConfig) -> f64 {
    if !config.stiff_guard {
        return config.h;
    }
    let mut h = config.h;
    let theta = stiffness(spec);
    if theta > STIFF_THRESHOLD {
        h = h.min(1.0 / (10.0 * theta));
    }
    let rho = coupling_stiffness(spec);
    if h * rho > 1.0 {
        h = 1.0 / rho;
    }
    if h < config.h {
        log::info!("stiff dynamics: step reduced from {} to {h:.3e}", config.h);
    }
    h
}

/// Integrates from `s0` until the horizon, the residual criterion or divergence.
pub fn integrate(
    spec: &DynamicsSpec,
    s0: &[f64],
    config: &IntegratorConfig,
    probes: &[Probe],
) -> Result<Trajectory> {
    config.validate()?;
    spec.check_admissible(s0)?;
    let h = effective_step(spec, config);
    let total_steps = (config.horizon / h).round().max(1.0) as usize;

    let mut series: Vec<ProbeSeries> = probes
        .iter()
        .map(|p| ProbeSeries {
            name: p.name.clone(),
            values: Vec::new(),
        })
        .collect();
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut record = |t: f64, s: &[f64], times: &mut Vec<f64>, states: &mut Vec<Vec<f64>>| {
        times.push(t);
        states.push(s.to_vec());
        for (p, ser) in probes.iter().zip(series.iter_mut()) {
            ser.values.push((p.func)(spec, t, s));
        }
    };

    let mut s = s0.to_vec();
    record(0.0, &s, &mut times, &mut states);
    let mut reason = TerminalReason::Horizon;
    let mut below = 0usize;
    let mut k = 0usize;
    while k < total_steps {
        let next = match step_with(spec, &s, h, config.scheme) {
            Ok(v) => v,
            Err(Error::Divergence(msg)) => {
                log::warn!("divergence at t = {}: {msg}", k as f64 * h);
                reason = TerminalReason::Divergence;
                break;
            }
            Err(e) => return Err(e),
        };
        if next.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_THRESHOLD) {
            log::warn!("state magnitude exceeded {DIVERGENCE_THRESHOLD:e} at t = {}", (k + 1) as f64 * h);
            reason = TerminalReason::Divergence;
            break;
        }
        s = next;
        k += 1;
        let t = k as f64 * h;
        if k % config.record_stride == 0 {
            record(t, &s, &mut times, &mut states);
        }
        if let Some(stop) = &config.stop_on {
            // Checked every `window / 10` steps; a run stops once the residual
            // stayed below the threshold at every check spanning `window` steps.
            let every = (stop.window / 10).max(1);
            if k % every != 0 {
                continue;
            }
            let r = diagnostics::state_residual(spec, &s)?;
            if r < stop.residual_threshold {
                below += every;
                if below >= stop.window {
                    reason = TerminalReason::Residual;
                    break;
                }
            } else {
                below = 0;
            }
        }
    }
    Ok(Trajectory {
        times,
        states,
        layout: spec.layout().clone(),
        terminal_reason: reason,
        h,
        record_stride: config.record_stride,
        final_time: k as f64 * h,
        final_state: s,
        steps: k,
        probes: series,
    })
}
