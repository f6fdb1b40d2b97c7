//! Running one experiment and writing its artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, InitialCondition, ProbeKind};
use crate::diagnostics::{
    consensus_errors, dissipation_check, kkt_residual, state_residual, storage_value,
    ConsensusErrors, DissipationReport, ResidualBreakdown,
};
use crate::dynamics::{lift_equilibrium, lift_point, DynamicsSpec};
use crate::error::{check_len, Error, Result};
use crate::game::{solve_gne_newton, solve_gne_oracle, KktPoint};
use crate::integrator::{integrate, Probe, TerminalReason, Trajectory};

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "GNESEEK_OUTPUT_ROOT";

pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_HORIZON: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_GATE: i32 = 4;

/// Exit code of a finished integration.
pub fn exit_code(reason: TerminalReason) -> i32 {
    match reason {
        TerminalReason::Residual => EXIT_CONVERGED,
        TerminalReason::Horizon => EXIT_HORIZON,
        TerminalReason::Divergence => EXIT_DIVERGENCE,
    }
}

/// Exit code of an experiment that could not start.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::CompensatorCheck { .. } => EXIT_GATE,
        _ => 1,
    }
}

/// Wall-clock data; the only part of the summary that varies between runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub seed: u64,
    pub family: String,
    pub terminal_reason: TerminalReason,
    pub exit_code: i32,
    pub final_time: f64,
    pub steps: usize,
    pub step_size: f64,
    pub final_x: Vec<f64>,
    pub residual: ResidualBreakdown,
    pub state_residual: f64,
    pub consensus: ConsensusErrors,
    pub oracle: Option<KktPoint>,
    /// `‖x(T) − x*‖ / max(1, ‖x*‖)`.
    pub relative_error: Option<f64>,
    pub dissipation: Option<DissipationReport>,
    pub config: ExperimentConfig,
    pub timing: Timing,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: Summary,
    pub trajectory: Trajectory,
    pub directory: Option<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }
}

/// Oracle point for the spec's game, when one is available.
pub fn reference_point(spec: &DynamicsSpec) -> Option<KktPoint> {
    if spec.boxes().is_some() {
        return None;
    }
    let game = spec.game();
    let res = if game.is_linear_quadratic() {
        solve_gne_oracle(game, spec.graph())
    } else {
        solve_gne_newton(game, spec.graph())
    };
    match res {
        Ok(k) => Some(k),
        Err(e) => {
            log::warn!("no reference equilibrium: {e}");
            None
        }
    }
}

/// Initial flat state of a config.
pub fn initial_state(spec: &DynamicsSpec, config: &ExperimentConfig) -> Result<Vec<f64>> {
    let game = spec.game();
    let zeros = vec![0.0; game.num_players() * game.m()];
    let clip = |x: Vec<f64>| -> Vec<f64> {
        match spec.boxes() {
            Some(b) => x.iter().zip(b).map(|(v, (lo, hi))| v.clamp(*lo, *hi)).collect(),
            None => x,
        }
    };
    match &config.initial {
        InitialCondition::Action { x } => lift_point(spec, &clip(x.clone()), &zeros, &zeros),
        InitialCondition::Random { scale } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let s = scale.abs();
            let x: Vec<f64> = (0..game.n())
                .map(|_| if s > 0.0 { rng.gen_range(-s..s) } else { 0.0 })
                .collect();
            lift_point(spec, &clip(x), &zeros, &zeros)
        }
        InitialCondition::State { values } => {
            check_len("initial state", spec.dim(), values.len())?;
            Ok(values.clone())
        }
    }
}

fn relative_distance(x: &[f64], x_ref: &[f64]) -> f64 {
    let scale = x_ref.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    x.iter()
        .zip(x_ref)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
        / scale
}

fn build_probes(kinds: &[ProbeKind], oracle: &Option<KktPoint>, reference: &Option<Vec<f64>>) -> Vec<Probe> {
    kinds
        .iter()
        .filter_map(|k| match k {
            ProbeKind::Distance => oracle.as_ref().map(|o| {
                let x_ref = o.x_star.clone();
                Probe::new("distance", move |spec, _, s| {
                    spec.outputs(s)
                        .map(|o| relative_distance(&o.x, &x_ref))
                        .unwrap_or(f64::NAN)
                })
            }),
            ProbeKind::KktResidual => Some(Probe::new("kkt_residual", |spec, _, s| {
                state_residual(spec, s).unwrap_or(f64::NAN)
            })),
            ProbeKind::Storage => reference.as_ref().map(|r| {
                let r = r.clone();
                Probe::new("storage", move |spec, _, s| {
                    storage_value(spec, s, &r).unwrap_or(f64::NAN)
                })
            }),
            ProbeKind::MultiplierConsensus => Some(Probe::new("multiplier_consensus", |spec, _, s| {
                consensus_errors(spec, s).map(|c| c.multiplier).unwrap_or(f64::NAN)
            })),
            ProbeKind::EstimateConsensus => Some(Probe::new("estimate_consensus", |spec, _, s| {
                consensus_errors(spec, s)
                    .ok()
                    .and_then(|c| c.estimate)
                    .unwrap_or(f64::NAN)
            })),
        })
        .collect()
}

/// Runs the experiment in memory. The compensator gate runs first; a
/// failing block never reaches integration.
pub fn execute(config: &ExperimentConfig) -> Result<RunOutcome> {
    let started = Instant::now();
    let spec = config.build_spec()?;
    let oracle = reference_point(&spec);
    let reference = match &oracle {
        Some(k) => match lift_equilibrium(&spec, k) {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!("could not lift the reference equilibrium: {e}");
                None
            }
        },
        None => None,
    };
    let s0 = initial_state(&spec, config)?;
    let probes = build_probes(&config.probes, &oracle, &reference);
    let traj = integrate(&spec, &s0, &config.integrator, &probes)?;

    let last = &traj.final_state;
    let out = spec.outputs(last)?;
    let residual = kkt_residual(spec.game(), spec.graph(), &out.x, &out.lambda, &out.z)?;
    let dissipation = match &reference {
        Some(r) => match dissipation_check(&spec, &traj, r) {
            Ok(d) => Some(d),
            Err(Error::Inapplicable(msg)) => {
                log::info!("dissipation check skipped: {msg}");
                None
            }
            Err(e) => return Err(e),
        },
        None => None,
    };
    let summary = Summary {
        name: config.name.clone(),
        seed: config.seed,
        family: spec.family().name().into(),
        terminal_reason: traj.terminal_reason,
        exit_code: exit_code(traj.terminal_reason),
        final_time: traj.final_time,
        steps: traj.steps,
        step_size: traj.h,
        relative_error: oracle.as_ref().map(|o| relative_distance(&out.x, &o.x_star)),
        final_x: out.x,
        residual,
        state_residual: state_residual(&spec, last)?,
        consensus: consensus_errors(&spec, last)?,
        oracle,
        dissipation,
        config: config.clone(),
        timing: Timing {
            wall_time_s: started.elapsed().as_secs_f64(),
        },
    };
    Ok(RunOutcome {
        summary,
        trajectory: traj,
        directory: None,
    })
}

/// Output root: the explicit argument, then the config's directory, then
/// the environment variable, then `gneseek-output`.
pub fn resolve_output_root(explicit: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = &config.output_dir {
        return p.clone();
    }
    std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("gneseek-output"))
}

/// Runs the experiment and writes `trajectory.csv`, `summary.json` and
/// `plot.py` into `<root>/<name>/`.
pub fn run_experiment(config: &ExperimentConfig, root: Option<&Path>) -> Result<RunOutcome> {
    let mut outcome = execute(config)?;
    let dir = resolve_output_root(root, config).join(&config.name);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("trajectory.csv"), trajectory_csv(&outcome.trajectory))?;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&outcome.summary)?)?;
    fs::write(dir.join("plot.py"), plot_script(&outcome.trajectory))?;
    outcome.directory = Some(dir);
    Ok(outcome)
}

/// CSV with a header row: `t`, every state column, then probe columns.
/// Numbers use the shortest representation that round-trips exactly.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    let mut header = vec!["t".to_string()];
    header.extend(traj.layout.column_names());
    header.extend(traj.probes.iter().map(|p| p.name.clone()));
    out.push_str(&header.join(","));
    out.push('\n');
    for (k, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
        let _ = write!(out, "{t:?}");
        for v in s {
            let _ = write!(out, ",{v:?}");
        }
        for p in &traj.probes {
            let _ = write!(out, ",{:?}", p.values[k]);
        }
        out.push('\n');
    }
    out
}

/// A matplotlib script plotting the log relative distance (or the residual
/// when no distance probe was recorded) against time.
pub fn plot_script(traj: &Trajectory) -> String {
    let column = if traj.probe("distance").is_some() {
        "distance"
    } else {
        "kkt_residual"
    };
    format!(
        r#"import csv
import math
import os
import sys

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "trajectory.csv")
ts, ys = [], []
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        v = float(row.get("{column}", "nan"))
        if v > 0 and math.isfinite(v):
            ts.append(float(row["t"]))
            ys.append(math.log10(v))
plt.plot(ts, ys)
plt.xlabel("t")
plt.ylabel("log10 {column}")
plt.grid(True, alpha=0.3)
plt.tight_layout()
plt.savefig(os.path.join(here, "{column}.png"), dpi=150)
"#
    )
}
