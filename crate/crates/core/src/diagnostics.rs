//! Residuals, consensus errors, storage monitoring and distance series.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cones::complementarity_residual;
use crate::dynamics::DynamicsSpec;
use crate::error::{check_len, Error, Result};
use crate::game::Game;
use crate::graph::{kron_apply_into, GraphTopology};
use crate::integrator::Trajectory;
use crate::linalg;

pub use crate::dynamics::storage_value;

/// The three KKT rows of a dynamics equilibrium, in the max-norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualBreakdown {
    /// `‖F(x) + ∇G(x)ᵀλ‖_∞`.
    pub stationarity: f64,
    /// `‖Lλ‖_∞`.
    pub multiplier_consensus: f64,
    /// Complementarity of `λ` against `G(x) − Lz − Lλ`.
    pub complementarity: f64,
    pub total: f64,
}

pub fn kkt_residual(
    game: &Game,
    graph: &GraphTopology,
    x: &[f64],
    lam: &[f64],
    z: &[f64],
) -> Result<ResidualBreakdown> {
    check_len("graph nodes", game.num_players(), graph.num_nodes())?;
    residual_with_laplacian(game, &graph.laplacian(), x, lam, z)
}

fn residual_with_laplacian(
    game: &Game,
    l: &DMatrix<f64>,
    x: &[f64],
    lam: &[f64],
    z: &[f64],
) -> Result<ResidualBreakdown> {
    let (players, m) = (game.num_players(), game.m());
    check_len("action profile", game.n(), x.len())?;
    check_len("multipliers", players * m, lam.len())?;
    check_len("auxiliaries", players * m, z.len())?;
    let mut stat = game.pseudo_gradient_unchecked(x);
    let (mc, comp) = if m == 0 {
        (0.0, 0.0)
    } else {
        stat += game.jacobian_transpose_apply_unchecked(x, lam);
        let g = game.stacked_values_unchecked(x);
        let mut ll = vec![0.0; players * m];
        let mut lz = vec![0.0; players * m];
        kron_apply_into(l, m, lam, &mut ll);
        kron_apply_into(l, m, z, &mut lz);
        let w: Vec<f64> = (0..players * m).map(|k| g[k] - lz[k] - ll[k]).collect();
        let mc = ll.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        (mc, complementarity_residual(lam, &w)?)
    };
    let stationarity = linalg::inf_norm(&stat);
    Ok(ResidualBreakdown {
        stationarity,
        multiplier_consensus: mc,
        complementarity: comp,
        total: stationarity.max(mc).max(comp),
    })
}

/// Natural residual `‖x − clamp(x − F(x))‖_∞` of a box-constrained game.
pub fn box_stationarity_residual(game: &Game, boxes: &[(f64, f64)], x: &[f64]) -> Result<f64> {
    check_len("boxes", game.n(), boxes.len())?;
    let f = game.pseudo_gradient(x)?;
    Ok(x.iter()
        .zip(f.iter())
        .zip(boxes)
        .map(|((&xi, &fi), &(lo, hi))| (xi - (xi - fi).clamp(lo, hi)).abs())
        .fold(0.0, f64::max))
}

/// Residual used as a stopping criterion: the KKT residual of the outputs,
/// plus the estimate disagreement for partial families and the box natural
/// residual for the local-set family.
pub fn state_residual(spec: &DynamicsSpec, s: &[f64]) -> Result<f64> {
    let out = spec.outputs(s)?;
    if let Some(boxes) = spec.boxes() {
        return box_stationarity_residual(spec.game(), boxes, &out.x);
    }
    let r = residual_with_laplacian(spec.game(), spec.laplacian(), &out.x, &out.lambda, &out.z)?;
    let players = spec.game().num_players();
    let est = out.x_est.as_ref().map_or(0.0, |e| max_pairwise(e, players));
    Ok(r.total.max(est))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsensusErrors {
    /// `max_{i,j} ‖λ^i − λ^j‖_∞`.
    pub multiplier: f64,
    /// `max_{i,j} ‖𝐱^i − 𝐱^j‖_∞` for estimate-based families.
    pub estimate: Option<f64>,
}

fn max_pairwise(v: &[f64], blocks: usize) -> f64 {
    if blocks == 0 || v.is_empty() {
        return 0.0;
    }
    let d = v.len() / blocks;
    // Max pairwise sup-distance equals the largest componentwise spread.
    (0..d)
        .map(|k| {
            let (lo, hi) = (0..blocks).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
                let x = v[i * d + k];
                (lo.min(x), hi.max(x))
            });
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Disagreement among agents' multipliers (and estimates, when present).
pub fn consensus_errors(spec: &DynamicsSpec, s: &[f64]) -> Result<ConsensusErrors> {
    let out = spec.outputs(s)?;
    let players = spec.game().num_players();
    Ok(ConsensusErrors {
        multiplier: max_pairwise(&out.lambda, players),
        estimate: out.x_est.as_ref().map(|e| max_pairwise(e, players)),
    })
}

/// Max pairwise disagreement of `blocks` equal-length agent blocks of `v`.
pub fn pairwise_disagreement(v: &[f64], blocks: usize) -> Result<f64> {
    if blocks == 0 || v.len() % blocks != 0 {
        return Err(Error::InvalidInput(format!(
            "{} entries do not split into {blocks} blocks",
            v.len()
        )));
    }
    Ok(max_pairwise(v, blocks))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationReport {
    /// Largest forward difference of the storage (may be negative).
    pub max_positive_increment: f64,
    /// Largest ratio of an increment to its tolerance.
    pub worst_ratio: f64,
    /// Index of the recorded state where the worst ratio starts.
    pub worst_index: usize,
    pub passes: bool,
    pub initial_storage: f64,
    pub final_storage: f64,
}

/// Largest eigenvalue among the storage weights used by the spec (at least 1
/// for the unit-weighted integrator parts).
fn storage_weight(spec: &DynamicsSpec) -> f64 {
    let c = spec.compensators();
    [&c.x, &c.lambda, &c.z]
        .into_iter()
        .flatten()
        .flatten()
        .filter_map(|b| b.storage())
        .map(linalg::max_sym_eigenvalue)
        .fold(1.0, f64::max)
}

/// Checks `S(s_{k+1}) − S(s_k) <= tol_k` along the recorded states, with
/// `tol_k = 10 · stride · h² · max(‖ṡ_k‖², ‖ṡ_{k+1}‖²) · λmax(P) + 64ε·max(1, S_k)`,
/// the per-step overshoot of an explicit step of a dissipative flow.
pub fn dissipation_check(
    spec: &DynamicsSpec,
    traj: &Trajectory,
    reference: &[f64],
) -> Result<DissipationReport> {
    if traj.states.is_empty() {
        return Err(Error::InvalidInput("empty trajectory".into()));
    }
    let weight = storage_weight(spec);
    let h = traj.h;
    let stride = traj.record_stride as f64;
    let mut storages = Vec::with_capacity(traj.states.len());
    let mut speeds = Vec::with_capacity(traj.states.len());
    for s in &traj.states {
        storages.push(storage_value(spec, s, reference)?);
        let f = spec.field(s)?;
        speeds.push(f.iter().map(|v| v * v).sum::<f64>());
    }
    let mut max_inc = f64::NEG_INFINITY;
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_index = 0;
    let mut passes = true;
    for k in 0..storages.len().saturating_sub(1) {
        let inc = storages[k + 1] - storages[k];
        let tol = 10.0 * stride * h * h * speeds[k].max(speeds[k + 1]) * weight
            + 64.0 * f64::EPSILON * storages[k].max(1.0);
        let ratio = inc / tol;
        max_inc = max_inc.max(inc);
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_index = k;
        }
        if !(inc <= tol) {
            passes = false;
        }
    }
    if storages.len() == 1 {
        max_inc = 0.0;
        worst_ratio = 0.0;
    }
    Ok(DissipationReport {
        max_positive_increment: max_inc,
        worst_ratio,
        worst_index,
        passes,
        initial_storage: storages[0],
        final_storage: *storages.last().unwrap(),
    })
}

/// `‖x(t) − x*‖ / max(1, ‖x*‖)` at every recorded state, with `x` the
/// game-facing action output.
pub fn distance_series(spec: &DynamicsSpec, traj: &Trajectory, x_ref: &[f64]) -> Result<Vec<f64>> {
    check_len("reference action", spec.game().n(), x_ref.len())?;
    let scale = x_ref.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    traj.states
        .iter()
        .map(|s| {
            let x = spec.outputs(s)?.x;
            Ok(x.iter()
                .zip(x_ref)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
                / scale)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_spread() {
        assert_eq!(pairwise_disagreement(&[1.0, 0.0, 0.0, 1.0], 2).unwrap(), 1.0);
        assert_eq!(pairwise_disagreement(&[2.0, 3.0, 2.0, 3.0], 2).unwrap(), 0.0);
        assert!(pairwise_disagreement(&[1.0, 2.0, 3.0], 2).is_err());
    }
}
