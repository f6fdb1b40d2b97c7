//! Equilibrium lifting and composite storage functions.

use nalgebra::{DMatrix, DVector};

use super::bank::Bank;
use super::engine::select_others;
use super::{Channel, DynamicsSpec, Family, Mode};
use crate::compensators::solve_regulator_equations;
use crate::error::{check_len, Error, Result};
use crate::game::KktPoint;

/// Maps a KKT point to the corresponding equilibrium of the family's state.
///
/// Parallel channels get `ρ* = y*`, `τ* = 0`; feedback channels get
/// `ξ* = −A⁻¹B y*`; replacement channels get `ϑ* = Π y*` from the regulator
/// equations. Partial families use the consensus estimate `1_N ⊗ x*`.
pub fn lift_equilibrium(spec: &DynamicsSpec, k: &KktPoint) -> Result<Vec<f64>> {
    lift_point(spec, &k.x_star, &k.lambda_star, &k.z_star)
}

/// Lifts an arbitrary triple `(x, λ, z)` the same way as
/// [`lift_equilibrium`]; used for consistent initial states.
pub fn lift_point(spec: &DynamicsSpec, x: &[f64], lambda: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    let game = spec.game();
    let (players, n, m) = (game.num_players(), game.n(), game.m());
    check_len("action", n, x.len())?;
    check_len("multipliers", players * m, lambda.len())?;
    check_len("auxiliaries", players * m, z.len())?;
    let mut s = vec![0.0; spec.dim()];
    let consensus: Vec<f64> = (0..players).flat_map(|_| x.iter().copied()).collect();

    if spec.family() == Family::PartialGeneralizedNocon {
        lift_channel(&spec.x, x, false, &mut s)?;
        let others = select_others(game, &consensus)?;
        s[spec.xs.clone()].copy_from_slice(&others);
    } else {
        let xstar = if matches!(
            spec.family(),
            Family::PartialGp | Family::PartialPfc | Family::PartialOfc
        ) {
            &consensus
        } else {
            x
        };
        lift_channel(&spec.x, xstar, false, &mut s)?;
    }
    lift_channel(&spec.lam, lambda, true, &mut s)?;
    lift_channel(&spec.z, z, false, &mut s)?;
    Ok(s)
}

fn lift_channel(ch: &Channel, star: &[f64], lambda: bool, s: &mut [f64]) -> Result<()> {
    match ch.mode {
        Mode::Integrator => s[ch.main.clone()].copy_from_slice(star),
        Mode::Parallel => s[ch.main.clone()].copy_from_slice(star),
        Mode::Feedback => {
            s[ch.main.clone()].copy_from_slice(star);
            let bank = ch.bank.as_ref().expect("feedback channel has a bank");
            let mut xi = Vec::with_capacity(bank.state_dim());
            for (i, blk) in bank.blocks().iter().enumerate() {
                let y = DVector::from_column_slice(&star[bank.io_range(i)]);
                let rhs = blk.b() * y;
                let sol = blk.a().clone().lu().solve(&rhs).ok_or_else(|| {
                    Error::Inapplicable(format!("block {i} has a singular A; no equilibrium state"))
                })?;
                xi.extend(sol.iter().map(|v| -v));
            }
            s[ch.aux.clone()].copy_from_slice(&xi);
        }
        Mode::Replacement => {
            let bank = ch.bank.as_ref().expect("replacement channel has a bank");
            let mut th = Vec::with_capacity(bank.state_dim());
            for (i, blk) in bank.blocks().iter().enumerate() {
                let pi = solve_regulator_equations(blk, lambda)?;
                let y = DVector::from_column_slice(&star[bank.io_range(i)]);
                th.extend((pi * y).iter().copied());
            }
            s[ch.main.clone()].copy_from_slice(&th);
        }
    }
    Ok(())
}

/// Composite storage `½‖y − y*‖²` on integrator-type variables plus
/// `½ (ζ − ζ*)ᵀ P (ζ − ζ*)` on compensator states, using each block's
/// certified storage matrix.
pub fn storage_value(spec: &DynamicsSpec, s: &[f64], reference: &[f64]) -> Result<f64> {
    check_len("state", spec.dim(), s.len())?;
    check_len("reference", spec.dim(), reference.len())?;
    let half_sq = |r: std::ops::Range<usize>| -> f64 {
        0.5 * r.map(|k| (s[k] - reference[k]).powi(2)).sum::<f64>()
    };
    let weighted = |bank: &Bank, r: std::ops::Range<usize>| -> Result<f64> {
        let mut total = 0.0;
        for (i, blk) in bank.blocks().iter().enumerate() {
            let sr = bank.state_range(i);
            if sr.is_empty() {
                continue;
            }
            let p: &DMatrix<f64> = blk.storage().ok_or_else(|| {
                Error::Inapplicable(format!("block {i} carries no storage matrix"))
            })?;
            let d = DVector::from_fn(sr.len(), |k, _| {
                s[r.start + sr.start + k] - reference[r.start + sr.start + k]
            });
            total += 0.5 * d.dot(&(p * &d));
        }
        Ok(total)
    };
    let mut total = half_sq(spec.xs.clone());
    for ch in [&spec.x, &spec.lam, &spec.z] {
        total += match ch.mode {
            Mode::Integrator => half_sq(ch.main.clone()),
            Mode::Parallel | Mode::Feedback => {
                half_sq(ch.main.clone()) + weighted(ch.bank.as_ref().unwrap(), ch.aux.clone())?
            }
            Mode::Replacement => weighted(ch.bank.as_ref().unwrap(), ch.main.clone())?,
        };
    }
    Ok(total)
}
