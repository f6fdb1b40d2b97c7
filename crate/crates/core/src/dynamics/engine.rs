//! Field evaluation shared by all families.

use super::bank::Part;
use super::{Channel, DynamicsSpec, Family, Mode, ADMISSIBILITY_TOL};
use crate::error::{check_len, Error, Result};
use crate::game::Game;
use crate::graph::kron_apply_into;

/// Iteration cap of the fixed point resolving an action-channel feedthrough loop.
pub const FEEDTHROUGH_MAX_ITERS: usize = 200;
const FEEDTHROUGH_TOL: f64 = 1e-13;

/// Signals produced by the state at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    /// Action profile seen by the game (`𝓡𝐱` for partial families).
    pub x: Vec<f64>,
    /// Stacked estimates `𝐱` (partial families only).
    pub x_est: Option<Vec<f64>>,
    pub lambda: Vec<f64>,
    pub z: Vec<f64>,
}

/// `𝓡𝐱`: every agent's own block of its estimate.
pub fn select_own(game: &Game, x_est: &[f64]) -> Result<Vec<f64>> {
    let n = game.n();
    check_len("stacked estimates", game.num_players() * n, x_est.len())?;
    let mut out = vec![0.0; n];
    for i in 0..game.num_players() {
        let r = game.block(i);
        out[r.clone()].copy_from_slice(&x_est[i * n + r.start..i * n + r.end]);
    }
    Ok(out)
}

/// `𝓡ᵀx`: places each own block into its agent's estimate, zeros elsewhere.
pub fn lift_own(game: &Game, x: &[f64]) -> Result<Vec<f64>> {
    let n = game.n();
    check_len("action profile", n, x.len())?;
    let mut out = vec![0.0; game.num_players() * n];
    for i in 0..game.num_players() {
        let r = game.block(i);
        out[i * n + r.start..i * n + r.end].copy_from_slice(&x[r]);
    }
    Ok(out)
}

/// `𝓢𝐱`: every agent's estimates of the others, stacked (length `Nn − n`).
pub fn select_others(game: &Game, x_est: &[f64]) -> Result<Vec<f64>> {
    let n = game.n();
    check_len("stacked estimates", game.num_players() * n, x_est.len())?;
    let mut out = Vec::with_capacity(game.num_players() * n - n);
    for i in 0..game.num_players() {
        let r = game.block(i);
        let est = &x_est[i * n..(i + 1) * n];
        out.extend_from_slice(&est[..r.start]);
        out.extend_from_slice(&est[r.end..]);
    }
    Ok(out)
}

/// `𝓢ᵀv`.
pub fn lift_others(game: &Game, v: &[f64]) -> Result<Vec<f64>> {
    let n = game.n();
    let players = game.num_players();
    check_len("others' estimates", players * n - n, v.len())?;
    let mut out = vec![0.0; players * n];
    let mut k = 0;
    for i in 0..players {
        let r = game.block(i);
        for c in (0..n).filter(|c| !r.contains(c)) {
            out[i * n + c] = v[k];
            k += 1;
        }
    }
    Ok(out)
}

fn family_guard(spec: &DynamicsSpec, allowed: &[Family], op: &str) -> Result<()> {
    if allowed.contains(&spec.family()) {
        Ok(())
    } else {
        Err(Error::UnsupportedFamily(format!(
            "{op} does not apply to family {}",
            spec.family().name()
        )))
    }
}

/// Plain projected gradient play.
pub fn gp_field(spec: &DynamicsSpec, s: &[f64]) -> Result<Vec<f64>> {
    family_guard(spec, &[Family::Gp], "gp_field")?;
    spec.field(s)
}

/// Gradient play with parallel feedforward compensators.
pub fn pfc_field(spec: &DynamicsSpec, s: &[f64]) -> Result<Vec<f64>> {
    family_guard(spec, &[Family::Pfc, Family::PartialPfc], "pfc_field")?;
    spec.field(s)
}

/// Gradient play with output feedback compensators.
pub fn ofc_field(spec: &DynamicsSpec, s: &[f64]) -> Result<Vec<f64>> {
    family_guard(spec, &[Family::Ofc, Family::PartialOfc], "ofc_field")?;
    spec.field(s)
}

/// Gradient play where each integrator is replaced by a passive LTI agent.
pub fn generalized_field(spec: &DynamicsSpec, s: &[f64]) -> Result<Vec<f64>> {
    family_guard(spec, &[Family::Generalized], "generalized_field")?;
    spec.field(s)
}

/// Gradient play on local estimates of the full profile.
pub fn partial_gp_field(spec: &DynamicsSpec, s: &[f64]) -> Result<Vec<f64>> {
    family_guard(spec, &[Family::PartialGp], "partial_gp_field")?;
    spec.field(s)
}

/// Estimate-based NE seeking where the own-action channel runs through LTI agents.
pub fn partial_generalized_nocon_field(spec: &DynamicsSpec, s: &[f64]) -> Result<Vec<f64>> {
    family_guard(
        spec,
        &[Family::PartialGeneralizedNocon],
        "partial_generalized_nocon_field",
    )?;
    spec.field(s)
}

/// Output feedback gradient play projected onto per-component boxes.
pub fn ofc_local_set_field(spec: &DynamicsSpec, s: &[f64]) -> Result<Vec<f64>> {
    family_guard(spec, &[Family::OfcLocalSet], "ofc_local_set_field")?;
    spec.field(s)
}

struct Eval {
    out: Outputs,
    pre: Vec<f64>,
}

impl DynamicsSpec {
    /// Time derivative: the pre-projection field with each projected
    /// component replaced by its tangent-cone projection.
    pub fn field(&self, s: &[f64]) -> Result<Vec<f64>> {
        let mut v = self.pre_field(s)?;
        for ((vk, &sk), b) in v.iter_mut().zip(s).zip(self.layout().bounds()) {
            *vk = b.tangent(sk, *vk);
        }
        Ok(v)
    }

    /// The argument of every projection before it is applied (equal to the
    /// derivative on unprojected components).
    pub fn pre_field(&self, s: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evaluate(s)?.pre)
    }

    /// Game-facing signals at state `s`.
    pub fn outputs(&self, s: &[f64]) -> Result<Outputs> {
        Ok(self.evaluate(s)?.out)
    }

    /// Rejects states of the wrong length, non-finite values and projected
    /// components below `−ADMISSIBILITY_TOL` or outside their box.
    pub fn check_admissible(&self, s: &[f64]) -> Result<()> {
        check_len("state", self.dim(), s.len())?;
        for (k, (&v, b)) in s.iter().zip(self.layout().bounds()).enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidState(format!("component {k} is not finite")));
            }
            if !b.admits(v, ADMISSIBILITY_TOL) {
                return Err(Error::InvalidState(format!(
                    "component {} = {v:e} violates its bound {b:?}",
                    self.layout().column_names()[k]
                )));
            }
        }
        Ok(())
    }

    fn evaluate(&self, s: &[f64]) -> Result<Eval> {
        self.check_admissible(s)?;
        let game = self.game();
        let players = game.num_players();
        let (n, m) = (game.n(), game.m());
        let l = self.laplacian();
        let partial = self.family().is_partial();
        let nocon = self.family() == Family::PartialGeneralizedNocon;
        let mut pre = vec![0.0; self.dim()];

        // Multiplier output.
        let lam = channel_output(&self.lam, s, true);

        // v_z = Lλ, then z.
        let mut v_z = vec![0.0; players * m];
        if m > 0 {
            kron_apply_into(l, m, &lam, &mut v_z);
        }
        let mut z = channel_output(&self.z, s, false);
        if self.z.mode == Mode::Parallel {
            if let Some(bank) = &self.z.bank {
                bank.apply(Part::D, &v_z, &mut z, 1.0);
            }
        }

        // Action channel: output and input, with the feedthrough loop if any.
        let x_vel = |xsig: &[f64]| -> Vec<f64> { self.action_input(xsig, &lam) };
        let mut xsig = if nocon {
            let mut est = vec![0.0; players * n];
            if let Some(bank) = &self.x.bank {
                let mut own = vec![0.0; n];
                bank.apply(Part::C, &s[self.x.main.clone()], &mut own, 1.0);
                est = lift_own(game, &own)?;
            }
            let others = lift_others(game, &s[self.xs.clone()])?;
            est.iter_mut().zip(&others).for_each(|(a, b)| *a += b);
            est
        } else {
            channel_output(&self.x, s, false)
        };
        let base = xsig.clone();
        let mut v_x = x_vel(&xsig);
        if self.x.mode == Mode::Parallel {
            let bank = self.x.bank.as_ref().expect("parallel channel has a bank");
            if bank.has_feedthrough() {
                let mut converged = false;
                for _ in 0..FEEDTHROUGH_MAX_ITERS {
                    let mut next = base.clone();
                    bank.apply(Part::D, &v_x, &mut next, 1.0);
                    let diff = next
                        .iter()
                        .zip(&xsig)
                        .fold(0.0_f64, |a, (p, q)| a.max((p - q).abs()));
                    let scale = next.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
                    xsig = next;
                    v_x = x_vel(&xsig);
                    if !diff.is_finite() {
                        break;
                    }
                    if diff <= FEEDTHROUGH_TOL * scale {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(Error::InvalidState(
                        "feedthrough loop on the action channel did not converge".into(),
                    ));
                }
            }
        }

        // v_λ = G(x) − Lz − Lλ.
        let x_game = if partial { select_own(game, &xsig)? } else { xsig.clone() };
        let mut v_lam = vec![0.0; players * m];
        if m > 0 {
            let g = game.stacked_values_unchecked(&x_game);
            let mut lz = vec![0.0; players * m];
            kron_apply_into(l, m, &z, &mut lz);
            for k in 0..players * m {
                v_lam[k] = g[k] - lz[k] - v_z[k];
            }
        }

        if nocon {
            let bank = self.x.bank.as_ref().expect("nocon channel has a bank");
            let th = &s[self.x.main.clone()];
            let mut d = vec![0.0; th.len()];
            bank.apply(Part::A, th, &mut d, 1.0);
            bank.apply(Part::B, &v_x, &mut d, 1.0);
            pre[self.x.main.clone()].copy_from_slice(&d);
            let mut lx = vec![0.0; players * n];
            kron_apply_into(l, n, &xsig, &mut lx);
            let others = select_others(game, &lx)?;
            for (k, v) in self.xs.clone().zip(others) {
                pre[k] = -v;
            }
        } else {
            channel_pre(&self.x, s, &xsig, &v_x, &mut pre);
        }
        channel_pre(&self.lam, s, &lam, &v_lam, &mut pre);
        channel_pre(&self.z, s, &z, &v_z, &mut pre);

        let x_est = partial.then(|| xsig.clone());
        Ok(Eval {
            out: Outputs {
                x: x_game,
                x_est,
                lambda: lam,
                z,
            },
            pre,
        })
    }

    /// `v_x` given the action signal: `−F(x) − ∇G(x)ᵀλ`, its estimate-based
    /// counterpart with `−𝐋𝐱`, or `−𝐅(𝐱) − 𝓡𝐋𝐱` without constraints.
    fn action_input(&self, xsig: &[f64], lam: &[f64]) -> Vec<f64> {
        let game = self.game();
        let (players, n, m) = (game.num_players(), game.n(), game.m());
        match self.family() {
            Family::PartialGp | Family::PartialPfc | Family::PartialOfc => {
                let own = select_own(game, xsig).expect("checked dims");
                let mut g = game.extended_pseudo_gradient_unchecked(xsig);
                if m > 0 {
                    g += game.jacobian_transpose_apply_unchecked(&own, lam);
                }
                let mut out = vec![0.0; players * n];
                kron_apply_into(self.laplacian(), n, xsig, &mut out);
                for v in out.iter_mut() {
                    *v = -*v;
                }
                for i in 0..players {
                    for r in game.block(i) {
                        out[i * n + r] -= g[r];
                    }
                }
                out
            }
            Family::PartialGeneralizedNocon => {
                let mut lx = vec![0.0; players * n];
                kron_apply_into(self.laplacian(), n, xsig, &mut lx);
                let own_lx = select_own(game, &lx).expect("checked dims");
                let g = game.extended_pseudo_gradient_unchecked(xsig);
                (0..n).map(|k| -g[k] - own_lx[k]).collect()
            }
            _ => {
                let mut g = game.pseudo_gradient_unchecked(xsig);
                if m > 0 {
                    g += game.jacobian_transpose_apply_unchecked(xsig, lam);
                }
                g.iter().map(|v| -v).collect()
            }
        }
    }
}

/// Channel signal before any feedthrough term.
fn channel_output(ch: &Channel, s: &[f64], projected: bool) -> Vec<f64> {
    match ch.mode {
        Mode::Integrator | Mode::Feedback => s[ch.main.clone()].to_vec(),
        Mode::Parallel => {
            let bank = ch.bank.as_ref().expect("parallel channel has a bank");
            let mut ct = vec![0.0; ch.dim];
            bank.apply(Part::C, &s[ch.aux.clone()], &mut ct, 1.0);
            let rho = &s[ch.main.clone()];
            if projected {
                if ct.iter().any(|&v| v < -ADMISSIBILITY_TOL) {
                    log::debug!("clipping of a projected compensator output is active");
                }
                rho.iter().zip(&ct).map(|(r, c)| r + c.max(0.0)).collect()
            } else {
                rho.iter().zip(&ct).map(|(r, c)| r + c).collect()
            }
        }
        Mode::Replacement => {
            let bank = ch.bank.as_ref().expect("replacement channel has a bank");
            let mut out = vec![0.0; ch.dim];
            bank.apply(Part::C, &s[ch.main.clone()], &mut out, 1.0);
            if projected {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            out
        }
    }
}

/// Writes the pre-projection derivative of one channel given its signal `y`
/// and input `v`.
fn channel_pre(ch: &Channel, s: &[f64], y: &[f64], v: &[f64], pre: &mut [f64]) {
    match ch.mode {
        Mode::Integrator => pre[ch.main.clone()].copy_from_slice(v),
        Mode::Parallel => {
            let bank = ch.bank.as_ref().expect("parallel channel has a bank");
            pre[ch.main.clone()].copy_from_slice(v);
            let aux = &s[ch.aux.clone()];
            let out = &mut pre[ch.aux.clone()];
            bank.apply(Part::A, aux, out, 1.0);
            bank.apply(Part::B, v, out, 1.0);
        }
        Mode::Feedback => {
            let bank = ch.bank.as_ref().expect("feedback channel has a bank");
            let xi = &s[ch.aux.clone()];
            let main = &mut pre[ch.main.clone()];
            main.copy_from_slice(v);
            bank.apply(Part::C, xi, main, -1.0);
            bank.apply(Part::D, y, main, -1.0);
            let out = &mut pre[ch.aux.clone()];
            bank.apply(Part::A, xi, out, 1.0);
            bank.apply(Part::B, y, out, 1.0);
        }
        Mode::Replacement => {
            let bank = ch.bank.as_ref().expect("replacement channel has a bank");
            let th = &s[ch.main.clone()];
            let out = &mut pre[ch.main.clone()];
            bank.apply(Part::A, th, out, 1.0);
            bank.apply(Part::B, v, out, 1.0);
        }
    }
}
