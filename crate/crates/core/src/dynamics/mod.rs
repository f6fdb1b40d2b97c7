//! Vector fields of the gradient-play family over a flat state vector.
//!
//! Every family is expressed through three channels (action, multiplier,
//! consensus auxiliary). Each channel is either a plain integrator or one of
//! three compensated forms:
//!
//! * parallel: `ρ̇ = v`, `τ̇ = Aτ + Bv`, output `ρ + Cτ (+ Dv)`;
//! * feedback: `ẏ = v − w`, `ξ̇ = Aξ + By`, `w = Cξ + Dy`;
//! * replacement: `ϑ̇ = Aϑ + Bv`, output `Cϑ`.
//!
//! Multiplier channels run under the nonnegativity projection; their
//! parallel and replacement outputs are clipped with `max(0, ·)`.

mod bank;
mod engine;
mod layout;
mod lift;

use std::ops::Range;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::compensators::{
    check_output_strict_passivity, check_positive_real, check_zero_dc_gain,
    solve_regulator_equations, FrequencyGrid, LtiBlock, ProjectedLtiBlock,
};
use crate::cones::Bound;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::graph::GraphTopology;
use crate::linalg;

use bank::Bank;

pub use engine::{
    gp_field, lift_own, ofc_field, ofc_local_set_field, partial_generalized_nocon_field,
    partial_gp_field, pfc_field, generalized_field, select_others, select_own, lift_others,
    Outputs, FEEDTHROUGH_MAX_ITERS,
};
pub use layout::{Segment, StateLayout};
pub use lift::{lift_equilibrium, lift_point, storage_value};

/// Projected components may sit this far below zero before a state is
/// rejected.
pub const ADMISSIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gp,
    Pfc,
    Ofc,
    Generalized,
    PartialGp,
    PartialPfc,
    PartialOfc,
    PartialGeneralizedNocon,
    OfcLocalSet,
}

impl Family {
    pub fn is_partial(self) -> bool {
        matches!(
            self,
            Family::PartialGp
                | Family::PartialPfc
                | Family::PartialOfc
                | Family::PartialGeneralizedNocon
        )
    }

    fn mode(self) -> Mode {
        match self {
            Family::Gp | Family::PartialGp => Mode::Integrator,
            Family::Pfc | Family::PartialPfc => Mode::Parallel,
            Family::Ofc | Family::PartialOfc | Family::OfcLocalSet => Mode::Feedback,
            Family::Generalized | Family::PartialGeneralizedNocon => Mode::Replacement,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Gp => "gp",
            Family::Pfc => "pfc",
            Family::Ofc => "ofc",
            Family::Generalized => "generalized",
            Family::PartialGp => "partial_gp",
            Family::PartialPfc => "partial_pfc",
            Family::PartialOfc => "partial_ofc",
            Family::PartialGeneralizedNocon => "partial_generalized_nocon",
            Family::OfcLocalSet => "ofc_local_set",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Integrator,
    Parallel,
    Feedback,
    Replacement,
}

/// Per-agent compensator blocks for each channel; `None` keeps the plain
/// integrator.
#[derive(Debug, Clone, Default)]
pub struct Compensators {
    pub x: Option<Vec<LtiBlock>>,
    pub lambda: Option<Vec<LtiBlock>>,
    pub z: Option<Vec<LtiBlock>>,
}

impl Compensators {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_none() && self.lambda.is_none() && self.z.is_none()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Channel {
    pub mode: Mode,
    pub bank: Option<Bank>,
    /// Integrator variable, `ρ`, or `ϑ`.
    pub main: Range<usize>,
    /// `τ` or `ξ`.
    pub aux: Range<usize>,
    /// Dimension of the channel signal (action profile, stacked multipliers...).
    pub dim: usize,
}

/// A dynamics family bound to a game, a graph and its compensators.
#[derive(Debug, Clone)]
pub struct DynamicsSpec {
    family: Family,
    game: Arc<Game>,
    graph: GraphTopology,
    laplacian: DMatrix<f64>,
    compensators: Compensators,
    boxes: Option<Vec<(f64, f64)>>,
    layout: StateLayout,
    pub(crate) x: Channel,
    pub(crate) lam: Channel,
    pub(crate) z: Channel,
    /// `𝐱_s` segment of the constraint-free partial family.
    pub(crate) xs: Range<usize>,
}

/// Builder for [`DynamicsSpec`].
pub struct DynamicsSpecBuilder {
    family: Family,
    game: Arc<Game>,
    graph: GraphTopology,
    compensators: Compensators,
    boxes: Option<Vec<(f64, f64)>>,
}

impl DynamicsSpecBuilder {
    pub fn compensators(mut self, c: Compensators) -> Self {
        self.compensators = c;
        self
    }

    /// Per-component bounds `[lo, hi]` of the action profile (local-set family).
    pub fn boxes(mut self, b: Vec<(f64, f64)>) -> Self {
        self.boxes = Some(b);
        self
    }

    /// Builds after running the family's compensator checks.
    pub fn build(self) -> Result<DynamicsSpec> {
        let spec = self.build_unchecked()?;
        spec.verify_compensators()?;
        Ok(spec)
    }

    /// Builds without the compensator checks (negative fixtures, experiments).
    pub fn build_unchecked(self) -> Result<DynamicsSpec> {
        DynamicsSpec::assemble(self.family, self.game, self.graph, self.compensators, self.boxes)
    }
}

impl DynamicsSpec {
    pub fn builder(family: Family, game: Arc<Game>, graph: GraphTopology) -> DynamicsSpecBuilder {
        DynamicsSpecBuilder {
            family,
            game,
            graph,
            compensators: Compensators::none(),
            boxes: None,
        }
    }

    /// Shorthand for a checked spec.
    pub fn new(
        family: Family,
        game: Arc<Game>,
        graph: GraphTopology,
        compensators: Compensators,
    ) -> Result<Self> {
        Self::builder(family, game, graph)
            .compensators(compensators)
            .build()
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn game(&self) -> &Game {
        &self.game
    }
    pub fn game_arc(&self) -> &Arc<Game> {
        &self.game
    }
    pub fn graph(&self) -> &GraphTopology {
        &self.graph
    }
    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }
    pub fn compensators(&self) -> &Compensators {
        &self.compensators
    }
    pub fn boxes(&self) -> Option<&[(f64, f64)]> {
        self.boxes.as_deref()
    }
    pub fn layout(&self) -> &StateLayout {
        &self.layout
    }
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn assemble(
        family: Family,
        game: Arc<Game>,
        graph: GraphTopology,
        compensators: Compensators,
        boxes: Option<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        let players = game.num_players();
        let (n, m) = (game.n(), game.m());
        if graph.num_nodes() != players {
            return Err(Error::DimensionMismatch {
                what: "graph nodes",
                expected: players,
                got: graph.num_nodes(),
            });
        }
        let mode = family.mode();
        if mode == Mode::Integrator && !compensators.is_empty() {
            return Err(Error::InvalidInput(format!(
                "family {} takes no compensators",
                family.name()
            )));
        }
        if matches!(family, Family::OfcLocalSet | Family::PartialGeneralizedNocon) {
            if m > 0 {
                return Err(Error::UnsupportedFamily(format!(
                    "{} requires a game without coupled constraints",
                    family.name()
                )));
            }
            if compensators.lambda.is_some() || compensators.z.is_some() {
                return Err(Error::InvalidInput(format!(
                    "{} only takes action-channel blocks",
                    family.name()
                )));
            }
        }
        match (&boxes, family) {
            (None, Family::OfcLocalSet) => {
                return Err(Error::InvalidInput("the local-set family needs boxes".into()))
            }
            (Some(_), f) if f != Family::OfcLocalSet => {
                return Err(Error::InvalidInput("boxes only apply to the local-set family".into()))
            }
            (Some(b), _) => {
                crate::error::check_len("boxes", n, b.len())?;
                if b.iter().any(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
                    return Err(Error::InvalidInput("every box needs finite lo <= hi".into()));
                }
            }
            _ => {}
        }

        // Per-agent signal dimensions of each channel.
        let x_dims: Vec<usize> = match family {
            Family::PartialGp | Family::PartialPfc | Family::PartialOfc => vec![n; players],
            _ => game.action_dims().to_vec(),
        };
        let mult_dims = vec![m; players];
        let check_bank = |blocks: &Option<Vec<LtiBlock>>, dims: &[usize], what: &str| -> Result<Option<Bank>> {
            match blocks {
                None => Ok(None),
                Some(v) => {
                    if v.len() != dims.len() {
                        return Err(Error::InvalidInput(format!(
                            "{what}: expected one block per agent ({}), got {}",
                            dims.len(),
                            v.len()
                        )));
                    }
                    for (i, (b, &d)) in v.iter().zip(dims).enumerate() {
                        if b.io_dim() != d {
                            return Err(Error::InvalidInput(format!(
                                "{what}: block of agent {i} has dimension {}, expected {d}",
                                b.io_dim()
                            )));
                        }
                    }
                    Ok(Some(Bank::new(v.clone())))
                }
            }
        };
        let mut xbank = check_bank(&compensators.x, &x_dims, "action blocks")?;
        let lbank = if m == 0 { None } else { check_bank(&compensators.lambda, &mult_dims, "multiplier blocks")? };
        let zbank = if m == 0 { None } else { check_bank(&compensators.z, &mult_dims, "auxiliary blocks")? };
        if family == Family::PartialGeneralizedNocon && xbank.is_none() {
            let blocks = game
                .action_dims()
                .iter()
                .map(|&d| crate::compensators::integrator(d))
                .collect::<Result<Vec<_>>>()?;
            xbank = Some(Bank::new(blocks));
        }
        for bank in [&xbank, &lbank, &zbank].into_iter().flatten() {
            if mode == Mode::Replacement && bank.has_feedthrough() {
                return Err(Error::InvalidInput(
                    "replacement blocks cannot have feedthrough".into(),
                ));
            }
            if matches!(mode, Mode::Feedback | Mode::Replacement)
                && bank.blocks().iter().any(|b| b.state_dim() == 0)
            {
                return Err(Error::InvalidInput("compensator blocks need a state".into()));
            }
        }
        if mode == Mode::Parallel {
            if let Some(b) = &lbank {
                if b.has_feedthrough() || b.blocks().iter().any(|b| b.state_dim() == 0) {
                    return Err(Error::InvalidInput(
                        "projected multiplier blocks need a state and no feedthrough".into(),
                    ));
                }
            }
        }

        let mut lb = StateLayout::builder();
        let partial = family.is_partial();
        let x_signal = if partial && family != Family::PartialGeneralizedNocon { players * n } else { n };
        let x_name = if partial { "x_est" } else { "x" };
        let x_bounds: Vec<Bound> = match &boxes {
            Some(b) => b.iter().map(|&(lo, hi)| Bound::Interval { lo, hi }).collect(),
            None => vec![Bound::Free; x_signal],
        };
        let channel = |lb: &mut layout::LayoutBuilder,
                       bank: Option<Bank>,
                       names: [&str; 4],
                       dim: usize,
                       bounds: Vec<Bound>,
                       projected: bool|
         -> Channel {
            let aux_bound = if projected { Bound::NonNegative } else { Bound::Free };
            let eff = if bank.is_none() { Mode::Integrator } else { mode };
            let (main, aux) = match eff {
                Mode::Integrator => (lb.push_with(names[0], bounds), 0..0),
                Mode::Parallel => {
                    let main = lb.push_with(names[1], bounds);
                    let st = bank.as_ref().unwrap().state_dim();
                    (main, lb.push(&names[1].replace("rho", "tau"), st, aux_bound))
                }
                Mode::Feedback => {
                    let main = lb.push_with(names[0], bounds);
                    let st = bank.as_ref().unwrap().state_dim();
                    (main, lb.push(names[2], st, Bound::Free))
                }
                Mode::Replacement => {
                    let st = bank.as_ref().unwrap().state_dim();
                    (lb.push(names[3], st, aux_bound), 0..0)
                }
            };
            Channel {
                mode: eff,
                bank,
                main,
                aux,
                dim,
            }
        };
        let (xs, x) = if family == Family::PartialGeneralizedNocon {
            let x = channel(&mut lb, xbank, ["x", "rho_x", "xi_x", "theta_r"], n, vec![Bound::Free; n], false);
            let xs = lb.push("x_s", players * n - n, Bound::Free);
            (xs, x)
        } else {
            let x = channel(
                &mut lb,
                xbank,
                [x_name, "rho_x", "xi_x", "theta_x"],
                x_signal,
                x_bounds,
                false,
            );
            (0..0, x)
        };
        let lam_projected = matches!(mode, Mode::Parallel | Mode::Replacement);
        let lam = channel(
            &mut lb,
            lbank,
            ["lam", "rho_lam", "xi_lam", "theta_lam"],
            players * m,
            vec![Bound::NonNegative; players * m],
            lam_projected,
        );
        let z = channel(
            &mut lb,
            zbank,
            ["z", "rho_z", "xi_z", "theta_z"],
            players * m,
            vec![Bound::Free; players * m],
            false,
        );
        let layout = lb.finish();
        Ok(Self {
            family,
            laplacian: graph.laplacian(),
            game,
            graph,
            compensators,
            boxes,
            layout,
            x,
            lam,
            z,
            xs,
        })
    }

    /// The family gate: every block must pass the checks its family relies on.
    pub fn verify_compensators(&self) -> Result<()> {
        let grid = FrequencyGrid::default();
        let fail = |check: &str, detail: String| Error::CompensatorCheck {
            check: check.to_string(),
            detail,
        };
        let channels = [
            ("action", &self.x, false),
            ("multiplier", &self.lam, true),
            ("auxiliary", &self.z, false),
        ];
        for (name, ch, is_lambda) in channels {
            let Some(bank) = &ch.bank else { continue };
            for (i, blk) in bank.blocks().iter().enumerate() {
                let tag = format!("{name} block of agent {i}");
                match self.family.mode() {
                    Mode::Integrator => {}
                    Mode::Parallel if is_lambda => {
                        let proj = ProjectedLtiBlock::new(blk.clone())
                            .map_err(|e| fail("projected_structure", format!("{tag}: {e}")))?;
                        if linalg::max_sym_eigenvalue(proj.inner().a()) >= -1e-12 {
                            return Err(fail(
                                "strict_passivity",
                                format!("{tag}: A must be negative definite"),
                            ));
                        }
                    }
                    Mode::Parallel => {
                        let dd = blk.d() + blk.d().transpose();
                        if blk.state_dim() == 0 {
                            if linalg::min_sym_eigenvalue(&dd) <= 1e-9 {
                                return Err(fail(
                                    "strict_passivity",
                                    format!("{tag}: static gain needs D + Dᵀ positive definite"),
                                ));
                            }
                            continue;
                        }
                        if linalg::min_sym_eigenvalue(&dd) < -1e-12 {
                            return Err(fail(
                                "feedthrough",
                                format!("{tag}: D + Dᵀ must be positive semidefinite"),
                            ));
                        }
                        let r = check_positive_real(blk, &grid);
                        if !r.spr {
                            return Err(fail(
                                "strictly_positive_real",
                                format!("{tag}: min eigenvalue over grid {:.3e}", r.min_eig_over_grid),
                            ));
                        }
                    }
                    Mode::Feedback => {
                        let r = check_output_strict_passivity(blk, &grid);
                        if !r.holds {
                            return Err(fail(
                                "output_strict_passivity",
                                format!("{tag}: delta = {:.3e}", r.delta),
                            ));
                        }
                        match check_zero_dc_gain(blk) {
                            Ok(true) => {}
                            Ok(false) => {
                                return Err(fail("zero_dc_gain", format!("{tag}: H(0) != 0")))
                            }
                            Err(e) => return Err(fail("zero_dc_gain", format!("{tag}: {e}"))),
                        }
                    }
                    Mode::Replacement => {
                        if is_lambda {
                            ProjectedLtiBlock::new(blk.clone())
                                .map_err(|e| fail("projected_structure", format!("{tag}: {e}")))?;
                        } else {
                            let r = check_positive_real(blk, &grid);
                            if !r.pr {
                                return Err(fail(
                                    "positive_real",
                                    format!(
                                        "{tag}: min eigenvalue over grid {:.3e}",
                                        r.min_eig_over_grid
                                    ),
                                ));
                            }
                        }
                        solve_regulator_equations(blk, is_lambda)
                            .map_err(|e| fail("regulator", format!("{tag}: {e}")))?;
                    }
                }
            }
        }
        Ok(())
    }
}
