//! Versioned JSON experiment configuration.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::games::{make_cournot, make_sensor_network, make_zero_sum_example};
use crate::compensators::{self as comp, BlockData, LtiBlock};
use crate::dynamics::{Compensators, DynamicsSpec, Family};
use crate::error::{Error, Result};
use crate::game::{monotonicity_report, Game, GameData};
use crate::graph::{check_partial_info_condition, GraphTopology};
use crate::integrator::IntegratorConfig;

pub const SCHEMA: &str = "gneseek.experiment/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameSelection {
    ZeroSumExample,
    Cournot { seed: u64 },
    Sensor { seed: u64 },
    Inline { data: GameData },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSelection {
    Complete,
    Path,
    Cycle,
    Star,
    Edges { edges: Vec<(usize, usize, f64)> },
}

impl Default for GraphSelection {
    fn default() -> Self {
        GraphSelection::Complete
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    #[serde(flatten)]
    pub topology: GraphSelection,
    #[serde(default = "one")]
    pub weight_scale: f64,
    /// Rescale to satisfy the partial-information condition. Defaults to on
    /// for estimate-based families.
    #[serde(default)]
    pub auto_scale: Option<bool>,
}

fn one() -> f64 {
    1.0
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            topology: GraphSelection::Complete,
            weight_scale: 1.0,
            auto_scale: None,
        }
    }
}

/// Compensator choice for one channel; the per-agent dimension follows from
/// the family and channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockSelection {
    Integrator,
    PfcFirstOrder { a: f64 },
    /// Diagonal projected lag with equal rates on every multiplier row.
    PfcLambda { a: f64, b: f64 },
    HeavyAnchor { alpha: f64, beta: f64 },
    OfcNd,
    SecondOrder { b: f64 },
    NonPassivePfc,
    NonPassiveOfc,
    /// One block reused for every agent.
    Custom { block: BlockData },
    /// One block per agent.
    PerAgent { blocks: Vec<BlockData> },
}

impl BlockSelection {
    pub fn build(&self, dims: &[usize]) -> Result<Vec<LtiBlock>> {
        if let BlockSelection::PerAgent { blocks } = self {
            if blocks.len() != dims.len() {
                return Err(Error::InvalidInput(format!(
                    "expected {} per-agent blocks, got {}",
                    dims.len(),
                    blocks.len()
                )));
            }
            return blocks.iter().map(BlockData::build).collect();
        }
        dims.iter()
            .map(|&d| match self {
                BlockSelection::Integrator => comp::integrator(d),
                BlockSelection::PfcFirstOrder { a } => comp::pfc_first_order(*a, d),
                BlockSelection::PfcLambda { a, b } => {
                    comp::pfc_lambda_block(&vec![*a; d], &vec![*b; d]).map(|p| p.into_inner())
                }
                BlockSelection::HeavyAnchor { alpha, beta } => comp::ofc_heavy_anchor(*alpha, *beta, d),
                BlockSelection::OfcNd => comp::ofc_nd(d),
                BlockSelection::SecondOrder { b } => comp::second_order_agent_block(*b, d),
                BlockSelection::NonPassivePfc => comp::non_passive_pfc_fixture(d),
                BlockSelection::NonPassiveOfc => comp::non_passive_ofc_fixture(d),
                BlockSelection::Custom { block } => block.build(),
                BlockSelection::PerAgent { .. } => unreachable!(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompensatorConfig {
    #[serde(default)]
    pub x: Option<BlockSelection>,
    #[serde(default)]
    pub lambda: Option<BlockSelection>,
    #[serde(default)]
    pub z: Option<BlockSelection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// Lifted from an action profile with zero multipliers and auxiliaries.
    Action { x: Vec<f64> },
    /// Uniform action entries in `[-scale, scale]`, drawn from the seed.
    Random { scale: f64 },
    /// A full flat state.
    State { values: Vec<f64> },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Random { scale: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// Relative distance of the action output to the oracle point.
    Distance,
    KktResidual,
    /// Composite storage relative to the lifted oracle point.
    Storage,
    MultiplierConsensus,
    EstimateConsensus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: String,
    pub name: String,
    pub game: GameSelection,
    /// Adds `eps·x` to the pseudo-gradient.
    #[serde(default)]
    pub regularization: f64,
    #[serde(default)]
    pub graph: GraphConfig,
    pub family: Family,
    #[serde(default)]
    pub compensators: CompensatorConfig,
    #[serde(default)]
    pub boxes: Option<Vec<(f64, f64)>>,
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub initial: InitialCondition,
    #[serde(default)]
    pub probes: Vec<ProbeKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.check_schema()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn check_schema(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::InvalidInput(format!(
                "unsupported schema `{}` (expected `{SCHEMA}`)",
                self.schema
            )));
        }
        Ok(())
    }

    /// A config with defaults for everything but the essentials.
    pub fn new(name: &str, game: GameSelection, family: Family, integrator: IntegratorConfig) -> Self {
        Self {
            schema: SCHEMA.into(),
            name: name.into(),
            game,
            regularization: 0.0,
            graph: GraphConfig::default(),
            family,
            compensators: CompensatorConfig::default(),
            boxes: None,
            integrator,
            initial: InitialCondition::default(),
            probes: vec![ProbeKind::Distance, ProbeKind::KktResidual],
            seed: 0,
            output_dir: None,
        }
    }

    pub fn build_game(&self) -> Result<Game> {
        let game = match &self.game {
            GameSelection::ZeroSumExample => make_zero_sum_example(),
            GameSelection::Cournot { seed } => make_cournot(*seed)?.0,
            GameSelection::Sensor { seed } => make_sensor_network(*seed)?,
            GameSelection::Inline { data } => data.build()?,
        };
        if self.regularization != 0.0 {
            game.with_regularization(self.regularization)
        } else {
            Ok(game)
        }
    }

    pub fn build_graph(&self, game: &Game) -> Result<GraphTopology> {
        let players = game.num_players();
        let base = match &self.graph.topology {
            GraphSelection::Complete => GraphTopology::complete(players),
            GraphSelection::Path => GraphTopology::path(players),
            GraphSelection::Cycle => GraphTopology::cycle(players),
            GraphSelection::Star => GraphTopology::star(players),
            GraphSelection::Edges { edges } => GraphTopology::from_edges(players, edges)?,
        };
        let mut graph = base.scaled(self.graph.weight_scale)?;
        let auto = self.graph.auto_scale.unwrap_or(self.family.is_partial());
        if auto {
            let rep = monotonicity_report(game, 1000, self.seed);
            let cond = check_partial_info_condition(&graph, rep.theta_estimate, rep.mu_estimate)?;
            if !cond.holds {
                if !cond.suggested_scale.is_finite() {
                    return Err(Error::InvalidInput("graph is disconnected".into()));
                }
                log::info!("graph weights scaled by {:.4} for the estimate coupling", cond.suggested_scale);
                graph = graph.scaled(cond.suggested_scale)?;
            }
        }
        Ok(graph)
    }

    /// Per-agent channel dimensions `(x, λ/z)`.
    fn channel_dims(&self, game: &Game) -> (Vec<usize>, Vec<usize>) {
        let players = game.num_players();
        let x = match self.family {
            Family::PartialGp | Family::PartialPfc | Family::PartialOfc => vec![game.n(); players],
            _ => game.action_dims().to_vec(),
        };
        (x, vec![game.m(); players])
    }

    pub fn build_compensators(&self, game: &Game) -> Result<Compensators> {
        let (xd, md) = self.channel_dims(game);
        let c = &self.compensators;
        let build = |sel: &Option<BlockSelection>, dims: &[usize]| -> Result<Option<Vec<LtiBlock>>> {
            match sel {
                None => Ok(None),
                Some(_) if dims.iter().all(|&d| d == 0) => Ok(None),
                Some(s) => s.build(dims).map(Some),
            }
        };
        Ok(Compensators {
            x: build(&c.x, &xd)?,
            lambda: build(&c.lambda, &md)?,
            z: build(&c.z, &md)?,
        })
    }

    /// Builds the dynamics without running the compensator gate.
    pub fn build_spec_unchecked(&self) -> Result<DynamicsSpec> {
        let game = self.build_game()?;
        let graph = self.build_graph(&game)?;
        let comps = self.build_compensators(&game)?;
        let mut b = DynamicsSpec::builder(self.family, Arc::new(game), graph).compensators(comps);
        if let Some(boxes) = &self.boxes {
            b = b.boxes(boxes.clone());
        }
        b.build_unchecked()
    }

    /// Builds the dynamics and runs the compensator gate.
    pub fn build_spec(&self) -> Result<DynamicsSpec> {
        let spec = self.build_spec_unchecked()?;
        spec.verify_compensators()?;
        Ok(spec)
    }
}
