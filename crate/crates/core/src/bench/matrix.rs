//! The shipped experiment matrix.

use std::path::Path;

use rayon::prelude::*;

use super::config::{
    BlockSelection, CompensatorConfig, ExperimentConfig, GameSelection, InitialCondition,
    ProbeKind,
};
use super::run::{run_experiment, RunOutcome};
use crate::dynamics::Family;
use crate::error::{Error, Result};
use crate::integrator::{IntegratorConfig, StopOn};

/// Seed of the oligopoly benchmark.
pub const COURNOT_SEED: u64 = 42;
/// Seed of the sensor benchmark.
pub const SENSOR_SEED: u64 = 7;

/// Names accepted by [`matrix`].
pub const MATRIX_NAMES: &[&str] = &[
    "all", "example1", "cournot", "partial", "sensor", "nocon", "negative",
];

fn integ(h: f64, horizon: f64, stride: usize, threshold: f64) -> IntegratorConfig {
    IntegratorConfig {
        h,
        horizon,
        record_stride: stride,
        stop_on: Some(StopOn::residual(threshold)),
        ..IntegratorConfig::default()
    }
}

fn with(
    name: &str,
    game: GameSelection,
    family: Family,
    integrator: IntegratorConfig,
    comps: CompensatorConfig,
    initial: InitialCondition,
) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(name, game, family, integrator);
    c.compensators = comps;
    c.initial = initial;
    c.probes = vec![ProbeKind::Distance, ProbeKind::KktResidual, ProbeKind::Storage];
    if family.is_partial() {
        c.probes.push(ProbeKind::EstimateConsensus);
    }
    if family != Family::PartialGeneralizedNocon && !matches!(c.game, GameSelection::ZeroSumExample) {
        c.probes.push(ProbeKind::MultiplierConsensus);
    }
    c
}

fn x_only(sel: BlockSelection) -> CompensatorConfig {
    CompensatorConfig {
        x: Some(sel),
        ..Default::default()
    }
}

fn all_channels(x: BlockSelection, lambda: BlockSelection, z: BlockSelection) -> CompensatorConfig {
    CompensatorConfig {
        x: Some(x),
        lambda: Some(lambda),
        z: Some(z),
    }
}

fn heavy() -> BlockSelection {
    BlockSelection::HeavyAnchor {
        alpha: 1.0,
        beta: 1.0,
    }
}

/// The two-player zero-sum game under GP, two PFCs and two OFCs.
pub fn example1_matrix() -> Vec<ExperimentConfig> {
    let start = || InitialCondition::Action { x: vec![1.0, 0.0] };
    let game = || GameSelection::ZeroSumExample;
    vec![
        with("example1_gp", game(), Family::Gp, integ(1e-3, 20.0, 10, 1e-5), Default::default(), start()),
        with(
            "example1_pfc1",
            game(),
            Family::Pfc,
            integ(1e-3, 100.0, 10, 1e-5),
            x_only(BlockSelection::PfcFirstOrder { a: 1.0 }),
            start(),
        ),
        with(
            "example1_pfc2",
            game(),
            Family::Pfc,
            integ(1e-3, 100.0, 10, 1e-5),
            x_only(BlockSelection::PfcFirstOrder { a: 4.0 }),
            start(),
        ),
        with("example1_ofc1", game(), Family::Ofc, integ(1e-3, 100.0, 10, 1e-5), x_only(heavy()), start()),
        with(
            "example1_ofc2",
            game(),
            Family::Ofc,
            integ(1e-3, 100.0, 10, 1e-5),
            x_only(BlockSelection::OfcNd),
            start(),
        ),
    ]
}

/// The oligopoly under GP, PFC and OFC on the complete graph.
pub fn cournot_matrix() -> Vec<ExperimentConfig> {
    let game = || GameSelection::Cournot { seed: COURNOT_SEED };
    let start = || InitialCondition::Random { scale: 1.0 };
    let mut v = vec![
        with("cournot_gp", game(), Family::Gp, integ(1e-3, 300.0, 100, 1e-6), Default::default(), start()),
        with(
            "cournot_pfc",
            game(),
            Family::Pfc,
            integ(1e-3, 300.0, 100, 1e-6),
            all_channels(
                BlockSelection::PfcFirstOrder { a: 2.0 },
                BlockSelection::PfcLambda { a: 2.0, b: 1.0 },
                BlockSelection::PfcFirstOrder { a: 2.0 },
            ),
            start(),
        ),
        with(
            "cournot_ofc",
            game(),
            Family::Ofc,
            integ(1e-3, 300.0, 100, 1e-6),
            all_channels(heavy(), heavy(), heavy()),
            start(),
        ),
    ];
    for c in &mut v {
        c.seed = COURNOT_SEED;
    }
    v
}

/// Estimate-based variants on the oligopoly with an automatically scaled graph.
pub fn partial_matrix() -> Vec<ExperimentConfig> {
    let game = || GameSelection::Cournot { seed: COURNOT_SEED };
    let start = || InitialCondition::Random { scale: 1.0 };
    let mut v = vec![
        with(
            "cournot_partial_gp",
            game(),
            Family::PartialGp,
            integ(1e-3, 300.0, 100, 1e-6),
            Default::default(),
            start(),
        ),
        with(
            "cournot_partial_pfc",
            game(),
            Family::PartialPfc,
            integ(1e-3, 300.0, 100, 1e-6),
            all_channels(
                BlockSelection::PfcFirstOrder { a: 2.0 },
                BlockSelection::PfcLambda { a: 2.0, b: 1.0 },
                BlockSelection::PfcFirstOrder { a: 2.0 },
            ),
            start(),
        ),
        with(
            "cournot_partial_ofc",
            game(),
            Family::PartialOfc,
            integ(1e-3, 300.0, 100, 1e-6),
            all_channels(heavy(), heavy(), heavy()),
            start(),
        ),
    ];
    for c in &mut v {
        c.seed = COURNOT_SEED;
    }
    v
}

/// Sensors with second-order agents and integrator multiplier channels.
pub fn sensor_matrix() -> Vec<ExperimentConfig> {
    let mut c = with(
        "sensor_generalized",
        GameSelection::Sensor { seed: SENSOR_SEED },
        Family::Generalized,
        integ(1e-3, 300.0, 100, 1e-6),
        all_channels(
            BlockSelection::SecondOrder { b: 1.0 },
            BlockSelection::Integrator,
            BlockSelection::Integrator,
        ),
        InitialCondition::Random { scale: 1.0 },
    );
    c.seed = SENSOR_SEED;
    vec![c]
}

/// Estimate-based seeking without constraints on the regularized zero-sum game.
pub fn nocon_matrix() -> Vec<ExperimentConfig> {
    let mut c = with(
        "example1_partial_generalized_nocon",
        GameSelection::ZeroSumExample,
        Family::PartialGeneralizedNocon,
        integ(1e-3, 600.0, 100, 1e-6),
        x_only(BlockSelection::SecondOrder { b: 1.0 }),
        InitialCondition::Action { x: vec![1.0, 0.0] },
    );
    c.regularization = 0.1;
    vec![c]
}

/// Non-passive blocks; the compensator gate rejects both.
pub fn negative_matrix() -> Vec<ExperimentConfig> {
    let start = || InitialCondition::Action { x: vec![1.0, 0.0] };
    vec![
        with(
            "negative_pfc",
            GameSelection::ZeroSumExample,
            Family::Pfc,
            integ(1e-3, 10.0, 10, 1e-5),
            x_only(BlockSelection::NonPassivePfc),
            start(),
        ),
        with(
            "negative_ofc",
            GameSelection::ZeroSumExample,
            Family::Ofc,
            integ(1e-3, 10.0, 10, 1e-5),
            x_only(BlockSelection::NonPassiveOfc),
            start(),
        ),
    ]
}

/// Every shipped (family, benchmark) pair that should converge.
pub fn full_matrix() -> Vec<ExperimentConfig> {
    let mut v = example1_matrix();
    v.extend(cournot_matrix());
    v.extend(partial_matrix());
    v.extend(sensor_matrix());
    v.extend(nocon_matrix());
    v
}

pub fn matrix(name: &str) -> Result<Vec<ExperimentConfig>> {
    Ok(match name {
        "all" => full_matrix(),
        "example1" => example1_matrix(),
        "cournot" => cournot_matrix(),
        "partial" => partial_matrix(),
        "sensor" => sensor_matrix(),
        "nocon" => nocon_matrix(),
        "negative" => negative_matrix(),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown matrix `{other}`; expected one of {}",
                MATRIX_NAMES.join(", ")
            )))
        }
    })
}

/// Runs configs in parallel, one directory per experiment.
pub fn run_batch(configs: &[ExperimentConfig], root: Option<&Path>) -> Vec<(String, Result<RunOutcome>)> {
    configs
        .par_iter()
        .map(|c| (c.name.clone(), run_experiment(c, root)))
        .collect()
}
