use gneseek::bench::matrix::{cournot_matrix, example1_matrix, negative_matrix, partial_matrix};
use gneseek::bench::run::{initial_state, reference_point};
use gneseek::bench::{make_cournot, make_sensor_network, ExperimentConfig};
use gneseek::diagnostics::{
    consensus_errors, dissipation_check, kkt_residual, pairwise_disagreement, state_residual,
    storage_value,
};
use gneseek::dynamics::lift_equilibrium;
use gneseek::game::{solve_gne_newton, solve_gne_oracle, Game, KktPoint};
use gneseek::graph::GraphTopology;
use gneseek::integrator::{integrate, IntegratorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perturbation_test(game: &Game, graph: &GraphTopology, k: &KktPoint, seed: u64) {
    let base = kkt_residual(game, graph, &k.x_star, &k.lambda_star, &k.z_star).unwrap();
    assert!(base.total < 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let mag = 10f64.powf(rng.gen_range(-3.0..0.0));
        let mut x = k.x_star.clone();
        let mut lam = k.lambda_star.clone();
        for v in x.iter_mut() {
            *v += mag * rng.gen_range(-1.0..1.0);
        }
        for v in lam.iter_mut() {
            *v = (*v + mag * rng.gen_range(-1.0..1.0)).max(0.0);
        }
        let dx = x.iter().zip(&k.x_star).fold(0.0_f64, |a, (p, q)| a.max((p - q).abs()));
        let dl = lam.iter().zip(&k.lambda_star).fold(0.0_f64, |a, (p, q)| a.max((p - q).abs()));
        if dx.max(dl) < 1e-3 {
            continue;
        }
        let r = kkt_residual(game, graph, &x, &lam, &k.z_star).unwrap();
        assert!(r.total >= 1e-6, "perturbation {} gave residual {}", dx.max(dl), r.total);
    }
}

#[test]
fn residual_vanishes_only_at_the_oracle() {
    let (cg, _) = make_cournot(42).unwrap();
    let g5 = GraphTopology::complete(5);
    perturbation_test(&cg, &g5, &solve_gne_oracle(&cg, &g5).unwrap(), 1);
    let sg = make_sensor_network(7).unwrap();
    let g6 = GraphTopology::cycle(6);
    perturbation_test(&sg, &g6, &solve_gne_newton(&sg, &g6).unwrap(), 2);
    let zs = gneseek::bench::make_zero_sum_example();
    let g2 = GraphTopology::complete(2);
    perturbation_test(&zs, &g2, &solve_gne_oracle(&zs, &g2).unwrap(), 3);
}

fn definite_configs() -> Vec<ExperimentConfig> {
    let mut v: Vec<_> = example1_matrix();
    v.extend(cournot_matrix());
    v.extend(partial_matrix());
    v
}

#[test]
fn storage_is_zero_at_reference_and_positive_elsewhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for cfg in definite_configs() {
        let spec = cfg.build_spec().unwrap();
        let k = reference_point(&spec).unwrap();
        let r = lift_equilibrium(&spec, &k).unwrap();
        assert_eq!(storage_value(&spec, &r, &r).unwrap(), 0.0);
        for _ in 0..50 {
            let s: Vec<f64> = r
                .iter()
                .zip(spec.layout().bounds())
                .map(|(v, b)| b.clamp(v + rng.gen_range(-1.0..1.0)))
                .collect();
            assert!(storage_value(&spec, &s, &r).unwrap() > 0.0, "{}", cfg.name);
        }
    }
}

#[test]
fn equilibrium_state_has_zero_state_residual_and_consensus() {
    for cfg in partial_matrix() {
        let spec = cfg.build_spec().unwrap();
        let k = reference_point(&spec).unwrap();
        let s = lift_equilibrium(&spec, &k).unwrap();
        assert!(state_residual(&spec, &s).unwrap() < 1e-8);
        let c = consensus_errors(&spec, &s).unwrap();
        assert!(c.multiplier < 1e-12);
        assert_eq!(c.estimate, Some(0.0));
    }
}

#[test]
fn disagreement_is_the_largest_pairwise_gap() {
    assert_eq!(pairwise_disagreement(&[1.0, 2.0, 1.0, 2.0, 4.0, 0.0], 3).unwrap(), 3.0);
    assert_eq!(pairwise_disagreement(&[5.0, 5.0], 2).unwrap(), 0.0);
    assert!(pairwise_disagreement(&[1.0, 2.0, 3.0], 2).is_err());
}

#[test]
fn dissipation_separates_passive_from_active() {
    let short = |cfg: &ExperimentConfig, gate: bool| {
        let spec = if gate { cfg.build_spec().unwrap() } else { cfg.build_spec_unchecked().unwrap() };
        let r = lift_equilibrium(&spec, &reference_point(&spec).unwrap()).unwrap();
        let s0 = initial_state(&spec, cfg).unwrap();
        let ic = IntegratorConfig {
            record_stride: 10,
            ..IntegratorConfig::new(1e-3, 10.0)
        };
        let traj = integrate(&spec, &s0, &ic, &[]).unwrap();
        dissipation_check(&spec, &traj, &r).unwrap()
    };
    for cfg in example1_matrix().iter().skip(1) {
        let d = short(cfg, true);
        assert!(d.passes && d.final_storage < d.initial_storage, "{}: {d:?}", cfg.name);
    }
    for cfg in negative_matrix() {
        assert!(!short(&cfg, false).passes, "{}", cfg.name);
    }
}
