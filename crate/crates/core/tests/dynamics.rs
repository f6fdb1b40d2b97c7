use std::sync::Arc;

use gneseek::bench::{make_cournot, make_sensor_network, make_zero_sum_example};
use gneseek::compensators::{
    integrator, ofc_heavy_anchor, pfc_first_order, second_order_agent_block, LtiBlock,
};
use gneseek::dynamics::{
    gp_field, lift_others, lift_own, lift_point, ofc_field, partial_gp_field, pfc_field,
    select_others, select_own, Compensators, DynamicsSpec, Family,
};
use gneseek::game::Game;
use gneseek::graph::GraphTopology;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cournot() -> Arc<Game> {
    Arc::new(make_cournot(42).unwrap().0)
}

fn blocks(game: &Game, dims: &[usize], f: impl Fn(usize) -> LtiBlock) -> Option<Vec<LtiBlock>> {
    let _ = game;
    Some(dims.iter().map(|&d| f(d)).collect())
}

fn spec(family: Family, game: &Arc<Game>, comps: Compensators) -> DynamicsSpec {
    DynamicsSpec::builder(family, game.clone(), GraphTopology::complete(game.num_players()))
        .compensators(comps)
        .build_unchecked()
        .unwrap()
}

fn random_triple(game: &Game, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let nm = game.num_players() * game.m();
    let x = (0..game.n()).map(|_| rng.gen_range(-5.0..5.0)).collect();
    // Roughly a third of the multipliers sit on the boundary.
    let lam = (0..nm)
        .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..3.0) })
        .collect();
    let z = (0..nm).map(|_| rng.gen_range(-2.0..2.0)).collect();
    (x, lam, z)
}

fn gp_state(gp: &DynamicsSpec, x: &[f64], lam: &[f64], z: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; gp.dim()];
    s[gp.layout().range("x")].copy_from_slice(x);
    s[gp.layout().range("lam")].copy_from_slice(lam);
    s[gp.layout().range("z")].copy_from_slice(z);
    s
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (p, q) in a.iter().zip(b) {
        assert!((p - q).abs() <= tol, "{p} vs {q}");
    }
}

#[test]
fn zero_gain_parallel_blocks_reproduce_gp() {
    let game = cournot();
    let gp = spec(Family::Gp, &game, Compensators::none());
    let zero_static = |d: usize| {
        LtiBlock::new(DMatrix::zeros(0, 0), DMatrix::zeros(0, d), DMatrix::zeros(d, 0), DMatrix::zeros(d, d)).unwrap()
    };
    let comps = Compensators {
        x: blocks(&game, game.action_dims(), zero_static),
        lambda: None,
        z: blocks(&game, &vec![game.m(); game.num_players()], zero_static),
    };
    let pfc = spec(Family::Pfc, &game, comps);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let (x, lam, z) = random_triple(&game, &mut rng);
        let g = gp_field(&gp, &gp_state(&gp, &x, &lam, &z)).unwrap();
        let mut s = vec![0.0; pfc.dim()];
        s[pfc.layout().range("rho_x")].copy_from_slice(&x);
        s[pfc.layout().range("lam")].copy_from_slice(&lam);
        s[pfc.layout().range("rho_z")].copy_from_slice(&z);
        let f = pfc_field(&pfc, &s).unwrap();
        assert_close(&f[pfc.layout().range("rho_x")], &g[gp.layout().range("x")], 1e-12);
        assert_close(&f[pfc.layout().range("lam")], &g[gp.layout().range("lam")], 1e-12);
        assert_close(&f[pfc.layout().range("rho_z")], &g[gp.layout().range("z")], 1e-12);
    }
}

#[test]
fn silent_feedback_reproduces_gp() {
    // The heavy anchor outputs w = β(y − ξ), so ξ = y silences the loop.
    let game = cournot();
    let gp = spec(Family::Gp, &game, Compensators::none());
    let anchor = |d: usize| ofc_heavy_anchor(1.0, 2.0, d).unwrap();
    let mdims = vec![game.m(); game.num_players()];
    let comps = Compensators {
        x: blocks(&game, game.action_dims(), anchor),
        lambda: blocks(&game, &mdims, anchor),
        z: blocks(&game, &mdims, anchor),
    };
    let ofc = spec(Family::Ofc, &game, comps);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let (x, lam, z) = random_triple(&game, &mut rng);
        let g = gp_field(&gp, &gp_state(&gp, &x, &lam, &z)).unwrap();
        let mut s = vec![0.0; ofc.dim()];
        for (name, xi, v) in [("x", "xi_x", &x), ("lam", "xi_lam", &lam), ("z", "xi_z", &z)] {
            s[ofc.layout().range(name)].copy_from_slice(v);
            s[ofc.layout().range(xi)].copy_from_slice(v);
        }
        let f = ofc_field(&ofc, &s).unwrap();
        for name in ["x", "lam", "z"] {
            assert_close(&f[ofc.layout().range(name)], &g[gp.layout().range(name)], 1e-12);
        }
    }
}

#[test]
fn integrator_replacement_reproduces_gp() {
    for game in [cournot(), Arc::new(make_sensor_network(7).unwrap())] {
        let gp = spec(Family::Gp, &game, Compensators::none());
        let integ = |d: usize| integrator(d).unwrap();
        let mdims = vec![game.m(); game.num_players()];
        let comps = Compensators {
            x: blocks(&game, game.action_dims(), integ),
            lambda: blocks(&game, &mdims, integ),
            z: blocks(&game, &mdims, integ),
        };
        let gen = spec(Family::Generalized, &game, comps);
        gen.verify_compensators().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (x, lam, z) = random_triple(&game, &mut rng);
            let g = gp_field(&gp, &gp_state(&gp, &x, &lam, &z)).unwrap();
            let mut s = vec![0.0; gen.dim()];
            s[gen.layout().range("theta_x")].copy_from_slice(&x);
            s[gen.layout().range("theta_lam")].copy_from_slice(&lam);
            s[gen.layout().range("theta_z")].copy_from_slice(&z);
            let f = gen.field(&s).unwrap();
            for (a, b) in [("theta_x", "x"), ("theta_lam", "lam"), ("theta_z", "z")] {
                assert_close(&f[gen.layout().range(a)], &g[gp.layout().range(b)], 1e-12);
            }
        }
    }
}

proptest! {
    #[test]
    fn example_one_flow_is_norm_preserving(x0 in -1e3..1e3f64, x1 in -1e3..1e3f64) {
        let game = Arc::new(make_zero_sum_example());
        let gp = spec(Family::Gp, &game, Compensators::none());
        let f = gp_field(&gp, &[x0, x1]).unwrap();
        prop_assert_eq!(x0 * f[0] + x1 * f[1], 0.0);
    }

    #[test]
    fn boundary_multipliers_never_decrease(seed in 0u64..10_000) {
        let game = cournot();
        let gp = spec(Family::Gp, &game, Compensators::none());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, lam, z) = random_triple(&game, &mut rng);
        let s = gp_state(&gp, &x, &lam, &z);
        let pre = gp.pre_field(&s).unwrap();
        let f = gp.field(&s).unwrap();
        for k in gp.layout().range("lam") {
            if s[k] == 0.0 {
                prop_assert!(f[k] >= 0.0);
                if pre[k] < 0.0 {
                    prop_assert_eq!(f[k], 0.0);
                }
            } else {
                prop_assert_eq!(f[k], pre[k]);
            }
        }
    }

    #[test]
    fn selectors_partition_the_estimates(v in prop::collection::vec(-10.0..10.0f64, 1..60)) {
        let game = cournot();
        let len = game.num_players() * game.n();
        let est: Vec<f64> = (0..len).map(|k| v[k % v.len()] + k as f64).collect();
        let own = select_own(&game, &est).unwrap();
        let others = select_others(&game, &est).unwrap();
        prop_assert_eq!(select_own(&game, &lift_own(&game, &own).unwrap()).unwrap(), own.clone());
        let a = lift_own(&game, &own).unwrap();
        let b = lift_others(&game, &others).unwrap();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        prop_assert_eq!(sum, est);
    }
}

#[test]
fn consensus_estimates_only_move_own_blocks() {
    let game = cournot();
    let scaled = GraphTopology::complete(game.num_players()).scaled(37.5).unwrap();
    let partial = DynamicsSpec::builder(Family::PartialGp, game.clone(), scaled)
        .build()
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let (x, lam, z) = random_triple(&game, &mut rng);
        let s = lift_point(&partial, &x, &lam, &z).unwrap();
        let f = partial_gp_field(&partial, &s).unwrap();
        let others = select_others(&game, &f[partial.layout().range("x_est")]).unwrap();
        let scale = x.iter().fold(1.0_f64, |a, v| a.max(v.abs())) * 37.5 * 5.0;
        assert!(others.iter().all(|v| v.abs() <= 1e-12 * scale), "{others:?}");
    }
}

#[test]
fn family_guards_and_validation() {
    let game = cournot();
    let gp = spec(Family::Gp, &game, Compensators::none());
    assert!(pfc_field(&gp, &vec![0.0; gp.dim()]).is_err());
    assert!(gp.field(&[0.0]).is_err());
    let mut s = vec![0.0; gp.dim()];
    s[gp.layout().range("lam").start] = -1.0;
    assert!(gp.field(&s).is_err());

    let comps = Compensators {
        x: blocks(&game, game.action_dims(), |d| pfc_first_order(1.0, d).unwrap()),
        ..Compensators::none()
    };
    assert!(DynamicsSpec::builder(Family::Gp, game.clone(), GraphTopology::complete(5))
        .compensators(comps)
        .build()
        .is_err());
    assert!(DynamicsSpec::builder(Family::PartialGeneralizedNocon, game.clone(), GraphTopology::complete(5))
        .build()
        .is_err());
    assert!(DynamicsSpec::builder(Family::Gp, game, GraphTopology::complete(4)).build().is_err());
}

#[test]
fn second_order_gate_passes_for_generalized() {
    let game = Arc::new(make_sensor_network(7).unwrap());
    let mdims = vec![game.m(); game.num_players()];
    let comps = Compensators {
        x: blocks(&game, game.action_dims(), |d| second_order_agent_block(1.0, d).unwrap()),
        lambda: blocks(&game, &mdims, |d| integrator(d).unwrap()),
        z: blocks(&game, &mdims, |d| integrator(d).unwrap()),
    };
    DynamicsSpec::builder(Family::Generalized, game, GraphTopology::cycle(6))
        .compensators(comps)
        .build()
        .unwrap();
}
