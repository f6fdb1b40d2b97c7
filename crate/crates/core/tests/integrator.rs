use std::f64::consts::PI;
use std::sync::Arc;

use gneseek::bench::matrix::cournot_matrix;
use gneseek::bench::run::initial_state;
use gneseek::bench::make_zero_sum_example;
use gneseek::dynamics::{Compensators, DynamicsSpec, Family};
use gneseek::graph::GraphTopology;
use gneseek::integrator::{
    integrate, step, step_with, IntegratorConfig, Probe, Scheme, StopOn, TerminalReason,
};

fn example_one() -> DynamicsSpec {
    DynamicsSpec::new(
        Family::Gp,
        Arc::new(make_zero_sum_example()),
        GraphTopology::complete(2),
        Compensators::none(),
    )
    .unwrap()
}

/// Error at `t = π` from `(1, 0)`, where the exact flow is `(cos t, sin t)`.
fn rotation_error(scheme: Scheme, steps: usize) -> f64 {
    let spec = example_one();
    let cfg = IntegratorConfig {
        scheme,
        record_stride: steps,
        ..IntegratorConfig::new(PI / steps as f64, PI)
    };
    let traj = integrate(&spec, &[1.0, 0.0], &cfg, &[]).unwrap();
    assert_eq!(traj.steps, steps);
    let s = &traj.final_state;
    ((s[0] + 1.0).powi(2) + s[1].powi(2)).sqrt()
}

#[test]
fn euler_is_first_order_on_the_rotation() {
    let e: Vec<f64> = [500, 1000, 2000, 4000].iter().map(|&n| rotation_error(Scheme::ProjectedEuler, n)).collect();
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
    }
    // Leading term: |x| grows like exp(h t / 2), so the error is about π h / 2.
    let h = PI / 4000.0;
    assert!((e[3] / (PI * h / 2.0) - 1.0).abs() < 0.01);
}

#[test]
fn rk4_is_fourth_order_on_the_rotation() {
    let a = rotation_error(Scheme::ProjectedRk4, 50);
    let b = rotation_error(Scheme::ProjectedRk4, 100);
    assert!((a / b - 16.0).abs() < 1.0, "ratio {}", a / b);
}

#[test]
fn recorded_states_stay_admissible() {
    for mut cfg in cournot_matrix() {
        cfg.integrator.horizon = 5.0;
        cfg.integrator.record_stride = 1;
        let spec = cfg.build_spec().unwrap();
        let s0 = initial_state(&spec, &cfg).unwrap();
        let traj = integrate(&spec, &s0, &cfg.integrator, &[]).unwrap();
        let bounds = spec.layout().bounds();
        for s in &traj.states {
            for (v, b) in s.iter().zip(bounds) {
                if b.is_projected() {
                    assert!(*v >= -1e-12, "{}: {v}", cfg.name);
                }
            }
        }
    }
}

#[test]
fn identical_inputs_give_identical_trajectories() {
    let cfg = &cournot_matrix()[1];
    let spec = cfg.build_spec().unwrap();
    let s0 = initial_state(&spec, cfg).unwrap();
    let mut ic = cfg.integrator.clone();
    ic.horizon = 3.0;
    let probe = || vec![Probe::new("norm", |_, _, s: &[f64]| s.iter().map(|v| v * v).sum::<f64>())];
    let a = integrate(&spec, &s0, &ic, &probe()).unwrap();
    let b = integrate(&spec, &s0, &ic, &probe()).unwrap();
    let bits = |t: &gneseek::integrator::Trajectory| -> Vec<u64> {
        t.states.iter().flatten().chain(t.probes[0].values.iter()).map(|v| v.to_bits()).collect()
    };
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(a.times, b.times);
}

#[test]
fn residual_stop_and_recording() {
    let cfg = &cournot_matrix()[0];
    let spec = cfg.build_spec().unwrap();
    let s0 = initial_state(&spec, cfg).unwrap();
    let ic = IntegratorConfig {
        record_stride: 100,
        stop_on: Some(StopOn::residual(1e-3)),
        ..IntegratorConfig::new(1e-3, 300.0)
    };
    let traj = integrate(&spec, &s0, &ic, &[]).unwrap();
    assert_eq!(traj.terminal_reason, TerminalReason::Residual);
    assert!(traj.final_time < 300.0);
    assert_eq!(traj.times.len(), traj.states.len());
    assert!(traj.times.windows(2).all(|w| (w[1] - w[0] - 0.1).abs() < 1e-9));
}

#[test]
fn single_steps_match_their_schemes() {
    let spec = example_one();
    let s = [0.6, -0.8];
    let e = step(&spec, &s, 0.1).unwrap();
    assert_eq!(e, vec![0.6 + 0.1 * 0.8, -0.8 + 0.1 * 0.6]);
    let r = step_with(&spec, &s, 0.1, Scheme::ProjectedRk4).unwrap();
    // On a linear field RK4 is the degree-4 Taylor polynomial of exp(hA), A² = −I.
    let h = 0.1_f64;
    let (c4, s4) = (1.0 - h * h / 2.0 + h.powi(4) / 24.0, h - h.powi(3) / 6.0);
    let taylor = [0.6 * c4 + 0.8 * s4, -0.8 * c4 + 0.6 * s4];
    assert!((r[0] - taylor[0]).abs() < 1e-15 && (r[1] - taylor[1]).abs() < 1e-15);
    let (c, sn) = (h.cos(), h.sin());
    let exact = [0.6 * c + 0.8 * sn, -0.8 * c + 0.6 * sn];
    assert!((r[0] - exact[0]).abs() < 1e-7 && (r[1] - exact[1]).abs() < 1e-7);
}

#[test]
fn invalid_inputs_are_rejected() {
    let spec = example_one();
    assert!(integrate(&spec, &[1.0], &IntegratorConfig::default(), &[]).is_err());
    assert!(integrate(&spec, &[1.0, 0.0], &IntegratorConfig::new(-1.0, 1.0), &[]).is_err());
}
