use gneseek::graph::{
    check_partial_info_condition, connectivity_and_fiedler, kron_apply, kron_lift, GraphTopology,
};
use nalgebra::DVector;
use proptest::prelude::*;

fn topologies(n: usize) -> Vec<GraphTopology> {
    vec![
        GraphTopology::complete(n),
        GraphTopology::path(n),
        GraphTopology::cycle(n),
        GraphTopology::star(n),
    ]
}

fn random_graph() -> impl Strategy<Value = GraphTopology> {
    (2usize..8).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 0.1..5.0f64), 1..12).prop_map(move |edges| {
            let edges: Vec<_> = edges.into_iter().filter(|(a, b, _)| a != b).collect();
            GraphTopology::from_edges(n, &edges).unwrap_or_else(|_| GraphTopology::path(n))
        })
    })
}

proptest! {
    #[test]
    fn laplacian_is_symmetric_with_ones_in_kernel(g in random_graph()) {
        let l = g.laplacian();
        prop_assert_eq!(&l, &l.transpose());
        let ones = DVector::from_element(g.num_nodes(), 1.0);
        // Exact for integer weights; real weights leave one rounding of the degree.
        let wmax = g.edges().iter().fold(0.0_f64, |a, e| a.max(e.2));
        let tol = 4.0 * f64::EPSILON * wmax * g.num_nodes() as f64;
        prop_assert!((&l * ones).iter().all(|&v| v.abs() <= tol));
    }

    #[test]
    fn doubling_weights_doubles_spectrum(g in random_graph()) {
        let a = g.spectrum();
        let b = g.scaled(2.0).unwrap().spectrum();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((2.0 * x - y).abs() <= 1e-10 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn lifted_laplacian_kills_consensus(g in random_graph(), v in prop::collection::vec(-10.0..10.0f64, 1..5)) {
        let d = v.len();
        let stacked: Vec<f64> = (0..g.num_nodes()).flat_map(|_| v.iter().copied()).collect();
        let dense = kron_lift(&g.laplacian(), d).unwrap() * DVector::from_vec(stacked.clone());
        let applied = kron_apply(&g.laplacian(), d, &stacked).unwrap();
        prop_assert!(dense.amax() <= 1e-12);
        prop_assert!(applied.amax() <= 1e-12);
    }
}

#[test]
fn named_topologies_are_exact() {
    for n in 2..9 {
        for g in topologies(n) {
            let l = g.laplacian();
            assert_eq!(l, l.transpose());
            assert!(l.row_iter().all(|r| r.sum() == 0.0));
            let ones = DVector::from_element(n, 1.0);
            assert!((&l * ones).iter().all(|&v| v == 0.0));
            assert!(connectivity_and_fiedler(&g).0);
        }
    }
}

#[test]
fn known_fiedler_values() {
    // Complete graph: λ₂ = n; path: 2 − 2cos(π/n).
    let n = 5;
    let (_, l2) = connectivity_and_fiedler(&GraphTopology::complete(n));
    assert!((l2 - n as f64).abs() < 1e-10);
    let (_, l2) = connectivity_and_fiedler(&GraphTopology::path(n));
    assert!((l2 - (2.0 - 2.0 * (std::f64::consts::PI / n as f64).cos())).abs() < 1e-10);
}

#[test]
fn disconnected_graph_detected() {
    let g = GraphTopology::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
    assert!(!connectivity_and_fiedler(&g).0);
    let rep = check_partial_info_condition(&g, 1.0, 1.0).unwrap();
    assert!(!rep.holds && rep.suggested_scale.is_infinite());
}

#[test]
fn suggested_scale_satisfies_condition() {
    let g = GraphTopology::cycle(5);
    let rep = check_partial_info_condition(&g, 3.0, 0.5).unwrap();
    assert!(!rep.holds);
    let scaled = g.scaled(rep.suggested_scale).unwrap();
    assert!(check_partial_info_condition(&scaled, 3.0, 0.5).unwrap().holds);
    assert!(check_partial_info_condition(&g, 3.0, 0.0).is_err());
}
