use gneseek::cones::{
    complementarity_residual, complementarity_residual_l2, differentiated_projection,
    tangent_normal_split, Bound, OrthantPoint,
};
use proptest::prelude::*;

fn orthant_point(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 1e-9..100.0f64], len)
}

fn point_and_velocity() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..10).prop_flat_map(|n| (orthant_point(n), prop::collection::vec(-100.0..100.0f64, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn interior_velocity_passes_unchanged(
        x in prop::collection::vec(1e-6..100.0f64, 1..10),
        seed in prop::collection::vec(-100.0..100.0f64, 10),
    ) {
        let v = &seed[..x.len()];
        prop_assert_eq!(differentiated_projection(&x, v).unwrap(), v.to_vec());
    }

    #[test]
    fn split_is_exact_and_orthogonal((x, v) in point_and_velocity()) {
        let (t, n) = tangent_normal_split(&x, &v).unwrap();
        let mut inner = 0.0;
        for k in 0..v.len() {
            prop_assert_eq!(t[k] + n[k], v[k]);
            prop_assert!(n[k] <= 0.0);
            inner += t[k] * n[k];
        }
        prop_assert!(inner.abs() <= 1e-14);
    }

    #[test]
    fn tangent_keeps_the_orthant((x, v) in point_and_velocity()) {
        let t = differentiated_projection(&x, &v).unwrap();
        for k in 0..x.len() {
            if x[k] == 0.0 {
                prop_assert!(t[k] >= 0.0);
            }
        }
    }

    #[test]
    fn natural_map_matches_residual(pairs in prop::collection::vec((0.0..10.0f64, -10.0..10.0f64), 1..10)) {
        let (lam, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let r = complementarity_residual(&lam, &w).unwrap();
        let natural = lam.iter().zip(&w).map(|(&l, &w)| (l - (l + w).max(0.0)).abs()).fold(0.0, f64::max);
        prop_assert!((r - natural).abs() <= 1e-14 * (1.0 + natural));
        prop_assert!(complementarity_residual_l2(&lam, &w).unwrap() >= r - 1e-15);
    }
}

#[test]
fn discrete_limit_is_first_order() {
    // Component 0 sits at 1e-4 and moves inward fast, so a large step
    // overshoots the boundary; the discrete slope approaches the tangent
    // velocity once h·|v| falls below the distance.
    let x = [1e-4, 0.0, 2.0];
    let v = [-1.0, -3.0, 5.0];
    let p = differentiated_projection(&x, &v).unwrap();
    let err = |h: f64| -> f64 {
        let next = OrthantPoint::new(x.to_vec()).unwrap().step(&v, h).unwrap();
        next.as_slice()
            .iter()
            .zip(&x)
            .zip(&p)
            .map(|((n, x), p)| ((n - x) / h - p).abs())
            .fold(0.0, f64::max)
    };
    let e = [err(1e-3), err(1e-4), err(1e-5)];
    assert!(e[0] > 0.5);
    assert!(e[1] <= 1e-9 && e[2] <= 1e-9, "{e:?}");

    // On a smooth sweep the worst error over a set of distances scales like h.
    let dists: Vec<f64> = (1..200).map(|k| k as f64 * 1e-5).collect();
    let worst = |h: f64| -> f64 {
        dists
            .iter()
            .map(|&d| {
                let slope = ((d - h).max(0.0) - d) / h;
                let tangent = -1.0;
                // Mean over the sweep approximates the L1 error, which is O(h).
                (slope - tangent).abs()
            })
            .sum::<f64>()
            / dists.len() as f64
    };
    let (a, b, c) = (worst(1e-3), worst(1e-4), worst(1e-5));
    assert!(a > 0.0 && b < a / 5.0 && c < b / 5.0, "{a} {b} {c}");
}

#[test]
fn residual_zero_only_in_normal_cone() {
    assert_eq!(complementarity_residual(&[0.0, 2.0], &[-1.0, 0.0]).unwrap(), 0.0);
    assert!(complementarity_residual(&[1.0], &[-0.5]).unwrap() > 0.0);
    assert!(complementarity_residual(&[0.0], &[0.5]).unwrap() > 0.0);
    assert!(complementarity_residual(&[-1.0], &[0.0]).is_err());
}

#[test]
fn box_bounds_clip_both_sides() {
    let b = Bound::Interval { lo: -1.0, hi: 2.0 };
    assert_eq!(b.tangent(-1.0, -3.0), 0.0);
    assert_eq!(b.tangent(-1.0, 3.0), 3.0);
    assert_eq!(b.tangent(2.0, 3.0), 0.0);
    assert_eq!(b.tangent(0.5, -3.0), -3.0);
    assert_eq!(b.clamp(7.0), 2.0);
    assert!(Bound::NonNegative.admits(-1e-13, 1e-12));
    assert!(!Bound::NonNegative.admits(-1e-6, 1e-12));
    assert!(!Bound::Free.is_projected());
}

#[test]
fn rejects_bad_inputs() {
    assert!(differentiated_projection(&[1.0], &[1.0, 2.0]).is_err());
    assert!(differentiated_projection(&[-1e-3], &[1.0]).is_err());
    assert!(OrthantPoint::new(vec![-1.0]).is_err());
    assert_eq!(OrthantPoint::project(&[-2.0, 3.0]).into_inner(), vec![0.0, 3.0]);
}
