use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Game;
use crate::linalg;

/// `μ` within this band of zero counts as merely monotone.
pub const MONOTONE_BAND: f64 = 1e-8;

/// Half-width of the sampling box used for nonquadratic games.
const SAMPLE_RADIUS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotonicityClass {
    Strongly,
    Strictly,
    Monotone,
    Hypomonotone,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub class: MonotonicityClass,
    /// Lower estimate of the monotonicity modulus.
    pub mu_estimate: f64,
    /// Upper estimate of the Lipschitz constant of `F`.
    pub theta_estimate: f64,
    /// Whether the bounds are exact (affine pseudo-gradient) or sampled.
    pub exact: bool,
}

fn classify(mu: f64) -> MonotonicityClass {
    if !mu.is_finite() {
        MonotonicityClass::Indefinite
    } else if mu > MONOTONE_BAND {
        MonotonicityClass::Strongly
    } else if mu >= -MONOTONE_BAND {
        MonotonicityClass::Monotone
    } else {
        MonotonicityClass::Hypomonotone
    }
}

/// Classifies the pseudo-gradient. Affine maps are handled exactly; other
/// games are sampled on `sample_count` pairs from a box.
pub fn monotonicity_report(game: &Game, sample_count: usize, seed: u64) -> MonotonicityReport {
    if let Some((m, _)) = game.affine_pseudo_gradient() {
        let mu = linalg::min_sym_eigenvalue(m);
        return MonotonicityReport {
            class: classify(mu),
            mu_estimate: mu,
            theta_estimate: linalg::spectral_norm(m),
            exact: true,
        };
    }

    let n = game.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mu = f64::INFINITY;
    let mut theta = 0.0_f64;
    let mut all_positive = true;
    let mut drawn = 0;
    while drawn < sample_count.max(2) {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-SAMPLE_RADIUS..SAMPLE_RADIUS)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-SAMPLE_RADIUS..SAMPLE_RADIUS)).collect();
        let d = DVector::from_iterator(n, x.iter().zip(&y).map(|(a, b)| a - b));
        let dn2 = d.norm_squared();
        if dn2 < 1e-24 {
            continue;
        }
        drawn += 1;
        let df = game.pseudo_gradient_unchecked(&x) - game.pseudo_gradient_unchecked(&y);
        let inner = d.dot(&df);
        if !inner.is_finite() {
            mu = f64::NAN;
            break;
        }
        all_positive &= inner > 0.0;
        mu = mu.min(inner / dn2);
        theta = theta.max(df.norm() / dn2.sqrt());
    }

    let mut class = classify(mu);
    if class == MonotonicityClass::Monotone && all_positive {
        class = MonotonicityClass::Strictly;
    }
    MonotonicityReport {
        class,
        mu_estimate: mu,
        theta_estimate: theta,
        exact: false,
    }
}
