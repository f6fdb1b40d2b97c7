//! Benchmark game constructors.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{AgentConstraint, Game, PlayerCost, QuadraticConstraint, QuadraticCost};
use crate::linalg;

/// Two players with `J₁ = x₁x₂`, `J₂ = −x₁x₂`; `F(x) = (x₂, −x₁)`.
pub fn make_zero_sum_example() -> Game {
    let h1 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let costs = [h1.clone(), -h1]
        .into_iter()
        .map(|hessian| {
            PlayerCost::Quadratic(QuadraticCost {
                hessian,
                linear: DVector::zeros(2),
                constant: 0.0,
            })
        })
        .collect();
    let constraints = (0..2)
        .map(|_| AgentConstraint::Quadratic(QuadraticConstraint::zero(0, 1)))
        .collect();
    Game::new(vec![1, 1], 0, costs, constraints).expect("valid example game")
}

/// Symmetrizes a raw draw and shifts it to be positive definite.
fn condition_pd(raw: DMatrix<f64>) -> DMatrix<f64> {
    let n = raw.nrows();
    let sym = (&raw + raw.transpose()) * 0.5;
    let lmin = linalg::min_sym_eigenvalue(&sym);
    if lmin > 0.0 {
        sym
    } else {
        sym + DMatrix::identity(n, n) * (lmin.abs() + 0.1)
    }
}

fn uniform_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(lo..hi))
}

fn uniform_vector(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(lo..hi))
}

/// Number of markets in the oligopoly benchmark.
pub const COURNOT_MARKETS: usize = 4;
/// Number of firms in the oligopoly benchmark.
pub const COURNOT_FIRMS: usize = 5;

/// Data drawn for the oligopoly benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CournotMetadata {
    pub seed: u64,
    /// Markets joined by each firm, in increasing order.
    pub participation: Vec<Vec<usize>>,
    pub q_matrices: Vec<Vec<Vec<f64>>>,
    pub q_vectors: Vec<Vec<f64>>,
    pub price_intercept: Vec<f64>,
    pub price_slope: Vec<Vec<f64>>,
    pub capacities: Vec<Vec<f64>>,
    pub upper_bounds: Vec<Vec<f64>>,
    /// Number of market-capacity rows; the remaining rows are box rows.
    pub market_rows: usize,
}

/// Networked Cournot game: `N = 5` firms over 4 markets with price
/// `P(Ax) = P̄ − ΞAx`, shared market capacities and per-firm production
/// boxes written as coupled rows.
///
/// Rows: 4 capacity rows `Σ_i A_i x^i − Σ_i r_i <= 0`, then `n` rows
/// `x − u <= 0`, then `n` rows `−x <= 0`.
pub fn make_cournot(seed: u64) -> Result<(Game, CournotMetadata)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (players, markets) = (COURNOT_FIRMS, COURNOT_MARKETS);

    let mut participation = Vec::with_capacity(players);
    for _ in 0..players {
        let mut joined: Vec<usize> = (0..markets).filter(|_| rng.gen_bool(0.5)).collect();
        if joined.is_empty() {
            joined.push(rng.gen_range(0..markets));
        }
        participation.push(joined);
    }
    let dims: Vec<usize> = participation.iter().map(Vec::len).collect();
    let n: usize = dims.iter().sum();

    let q_mats: Vec<DMatrix<f64>> = dims
        .iter()
        .map(|&d| condition_pd(uniform_matrix(&mut rng, d, d, 1.0, 4.0)))
        .collect();
    let q_vecs: Vec<DVector<f64>> = dims.iter().map(|&d| uniform_vector(&mut rng, d, 0.0, 2.0)).collect();
    let p_bar = uniform_vector(&mut rng, markets, 10.0, 14.0);
    let xi = condition_pd(uniform_matrix(&mut rng, markets, markets, 1.0, 2.0));
    let caps: Vec<DVector<f64>> = (0..players).map(|_| uniform_vector(&mut rng, markets, 20.0, 30.0)).collect();
    let uppers: Vec<DVector<f64>> = dims.iter().map(|&d| uniform_vector(&mut rng, d, 6.0, 14.0)).collect();

    for q in q_mats.iter().chain(std::iter::once(&xi)) {
        if linalg::min_sym_eigenvalue(q) <= 0.0 {
            return Err(Error::InvalidState("conditioning left an indefinite form".into()));
        }
    }

    let mut offsets = vec![0];
    for &d in &dims {
        offsets.push(offsets.last().unwrap() + d);
    }
    // A_i: markets × n_i selectors; S_i places A_i at player i's columns.
    let a_i: Vec<DMatrix<f64>> = participation
        .iter()
        .map(|joined| {
            DMatrix::from_fn(markets, joined.len(), |r, c| if joined[c] == r { 1.0 } else { 0.0 })
        })
        .collect();
    let s_i: Vec<DMatrix<f64>> = (0..players)
        .map(|i| {
            let mut s = DMatrix::zeros(markets, n);
            s.view_mut((0, offsets[i]), (markets, dims[i])).copy_from(&a_i[i]);
            s
        })
        .collect();
    let a_full = s_i.iter().fold(DMatrix::zeros(markets, n), |acc, s| acc + s);

    let costs = (0..players)
        .map(|i| {
            let mut h = a_full.transpose() * &xi * &s_i[i];
            h += s_i[i].transpose() * &xi * &a_full;
            let r = offsets[i]..offsets[i + 1];
            let mut own = h.view_mut((r.start, r.start), (dims[i], dims[i]));
            own += &q_mats[i] * 2.0;
            let mut lin = DVector::zeros(n);
            lin.rows_mut(r.start, dims[i])
                .copy_from(&(&q_vecs[i] - a_i[i].transpose() * &p_bar));
            PlayerCost::Quadratic(QuadraticCost {
                hessian: h,
                linear: lin,
                constant: 0.0,
            })
        })
        .collect();

    let m = markets + 2 * n;
    let constraints = (0..players)
        .map(|i| {
            let mut lin = DMatrix::zeros(m, dims[i]);
            let mut off = DVector::zeros(m);
            lin.view_mut((0, 0), (markets, dims[i])).copy_from(&a_i[i]);
            off.rows_mut(0, markets).copy_from(&(-&caps[i]));
            for k in 0..dims[i] {
                let row = offsets[i] + k;
                lin[(markets + row, k)] = 1.0;
                off[markets + row] = -uppers[i][k];
                lin[(markets + n + row, k)] = -1.0;
            }
            AgentConstraint::Quadratic(QuadraticConstraint::affine(lin, off))
        })
        .collect();
    let game = Game::new(dims, m, costs, constraints)?;
    let meta = CournotMetadata {
        seed,
        participation,
        q_matrices: q_mats.iter().map(linalg::to_rows).collect(),
        q_vectors: q_vecs.iter().map(|v| v.iter().copied().collect()).collect(),
        price_intercept: p_bar.iter().copied().collect(),
        price_slope: linalg::to_rows(&xi),
        capacities: caps.iter().map(|v| v.iter().copied().collect()).collect(),
        upper_bounds: uppers.iter().map(|v| v.iter().copied().collect()).collect(),
        market_rows: markets,
    };
    Ok((game, meta))
}

/// Number of sensors in the sensor-network benchmark.
pub const SENSOR_AGENTS: usize = 6;
/// Target of the shared spread constraint.
pub const SENSOR_SPREAD: f64 = 6.0;

/// Mobile sensors in the plane: `J_i = x^iᵀQ_i x^i + q_iᵀx^i + Σ_j ‖x^i − x^j‖²`
/// with the single shared row `Σ_i (‖x^i‖² − d)/N <= 0`, `d = 6`.
pub fn make_sensor_network(seed: u64) -> Result<Game> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let players = SENSOR_AGENTS;
    let n = 2 * players;
    let q_mats: Vec<DMatrix<f64>> = (0..players)
        .map(|_| condition_pd(uniform_matrix(&mut rng, 2, 2, -6.0, 6.0)))
        .collect();
    let q_vecs: Vec<DVector<f64>> = (0..players).map(|_| uniform_vector(&mut rng, 2, -3.0, 3.0)).collect();

    let costs = (0..players)
        .map(|i| {
            let mut h = DMatrix::zeros(n, n);
            h.view_mut((2 * i, 2 * i), (2, 2)).copy_from(&(&q_mats[i] * 2.0));
            for j in (0..players).filter(|&j| j != i) {
                for k in 0..2 {
                    let (a, b) = (2 * i + k, 2 * j + k);
                    h[(a, a)] += 2.0;
                    h[(b, b)] += 2.0;
                    h[(a, b)] -= 2.0;
                    h[(b, a)] -= 2.0;
                }
            }
            let mut lin = DVector::zeros(n);
            lin.rows_mut(2 * i, 2).copy_from(&q_vecs[i]);
            PlayerCost::Quadratic(QuadraticCost {
                hessian: h,
                linear: lin,
                constant: 0.0,
            })
        })
        .collect();
    let np = players as f64;
    let constraints = (0..players)
        .map(|_| {
            AgentConstraint::Quadratic(QuadraticConstraint {
                linear: DMatrix::zeros(1, 2),
                offset: DVector::from_element(1, -SENSOR_SPREAD / np),
                hessians: vec![Some(DMatrix::identity(2, 2) * (2.0 / np))],
            })
        })
        .collect();
    Game::new(vec![2; players], 1, costs, constraints)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sum_pseudo_gradient() {
        let g = make_zero_sum_example();
        assert_eq!(g.pseudo_gradient(&[1.0, 0.0]).unwrap().as_slice(), &[0.0, -1.0]);
        assert_eq!(g.pseudo_gradient(&[0.0, 1.0]).unwrap().as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn cournot_shapes() {
        let (g, meta) = make_cournot(42).unwrap();
        assert_eq!(g.num_players(), COURNOT_FIRMS);
        assert_eq!(g.m(), COURNOT_MARKETS + 2 * g.n());
        for (i, joined) in meta.participation.iter().enumerate() {
            assert!(!joined.is_empty());
            assert_eq!(g.action_dims()[i], joined.len());
        }
    }

    #[test]
    fn sensor_constraint_at_origin() {
        let g = make_sensor_network(3).unwrap();
        let agg = g.aggregate_constraint(&[0.0; 12]).unwrap();
        assert!((agg[0] + SENSOR_SPREAD).abs() < 1e-12);
    }
}
