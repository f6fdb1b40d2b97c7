//! Noncooperative games with separable coupled constraints.
//!
//! Player `i` controls `x^i ∈ R^{n_i}`, minimises `J_i(x^i, x^{-i})` and
//! contributes `g_i(x^i) ∈ R^m` to the shared constraint `Σ_i g_i(x^i) <= 0`.

mod monotonicity;
mod oracle;

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg;

pub use monotonicity::{monotonicity_report, MonotonicityClass, MonotonicityReport};
pub use oracle::{solve_gne_newton, solve_gne_oracle, KktPoint, ORACLE_FEAS_TOL};

/// A player's cost supplied as code rather than data.
pub trait CostFunction: Send + Sync + fmt::Debug {
    /// `J_i(x)` at the full action profile.
    fn value(&self, x: &DVector<f64>) -> f64;
    /// `∇_{x^i} J_i(x)`, of length `n_i`.
    fn own_gradient(&self, x: &DVector<f64>) -> DVector<f64>;
}

/// A player's private constraint map supplied as code.
pub trait ConstraintFunction: Send + Sync + fmt::Debug {
    /// `g_i(x^i) ∈ R^m`.
    fn value(&self, xi: &DVector<f64>) -> DVector<f64>;
    /// `∇g_i(x^i) ∈ R^{m × n_i}`.
    fn jacobian(&self, xi: &DVector<f64>) -> DMatrix<f64>;
}

/// `J_i(x) = ½ xᵀ H x + hᵀ x + c` over the full profile.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCost {
    pub hessian: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constant: f64,
}

#[derive(Debug, Clone)]
pub enum PlayerCost {
    Quadratic(QuadraticCost),
    Custom(Arc<dyn CostFunction>),
}

/// Rows `k = 1..m` of `g_i(y) = ½ yᵀ H_k y + (A y)_k + c_k`; a missing
/// `H_k` means the row is affine.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticConstraint {
    pub linear: DMatrix<f64>,
    pub offset: DVector<f64>,
    pub hessians: Vec<Option<DMatrix<f64>>>,
}

impl QuadraticConstraint {
    pub fn affine(linear: DMatrix<f64>, offset: DVector<f64>) -> Self {
        let m = offset.len();
        Self {
            linear,
            offset,
            hessians: vec![None; m],
        }
    }

    /// The zero map `R^{n_i} → R^m`.
    pub fn zero(m: usize, ni: usize) -> Self {
        Self::affine(DMatrix::zeros(m, ni), DVector::zeros(m))
    }

    pub fn is_affine(&self) -> bool {
        self.hessians.iter().all(Option::is_none)
    }

    fn value(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut g = &self.linear * y + &self.offset;
        for (k, h) in self.hessians.iter().enumerate() {
            if let Some(h) = h {
                g[k] += 0.5 * y.dot(&(h * y));
            }
        }
        g
    }

    fn jacobian(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut j = self.linear.clone();
        for (k, h) in self.hessians.iter().enumerate() {
            if let Some(h) = h {
                let row = h * y;
                for c in 0..j.ncols() {
                    j[(k, c)] += row[c];
                }
            }
        }
        j
    }
}

#[derive(Debug, Clone)]
pub enum AgentConstraint {
    Quadratic(QuadraticConstraint),
    Custom(Arc<dyn ConstraintFunction>),
}

/// Linear-quadratic closed form: `F(x) = M x + f`, `g(x) = A x + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearQuadraticForm {
    pub jacobian: DMatrix<f64>,
    pub offset: DVector<f64>,
    pub constraint_matrix: DMatrix<f64>,
    pub constraint_offset: DVector<f64>,
}

/// A game instance: dimensions, costs and coupled constraints.
#[derive(Debug, Clone)]
pub struct Game {
    action_dims: Vec<usize>,
    offsets: Vec<usize>,
    num_constraints: usize,
    costs: Vec<PlayerCost>,
    constraints: Vec<AgentConstraint>,
    /// `(M, f)` when every cost is quadratic.
    affine_map: Option<(DMatrix<f64>, DVector<f64>)>,
}

impl Game {
    pub fn new(
        action_dims: Vec<usize>,
        num_constraints: usize,
        costs: Vec<PlayerCost>,
        constraints: Vec<AgentConstraint>,
    ) -> Result<Self> {
        let players = action_dims.len();
        if players == 0 {
            return Err(Error::InvalidInput("a game needs at least one player".into()));
        }
        if action_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidInput("every player needs a nonempty action".into()));
        }
        check_len("cost list", players, costs.len())?;
        check_len("constraint list", players, constraints.len())?;
        let mut offsets = Vec::with_capacity(players + 1);
        let mut acc = 0;
        for &d in &action_dims {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        let n = acc;

        for cost in &costs {
            if let PlayerCost::Quadratic(q) = cost {
                if q.hessian.shape() != (n, n) || q.linear.len() != n {
                    return Err(Error::InvalidInput(format!(
                        "quadratic cost must be over the full profile of length {n}"
                    )));
                }
            }
        }
        for (i, c) in constraints.iter().enumerate() {
            if let AgentConstraint::Quadratic(q) = c {
                let ni = action_dims[i];
                if q.linear.shape() != (num_constraints, ni)
                    || q.offset.len() != num_constraints
                    || q.hessians.len() != num_constraints
                    || q.hessians.iter().flatten().any(|h| h.shape() != (ni, ni))
                {
                    return Err(Error::InvalidInput(format!(
                        "constraint data of player {i} does not match m = {num_constraints}, n_i = {ni}"
                    )));
                }
            }
        }

        let mut game = Self {
            action_dims,
            offsets,
            num_constraints,
            costs,
            constraints,
            affine_map: None,
        };
        game.affine_map = game.build_affine_map();
        Ok(game)
    }

    fn build_affine_map(&self) -> Option<(DMatrix<f64>, DVector<f64>)> {
        let n = self.n();
        let mut jac = DMatrix::zeros(n, n);
        let mut off = DVector::zeros(n);
        for (i, cost) in self.costs.iter().enumerate() {
            let PlayerCost::Quadratic(q) = cost else {
                return None;
            };
            let r = self.block(i);
            // ∇_{x^i} of ½ xᵀHx uses the symmetric part of H.
            let sym = (&q.hessian + q.hessian.transpose()) * 0.5;
            jac.rows_mut(r.start, r.len())
                .copy_from(&sym.rows(r.start, r.len()));
            off.rows_mut(r.start, r.len())
                .copy_from(&q.linear.rows(r.start, r.len()));
        }
        Some((jac, off))
    }

    pub fn num_players(&self) -> usize {
        self.action_dims.len()
    }

    pub fn action_dims(&self) -> &[usize] {
        &self.action_dims
    }

    /// Total action dimension `n = Σ n_i`.
    pub fn n(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Rows `m` of each `g_i`.
    pub fn m(&self) -> usize {
        self.num_constraints
    }

    /// Stacked multiplier dimension `N m`.
    pub fn stacked_m(&self) -> usize {
        self.num_players() * self.num_constraints
    }

    /// Index range of player `i` inside the profile.
    pub fn block(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn costs(&self) -> &[PlayerCost] {
        &self.costs
    }

    pub fn constraints(&self) -> &[AgentConstraint] {
        &self.constraints
    }

    /// `(M, f)` with `F(x) = M x + f` when all costs are quadratic.
    pub fn affine_pseudo_gradient(&self) -> Option<(&DMatrix<f64>, &DVector<f64>)> {
        self.affine_map.as_ref().map(|(m, f)| (m, f))
    }

    /// Whether every constraint row is affine (or absent).
    pub fn has_affine_constraints(&self) -> bool {
        self.constraints.iter().all(|c| match c {
            AgentConstraint::Quadratic(q) => q.is_affine(),
            AgentConstraint::Custom(_) => false,
        })
    }

    /// Quadratic constraints only (affine rows included).
    pub fn has_quadratic_constraints(&self) -> bool {
        self.constraints
            .iter()
            .all(|c| matches!(c, AgentConstraint::Quadratic(_)))
    }

    /// Closed-form data for linear-quadratic games with affine coupling.
    pub fn linear_quadratic_form(&self) -> Option<LinearQuadraticForm> {
        let (jac, off) = self.affine_map.clone()?;
        if !self.has_affine_constraints() {
            return None;
        }
        let (m, n) = (self.m(), self.n());
        let mut a = DMatrix::zeros(m, n);
        let mut c = DVector::zeros(m);
        for (i, con) in self.constraints.iter().enumerate() {
            let AgentConstraint::Quadratic(q) = con else {
                unreachable!()
            };
            let r = self.block(i);
            a.columns_mut(r.start, r.len()).copy_from(&q.linear);
            c += &q.offset;
        }
        Some(LinearQuadraticForm {
            jacobian: jac,
            offset: off,
            constraint_matrix: a,
            constraint_offset: c,
        })
    }

    pub fn is_linear_quadratic(&self) -> bool {
        self.affine_map.is_some() && self.has_affine_constraints()
    }

    fn check_profile(&self, x: &[f64]) -> Result<()> {
        check_len("action profile", self.n(), x.len())
    }

    /// `J_i(x)`.
    pub fn cost(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.check_profile(x)?;
        let xv = DVector::from_column_slice(x);
        Ok(match &self.costs[i] {
            PlayerCost::Quadratic(q) => {
                0.5 * xv.dot(&(&q.hessian * &xv)) + q.linear.dot(&xv) + q.constant
            }
            PlayerCost::Custom(f) => f.value(&xv),
        })
    }

    fn own_gradient(&self, i: usize, x: &DVector<f64>) -> DVector<f64> {
        let r = self.block(i);
        match &self.costs[i] {
            PlayerCost::Quadratic(q) => {
                let sym = (&q.hessian + q.hessian.transpose()) * 0.5;
                sym.rows(r.start, r.len()) * x + q.linear.rows(r.start, r.len())
            }
            PlayerCost::Custom(f) => f.own_gradient(x),
        }
    }

    /// `F(x) = col{∇_{x^i} J_i(x)}`.
    pub fn pseudo_gradient(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_profile(x)?;
        Ok(self.pseudo_gradient_unchecked(x))
    }

    pub(crate) fn pseudo_gradient_unchecked(&self, x: &[f64]) -> DVector<f64> {
        match &self.affine_map {
            Some((m, f)) => {
                let mut out = f.clone();
                out.gemv(1.0, m, &DVector::from_column_slice(x), 1.0);
                out
            }
            None => self.pseudo_gradient_by_player(x),
        }
    }

    /// Pseudo-gradient assembled player by player, bypassing the
    /// closed-form `M x + f` path.
    pub fn pseudo_gradient_per_player(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_profile(x)?;
        Ok(self.pseudo_gradient_by_player(x))
    }

    fn pseudo_gradient_by_player(&self, x: &[f64]) -> DVector<f64> {
        let xv = DVector::from_column_slice(x);
        let mut out = DVector::zeros(self.n());
        for i in 0..self.num_players() {
            let r = self.block(i);
            out.rows_mut(r.start, r.len())
                .copy_from(&self.own_gradient(i, &xv));
        }
        out
    }

    /// `𝐅(𝐱) = col{∇_{x^i} J_i(𝐱^i)}` where `x_est` stacks one full-profile
    /// estimate per player.
    pub fn extended_pseudo_gradient(&self, x_est: &[f64]) -> Result<DVector<f64>> {
        check_len("stacked estimates", self.num_players() * self.n(), x_est.len())?;
        Ok(self.extended_pseudo_gradient_unchecked(x_est))
    }

    pub(crate) fn extended_pseudo_gradient_unchecked(&self, x_est: &[f64]) -> DVector<f64> {
        let n = self.n();
        let mut out = DVector::zeros(n);
        for i in 0..self.num_players() {
            let r = self.block(i);
            let est = &x_est[i * n..(i + 1) * n];
            match &self.affine_map {
                Some((m, f)) => {
                    for row in r.clone() {
                        let mut acc = f[row];
                        for (c, e) in est.iter().enumerate() {
                            acc += m[(row, c)] * e;
                        }
                        out[row] = acc;
                    }
                }
                None => {
                    let g = self.own_gradient(i, &DVector::from_column_slice(est));
                    out.rows_mut(r.start, r.len()).copy_from(&g);
                }
            }
        }
        out
    }

    /// `g_i(x^i)`.
    pub fn agent_constraint(&self, i: usize, xi: &[f64]) -> Result<DVector<f64>> {
        check_len("player action", self.action_dims[i], xi.len())?;
        let y = DVector::from_column_slice(xi);
        Ok(match &self.constraints[i] {
            AgentConstraint::Quadratic(q) => q.value(&y),
            AgentConstraint::Custom(f) => f.value(&y),
        })
    }

    /// `∇g_i(x^i)`.
    pub fn agent_jacobian(&self, i: usize, xi: &[f64]) -> Result<DMatrix<f64>> {
        check_len("player action", self.action_dims[i], xi.len())?;
        let y = DVector::from_column_slice(xi);
        Ok(match &self.constraints[i] {
            AgentConstraint::Quadratic(q) => q.jacobian(&y),
            AgentConstraint::Custom(f) => f.jacobian(&y),
        })
    }

    /// `(G(x), ∇G(x))` with `G = col{g_i(x^i)}` and a block-diagonal Jacobian.
    pub fn stacked_constraints(&self, x: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        self.check_profile(x)?;
        let (m, n, players) = (self.m(), self.n(), self.num_players());
        let mut g = DVector::zeros(players * m);
        let mut jac = DMatrix::zeros(players * m, n);
        for i in 0..players {
            let r = self.block(i);
            let xi = &x[r.clone()];
            g.rows_mut(i * m, m).copy_from(&self.agent_constraint(i, xi)?);
            jac.view_mut((i * m, r.start), (m, r.len()))
                .copy_from(&self.agent_jacobian(i, xi)?);
        }
        Ok((g, jac))
    }

    /// `G(x)` only.
    pub(crate) fn stacked_values_unchecked(&self, x: &[f64]) -> DVector<f64> {
        let m = self.m();
        let mut g = DVector::zeros(self.stacked_m());
        if m == 0 {
            return g;
        }
        for i in 0..self.num_players() {
            let r = self.block(i);
            let v = self.agent_constraint(i, &x[r]).expect("checked dims");
            g.rows_mut(i * m, m).copy_from(&v);
        }
        g
    }

    /// `∇G(x)ᵀ λ` for stacked multipliers; each player only touches its own `λ^i`.
    pub(crate) fn jacobian_transpose_apply_unchecked(&self, x: &[f64], lam: &[f64]) -> DVector<f64> {
        let m = self.m();
        let mut out = DVector::zeros(self.n());
        if m == 0 {
            return out;
        }
        for i in 0..self.num_players() {
            let r = self.block(i);
            let li = DVector::from_column_slice(&lam[i * m..(i + 1) * m]);
            let v = match &self.constraints[i] {
                AgentConstraint::Quadratic(q) if q.is_affine() => q.linear.tr_mul(&li),
                _ => self
                    .agent_jacobian(i, &x[r.clone()])
                    .expect("checked dims")
                    .tr_mul(&li),
            };
            out.rows_mut(r.start, r.len()).copy_from(&v);
        }
        out
    }

    /// `g(x) = Σ_i g_i(x^i)`.
    pub fn aggregate_constraint(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_profile(x)?;
        let mut g = DVector::zeros(self.m());
        for i in 0..self.num_players() {
            g += self.agent_constraint(i, &x[self.block(i)])?;
        }
        Ok(g)
    }

    /// Adds `eps/2 ‖x^i‖²` to every player's cost (`F ↦ F + eps·x`).
    pub fn with_regularization(&self, eps: f64) -> Result<Game> {
        let n = self.n();
        let costs = self
            .costs
            .iter()
            .enumerate()
            .map(|(i, c)| match c {
                PlayerCost::Quadratic(q) => {
                    let mut q = q.clone();
                    for k in self.block(i) {
                        q.hessian[(k, k)] += eps;
                    }
                    Ok(PlayerCost::Quadratic(q))
                }
                PlayerCost::Custom(_) => Err(Error::InvalidInput(
                    "regularisation only applies to quadratic costs".into(),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        debug_assert_eq!(costs.len(), self.num_players());
        let _ = n;
        Game::new(
            self.action_dims.clone(),
            self.num_constraints,
            costs,
            self.constraints.clone(),
        )
    }

    /// Serializable description, when the game is fully data-driven.
    pub fn to_data(&self) -> Option<GameData> {
        let mut costs = Vec::new();
        for c in &self.costs {
            let PlayerCost::Quadratic(q) = c else {
                return None;
            };
            costs.push(QuadraticCostData {
                hessian: linalg::to_rows(&q.hessian),
                linear: q.linear.iter().copied().collect(),
                constant: q.constant,
            });
        }
        let mut constraints = Vec::new();
        for c in &self.constraints {
            let AgentConstraint::Quadratic(q) = c else {
                return None;
            };
            constraints.push(ConstraintData {
                linear: linalg::to_rows(&q.linear),
                offset: q.offset.iter().copied().collect(),
                hessians: q
                    .hessians
                    .iter()
                    .map(|h| h.as_ref().map(linalg::to_rows))
                    .collect(),
            });
        }
        Some(GameData {
            action_dims: self.action_dims.clone(),
            num_constraints: self.num_constraints,
            costs,
            constraints,
        })
    }
}

/// Data form of a quadratic game (matrices row-major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameData {
    pub action_dims: Vec<usize>,
    pub num_constraints: usize,
    pub costs: Vec<QuadraticCostData>,
    #[serde(default)]
    pub constraints: Vec<ConstraintData>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCostData {
    pub hessian: Vec<Vec<f64>>,
    pub linear: Vec<f64>,
    #[serde(default)]
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintData {
    pub linear: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
    #[serde(default)]
    pub hessians: Vec<Option<Vec<Vec<f64>>>>,
}

fn matrix(rows: &[Vec<f64>], shape: (usize, usize), what: &str) -> Result<DMatrix<f64>> {
    // empty row lists are allowed for zero-row matrices
    let m = if rows.is_empty() {
        DMatrix::zeros(0, shape.1)
    } else {
        linalg::from_rows(rows)
            .ok_or_else(|| Error::InvalidInput(format!("{what}: ragged matrix rows")))?
    };
    if m.shape() != shape {
        return Err(Error::InvalidInput(format!(
            "{what}: expected shape {:?}, got {:?}",
            shape,
            m.shape()
        )));
    }
    Ok(m)
}

impl GameData {
    pub fn build(&self) -> Result<Game> {
        let n: usize = self.action_dims.iter().sum();
        let m = self.num_constraints;
        let costs = self
            .costs
            .iter()
            .map(|c| {
                Ok(PlayerCost::Quadratic(QuadraticCost {
                    hessian: matrix(&c.hessian, (n, n), "cost hessian")?,
                    linear: DVector::from_vec(c.linear.clone()),
                    constant: c.constant,
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        let constraints = if self.constraints.is_empty() {
            self.action_dims
                .iter()
                .map(|&ni| AgentConstraint::Quadratic(QuadraticConstraint::zero(m, ni)))
                .collect()
        } else {
            check_len("constraint list", self.action_dims.len(), self.constraints.len())?;
            self.constraints
                .iter()
                .zip(&self.action_dims)
                .map(|(c, &ni)| {
                    let hessians = if c.hessians.is_empty() {
                        vec![None; m]
                    } else {
                        c.hessians
                            .iter()
                            .map(|h| {
                                h.as_ref()
                                    .map(|h| matrix(h, (ni, ni), "constraint hessian"))
                                    .transpose()
                            })
                            .collect::<Result<Vec<_>>>()?
                    };
                    Ok(AgentConstraint::Quadratic(QuadraticConstraint {
                        linear: matrix(&c.linear, (m, ni), "constraint matrix")?,
                        offset: DVector::from_vec(c.offset.clone()),
                        hessians,
                    }))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Game::new(self.action_dims.clone(), m, costs, constraints)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_sum() -> Game {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let costs = vec![
            PlayerCost::Quadratic(QuadraticCost {
                hessian: h.clone(),
                linear: DVector::zeros(2),
                constant: 0.0,
            }),
            PlayerCost::Quadratic(QuadraticCost {
                hessian: -h,
                linear: DVector::zeros(2),
                constant: 0.0,
            }),
        ];
        let cons = vec![
            AgentConstraint::Quadratic(QuadraticConstraint::zero(0, 1)),
            AgentConstraint::Quadratic(QuadraticConstraint::zero(0, 1)),
        ];
        Game::new(vec![1, 1], 0, costs, cons).unwrap()
    }

    #[test]
    fn zero_sum_pseudo_gradient() {
        let g = zero_sum();
        let f = g.pseudo_gradient(&[1.0, 2.0]).unwrap();
        assert_eq!(f.as_slice(), &[2.0, -1.0]);
        assert_eq!(g.pseudo_gradient(&[1.0, 2.0]).unwrap(), f);
        assert_eq!(g.cost(0, &[1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(g.cost(1, &[1.0, 2.0]).unwrap(), -2.0);
    }

    #[test]
    fn extended_pseudo_gradient_example() {
        let g = zero_sum();
        let f = g.extended_pseudo_gradient(&[1.0, 5.0, 3.0, 2.0]).unwrap();
        assert_eq!(f.as_slice(), &[5.0, -3.0]);
    }

    #[test]
    fn dimension_errors() {
        let g = zero_sum();
        assert!(matches!(
            g.pseudo_gradient(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(g.stacked_constraints(&[1.0, 2.0, 3.0]).is_err());
        assert!(g.extended_pseudo_gradient(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn linear_constraint_jacobian_is_exact() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -1.0, 0.5]);
        let r = DVector::from_row_slice(&[3.0, 1.0]);
        let q = QuadraticConstraint::affine(a.clone(), -r);
        let costs = vec![PlayerCost::Quadratic(QuadraticCost {
            hessian: DMatrix::identity(2, 2),
            linear: DVector::zeros(2),
            constant: 0.0,
        })];
        let g = Game::new(vec![2], 2, costs, vec![AgentConstraint::Quadratic(q)]).unwrap();
        let (_, j) = g.stacked_constraints(&[0.3, -7.0]).unwrap();
        assert_eq!(j, a);
        assert!(g.is_linear_quadratic());
    }

    #[test]
    fn data_roundtrip_builds_same_game() {
        let g = zero_sum();
        let data = g.to_data().unwrap();
        let json = serde_json::to_string(&data).unwrap();
        let back: GameData = serde_json::from_str(&json).unwrap();
        let g2 = back.build().unwrap();
        assert_eq!(
            g.pseudo_gradient(&[0.3, 0.7]).unwrap(),
            g2.pseudo_gradient(&[0.3, 0.7]).unwrap()
        );
    }
}
