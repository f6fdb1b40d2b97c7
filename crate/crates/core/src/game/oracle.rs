//! Active-set KKT oracle for quadratic games.
//!
//! Candidates are enumerated by increasing cardinality and lexicographically
//! within a cardinality; the first candidate with nonnegative multipliers on
//! its active rows and satisfied inactive rows is returned. With a common
//! multiplier across agents this yields the variational GNE.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{AgentConstraint, Game};
use crate::error::{Error, Result};
use crate::graph::GraphTopology;
use crate::linalg;

/// Feasibility and sign tolerance used when accepting a candidate.
pub const ORACLE_FEAS_TOL: f64 = 1e-9;

/// Pivot ratio below which a candidate system counts as singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-12;

/// Hard cap on enumerated candidates.
const MAX_CANDIDATES: u64 = 50_000_000;

const NEWTON_MAX_ITERS: usize = 60;

/// A variational GNE together with multipliers and consensus auxiliaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktPoint {
    pub x_star: Vec<f64>,
    /// `1_N ⊗ λ_c`.
    pub lambda_star: Vec<f64>,
    /// Auxiliary consensus variable solving `G(x*) − L z* ∈ N(λ*)`.
    pub z_star: Vec<f64>,
    /// Common multiplier `λ_c ∈ R^m`.
    pub lambda_common: Vec<f64>,
    pub active_set: Vec<bool>,
    /// Set when a candidate system up to the accepted cardinality was
    /// singular, so the returned point need not be the only solution.
    pub non_unique: bool,
}

impl KktPoint {
    /// Builds `λ*` and `z*` for a given primal point and common multiplier.
    ///
    /// The residual `g_k(x*)` of every row is shared equally among agents
    /// (zero on active rows) and `z*` is the minimum-norm solution of
    /// `L z = G(x*) − ζ`.
    pub fn assemble(
        game: &Game,
        graph: &GraphTopology,
        x_star: Vec<f64>,
        lambda_common: Vec<f64>,
        active_set: Vec<bool>,
        non_unique: bool,
    ) -> Result<Self> {
        let (players, m) = (game.num_players(), game.m());
        if graph.num_nodes() != players {
            return Err(Error::DimensionMismatch {
                what: "graph nodes",
                expected: players,
                got: graph.num_nodes(),
            });
        }
        crate::error::check_len("common multiplier", m, lambda_common.len())?;
        let (stacked, _) = game.stacked_constraints(&x_star)?;
        let agg = game.aggregate_constraint(&x_star)?;
        let pinv = graph.laplacian_pinv();
        let mut z = vec![0.0; players * m];
        for k in 0..m {
            let share = if active_set.get(k).copied().unwrap_or(false) {
                0.0
            } else {
                agg[k].min(0.0) / players as f64
            };
            let rhs = DVector::from_fn(players, |i, _| stacked[i * m + k] - share);
            let zk = &pinv * rhs;
            for i in 0..players {
                z[i * m + k] = zk[i];
            }
        }
        let lambda_star = (0..players)
            .flat_map(|_| lambda_common.iter().copied())
            .collect();
        Ok(Self {
            x_star,
            lambda_star,
            z_star: z,
            lambda_common,
            active_set,
            non_unique,
        })
    }
}

/// Exact oracle for linear-quadratic games with affine coupling.
///
/// `z*` depends on the Laplacian, hence the graph argument.
pub fn solve_gne_oracle(game: &Game, graph: &GraphTopology) -> Result<KktPoint> {
    let lq = game.linear_quadratic_form().ok_or_else(|| {
        Error::Inapplicable("the oracle needs quadratic costs and affine constraints".into())
    })?;
    let (x, lam, active, non_unique) = match schur_data(&lq.jacobian, &lq.offset, &lq.constraint_matrix, &lq.constraint_offset) {
        Some(data) => enumerate_schur(&data)?,
        None => enumerate(game, None)?,
    };
    KktPoint::assemble(game, graph, x, lam, active, non_unique)
}

/// Oracle variant for quadratic costs with convex quadratic constraint rows:
/// each candidate active set is solved by Newton's method on its KKT system.
pub fn solve_gne_newton(game: &Game, graph: &GraphTopology) -> Result<KktPoint> {
    if game.affine_pseudo_gradient().is_none() || !game.has_quadratic_constraints() {
        return Err(Error::Inapplicable(
            "the Newton oracle needs quadratic costs and quadratic constraint rows".into(),
        ));
    }
    let (x, lam, active, non_unique) = enumerate(game, None)?;
    KktPoint::assemble(game, graph, x, lam, active, non_unique)
}

/// Lexicographic `k`-subsets of `0..m`.
struct Combinations {
    idx: Vec<usize>,
    m: usize,
    first: bool,
}

impl Combinations {
    fn new(m: usize, k: usize) -> Self {
        Self {
            idx: (0..k).collect(),
            m,
            first: true,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        let k = self.idx.len();
        if self.first {
            self.first = false;
            return (k <= self.m).then_some(&self.idx[..]);
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.m - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx[..]);
            }
        }
        None
    }
}

fn lu_is_singular(lu: &nalgebra::linalg::FullPivLU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> bool {
    let u = lu.u();
    let d = u.nrows().min(u.ncols());
    if d == 0 {
        return false;
    }
    let diag: Vec<f64> = (0..d).map(|i| u[(i, i)].abs()).collect();
    let max = diag.iter().fold(0.0_f64, |a, &b| a.max(b));
    let min = diag.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    max == 0.0 || min <= SINGULAR_PIVOT_RATIO * max
}

struct SchurData {
    m_lu: nalgebra::linalg::FullPivLU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    f: DVector<f64>,
    a: DMatrix<f64>,
    /// `A M⁻¹ Aᵀ`.
    w: DMatrix<f64>,
    /// `c − A M⁻¹ f`, the constraint value at the unconstrained point.
    b: DVector<f64>,
}

/// Reduces the KKT system onto the multipliers when `M` is invertible.
fn schur_data(
    m: &DMatrix<f64>,
    f: &DVector<f64>,
    a: &DMatrix<f64>,
    c: &DVector<f64>,
) -> Option<SchurData> {
    let lu = m.clone().full_piv_lu();
    if lu_is_singular(&lu) {
        return None;
    }
    let minv_at = lu.solve(&a.transpose())?;
    let minv_f = lu.solve(f)?;
    Some(SchurData {
        w: a * minv_at,
        b: c - a * minv_f,
        m_lu: lu,
        f: f.clone(),
        a: a.clone(),
    })
}

fn enumerate_schur(d: &SchurData) -> Result<(Vec<f64>, Vec<f64>, Vec<bool>, bool)> {
    let m = d.b.len();
    let n = d.f.len();
    let mut singular_seen = false;
    let mut count: u64 = 0;
    for k in 0..=m.min(n) {
        let mut combos = Combinations::new(m, k);
        while let Some(set) = combos.next() {
            count += 1;
            if count > MAX_CANDIDATES {
                return Err(Error::Infeasible("active-set enumeration budget exhausted".into()));
            }
            let lam_s = if k == 0 {
                DVector::zeros(0)
            } else {
                let wss = DMatrix::from_fn(k, k, |r, c| d.w[(set[r], set[c])]);
                let bs = DVector::from_fn(k, |r, _| d.b[set[r]]);
                let lu = wss.full_piv_lu();
                if lu_is_singular(&lu) {
                    singular_seen = true;
                    continue;
                }
                match lu.solve(&bs) {
                    Some(l) => l,
                    None => {
                        singular_seen = true;
                        continue;
                    }
                }
            };
            if lam_s.iter().any(|&l| l < -ORACLE_FEAS_TOL) {
                continue;
            }
            let mut active = vec![false; m];
            for &s in set {
                active[s] = true;
            }
            let feasible = (0..m).filter(|j| !active[*j]).all(|j| {
                let g = d.b[j] - (0..k).map(|r| d.w[(j, set[r])] * lam_s[r]).sum::<f64>();
                g <= ORACLE_FEAS_TOL
            });
            if !feasible {
                continue;
            }
            let mut lam = vec![0.0; m];
            for (r, &s) in set.iter().enumerate() {
                lam[s] = lam_s[r].max(0.0);
            }
            let lam_v = DVector::from_column_slice(&lam);
            let rhs = -(&d.f + d.a.tr_mul(&lam_v));
            let x = d.m_lu.solve(&rhs).expect("M is invertible");
            return Ok((x.iter().copied().collect(), lam, active, singular_seen));
        }
    }
    Err(Error::Infeasible("no active set satisfies the KKT conditions".into()))
}

/// Aggregate rows `g_k`, their gradients and Hessians over the full profile.
fn aggregate_rows(game: &Game, x: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let (m, n) = (game.m(), game.n());
    let mut g = DVector::zeros(m);
    let mut jac = DMatrix::zeros(m, n);
    for i in 0..game.num_players() {
        let r = game.block(i);
        g += game.agent_constraint(i, &x[r.clone()]).expect("dims");
        jac.columns_mut(r.start, r.len())
            .copy_from(&game.agent_jacobian(i, &x[r.clone()]).expect("dims"));
    }
    (g, jac)
}

fn row_hessian(game: &Game, k: usize) -> Option<DMatrix<f64>> {
    let n = game.n();
    let mut h = DMatrix::zeros(n, n);
    let mut any = false;
    for i in 0..game.num_players() {
        let AgentConstraint::Quadratic(q) = &game.constraints()[i] else {
            return None;
        };
        if let Some(hk) = &q.hessians[k] {
            let r = game.block(i);
            h.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(hk);
            any = true;
        }
    }
    any.then_some(h)
}

enum Candidate {
    Solved(DVector<f64>, DVector<f64>),
    Singular,
    Failed,
}

fn solve_candidate(
    game: &Game,
    jac_f: &DMatrix<f64>,
    hessians: &[Option<DMatrix<f64>>],
    set: &[usize],
    x0: &DVector<f64>,
) -> Candidate {
    let (n, k) = (game.n(), set.len());
    let mut x = x0.clone();
    let mut lam = DVector::<f64>::zeros(k);
    for _ in 0..NEWTON_MAX_ITERS {
        let (g, jac) = aggregate_rows(game, x.as_slice());
        let js = DMatrix::from_fn(k, n, |r, c| jac[(set[r], c)]);
        let mut res = DVector::zeros(n + k);
        let stat = game.pseudo_gradient_unchecked(x.as_slice()) + js.tr_mul(&lam);
        res.rows_mut(0, n).copy_from(&stat);
        for r in 0..k {
            res[n + r] = g[set[r]];
        }
        let scale = 1.0 + linalg::inf_norm(&x) + linalg::inf_norm(&lam);
        if linalg::inf_norm(&res) <= 1e-13 * scale {
            return Candidate::Solved(x, lam);
        }
        let mut kkt = DMatrix::zeros(n + k, n + k);
        let mut top = jac_f.clone();
        for (r, &s) in set.iter().enumerate() {
            if let Some(h) = &hessians[s] {
                top += h * lam[r];
            }
        }
        kkt.view_mut((0, 0), (n, n)).copy_from(&top);
        kkt.view_mut((0, n), (n, k)).copy_from(&js.transpose());
        kkt.view_mut((n, 0), (k, n)).copy_from(&js);
        let lu = kkt.full_piv_lu();
        if lu_is_singular(&lu) {
            return Candidate::Singular;
        }
        let Some(step) = lu.solve(&(-res)) else {
            return Candidate::Singular;
        };
        x += step.rows(0, n);
        lam += step.rows(n, k);
        if !x.iter().chain(lam.iter()).all(|v| v.is_finite()) {
            return Candidate::Failed;
        }
    }
    Candidate::Failed
}

fn enumerate(
    game: &Game,
    start: Option<&DVector<f64>>,
) -> Result<(Vec<f64>, Vec<f64>, Vec<bool>, bool)> {
    let (jac_f, f) = game
        .affine_pseudo_gradient()
        .map(|(m, f)| (m.clone(), f.clone()))
        .expect("checked by caller");
    let (m, n) = (game.m(), game.n());
    let hessians: Vec<_> = (0..m).map(|k| row_hessian(game, k)).collect();
    let x0 = match start {
        Some(s) => s.clone(),
        None => jac_f
            .clone()
            .full_piv_lu()
            .solve(&(-&f))
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .unwrap_or_else(|| DVector::zeros(n)),
    };
    let mut singular_seen = false;
    let mut count: u64 = 0;
    for k in 0..=m.min(n) {
        let mut combos = Combinations::new(m, k);
        while let Some(set) = combos.next() {
            count += 1;
            if count > MAX_CANDIDATES {
                return Err(Error::Infeasible("active-set enumeration budget exhausted".into()));
            }
            let (x, lam_s) = match solve_candidate(game, &jac_f, &hessians, set, &x0) {
                Candidate::Solved(x, l) => (x, l),
                Candidate::Singular => {
                    singular_seen = true;
                    continue;
                }
                Candidate::Failed => continue,
            };
            if lam_s.iter().any(|&l| l < -ORACLE_FEAS_TOL) {
                continue;
            }
            let (g, _) = aggregate_rows(game, x.as_slice());
            let mut active = vec![false; m];
            for &s in set {
                active[s] = true;
            }
            if (0..m).any(|j| !active[j] && g[j] > ORACLE_FEAS_TOL) {
                continue;
            }
            let mut lam = vec![0.0; m];
            for (r, &s) in set.iter().enumerate() {
                lam[s] = lam_s[r].max(0.0);
            }
            return Ok((x.iter().copied().collect(), lam, active, singular_seen));
        }
    }
    Err(Error::Infeasible("no active set satisfies the KKT conditions".into()))
}
