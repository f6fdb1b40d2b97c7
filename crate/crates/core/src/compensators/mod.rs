//! LTI compensator blocks `ẋ = Ax + Bu, y = Cx + Du` and their verification.

mod canonical;
mod verify;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub use canonical::{
    integrator, non_passive_ofc_fixture, non_passive_pfc_fixture, ofc_heavy_anchor, ofc_nd,
    pfc_first_order, pfc_lambda_block, second_order_agent_block,
};
pub use verify::{
    check_hurwitz, check_output_strict_passivity, check_positive_real, check_storage_certificate,
    check_zero_dc_gain, solve_regulator_equations, CertificateReport, FrequencyGrid, OspReport,
    PrReport, HURWITZ_MARGIN,
};

const RANK_TOL: f64 = 1e-10;

/// State-space block with an optional quadratic storage certificate `½ xᵀPx`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiBlock {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
    storage: Option<DMatrix<f64>>,
    /// Analytic attestation that a zero output on an interval forces a
    /// constant state. Only set by constructors that prove it.
    zero_output_constant_state: bool,
}

impl LtiBlock {
    /// Validates shapes and the rank conditions on `B` and `C`.
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
    ) -> Result<Self> {
        let p = a.nrows();
        if a.ncols() != p {
            return Err(Error::InvalidInput("A must be square".into()));
        }
        let k = d.nrows();
        if d.ncols() != k || b.shape() != (p, k) || c.shape() != (k, p) {
            return Err(Error::InvalidInput(format!(
                "inconsistent block shapes: A {:?}, B {:?}, C {:?}, D {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        if k == 0 {
            return Err(Error::InvalidInput("a block needs at least one input".into()));
        }
        if [&a, &b, &c, &d].iter().any(|m| m.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidInput("block matrices must be finite".into()));
        }
        if p > 0 {
            if linalg::rank(&b, RANK_TOL) < k {
                return Err(Error::InvalidInput("B must have full column rank".into()));
            }
            if linalg::rank(&c, RANK_TOL) < k {
                return Err(Error::InvalidInput("C must have full row rank".into()));
            }
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            storage: None,
            zero_output_constant_state: false,
        })
    }

    /// Attaches a storage matrix; it must be symmetric positive semidefinite.
    pub fn with_storage(mut self, p: DMatrix<f64>) -> Result<Self> {
        let n = self.state_dim();
        if p.shape() != (n, n) {
            return Err(Error::InvalidInput("storage matrix must match the state".into()));
        }
        if (&p - p.transpose()).amax() > 1e-12 * (1.0 + p.amax()) {
            return Err(Error::InvalidInput("storage matrix must be symmetric".into()));
        }
        if n > 0 && linalg::min_sym_eigenvalue(&p) < -1e-12 {
            return Err(Error::InvalidInput(
                "storage matrix must be positive semidefinite".into(),
            ));
        }
        self.storage = Some(p);
        Ok(self)
    }

    pub(crate) fn with_zero_output_attestation(mut self) -> Self {
        self.zero_output_constant_state = true;
        self
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }
    pub fn storage(&self) -> Option<&DMatrix<f64>> {
        self.storage.as_ref()
    }

    /// Whether the storage matrix is present and positive definite.
    pub fn storage_is_definite(&self) -> bool {
        match &self.storage {
            Some(p) => self.state_dim() == 0 || linalg::min_sym_eigenvalue(p) > 1e-12,
            None => false,
        }
    }

    pub fn zero_output_forces_constant_state(&self) -> bool {
        self.zero_output_constant_state
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    /// Input and output dimension (blocks are square).
    pub fn io_dim(&self) -> usize {
        self.d.nrows()
    }

    pub fn has_feedthrough(&self) -> bool {
        self.d.iter().any(|&v| v != 0.0)
    }

    /// Whether the block is the plain integrator `A = 0, B = C = I, D = 0`.
    pub fn is_integrator(&self) -> bool {
        let k = self.io_dim();
        self.state_dim() == k
            && self.a.iter().all(|&v| v == 0.0)
            && self.b == DMatrix::identity(k, k)
            && self.c == DMatrix::identity(k, k)
            && !self.has_feedthrough()
    }

    /// `G(jω) = C (jωI − A)⁻¹ B + D`; `None` when `jω` is numerically a pole.
    pub fn frequency_response(&self, omega: f64) -> Option<DMatrix<Complex64>> {
        let p = self.state_dim();
        let k = self.io_dim();
        let d = self.d.map(|v| Complex64::new(v, 0.0));
        if p == 0 {
            return Some(d);
        }
        let mut m = self.a.map(|v| Complex64::new(-v, 0.0));
        for i in 0..p {
            m[(i, i)] += Complex64::new(0.0, omega);
        }
        let b = self.b.map(|v| Complex64::new(v, 0.0));
        let sol = m.lu().solve(&b)?;
        if sol.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
        let out = self.c.map(|v| Complex64::new(v, 0.0)) * sol + d;
        debug_assert_eq!(out.shape(), (k, k));
        Some(out)
    }

    /// `(ẋ, y)` for a state and input.
    pub fn evaluate(&self, x: &DVector<f64>, u: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        (&self.a * x + &self.b * u, &self.c * x + &self.d * u)
    }

    pub fn to_data(&self) -> BlockData {
        BlockData {
            a: linalg::to_rows(&self.a),
            b: linalg::to_rows(&self.b),
            c: linalg::to_rows(&self.c),
            d: linalg::to_rows(&self.d),
            storage: self.storage.as_ref().map(linalg::to_rows),
        }
    }
}

/// Serialized block: matrices as row-major nested arrays. An empty `a`
/// denotes a static gain `y = D u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockData {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
    #[serde(default)]
    pub storage: Option<Vec<Vec<f64>>>,
}

impl BlockData {
    pub fn build(&self) -> Result<LtiBlock> {
        let d = mat(&self.d, None, "D")?;
        let k = d.nrows();
        let a = mat(&self.a, Some(0), "A")?;
        let p = a.nrows();
        let b = if p == 0 { DMatrix::zeros(0, k) } else { mat(&self.b, None, "B")? };
        let c = if p == 0 { DMatrix::zeros(k, 0) } else { mat(&self.c, None, "C")? };
        let block = LtiBlock::new(a, b, c, d)?;
        match &self.storage {
            Some(s) => block.with_storage(mat(s, Some(p), "storage")?),
            None => Ok(block),
        }
    }
}

fn mat(rows: &[Vec<f64>], empty_cols: Option<usize>, what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return match empty_cols {
            Some(c) => Ok(DMatrix::zeros(0, c)),
            None => Err(Error::InvalidInput(format!("matrix {what} is empty"))),
        };
    }
    linalg::from_rows(rows).ok_or_else(|| Error::InvalidInput(format!("matrix {what} is ragged")))
}

/// A block `[G(s)]⁺` run under a nonnegativity projection: the state obeys
/// `τ̇ = Π(τ, Aτ + Bu)` and the output is `max(0, Cτ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedLtiBlock {
    inner: LtiBlock,
}

impl ProjectedLtiBlock {
    /// Requires `D = 0`, `C = Bᵀ`, `B ≥ 0` with a positive entry in every
    /// column and a negative semidefinite symmetric part of `A`. These give
    /// passivity with storage `½‖τ‖²`.
    pub fn new(inner: LtiBlock) -> Result<Self> {
        if inner.has_feedthrough() {
            return Err(Error::InvalidInput("projected blocks cannot have feedthrough".into()));
        }
        if inner.state_dim() == 0 {
            return Err(Error::InvalidInput("projected blocks need a state".into()));
        }
        if (inner.c() - inner.b().transpose()).amax() > 0.0 {
            return Err(Error::InvalidInput("projected blocks need C = Bᵀ".into()));
        }
        if inner.b().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidInput("projected blocks need B >= 0".into()));
        }
        for col in inner.b().column_iter() {
            if !col.iter().any(|&v| v > 0.0) {
                return Err(Error::InvalidInput(
                    "every input must drive a positive entry of B".into(),
                ));
            }
        }
        if linalg::max_sym_eigenvalue(inner.a()) > 1e-12 {
            return Err(Error::InvalidInput(
                "projected blocks need A + Aᵀ negative semidefinite".into(),
            ));
        }
        let p = inner.state_dim();
        let inner = inner.with_storage(DMatrix::identity(p, p))?;
        Ok(Self { inner })
    }

    pub fn inner(&self) -> &LtiBlock {
        &self.inner
    }

    pub fn into_inner(self) -> LtiBlock {
        self.inner
    }

    /// `max(0, Cτ)`.
    pub fn output(&self, tau: &DVector<f64>) -> DVector<f64> {
        (self.inner.c() * tau).map(|v| v.max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_conditions_enforced() {
        let a = DMatrix::from_element(2, 2, 0.0);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let c = DMatrix::identity(2, 2);
        assert!(LtiBlock::new(a, b, c, DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn static_block_from_data() {
        let data = BlockData {
            a: vec![],
            b: vec![],
            c: vec![],
            d: vec![vec![1.0]],
            storage: None,
        };
        let blk = data.build().unwrap();
        assert_eq!(blk.state_dim(), 0);
        assert_eq!(blk.frequency_response(3.0).unwrap()[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn projected_structure() {
        let blk = pfc_lambda_block(&[1.0, 2.0, 3.0], &[0.5, 1.0, 2.0]).unwrap();
        assert!(blk.inner().a().iter().all(|&v| v <= 0.0));
        let bad = LtiBlock::new(
            DMatrix::identity(1, 1),
            DMatrix::identity(1, 1),
            DMatrix::identity(1, 1),
            DMatrix::zeros(1, 1),
        )
        .unwrap();
        assert!(ProjectedLtiBlock::new(bad).is_err());
    }
}
