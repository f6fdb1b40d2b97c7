//! Constructors for the compensators used by the benchmark dynamics.

use nalgebra::DMatrix;

use super::{LtiBlock, ProjectedLtiBlock};
use crate::error::{Error, Result};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidParameter("block dimension must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn eye(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n)
}

/// `I/s` with storage `½‖x‖²`.
pub fn integrator(dim: usize) -> Result<LtiBlock> {
    check_dim(dim)?;
    LtiBlock::new(DMatrix::zeros(dim, dim), eye(dim), eye(dim), DMatrix::zeros(dim, dim))?
        .with_storage(eye(dim))
}

/// `I/(s + a)`: `A = −aI, B = C = I, D = 0`, storage `P = I`.
pub fn pfc_first_order(a: f64, dim: usize) -> Result<LtiBlock> {
    positive("a", a)?;
    check_dim(dim)?;
    LtiBlock::new(-eye(dim) * a, eye(dim), eye(dim), DMatrix::zeros(dim, dim))?
        .with_storage(eye(dim))
}

/// Diagonal projected lag `[b_k²/(s + a_k)]⁺` per multiplier row.
pub fn pfc_lambda_block(a_bar: &[f64], b_bar: &[f64]) -> Result<ProjectedLtiBlock> {
    if a_bar.is_empty() || a_bar.len() != b_bar.len() {
        return Err(Error::InvalidParameter(
            "a_bar and b_bar must be nonempty and of equal length".into(),
        ));
    }
    for (&a, &b) in a_bar.iter().zip(b_bar) {
        positive("a_bar entry", a)?;
        positive("b_bar entry", b)?;
    }
    let r = a_bar.len();
    let a = DMatrix::from_fn(r, r, |i, j| if i == j { -a_bar[i] } else { 0.0 });
    let b = DMatrix::from_fn(r, r, |i, j| if i == j { b_bar[i] } else { 0.0 });
    ProjectedLtiBlock::new(LtiBlock::new(a, b.clone(), b.transpose(), DMatrix::zeros(r, r))?)
}

/// `βs/(s + α) I`: `A = −αI, B = αI, C = −βI, D = βI`.
///
/// The storage `P = (β/α) I` certifies output strict passivity with
/// `δ = 1/β`.
pub fn ofc_heavy_anchor(alpha: f64, beta: f64, dim: usize) -> Result<LtiBlock> {
    positive("alpha", alpha)?;
    positive("beta", beta)?;
    check_dim(dim)?;
    LtiBlock::new(-eye(dim) * alpha, eye(dim) * alpha, -eye(dim) * beta, eye(dim) * beta)?
        .with_storage(eye(dim) * (beta / alpha))
}

/// `s/(s² + s + 1) I` with `A = [[0, I], [−I, −I]]`, `B = [0; I]`,
/// `C = [0, I]`, storage `P = I` (`δ = 1`).
pub fn ofc_nd(dim: usize) -> Result<LtiBlock> {
    check_dim(dim)?;
    let mut a = DMatrix::zeros(2 * dim, 2 * dim);
    let mut b = DMatrix::zeros(2 * dim, dim);
    let mut c = DMatrix::zeros(dim, 2 * dim);
    for i in 0..dim {
        a[(i, dim + i)] = 1.0;
        a[(dim + i, i)] = -1.0;
        a[(dim + i, dim + i)] = -1.0;
        b[(dim + i, i)] = 1.0;
        c[(i, dim + i)] = 1.0;
    }
    // w ≡ 0 forces ξ₂ ≡ 0, then ξ̇₁ = ξ₂ = 0 and ξ̇₂ = −ξ₁ + x = 0.
    Ok(LtiBlock::new(a, b, c, DMatrix::zeros(dim, dim))?
        .with_storage(eye(2 * dim))?
        .with_zero_output_attestation())
}

/// Passivated second-order integrator `A = [[0, I], [0, −I/b]]`,
/// `B = [0; I]`, `C = [I, bI]`.
///
/// The realization has transfer function `b/s` with one cancelled mode, so
/// the only storage satisfying `PB = Cᵀ` is `P = [[I/b, I], [I, bI]]`,
/// which is positive semidefinite but singular.
pub fn second_order_agent_block(b: f64, dim: usize) -> Result<LtiBlock> {
    positive("b", b)?;
    check_dim(dim)?;
    let mut a = DMatrix::zeros(2 * dim, 2 * dim);
    let mut bm = DMatrix::zeros(2 * dim, dim);
    let mut c = DMatrix::zeros(dim, 2 * dim);
    let mut p = DMatrix::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        a[(i, dim + i)] = 1.0;
        a[(dim + i, dim + i)] = -1.0 / b;
        bm[(dim + i, i)] = 1.0;
        c[(i, i)] = 1.0;
        c[(i, dim + i)] = b;
        p[(i, i)] = 1.0 / b;
        p[(i, dim + i)] = 1.0;
        p[(dim + i, i)] = 1.0;
        p[(dim + i, dim + i)] = b;
    }
    LtiBlock::new(a, bm, c, DMatrix::zeros(dim, dim))?.with_storage(p)
}

/// Deliberately unstable PFC-style block (`A = +I`) carrying the storage
/// `P = I`; used to show that dissipation monitoring catches it.
pub fn non_passive_pfc_fixture(dim: usize) -> Result<LtiBlock> {
    check_dim(dim)?;
    LtiBlock::new(eye(dim), eye(dim), eye(dim), DMatrix::zeros(dim, dim))?
        .with_storage(eye(dim))
}

/// Heavy-anchor structure with a negative gain (`β = −1`): active rather
/// than passive, with the same formal storage as its passive counterpart.
pub fn non_passive_ofc_fixture(dim: usize) -> Result<LtiBlock> {
    check_dim(dim)?;
    let (alpha, beta) = (1.0, -1.0);
    LtiBlock::new(-eye(dim) * alpha, eye(dim) * alpha, -eye(dim) * beta, eye(dim) * beta)?
        .with_storage(eye(dim))
}
