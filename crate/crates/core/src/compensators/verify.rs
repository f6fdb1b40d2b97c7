//! Sampled frequency-domain and algebraic checks for [`LtiBlock`]s.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LtiBlock;
use crate::error::{Error, Result};
use crate::linalg;

/// Eigenvalues must have real part below `-HURWITZ_MARGIN`.
pub const HURWITZ_MARGIN: f64 = 1e-10;
const PR_TOL: f64 = 1e-9;
const SPR_MARGIN: f64 = 1e-9;
const OSP_MIN_DELTA: f64 = 1e-6;
const DC_TOL: f64 = 1e-10;
const REGULATOR_TOL: f64 = 1e-9;
const CERT_TOL: f64 = 1e-9;

/// Log-spaced sample frequencies in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid(Vec<f64>);

impl FrequencyGrid {
    pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && count >= 2) {
            return Err(Error::InvalidParameter(format!(
                "bad frequency grid [{lo}, {hi}] with {count} points"
            )));
        }
        let (l, h) = (lo.log10(), hi.log10());
        Ok(Self(
            (0..count)
                .map(|i| 10f64.powf(l + (h - l) * i as f64 / (count - 1) as f64))
                .collect(),
        ))
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("grid needs finite nonnegative points".into()));
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }
}

impl Default for FrequencyGrid {
    /// 400 points in `[1e-4, 1e4]`.
    fn default() -> Self {
        Self::log_spaced(1e-4, 1e4, 400).expect("valid default grid")
    }
}

fn eigenvalues(a: &DMatrix<f64>) -> Vec<Complex64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    a.complex_eigenvalues().iter().copied().collect()
}

pub fn check_hurwitz(block: &LtiBlock) -> bool {
    eigenvalues(block.a()).iter().all(|z| z.re < -HURWITZ_MARGIN)
}

fn hermitian_min_eig(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

/// `G + G*` at each grid point that is not (numerically) a pole.
fn sampled_responses(block: &LtiBlock, grid: &FrequencyGrid) -> Vec<(f64, DMatrix<Complex64>)> {
    let poles = eigenvalues(block.a());
    let mut out = Vec::with_capacity(grid.points().len());
    for &w in grid.points() {
        let near_pole = poles
            .iter()
            .any(|p| (Complex64::new(0.0, w) - p).norm() <= 1e-9 * w.max(1.0));
        let resp = if near_pole { None } else { block.frequency_response(w) };
        match resp {
            Some(g) => out.push((w, g)),
            None => log::warn!("frequency {w} rad/s is a pole of the block; point skipped"),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrReport {
    pub pr: bool,
    pub spr: bool,
    /// Minimum eigenvalue of `G(jω) + G*(jω)` over the evaluated points.
    pub min_eig_over_grid: f64,
    pub skipped_points: usize,
}

/// Sampled positive-realness test (necessary conditions on a grid plus the
/// high-frequency limit).
pub fn check_positive_real(block: &LtiBlock, grid: &FrequencyGrid) -> PrReport {
    let samples = sampled_responses(block, grid);
    let skipped = grid.points().len() - samples.len();
    let min_eig = samples
        .iter()
        .map(|(_, g)| hermitian_min_eig(&(g + g.adjoint())))
        .fold(f64::INFINITY, f64::min);
    let poles_ok = eigenvalues(block.a()).iter().all(|z| z.re <= HURWITZ_MARGIN);
    let pr = poles_ok && !samples.is_empty() && min_eig >= -PR_TOL;

    let d = block.d();
    let dd = d + d.transpose();
    let high_freq = if linalg::min_sym_eigenvalue(&dd) > SPR_MARGIN {
        true
    } else if block.state_dim() > 0 {
        // ω²(G + G*) → −(CAB + (CAB)ᵀ) when D = 0 and CB is symmetric.
        let cb = block.c() * block.b();
        let cab = block.c() * block.a() * block.b();
        (&cb - cb.transpose()).amax() <= 1e-12
            && dd.amax() == 0.0
            && linalg::min_sym_eigenvalue(&(-(&cab + cab.transpose()))) > SPR_MARGIN
    } else {
        false
    };
    let spr = pr && check_hurwitz(block) && min_eig > SPR_MARGIN && high_freq;
    PrReport {
        pr,
        spr,
        min_eig_over_grid: min_eig,
        skipped_points: skipped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OspReport {
    pub holds: bool,
    /// Largest `δ` with `G + G* ⪰ 2δ G*G` over the grid and at `ω → ∞`.
    pub delta: f64,
}

/// Output strict passivity: bisection on `δ` over the sampled responses.
pub fn check_output_strict_passivity(block: &LtiBlock, grid: &FrequencyGrid) -> OspReport {
    let mut samples: Vec<DMatrix<Complex64>> = sampled_responses(block, grid)
        .into_iter()
        .map(|(_, g)| g)
        .collect();
    samples.push(block.d().map(|v| Complex64::new(v, 0.0)));
    let poles_ok = eigenvalues(block.a()).iter().all(|z| z.re <= HURWITZ_MARGIN);

    let feasible = |delta: f64| {
        samples.iter().all(|g| {
            let gh = g.adjoint();
            let m = g + &gh - (&gh * g) * Complex64::new(2.0 * delta, 0.0);
            hermitian_min_eig(&m) >= -PR_TOL
        })
    };
    if !poles_ok || !feasible(0.0) {
        return OspReport {
            holds: false,
            delta: 0.0,
        };
    }
    let mut hi = 1.0;
    while feasible(hi) && hi < 1e6 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    if feasible(hi) {
        lo = hi;
    } else {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    OspReport {
        holds: lo >= OSP_MIN_DELTA,
        delta: lo,
    }
}

/// `‖−CA⁻¹B + D‖_∞ < 1e-10`. A singular `A` leaves the DC gain undefined.
pub fn check_zero_dc_gain(block: &LtiBlock) -> Result<bool> {
    let gain = if block.state_dim() == 0 {
        block.d().clone()
    } else {
        let lu = block.a().clone().full_piv_lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].abs()).collect();
        let max = diag.iter().fold(0.0_f64, |a, &b| a.max(b));
        if max == 0.0 || diag.iter().any(|&v| v <= 1e-12 * max) {
            return Err(Error::Inapplicable("A is singular; the DC gain is undefined".into()));
        }
        let ainv_b = lu.solve(block.b()).expect("A is invertible");
        block.d() - block.c() * ainv_b
    };
    Ok(linalg::mat_inf_norm(&gain) < DC_TOL)
}

/// Solves `AΠ = 0`, `CΠ = I` by least squares on the stacked system.
/// `nonnegative` additionally requires `Π ≥ 0` (multiplier blocks).
pub fn solve_regulator_equations(block: &LtiBlock, nonnegative: bool) -> Result<DMatrix<f64>> {
    let (p, k) = (block.state_dim(), block.io_dim());
    if p == 0 {
        return Err(Error::Infeasible("a static block has no regulator solution".into()));
    }
    let mut lhs = DMatrix::zeros(p + k, p);
    lhs.rows_mut(0, p).copy_from(block.a());
    lhs.rows_mut(p, k).copy_from(block.c());
    let mut rhs = DMatrix::zeros(p + k, k);
    rhs.view_mut((p, 0), (k, k)).copy_from(&DMatrix::identity(k, k));
    let pi = lhs
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Infeasible(format!("regulator least squares failed: {e}")))?;
    let residual = linalg::mat_inf_norm(&(&lhs * &pi - &rhs));
    if !(residual < REGULATOR_TOL) {
        return Err(Error::Infeasible(format!(
            "regulator equations have residual {residual:.3e}"
        )));
    }
    if linalg::rank(&pi, 1e-10) < k {
        return Err(Error::Infeasible("regulator solution is rank deficient".into()));
    }
    if nonnegative && pi.iter().any(|&v| v < -REGULATOR_TOL) {
        return Err(Error::Infeasible("multiplier regulator solution has negative entries".into()));
    }
    // Exact zeros print cleaner and keep Π ≥ 0 checks stable.
    Ok(pi.map(|v| if v.abs() < 1e-15 { 0.0 } else { v }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub holds: bool,
    /// Largest eigenvalue of the dissipation LMI (should be `<= 0`).
    pub lmi_max_eig: f64,
    /// `‖PB − Cᵀ‖` (relevant when `D = 0`).
    pub pb_residual: f64,
}

/// Checks `½ xᵀPx` against `Ṡ <= uᵀy − δ‖y‖²` via the matrix inequality
/// `[[AᵀP + PA + 2δCᵀC, PB − Cᵀ + 2δCᵀD], [·, −(D + Dᵀ) + 2δDᵀD]] ⪯ 0`.
pub fn check_storage_certificate(block: &LtiBlock, delta: f64) -> Result<CertificateReport> {
    let p = block
        .storage()
        .ok_or_else(|| Error::Inapplicable("block carries no storage matrix".into()))?;
    let (a, b, c, d) = (block.a(), block.b(), block.c(), block.d());
    let (ns, k) = (block.state_dim(), block.io_dim());
    let tl = a.transpose() * p + p * a + c.transpose() * c * (2.0 * delta);
    let tr = p * b - c.transpose() + c.transpose() * d * (2.0 * delta);
    let br = -(d + d.transpose()) + d.transpose() * d * (2.0 * delta);
    let mut lmi = DMatrix::zeros(ns + k, ns + k);
    lmi.view_mut((0, 0), (ns, ns)).copy_from(&tl);
    lmi.view_mut((0, ns), (ns, k)).copy_from(&tr);
    lmi.view_mut((ns, 0), (k, ns)).copy_from(&tr.transpose());
    lmi.view_mut((ns, ns), (k, k)).copy_from(&br);
    let lmi_max_eig = linalg::max_sym_eigenvalue(&lmi);
    let pb_residual = linalg::mat_inf_norm(&(p * b - c.transpose()));
    let pb_ok = block.has_feedthrough() || pb_residual < CERT_TOL;
    Ok(CertificateReport {
        holds: lmi_max_eig <= CERT_TOL && pb_ok,
        lmi_max_eig,
        pb_residual,
    })
}
