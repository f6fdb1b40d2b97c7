//! Projection machinery for the nonnegative orthant (and axis-aligned boxes).
//!
//! The differentiated projection `Π(x, v)` is the projection of a velocity `v`
//! onto the tangent cone at `x`. For the orthant it acts componentwise: interior
//! components pass through, boundary components are clipped at zero from below.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// A component with `x_k <= BOUNDARY_TOL` counts as sitting on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// A point of the closed nonnegative orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthantPoint(Vec<f64>);

impl OrthantPoint {
    pub fn new(value: Vec<f64>) -> Result<Self> {
        check_nonnegative(&value)?;
        Ok(Self(value))
    }

    /// Euclidean projection of an arbitrary vector onto the orthant.
    pub fn project(value: &[f64]) -> Self {
        Self(value.iter().map(|v| v.max(0.0)).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Advances along `v` for time `h` and projects back: `max(0, x + h v)`.
    pub fn step(&self, v: &[f64], h: f64) -> Result<Self> {
        check_len("orthant step", self.0.len(), v.len())?;
        Ok(Self(
            self.0
                .iter()
                .zip(v)
                .map(|(x, v)| (x + h * v).max(0.0))
                .collect(),
        ))
    }
}

fn check_nonnegative(x: &[f64]) -> Result<()> {
    match x.iter().position(|&v| !(v >= -BOUNDARY_TOL)) {
        Some(k) => Err(Error::InvalidState(format!(
            "component {k} = {} lies outside the nonnegative orthant",
            x[k]
        ))),
        None => Ok(()),
    }
}

#[inline]
fn tangent_component(x: f64, v: f64) -> f64 {
    if x > BOUNDARY_TOL {
        v
    } else {
        v.max(0.0)
    }
}

/// `Π_{R^k_+}(x, v)`.
pub fn differentiated_projection(x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    check_len("differentiated projection", x.len(), v.len())?;
    check_nonnegative(x)?;
    Ok(x.iter().zip(v).map(|(&x, &v)| tangent_component(x, v)).collect())
}

/// Splits `v` into its tangent-cone and normal-cone projections at `x`.
pub fn tangent_normal_split(x: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let t = differentiated_projection(x, v)?;
    let n = v.iter().zip(&t).map(|(v, t)| v - t).collect();
    Ok((t, n))
}

fn complementarity_terms<'a>(
    lam: &'a [f64],
    w: &'a [f64],
) -> Result<impl Iterator<Item = f64> + 'a> {
    check_len("complementarity residual", lam.len(), w.len())?;
    check_nonnegative(lam)?;
    Ok(lam.iter().zip(w).map(|(&l, &w)| l.max(0.0).min(-w)))
}

/// `‖min(λ, −w)‖_∞`; zero exactly when `w` lies in the normal cone at `λ`.
pub fn complementarity_residual(lam: &[f64], w: &[f64]) -> Result<f64> {
    Ok(complementarity_terms(lam, w)?.fold(0.0_f64, |a, b| a.max(b.abs())))
}

/// Euclidean-norm variant of [`complementarity_residual`].
pub fn complementarity_residual_l2(lam: &[f64], w: &[f64]) -> Result<f64> {
    Ok(complementarity_terms(lam, w)?
        .map(|p| p * p)
        .sum::<f64>()
        .sqrt())
}

/// Per-component admissible set used by the state layouts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    Free,
    NonNegative,
    Interval { lo: f64, hi: f64 },
}

impl Bound {
    pub fn is_projected(&self) -> bool {
        !matches!(self, Bound::Free)
    }

    pub fn clamp(&self, v: f64) -> f64 {
        match *self {
            Bound::Free => v,
            Bound::NonNegative => v.max(0.0),
            Bound::Interval { lo, hi } => v.clamp(lo, hi),
        }
    }

    /// Tangent-cone projection of the velocity `v` at the point `x`.
    pub fn tangent(&self, x: f64, v: f64) -> f64 {
        match *self {
            Bound::Free => v,
            Bound::NonNegative => tangent_component(x, v),
            Bound::Interval { lo, hi } => {
                if x - lo <= BOUNDARY_TOL {
                    v.max(0.0)
                } else if hi - x <= BOUNDARY_TOL {
                    v.min(0.0)
                } else {
                    v
                }
            }
        }
    }

    /// Whether `x` is admissible up to the boundary tolerance.
    pub fn admits(&self, x: f64, tol: f64) -> bool {
        match *self {
            Bound::Free => x.is_finite(),
            Bound::NonNegative => x >= -tol,
            Bound::Interval { lo, hi } => x >= lo - tol && x <= hi + tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_passes_boundary_clips() {
        assert_eq!(
            differentiated_projection(&[1.0, 0.0], &[-3.0, -3.0]).unwrap(),
            vec![-3.0, 0.0]
        );
        assert_eq!(differentiated_projection(&[0.0], &[2.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn negative_point_is_rejected() {
        assert!(matches!(
            differentiated_projection(&[-1.0], &[0.0]),
            Err(Error::InvalidState(_))
        ));
        assert!(complementarity_residual(&[-0.5], &[0.0]).is_err());
        assert!(OrthantPoint::new(vec![0.0, -1e-3]).is_err());
        // drift below the boundary tolerance is absorbed
        assert!(OrthantPoint::new(vec![-1e-13]).is_ok());
    }

    #[test]
    fn split_examples() {
        let (t, n) = tangent_normal_split(&[0.0], &[-5.0]).unwrap();
        assert_eq!((t, n), (vec![0.0], vec![-5.0]));
        let (t, n) = tangent_normal_split(&[1.0], &[7.0]).unwrap();
        assert_eq!((t, n), (vec![7.0], vec![0.0]));
        let (t, n) = tangent_normal_split(&[0.0, 2.0], &[-1.0, 4.0]).unwrap();
        assert_eq!(t, vec![0.0, 4.0]);
        assert_eq!(n, vec![-1.0, 0.0]);
        assert_eq!(t[0] * n[0] + t[1] * n[1], 0.0);
    }

    #[test]
    fn complementarity_examples() {
        assert_eq!(complementarity_residual(&[1.0, 0.0], &[0.0, -2.0]).unwrap(), 0.0);
        assert_eq!(complementarity_residual(&[0.0], &[3.0]).unwrap(), 3.0);
        assert_eq!(complementarity_residual(&[2.0], &[-1.0]).unwrap(), 1.0);
        assert_eq!(complementarity_residual_l2(&[0.0, 4.0], &[3.0, -5.0]).unwrap(), 5.0);
    }

    #[test]
    fn orthant_step_clamps() {
        let p = OrthantPoint::new(vec![0.0, 1.0]).unwrap();
        let q = p.step(&[-1.0, -1.0], 0.1).unwrap();
        assert_eq!(q.as_slice()[0], 0.0);
        assert!((q.as_slice()[1] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn interval_bound() {
        let b = Bound::Interval { lo: 0.0, hi: 2.0 };
        assert_eq!(b.tangent(0.0, -1.0), 0.0);
        assert_eq!(b.tangent(2.0, 1.0), 0.0);
        assert_eq!(b.tangent(1.0, -1.0), -1.0);
        assert_eq!(b.clamp(3.0), 2.0);
        assert!(!b.admits(2.1, 1e-12));
    }
}
