//! Undirected weighted communication graphs and their Laplacians.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Eigenvalues at or below this count as zero when deciding connectivity.
pub const CONNECTIVITY_TOL: f64 = 1e-10;

/// Weighted undirected graph without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphTopology {
    num_nodes: usize,
    /// `(i, j, a_ij)` with `i < j`; parallel edges are merged by summing weights.
    edges: Vec<(usize, usize, f64)>,
}

impl GraphTopology {
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len());
        for &(i, j, w) in edges {
            if i >= num_nodes || j >= num_nodes {
                return Err(Error::InvalidInput(format!(
                    "edge ({i}, {j}) references a node outside 0..{num_nodes}"
                )));
            }
            if i == j {
                return Err(Error::InvalidInput(format!("self-loop at node {i}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "edge ({i}, {j}) has non-positive weight {w}"
                )));
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            match merged.iter_mut().find(|e| e.0 == a && e.1 == b) {
                Some(e) => e.2 += w,
                None => merged.push((a, b, w)),
            }
        }
        merged.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        Ok(Self {
            num_nodes,
            edges: merged,
        })
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        Self::from_edges(n, &e).expect("path graph is valid")
    }

    pub fn cycle(n: usize) -> Self {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        if n > 2 {
            e.push((n - 1, 0, 1.0));
        }
        Self::from_edges(n, &e).expect("cycle graph is valid")
    }

    pub fn complete(n: usize) -> Self {
        let e: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)))
            .collect();
        Self::from_edges(n, &e).expect("complete graph is valid")
    }

    /// Star centred at node 0.
    pub fn star(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|i| (0, i, 1.0)).collect();
        Self::from_edges(n, &e).expect("star graph is valid")
    }

    /// Same topology with every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("weight scale {c} must be positive")));
        }
        Ok(Self {
            num_nodes: self.num_nodes,
            edges: self.edges.iter().map(|&(i, j, w)| (i, j, c * w)).collect(),
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> Vec<(usize, f64)> {
        self.edges
            .iter()
            .filter_map(|&(a, b, w)| {
                if a == i {
                    Some((b, w))
                } else if b == i {
                    Some((a, w))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.num_nodes, self.num_nodes);
        for &(i, j, w) in &self.edges {
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        a
    }

    /// `ℒ = 𝒟 − 𝒜`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.num_nodes, self.num_nodes);
        for &(i, j, w) in &self.edges {
            l[(i, j)] -= w;
            l[(j, i)] -= w;
            l[(i, i)] += w;
            l[(j, j)] += w;
        }
        l
    }

    /// Laplacian eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        if self.num_nodes == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(self.laplacian())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    /// Moore-Penrose pseudo-inverse of the Laplacian.
    pub fn laplacian_pinv(&self) -> DMatrix<f64> {
        let n = self.num_nodes;
        if n == 0 {
            return DMatrix::zeros(0, 0);
        }
        let eig = SymmetricEigen::new(self.laplacian());
        let mut out = DMatrix::zeros(n, n);
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > CONNECTIVITY_TOL {
                let v = eig.eigenvectors.column(k);
                out += (v * v.transpose()) / lam;
            }
        }
        out
    }
}

/// `L ⊗ I_d`.
pub fn kron_lift(l: &DMatrix<f64>, d: usize) -> Result<DMatrix<f64>> {
    if d == 0 {
        return Err(Error::InvalidParameter("lift dimension must be at least 1".into()));
    }
    Ok(crate::linalg::kron_identity(l, d))
}

/// Computes `(L ⊗ I_d) v` without materialising the lifted matrix.
pub fn kron_apply(l: &DMatrix<f64>, d: usize, v: &[f64]) -> Result<DVector<f64>> {
    let n = l.nrows();
    check_len("Laplacian lift", n * d, v.len())?;
    let mut out = DVector::zeros(n * d);
    kron_apply_into(l, d, v, out.as_mut_slice());
    Ok(out)
}

pub(crate) fn kron_apply_into(l: &DMatrix<f64>, d: usize, v: &[f64], out: &mut [f64]) {
    let n = l.nrows();
    out.iter_mut().for_each(|o| *o = 0.0);
    for i in 0..n {
        let oi = &mut out[i * d..(i + 1) * d];
        for j in 0..n {
            let lij = l[(i, j)];
            if lij != 0.0 {
                let vj = &v[j * d..(j + 1) * d];
                for (o, x) in oi.iter_mut().zip(vj) {
                    *o += lij * x;
                }
            }
        }
    }
}

/// `(connected, λ₂(ℒ))`. A single node counts as connected with `λ₂ = 0`
/// reported.
pub fn connectivity_and_fiedler(g: &GraphTopology) -> (bool, f64) {
    let ev = g.spectrum();
    match ev.len() {
        0 => (false, 0.0),
        1 => (true, 0.0),
        _ => {
            let l2 = if ev[1].abs() <= CONNECTIVITY_TOL { 0.0 } else { ev[1] };
            (l2 > CONNECTIVITY_TOL, l2)
        }
    }
}

/// Outcome of the Laplacian condition `λ₂(ℒ) > θ²/μ + θ` used in the
/// partial-decision setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialInfoReport {
    pub holds: bool,
    pub lambda2: f64,
    pub threshold: f64,
    /// Smallest `c >= 1` with `c λ₂ >= 1.1 · threshold`; infinite when `λ₂ = 0`.
    pub suggested_scale: f64,
}

pub fn check_partial_info_condition(
    g: &GraphTopology,
    theta: f64,
    mu: f64,
) -> Result<PartialInfoReport> {
    let (_, lambda2) = connectivity_and_fiedler(g);
    partial_info_condition(lambda2, theta, mu)
}

/// Same test on a known Fiedler value.
pub fn partial_info_condition(lambda2: f64, theta: f64, mu: f64) -> Result<PartialInfoReport> {
    if !(mu > 0.0) {
        return Err(Error::Inapplicable(format!(
            "pseudo-gradient is not strongly monotone (mu = {mu})"
        )));
    }
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Lipschitz constant must be positive (theta = {theta})"
        )));
    }
    let threshold = theta * theta / mu + theta;
    let suggested_scale = if lambda2 > CONNECTIVITY_TOL {
        (1.1 * threshold / lambda2).max(1.0)
    } else {
        f64::INFINITY
    };
    Ok(PartialInfoReport {
        holds: lambda2 > threshold,
        lambda2,
        threshold,
        suggested_scale,
    })
}
