use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Default advection angle.
pub const DEFAULT_THETA: f64 = 3.0 * std::f64::consts::PI / 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    UpwindFv,
    Supg,
}

impl Discretization {
    pub fn name(self) -> &'static str {
        match self {
            Discretization::UpwindFv => "upwind",
            Discretization::Supg => "supg",
        }
    }
}

/// Constant-velocity transport `b . grad u = 0` on the unit square with
/// `b = (cos theta, sin theta)` and inflow value 1 on the south and west sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub disc: Discretization,
    /// Cells per side.
    pub n: usize,
    pub theta: f64,
    /// SUPG multiplier; `tau = 0` gives plain Galerkin.
    pub tau: f64,
    pub seed: u64,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self {
            disc: Discretization::UpwindFv,
            n: 8,
            theta: DEFAULT_THETA,
            tau: 1.0,
            seed: 0,
        }
    }
}

impl ProblemSpec {
    pub fn upwind(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn supg(n: usize) -> Self {
        Self {
            disc: Discretization::Supg,
            n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec(format!("n = {} (need n >= 2)", self.n)));
        }
        if !(self.theta > 0.0 && self.theta < FRAC_PI_2) {
            return Err(Error::InvalidSpec(format!(
                "theta = {} outside (0, pi/2)",
                self.theta
            )));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidSpec(format!("tau = {} (need tau >= 0)", self.tau)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }

    /// Number of unknowns of the discrete system.
    pub fn unknowns(&self) -> usize {
        self.n * self.n
    }

    pub fn matrix(&self) -> Result<SparseMatrix> {
        match self.disc {
            Discretization::UpwindFv => gen_upwind_advection(self),
            Discretization::Supg => gen_supg_advection(self),
        }
    }

    /// Right-hand side produced by the eliminated inflow data (g = 1).
    pub fn inflow_rhs(&self) -> Result<Vec<f64>> {
        match self.disc {
            Discretization::UpwindFv => upwind_inflow_rhs(self),
            Discretization::Supg => supg_inflow_rhs(self),
        }
    }
}

/// First-order upwind finite volumes on an n x n cell grid, cell (i, j)
/// stored at `j * n + i`.
pub fn gen_upwind_advection(spec: &ProblemSpec) -> Result<SparseMatrix> {
    spec.validate()?;
    let n = spec.n;
    let inv_h = n as f64;
    let (c, s) = spec.velocity();
    let mut t = Vec::with_capacity(3 * n * n);
    for j in 0..n {
        for i in 0..n {
            let row = j * n + i;
            t.push((row, row, (c + s) * inv_h));
            if i > 0 {
                t.push((row, row - 1, -c * inv_h));
            }
            if j > 0 {
                t.push((row, row - n, -s * inv_h));
            }
        }
    }
    SparseMatrix::from_triplets(n * n, n * n, &t)
}

fn upwind_inflow_rhs(spec: &ProblemSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n;
    let inv_h = n as f64;
    let (c, s) = spec.velocity();
    let mut b = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            if i == 0 {
                b[j * n + i] += c * inv_h;
            }
            if j == 0 {
                b[j * n + i] += s * inv_h;
            }
        }
    }
    Ok(b)
}

/// Node (i, j) of the (n+1) x (n+1) grid mapped to its unknown index, or
/// `None` on the inflow boundary.
fn supg_unknown(n: usize, i: usize, j: usize) -> Option<usize> {
    if i == 0 || j == 0 {
        None
    } else {
        Some((j - 1) * n + (i - 1))
    }
}

/// Triangles of cell (i, j) as node triples, counter-clockwise.
fn cell_triangles(i: usize, j: usize) -> [[(usize, usize); 3]; 2] {
    [
        [(i, j), (i + 1, j), (i + 1, j + 1)],
        [(i, j), (i + 1, j + 1), (i, j + 1)],
    ]
}

/// Local 3x3 element matrix, entry [a][b] = a(phi_b, phi_a).
fn supg_element(tri: &[(usize, usize); 3], h: f64, b: (f64, f64), tau_k: f64) -> [[f64; 3]; 3] {
    let p: Vec<(f64, f64)> = tri.iter().map(|&(i, j)| (i as f64 * h, j as f64 * h)).collect();
    let det = (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[2].0 - p[0].0) * (p[1].1 - p[0].1);
    let area = 0.5 * det.abs();
    let grads = [
        ((p[1].1 - p[2].1) / det, (p[2].0 - p[1].0) / det),
        ((p[2].1 - p[0].1) / det, (p[0].0 - p[2].0) / det),
        ((p[0].1 - p[1].1) / det, (p[1].0 - p[0].0) / det),
    ];
    let adv: Vec<f64> = grads.iter().map(|g| b.0 * g.0 + b.1 * g.1).collect();
    let mut k = [[0.0; 3]; 3];
    for a in 0..3 {
        for c in 0..3 {
            k[a][c] = adv[c] * area / 3.0 + tau_k * area * adv[c] * adv[a];
        }
    }
    k
}

/// Streamline-upwind Petrov-Galerkin with P1 elements on the structured
/// right-triangulation; inflow nodes (x = 0 or y = 0) are eliminated.
pub fn gen_supg_advection(spec: &ProblemSpec) -> Result<SparseMatrix> {
    spec.validate()?;
    let n = spec.n;
    let h = spec.h();
    let b = spec.velocity();
    let tau_k = spec.tau * h / 2.0;
    let mut t = Vec::with_capacity(14 * n * n);
    for j in 0..n {
        for i in 0..n {
            for tri in cell_triangles(i, j) {
                let k = supg_element(&tri, h, b, tau_k);
                for (a, &(ia, ja)) in tri.iter().enumerate() {
                    let Some(row) = supg_unknown(n, ia, ja) else { continue };
                    for (c, &(ic, jc)) in tri.iter().enumerate() {
                        if let Some(col) = supg_unknown(n, ic, jc) {
                            t.push((row, col, k[a][c]));
                        }
                    }
                }
            }
        }
    }
    SparseMatrix::from_triplets(n * n, n * n, &t)
}

fn supg_inflow_rhs(spec: &ProblemSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n;
    let h = spec.h();
    let b = spec.velocity();
    let tau_k = spec.tau * h / 2.0;
    let mut rhs = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            for tri in cell_triangles(i, j) {
                let k = supg_element(&tri, h, b, tau_k);
                for (a, &(ia, ja)) in tri.iter().enumerate() {
                    let Some(row) = supg_unknown(n, ia, ja) else { continue };
                    for (c, &(ic, jc)) in tri.iter().enumerate() {
                        if supg_unknown(n, ic, jc).is_none() {
                            rhs[row] -= k[a][c];
                        }
                    }
                }
            }
        }
    }
    Ok(rhs)
}
