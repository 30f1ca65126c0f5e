//! Helmholtz solvers `Delta u + lambda u = f` with homogeneous Dirichlet data.

mod chebfourier;
mod element;
pub mod problems;
mod zernike;

pub use chebfourier::{CfSolution, ChebFourierSolver};
pub use element::{Cell, ElementSolution, Mesh, SpectralElementSolver, default_tau_scale};
pub use zernike::{ZernikeAnnularSolver, ZernikeDiskSolver, ZernikeSolution};

use crate::annulus::AnnulusGrid;
use crate::banded::{BandedMatrix, BorderedSystem};
use crate::error::{Error, Result};
use crate::fourier::chebyshev_from_values;
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// A right-hand side or reference field `f(x, y)`.
pub type Field<'a> = &'a (dyn Fn(f64, f64) -> f64 + Sync);

/// A field evaluated on a given mesh cell, `f(cell, x, y)`.
pub type CellField<'a> = &'a (dyn Fn(usize, f64, f64) -> f64 + Sync);

/// Radial coefficient `lambda(r^2) = sum_n c_n T_n(s)` with
/// `s = (2 r^2 - 1 - rho^2) / (1 - rho^2)`, so `r^2 in [rho^2, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    ChebyshevR2(Vec<f64>),
}

impl Coefficient {
    /// Chebyshev coefficients of `sum_k p_k r^(2k)` on `[rho^2, 1]`.
    pub fn from_r2_polynomial(rho: f64, p: &[f64]) -> Self {
        let n = p.len().max(1);
        let vals: Vec<f64> = (0..n)
            .map(|k| {
                let s = ((2 * k + 1) as f64 * PI / (2 * n) as f64).cos();
                let r2 = 0.5 * (1.0 + rho * rho) + 0.5 * (1.0 - rho * rho) * s;
                p.iter().rev().fold(0.0, |acc, c| acc * r2 + c)
            })
            .collect();
        let mut c = chebyshev_from_values(&vals);
        // the fit is exact, so drop rounding noise in the top terms
        let scale = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        c.iter_mut().filter(|v| v.abs() <= 1e-15 * scale).for_each(|v| *v = 0.0);
        while c.len() > 1 && c.last() == Some(&0.0) {
            c.pop();
        }
        Coefficient::ChebyshevR2(c)
    }

    /// Coefficient list; empty when identically zero.
    pub fn chebyshev(&self) -> Vec<f64> {
        let c = match self {
            Coefficient::Constant(v) => vec![*v],
            Coefficient::ChebyshevR2(c) => c.clone(),
        };
        if c.iter().all(|v| *v == 0.0) {
            Vec::new()
        } else {
            c
        }
    }

    pub fn is_zero(&self) -> bool {
        self.chebyshev().is_empty()
    }

    pub fn eval(&self, rho: f64, r: f64) -> f64 {
        let s = (2.0 * r * r - 1.0 - rho * rho) / (1.0 - rho * rho);
        crate::classical::chebyshev_t_eval(&self.chebyshev(), s)
    }
}

/// Assembled system for one Fourier order `m` (shared by `j = 0, 1`).
#[derive(Clone, Debug)]
pub enum ModeSystem {
    Banded(BandedMatrix),
    Bordered(BorderedSystem),
}

impl ModeSystem {
    pub fn size(&self) -> usize {
        match self {
            ModeSystem::Banded(a) => a.rows(),
            ModeSystem::Bordered(s) => s.size(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            ModeSystem::Banded(a) => a.to_dense(),
            ModeSystem::Bordered(s) => s.to_dense(),
        }
    }

    /// Number of dense top rows.
    pub fn dense_rows(&self) -> usize {
        match self {
            ModeSystem::Banded(_) => 0,
            ModeSystem::Bordered(s) => s.top_rows.len(),
        }
    }

    /// Measured `(lower, upper)` bandwidths of the banded part.
    pub fn bandwidths(&self) -> (usize, usize) {
        match self {
            ModeSystem::Banded(a) => a.measured_bandwidths(0.0),
            ModeSystem::Bordered(s) => s.core.measured_bandwidths(0.0),
        }
    }
}

/// `ceil((N + 1 - m) / 2)` for `m <= N`.
pub fn zernike_mode_size(n: usize, m: usize) -> usize {
    if m > n {
        0
    } else {
        (n + 1 - m).div_ceil(2)
    }
}

/// Sup-norm error over the points of one or more cells.
#[derive(Clone, Debug, PartialEq)]
pub struct GridError {
    pub per_cell: Vec<f64>,
}

impl GridError {
    pub fn sup(&self) -> f64 {
        self.per_cell.iter().fold(0.0, |m, v| m.max(*v))
    }
}

/// Largest absolute difference of two value arrays on the same grid.
pub fn error_on_grid(numeric: &DMatrix<f64>, reference: &DMatrix<f64>) -> Result<f64> {
    if numeric.shape() != reference.shape() {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", numeric.shape(), reference.shape())));
    }
    Ok(numeric.iter().zip(reference.iter()).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// Samples `f` on a grid scaled to radius `scale`.
pub fn sample_grid(grid: &AnnulusGrid, scale: f64, f: Field) -> DMatrix<f64> {
    let (kk, ll) = (grid.k(), grid.l());
    let mut out = DMatrix::zeros(kk, ll);
    let trig: Vec<(f64, f64)> = grid.theta.iter().map(|t| t.sin_cos()).collect();
    for k in 0..kk {
        let r = scale * grid.r[k];
        for (l, (s, c)) in trig.iter().enumerate() {
            out[(k, l)] = f(r * c, r * s);
        }
    }
    out
}
