use super::{sample_grid, Coefficient, Field};
use crate::annulus::{zernike_disk_basis, AnnulusBasis, AnnulusGrid, AnnulusParams, ModeCoefficients, ModeIndex};
use crate::banded::{BandedLu, BandedMatrix};
use crate::classical::chebyshev_t_matrix;
use crate::error::{Error, Result};
use crate::par_map;
use nalgebra::DMatrix;
use std::sync::Arc;

/// Expansion in `W^(1,1)` (annulus) or `(1 - r^2) Z^(1)` (disk) on a
/// domain of outer radius `scale`.
#[derive(Clone)]
pub struct ZernikeSolution {
    pub basis: Arc<AnnulusBasis>,
    pub coeffs: ModeCoefficients,
    pub scale: f64,
}

impl ZernikeSolution {
    /// Values on `grid` (in unit-radius coordinates).
    pub fn values_on(&self, grid: &AnnulusGrid) -> Result<DMatrix<f64>> {
        self.basis.synthesis(&self.coeffs, grid, true)
    }

    /// Values at physical radii `r` and `l` equispaced angles.
    pub fn values_at(&self, r: &[f64], l: usize) -> Result<DMatrix<f64>> {
        let local: Vec<f64> = r.iter().map(|v| v / self.scale).collect();
        self.basis.synthesis_at(&self.coeffs, &local, l, true)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.basis.eval_expansion(&self.coeffs, x / self.scale, y / self.scale, true)
    }

    pub fn dofs(&self) -> usize {
        self.coeffs.dofs()
    }
}

fn solve_modes(
    rhs: &ModeCoefficients,
    system: impl Fn(usize) -> Result<BandedMatrix> + Sync + Send,
) -> Result<ModeCoefficients> {
    let n = rhs.degree();
    let solved: Vec<Result<Vec<(ModeIndex, Vec<f64>)>>> = par_map((0..=n).collect(), |m| {
        let a = system(m)?;
        let lu = BandedLu::factor(&a).map_err(|_| Error::SingularSystem { mode: Some((m, 1)) })?;
        let modes: Vec<ModeIndex> = if m == 0 { vec![ModeIndex::cos(0)] } else { vec![ModeIndex::sin(m), ModeIndex::cos(m)] };
        Ok(modes
            .into_iter()
            .map(|mode| {
                let b = rhs.mode(mode);
                let x = if b.iter().all(|v| *v == 0.0) { vec![0.0; b.len()] } else { lu.solve(b) };
                (mode, x)
            })
            .collect())
    });
    let mut out = ModeCoefficients::zeros(n);
    for block in solved {
        for (mode, x) in block? {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::SingularSystem { mode: Some((mode.m, mode.j)) });
            }
            out.set_mode(mode, &x);
        }
    }
    Ok(out)
}

/// Weighted Zernike annular solver: `u = W^(1,1) u_hat`, one banded
/// system per Fourier order.
pub struct ZernikeAnnularSolver {
    basis: Arc<AnnulusBasis>,
    lambda: Vec<f64>,
}

impl ZernikeAnnularSolver {
    pub fn new(rho: f64, degree: usize, lambda: &Coefficient) -> Result<Self> {
        let basis = AnnulusBasis::new(AnnulusParams::new(rho, 1.0, 1.0)?, degree)?;
        Ok(ZernikeAnnularSolver { basis: Arc::new(basis), lambda: lambda.chebyshev() })
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn basis(&self) -> &Arc<AnnulusBasis> {
        &self.basis
    }

    pub fn dofs(&self) -> usize {
        (self.degree() + 1) * (self.degree() + 2) / 2
    }

    /// `Lambda_m = sum_n c_n T_n(I - 2 X_(1,1,m))`, `n x n`.
    pub fn coefficient_matrix(&self, m: usize, n: usize) -> Result<BandedMatrix> {
        let deg = self.lambda.len().saturating_sub(1);
        let x = self.basis.hierarchy(1.0, 1.0)?.jacobi(m, n + deg + 1)?;
        let arg = x.scale(2.0).shift_neg(1.0);
        Ok(chebyshev_t_matrix(&self.lambda, &arg)?.truncate(n, n))
    }

    /// `Delta_m + Lambda_m L_m`, `k x k` with `k = ceil((N + 1 - m) / 2)`.
    pub fn mode_system(&self, m: usize) -> Result<BandedMatrix> {
        let k = self.basis.mode_len(m);
        let lap = self.basis.laplacian_w(m, k)?;
        if self.lambda.is_empty() {
            return Ok(lap);
        }
        let deg = self.lambda.len() - 1;
        let big = k + deg + 2;
        let low = self.basis.lowering_weighted(m, big)?;
        let lam = self.coefficient_matrix(m, big)?;
        let w = deg + 2;
        let helm = lam.matmul(&low)?.truncate(k, k).with_bandwidths(w, w);
        lap.with_bandwidths(w, w).add(&helm)
    }

    /// Solves for `W^(1,1)` coefficients given `f` in `Z^(1,1)`.
    pub fn solve_coefficients(&self, rhs: &ModeCoefficients) -> Result<ModeCoefficients> {
        if rhs.degree() != self.degree() {
            return Err(Error::DimensionMismatch(format!("rhs degree {} for solver degree {}", rhs.degree(), self.degree())));
        }
        solve_modes(rhs, |m| self.mode_system(m))
    }

    /// `f` in `Z^(1,1)` from samples on the degree-`N` grid.
    pub fn expand(&self, f: Field) -> Result<ModeCoefficients> {
        let grid = AnnulusGrid::new(self.basis.params().rho, self.degree());
        self.basis.analysis(&sample_grid(&grid, 1.0, f), false)
    }

    pub fn solve(&self, f: Field) -> Result<ZernikeSolution> {
        let coeffs = self.solve_coefficients(&self.expand(f)?)?;
        Ok(ZernikeSolution { basis: self.basis.clone(), coeffs, scale: 1.0 })
    }
}

/// One-element solver on a disk of radius `radius` with the weighted basis
/// `(1 - r^2) Z^(1)` and a constant coefficient.
pub struct ZernikeDiskSolver {
    basis: Arc<AnnulusBasis>,
    kappa: f64,
    radius: f64,
}

impl ZernikeDiskSolver {
    pub fn new(degree: usize, kappa: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("disk radius must be positive, got {radius}")));
        }
        Ok(ZernikeDiskSolver { basis: Arc::new(zernike_disk_basis(1.0, degree)?), kappa, radius })
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn dofs(&self) -> usize {
        (self.degree() + 1) * (self.degree() + 2) / 2
    }

    /// Diagonal for Poisson, tridiagonal otherwise.
    pub fn mode_system(&self, m: usize) -> Result<BandedMatrix> {
        let k = self.basis.mode_len(m);
        let lap = self.basis.disk_weighted_laplacian(m, k)?.scale(1.0 / (self.radius * self.radius));
        if self.kappa == 0.0 {
            return Ok(lap);
        }
        let low = self.basis.disk_lowering_weighted(m, k)?;
        lap.with_bandwidths(1, 1).axpby(1.0, &low, self.kappa)
    }

    pub fn solve(&self, f: Field) -> Result<ZernikeSolution> {
        let grid = AnnulusGrid::new(0.0, self.degree());
        let rhs = self.basis.analysis(&sample_grid(&grid, self.radius, f), false)?;
        let coeffs = solve_modes(&rhs, |m| self.mode_system(m))?;
        Ok(ZernikeSolution { basis: self.basis.clone(), coeffs, scale: self.radius })
    }
}
