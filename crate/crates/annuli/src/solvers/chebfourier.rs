use super::{Coefficient, Field};
use crate::annulus::{AnnulusGrid, ModeIndex};
use crate::banded::BorderedSystem;
use crate::chebfourier::{CfCoefficients, ChebFourierBasis};
use crate::error::{Error, Result};
use crate::par_map;
use nalgebra::DMatrix;

#[derive(Clone)]
pub struct CfSolution {
    pub basis: ChebFourierBasis,
    pub coeffs: CfCoefficients,
}

impl CfSolution {
    pub fn values_on(&self, grid: &AnnulusGrid) -> Result<DMatrix<f64>> {
        self.basis.values_on(&self.coeffs, &grid.r, grid.l())
    }

    /// Values at radii `r` and `l` equispaced angles.
    pub fn values_at(&self, r: &[f64], l: usize) -> Result<DMatrix<f64>> {
        self.basis.values_on(&self.coeffs, r, l)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.basis.eval(&self.coeffs, x, y)
    }
}

/// Chebyshev-Fourier solver: `2N + 1` bordered `(N+2) x (N+2)` systems.
pub struct ChebFourierSolver {
    basis: ChebFourierBasis,
    lambda: Vec<f64>,
}

impl ChebFourierSolver {
    pub fn new(rho: f64, degree: usize, lambda: &Coefficient) -> Result<Self> {
        Ok(ChebFourierSolver { basis: ChebFourierBasis::new(rho, degree)?, lambda: lambda.chebyshev() })
    }

    pub fn basis(&self) -> &ChebFourierBasis {
        &self.basis
    }

    pub fn dofs(&self) -> usize {
        self.basis.dofs()
    }

    pub fn mode_system(&self, m: usize) -> Result<BorderedSystem> {
        self.basis.assemble(m, &self.lambda)
    }

    pub fn solve_coefficients(&self, f: &CfCoefficients) -> Result<CfCoefficients> {
        let n = self.basis.degree();
        let solved: Vec<Result<Vec<(ModeIndex, Vec<f64>)>>> = par_map((0..=n).collect(), |m| {
            let sys = self.mode_system(m)?;
            let modes: Vec<ModeIndex> = if m == 0 { vec![ModeIndex::cos(0)] } else { vec![ModeIndex::sin(m), ModeIndex::cos(m)] };
            modes
                .into_iter()
                .map(|mode| {
                    let fm = if mode.m <= f.mmax() { f.mode(mode).to_vec() } else { Vec::new() };
                    if fm.iter().all(|v| *v == 0.0) {
                        return Ok((mode, vec![0.0; sys.size()]));
                    }
                    let x = sys
                        .solve(&self.basis.rhs(&fm))
                        .map_err(|_| Error::SingularSystem { mode: Some((mode.m, mode.j)) })?;
                    Ok((mode, x))
                })
                .collect()
        });
        let mut out = CfCoefficients::zeros(self.basis.solution_len(), n);
        for block in solved {
            for (mode, x) in block? {
                out.set_mode(mode, &x);
            }
        }
        Ok(out)
    }

    pub fn solve(&self, f: Field) -> Result<CfSolution> {
        let coeffs = self.solve_coefficients(&self.basis.expand(f))?;
        Ok(CfSolution { basis: self.basis.clone(), coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manufactured_poisson() {
        let rho = 0.5;
        let s = ChebFourierSolver::new(rho, 8, &Coefficient::Constant(0.0)).unwrap();
        let f = |x: f64, y: f64| 4.0 * (1.0 + rho * rho) - 16.0 * (x * x + y * y);
        let sol = s.solve(&f).unwrap();
        for (x, y) in [(0.6, 0.1), (-0.3, 0.7), (0.0, -0.95)] {
            let r2: f64 = x * x + y * y;
            assert!((sol.eval(x, y) - (1.0 - r2) * (r2 - rho * rho)).abs() < 1e-13);
        }
    }

    #[test]
    fn boundary_values_and_decoupling() {
        let rho = 0.4;
        let s = ChebFourierSolver::new(rho, 24, &Coefficient::Constant(5.0)).unwrap();
        let f = |x: f64, y: f64| {
            let r = x.hypot(y);
            (3.0 * r).sin() * x / r
        };
        let sol = s.solve(&f).unwrap();
        let scale = sol.coeffs.max_abs();
        for mode in sol.coeffs.modes() {
            if mode != ModeIndex::cos(1) {
                assert!(sol.coeffs.mode(mode).iter().all(|v| v.abs() < 1e-13 * scale.max(1.0)), "{mode:?}");
            }
        }
        for i in 0..50 {
            let th = i as f64 * 0.1256;
            for r in [rho, 1.0] {
                assert!(sol.eval(r * th.cos(), r * th.sin()).abs() < 1e-12);
            }
        }
    }
}
