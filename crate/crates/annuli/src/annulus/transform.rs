//! Synthesis and analysis on the annulus grid.
//!
//! Each mode column is converted to Chebyshev coefficients in
//! `y = 1 - 2 tau` through the semiclassical chain, evaluated at the
//! Chebyshev points of the grid, and summed in angle with an FFT. The
//! conversion is the direct `O(N^2)` per column one.

use super::{AnnulusBasis, AnnulusGrid, ModeCoefficients, ModeIndex};
use crate::classical::chebyshev_t_eval;
use crate::error::{Error, Result};
use crate::{fourier, par_map};
use crate::semiclassical::{from_chebyshev_coeffs, to_chebyshev_coeffs, ChebyshevConnection, WeightMode};
use nalgebra::DMatrix;

impl AnnulusBasis {
    fn check_integer_weight(&self) -> Result<()> {
        let (a, b) = (self.params.a, self.params.b);
        if a < 0.0 || b < 0.0 || a.fract() != 0.0 || b.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "transforms need nonnegative integer weight exponents, got ({a}, {b})"
            )));
        }
        Ok(())
    }

    fn check_grid(&self, grid: &AnnulusGrid) -> Result<()> {
        if grid.rho != self.params.rho {
            return Err(Error::GridMismatch(format!(
                "grid inner radius {} differs from basis inner radius {}",
                grid.rho, self.params.rho
            )));
        }
        Ok(())
    }

    /// `r^m / ((t - tau)^(-1/2))^(m odd)` scale between a mode's radial
    /// function and its Chebyshev series, at each grid radius.
    fn radial_scales(&self, m: usize, r: &[f64]) -> Vec<f64> {
        let t = self.params.t;
        r.iter()
            .map(|&r| {
                let tau = t * (1.0 - r) * (1.0 + r);
                let s = t.powf(-(m as f64) / 2.0);
                if m % 2 == 1 {
                    s / (t - tau).sqrt()
                } else {
                    s
                }
            })
            .collect()
    }

    fn radial_weight(&self, r: f64) -> f64 {
        self.params.weight(r, 0.0)
    }

    /// Values of the expansion at the grid points, `K x L`.
    pub fn synthesis(&self, coeffs: &ModeCoefficients, grid: &AnnulusGrid, weighted: bool) -> Result<DMatrix<f64>> {
        self.check_grid(grid)?;
        let ys: Vec<f64> = (0..grid.k()).map(|k| grid.chebyshev_angle(k).cos()).collect();
        self.synthesize(coeffs, &grid.r, &ys, grid.l(), weighted)
    }

    /// Values at radii `r` (in the domain of this basis) and `l` equispaced angles.
    pub fn synthesis_at(&self, coeffs: &ModeCoefficients, r: &[f64], l: usize, weighted: bool) -> Result<DMatrix<f64>> {
        let t = self.params.t;
        let ys: Vec<f64> = r.iter().map(|&r| 1.0 - 2.0 * t * (1.0 - r) * (1.0 + r)).collect();
        self.synthesize(coeffs, r, &ys, l, weighted)
    }

    fn synthesize(&self, coeffs: &ModeCoefficients, r: &[f64], ys: &[f64], ll: usize, weighted: bool) -> Result<DMatrix<f64>> {
        self.check_integer_weight()?;
        let n = coeffs.degree();
        if n > self.degree {
            return Err(Error::InvalidParameter(format!("degree {n} exceeds basis degree {}", self.degree)));
        }
        if ll < 2 * n + 1 {
            return Err(Error::GridMismatch(format!("{ll} angles cannot carry degree {n}")));
        }
        let h = self.hierarchy(self.params.a, self.params.b)?;
        let conn = ChebyshevConnection::new(&h, coeffs.rows() + n / 2 + 4)?;
        let kk = r.len();
        let modes: Vec<ModeIndex> = coeffs.modes().collect();
        let radial: Vec<Result<Option<Vec<f64>>>> = par_map(modes.clone(), |mode| {
            let f = coeffs.mode(mode);
            if f.iter().all(|v| *v == 0.0) {
                return Ok(None);
            }
            let g = to_chebyshev_coeffs(&h, &conn, mode.m, f, WeightMode::HalfC)?;
            let scale = self.radial_scales(mode.m, r);
            Ok(Some((0..kk).map(|k| scale[k] * chebyshev_t_eval(&g.coeffs, ys[k])).collect()))
        });
        let mut terms = Vec::new();
        for (mode, vals) in modes.into_iter().zip(radial) {
            if let Some(v) = vals? {
                terms.push((mode, v));
            }
        }
        let mut out = fourier::synthesize(kk, ll, &terms);
        if weighted {
            for (k, &rk) in r.iter().enumerate() {
                let w = self.radial_weight(rk);
                out.row_mut(k).scale_mut(w);
            }
        }
        Ok(out)
    }

    /// Inverse of [`Self::synthesis`] on the degree-`N` grid.
    pub fn analysis(&self, values: &DMatrix<f64>, weighted: bool) -> Result<ModeCoefficients> {
        self.check_integer_weight()?;
        let (kk, ll) = values.shape();
        if kk == 0 || ll != 4 * kk - 3 {
            return Err(Error::GridMismatch(format!("{kk} x {ll} values do not form an analysis grid")));
        }
        let grid = AnnulusGrid::with_radial_points(self.params.rho, kk);
        let n = grid.degree();
        if n > self.degree {
            return Err(Error::InvalidParameter(format!("degree {n} exceeds basis degree {}", self.degree)));
        }
        let mut scaled = values.clone();
        if weighted {
            for k in 0..kk {
                let w = self.radial_weight(grid.r[k]);
                scaled.row_mut(k).scale_mut(1.0 / w);
            }
        }
        let fc = fourier::analyze(&scaled, n);
        let h = self.hierarchy(self.params.a, self.params.b)?;
        let conn = ChebyshevConnection::new(&h, kk + 4)?;
        let mut out = ModeCoefficients::zeros(n);
        let modes: Vec<ModeIndex> = out.modes().collect();
        let cols: Vec<Result<Vec<f64>>> = par_map(modes.clone(), |mode| {
            let m = mode.m;
            let scale = self.radial_scales(m, &grid.r);
            let c = ModeCoefficients::column_of(mode);
            let v: Vec<f64> = (0..kk).map(|k| fc[(k, c)] / scale[k]).collect();
            let g = fourier::chebyshev_from_values(&v);
            from_chebyshev_coeffs(&h, &conn, m, &g, WeightMode::HalfC, out.mode_len(m))
        });
        for (mode, col) in modes.into_iter().zip(cols) {
            out.set_mode(mode, &col?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::super::AnnulusParams;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coeffs(n: usize, seed: u64) -> ModeCoefficients {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = ModeCoefficients::global_order(n).len();
        let v: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ModeCoefficients::from_interlaced(n, &v).unwrap()
    }

    #[test]
    fn synthesis_matches_pointwise() {
        for (rho, a, b) in [(0.5, 0.0, 0.0), (0.3, 1.0, 1.0)] {
            let basis = AnnulusBasis::new(AnnulusParams::new(rho, a, b).unwrap(), 8).unwrap();
            let c = random_coeffs(8, 1);
            let grid = AnnulusGrid::new(rho, 8);
            for weighted in [false, true] {
                let vals = basis.synthesis(&c, &grid, weighted).unwrap();
                for k in 0..grid.k() {
                    for l in 0..grid.l() {
                        let (x, y) = (grid.r[k] * grid.theta[l].cos(), grid.r[k] * grid.theta[l].sin());
                        let exact = basis.eval_expansion(&c, x, y, weighted).unwrap();
                        assert!((vals[(k, l)] - exact).abs() < 1e-10, "{} vs {exact}", vals[(k, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn synthesis_at_radii() {
        for (rho, a, b) in [(0.4, 1.0, 1.0), (0.0, 0.0, 0.0)] {
            let params = if rho == 0.0 { AnnulusParams::disk(a).unwrap() } else { AnnulusParams::new(rho, a, b).unwrap() };
            let basis = AnnulusBasis::new(params, 10).unwrap();
            let c = random_coeffs(10, 3);
            let r = [rho + 0.01, 0.55, 0.8, 1.0];
            let vals = basis.synthesis_at(&c, &r, 23, true).unwrap();
            for (k, &rk) in r.iter().enumerate() {
                for l in [0, 7, 22] {
                    let th = 2.0 * std::f64::consts::PI * l as f64 / 23.0;
                    let exact = basis.eval_expansion(&c, rk * th.cos(), rk * th.sin(), true).unwrap();
                    assert!((vals[(k, l)] - exact).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn round_trip() {
        let rho = 0.2;
        let basis = AnnulusBasis::new(AnnulusParams::new(rho, 1.0, 1.0).unwrap(), 16).unwrap();
        let c = random_coeffs(16, 2);
        let grid = AnnulusGrid::new(rho, 16);
        for weighted in [false, true] {
            let back = basis.analysis(&basis.synthesis(&c, &grid, weighted).unwrap(), weighted).unwrap();
            let err = c.interlace().iter().zip(back.interlace()).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err < 1e-10, "{err}");
        }
    }

    #[test]
    fn simple_fields() {
        let rho = 0.5;
        let basis = AnnulusBasis::new(AnnulusParams::new(rho, 0.0, 0.0).unwrap(), 6).unwrap();
        let grid = AnnulusGrid::new(rho, 6);
        let mut vals = DMatrix::zeros(grid.k(), grid.l());
        for k in 0..grid.k() {
            for l in 0..grid.l() {
                vals[(k, l)] = grid.r[k] * grid.theta[l].cos();
            }
        }
        let c = basis.analysis(&vals, false).unwrap();
        for (n, mode) in ModeCoefficients::global_order(6) {
            let v = c.get(n, mode).unwrap();
            if (n, mode) == (1, ModeIndex::cos(1)) {
                // x = Z_{1,1,1} / Q_0 with Q_0 = 1 at c = 1 scaled by mass
                assert!(v.abs() > 0.1);
            } else {
                assert!(v.abs() < 1e-12, "({n},{mode:?}) = {v}");
            }
        }
    }

    #[test]
    fn disk_round_trip() {
        let basis = super::super::zernike_disk_basis(0.0, 10).unwrap();
        let c = random_coeffs(10, 3);
        let grid = AnnulusGrid::new(0.0, 10);
        let vals = basis.synthesis(&c, &grid, false).unwrap();
        let (x, y) = (grid.r[2] * grid.theta[3].cos(), grid.r[2] * grid.theta[3].sin());
        assert!((vals[(2, 3)] - basis.eval_expansion(&c, x, y, false).unwrap()).abs() < 1e-10);
        let back = basis.analysis(&vals, false).unwrap();
        let err = c.interlace().iter().zip(back.interlace()).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-10, "{err}");
    }
}
