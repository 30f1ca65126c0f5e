//! Scaled-and-shifted Chebyshev-Fourier series on the annulus `rho <= r <= 1`.
//!
//! The radial variable is `s = (2 / (1 - rho)) (r - (1 + rho) / 2)`. A
//! function is `sum u_{n,m,j} T_n(s) F_{m,j}(theta)`, stored with the same
//! column layout as [`ModeCoefficients`].

use crate::annulus::{ModeCoefficients, ModeIndex};
use crate::banded::{BandedMatrix, BorderedSystem};
use crate::classical::{chebyshev_t_eval, chebyshev_t_matrix, conversion_t_to_c2, ClassicalFamily};
use crate::error::{Error, Result};
use crate::fourier;
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Coefficients of a Chebyshev-Fourier expansion, `rows x (2 mmax + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CfCoefficients {
    mmax: usize,
    data: DMatrix<f64>,
}

impl CfCoefficients {
    pub fn zeros(rows: usize, mmax: usize) -> Self {
        CfCoefficients { mmax, data: DMatrix::zeros(rows, 2 * mmax + 1) }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn mmax(&self) -> usize {
        self.mmax
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> {
        ModeIndex::all(self.mmax)
    }

    pub fn mode(&self, mode: ModeIndex) -> &[f64] {
        let (rows, c) = (self.rows(), ModeCoefficients::column_of(mode));
        &self.data.as_slice()[c * rows..(c + 1) * rows]
    }

    pub fn set_mode(&mut self, mode: ModeIndex, v: &[f64]) {
        let mut col = self.data.column_mut(ModeCoefficients::column_of(mode));
        for (i, c) in col.iter_mut().enumerate() {
            *c = v.get(i).copied().unwrap_or(0.0);
        }
    }

    pub fn get(&self, n: usize, mode: ModeIndex) -> f64 {
        self.data[(n, ModeCoefficients::column_of(mode))]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn dofs(&self) -> usize {
        self.data.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.amax()
    }
}

/// Operators on one Fourier mode, all `n x n`:
/// `(r^2 d_rr + r d_r) T(s) = C2(s) D`, `T(s) = C2(s) R`, `r C2(s) = C2(s) X`.
#[derive(Clone, Debug)]
pub struct CfOperators {
    pub d: BandedMatrix,
    pub r: BandedMatrix,
    pub x: BandedMatrix,
}

#[derive(Clone, Debug)]
pub struct ChebFourierBasis {
    rho: f64,
    degree: usize,
}

impl ChebFourierBasis {
    pub fn new(rho: f64, degree: usize) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!("inner radius must lie in (0, 1), got {rho}")));
        }
        if degree == 0 {
            return Err(Error::InvalidParameter("degree must be positive".into()));
        }
        Ok(ChebFourierBasis { rho, degree })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Unknowns per mode in a solve, `N + 2`.
    pub fn solution_len(&self) -> usize {
        self.degree + 2
    }

    /// Total unknowns of a solve, `(N + 2)(2N + 1)`.
    pub fn dofs(&self) -> usize {
        self.solution_len() * (2 * self.degree + 1)
    }

    pub fn radial_variable(&self, r: f64) -> f64 {
        2.0 / (1.0 - self.rho) * (r - 0.5 * (1.0 + self.rho))
    }

    pub fn radius(&self, s: f64) -> f64 {
        0.5 * (1.0 + self.rho) + 0.5 * (1.0 - self.rho) * s
    }

    pub fn operators(&self, n: usize) -> CfOperators {
        let big = n + 4;
        let scale = 2.0 / (1.0 - self.rho);
        let mut d2 = BandedMatrix::zeros(big, big, 0, 2);
        let mut d1 = BandedMatrix::zeros(big, big, 0, 1);
        let mut s12 = BandedMatrix::zeros(big, big, 0, 2);
        for k in 0..big {
            let kf = k as f64;
            if k >= 2 {
                d2.set(k - 2, k, 2.0 * kf * scale * scale);
                s12.set(k - 2, k, -1.0 / (kf + 1.0));
            }
            if k >= 1 {
                d1.set(k - 1, k, kf * scale);
            }
            s12.set(k, k, 1.0 / (kf + 1.0));
        }
        let x = ClassicalFamily::ultraspherical2().on_interval(self.rho, 1.0).jacobi_matrix(big);
        let second = BandedMatrix::chain(&[&x, &x, &d2]).expect("square operators");
        let first = BandedMatrix::chain(&[&x, &s12, &d1]).expect("square operators");
        let d = second.add(&first).expect("square operators").with_bandwidths(0, 4).truncate(n, n);
        CfOperators { d, r: conversion_t_to_c2(n), x: x.truncate(n, n) }
    }

    /// `Lambda(X)` for `lambda = sum_n c_n T_n` in `r^2` scaled to `[rho^2, 1]`.
    fn coefficient_matrix(&self, x: &BandedMatrix, lambda: &[f64]) -> Result<BandedMatrix> {
        let r2 = x.matmul(x)?;
        let a = 2.0 / (1.0 - self.rho * self.rho);
        let b = (1.0 + self.rho * self.rho) / (1.0 - self.rho * self.rho);
        chebyshev_t_matrix(lambda, &r2.scale(a).shift_neg(b).scale(-1.0))
    }

    /// Mode-`m` system: rows `T(-1)`, `T(1)`, then `D - m^2 R + X^2 Lambda R`
    /// truncated to `N x (N + 2)`. `lambda` holds Chebyshev coefficients in
    /// `r^2` on `[rho^2, 1]`; an empty slice gives the Poisson system.
    pub fn assemble(&self, m: usize, lambda: &[f64]) -> Result<BorderedSystem> {
        let n = self.degree;
        let cols = n + 2;
        let lam_deg = lambda.len().saturating_sub(1);
        let big = cols + 2 * lam_deg + 8;
        let ops = self.operators(big);
        let mf = (m * m) as f64;
        let mut core = ops.d.axpby(1.0, &ops.r, -mf)?;
        if lambda.iter().any(|v| *v != 0.0) {
            let lam = self.coefficient_matrix(&ops.x, lambda)?;
            let helm = BandedMatrix::chain(&[&ops.x, &ops.x, &lam, &ops.r])?;
            core = core.add(&helm)?;
        }
        let (lo, up) = if lambda.iter().any(|v| *v != 0.0) { (2 + 2 * lam_deg, 6 + 2 * lam_deg) } else { (0, 4) };
        let core = core.with_bandwidths(lo, up).truncate(n, cols);
        let left = (0..cols).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let right = vec![1.0; cols];
        Ok(BorderedSystem::new(vec![left, right], core))
    }

    /// `(0, 0, X^2 R f)` for a mode column `f` of degree at most `N`.
    pub fn rhs(&self, f: &[f64]) -> Vec<f64> {
        let n = self.degree;
        let big = n + 8;
        let ops = self.operators(big);
        let mut padded = f.to_vec();
        padded.resize(big, 0.0);
        let v = ops.x.matvec_padded(&ops.x.matvec_padded(&ops.r.matvec_padded(&padded)));
        let mut out = vec![0.0, 0.0];
        out.extend_from_slice(&v[..n]);
        out
    }

    /// Radii of the `N + 1` first-kind Chebyshev points in `s`.
    pub fn expansion_radii(&self) -> Vec<f64> {
        let k = self.degree + 1;
        (0..k).map(|i| self.radius(((2 * i + 1) as f64 * PI / (2 * k) as f64).cos())).collect()
    }

    /// Expansion of `f` with degree `N` and `2N + 1` Fourier columns, from
    /// samples at the Chebyshev radii and `2N + 1` equispaced angles.
    pub fn expand(&self, f: &(dyn Fn(f64, f64) -> f64 + Sync)) -> CfCoefficients {
        let n = self.degree;
        let radii = self.expansion_radii();
        let l = 2 * n + 1;
        let mut vals = DMatrix::zeros(radii.len(), l);
        for (k, &r) in radii.iter().enumerate() {
            for j in 0..l {
                let th = 2.0 * PI * j as f64 / l as f64;
                vals[(k, j)] = f(r * th.cos(), r * th.sin());
            }
        }
        let fc = fourier::analyze(&vals, n);
        let mut out = CfCoefficients::zeros(n + 1, n);
        for c in 0..fc.ncols() {
            let col: Vec<f64> = fc.column(c).iter().copied().collect();
            out.data.set_column(c, &nalgebra::DVector::from_vec(fourier::chebyshev_from_values(&col)));
        }
        out
    }

    /// Values at radii `r_k` and `L` equispaced angles, `K x L`.
    pub fn values_on(&self, coeffs: &CfCoefficients, radii: &[f64], l: usize) -> Result<DMatrix<f64>> {
        if l < 2 * coeffs.mmax() + 1 {
            return Err(Error::GridMismatch(format!("{l} angles cannot carry mode {}", coeffs.mmax())));
        }
        let s: Vec<f64> = radii.iter().map(|&r| self.radial_variable(r)).collect();
        let terms: Vec<(ModeIndex, Vec<f64>)> = coeffs
            .modes()
            .filter(|&mode| coeffs.mode(mode).iter().any(|v| *v != 0.0))
            .map(|mode| {
                let c = coeffs.mode(mode);
                (mode, s.iter().map(|&y| chebyshev_t_eval(c, y)).collect())
            })
            .collect();
        Ok(fourier::synthesize(radii.len(), l, &terms))
    }

    pub fn eval(&self, coeffs: &CfCoefficients, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        let th = y.atan2(x);
        let s = self.radial_variable(r);
        coeffs.modes().map(|mode| mode.angular(th) * chebyshev_t_eval(coeffs.mode(mode), s)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c2(coeffs: &[f64], s: f64) -> f64 {
        ClassicalFamily::ultraspherical2().clenshaw(coeffs, s)
    }

    fn column(m: &BandedMatrix, j: usize) -> Vec<f64> {
        (0..m.rows()).map(|i| m.get(i, j)).collect()
    }

    #[test]
    fn operator_identities() {
        let basis = ChebFourierBasis::new(0.5, 12).unwrap();
        let ops = basis.operators(14);
        assert_eq!(ops.d.measured_bandwidths(0.0), (0, 4));
        assert!(ops.r.upper() <= 4 && ops.r.lower() == 0);
        assert_eq!((ops.x.lower(), ops.x.upper()), (1, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let r: f64 = rng.gen_range(0.5..1.0);
            let s = basis.radial_variable(r);
            for j in 0..10 {
                let mut e = vec![0.0; j + 1];
                e[j] = 1.0;
                let t = |r: f64| chebyshev_t_eval(&e, basis.radial_variable(r));
                if j <= 4 {
                    // fourth-order stencils are exact up to rounding for these degrees
                    let h = 1e-3;
                    let (p1, p2, m1, m2) = (t(r + h), t(r + 2.0 * h), t(r - h), t(r - 2.0 * h));
                    let dd = (-p2 + 16.0 * p1 - 30.0 * t(r) + 16.0 * m1 - m2) / (12.0 * h * h);
                    let d = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
                    let fd = r * r * dd + r * d;
                    let got = c2(&column(&ops.d, j), s);
                    assert!((fd - got).abs() < 1e-7 * got.abs().max(1.0), "D col {j}: {fd} {got}");
                }
                assert!((c2(&column(&ops.r, j), s) - t(r)).abs() < 1e-12);
                let xc = column(&ops.x, j);
                let mut cj = vec![0.0; j + 1];
                cj[j] = 1.0;
                assert!((c2(&xc, s) - r * c2(&cj, s)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn d_on_t5() {
        let rho = 0.5;
        let basis = ChebFourierBasis::new(rho, 8).unwrap();
        let ops = basis.operators(10);
        let r = 0.7;
        let k = 2.0 / (1.0 - rho);
        let s = basis.radial_variable(r);
        // T5 = 16 s^5 - 20 s^3 + 5 s
        let d1 = (80.0 * s.powi(4) - 60.0 * s * s + 5.0) * k;
        let d2 = (320.0 * s.powi(3) - 120.0 * s) * k * k;
        let exact = r * r * d2 + r * d1;
        assert!((c2(&column(&ops.d, 5), s) - exact).abs() < 1e-10 * exact.abs());
        assert!(column(&ops.d, 0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn assembled_structure() {
        let basis = ChebFourierBasis::new(0.5, 20).unwrap();
        for (lam, width) in [(vec![], 5), (vec![1.0], 9)] {
            for m in [0, 3, 20] {
                let sys = basis.assemble(m, &lam).unwrap();
                assert_eq!(sys.size(), 22);
                assert_eq!(sys.top_rows.len(), 2);
                let (lo, up) = sys.core.measured_bandwidths(0.0);
                assert!(lo + up + 1 <= width, "m={m}: ({lo}, {up})");
                assert!(sys.top_rows[0].iter().enumerate().all(|(k, v)| *v == if k % 2 == 0 { 1.0 } else { -1.0 }));
                assert!(sys.top_rows[1].iter().all(|v| *v == 1.0));
            }
        }
    }

    #[test]
    fn rhs_of_constant() {
        let basis = ChebFourierBasis::new(0.3, 10).unwrap();
        let b = basis.rhs(&[1.0]);
        assert_eq!(&b[..2], &[0.0, 0.0]);
        for r in [0.35, 0.6, 0.95] {
            let s = basis.radial_variable(r);
            assert!((c2(&b[2..], s) - r * r).abs() < 1e-13);
        }
        assert!(basis.rhs(&[0.0; 11]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn expansion_of_basis_functions() {
        let basis = ChebFourierBasis::new(0.5, 8).unwrap();
        let c = basis.expand(&|_, _| 1.0);
        assert!((c.get(0, ModeIndex::cos(0)) - 1.0).abs() < 1e-14);
        assert!(c.matrix().iter().filter(|v| v.abs() > 1e-13).count() == 1);
        let f = |x: f64, y: f64| {
            let r = x.hypot(y);
            let s = basis.radial_variable(r);
            (2.0 * s * s - 1.0) * (3.0 * y.atan2(x)).cos()
        };
        let c = basis.expand(&f);
        assert!((c.get(2, ModeIndex::cos(3)) - 1.0).abs() < 1e-13);
        assert!(c.matrix().iter().filter(|v| v.abs() > 1e-12).count() == 1);
        let vals = basis.values_on(&c, &[0.6, 0.9], 17).unwrap();
        let th = 2.0 * PI * 5.0 / 17.0;
        assert!((vals[(1, 5)] - f(0.9 * th.cos(), 0.9 * th.sin())).abs() < 1e-13);
        assert!((basis.eval(&c, 0.9 * th.cos(), 0.9 * th.sin()) - vals[(1, 5)]).abs() < 1e-13);
    }
}
