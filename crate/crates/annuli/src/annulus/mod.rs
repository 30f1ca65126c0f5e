//! Generalised Zernike annular polynomials
//! `Z_{n,m,j}(x, y) = Y_{m,j}(x, y) Q^(t,(a,b,m))_{(n-m)/2}(tau)` with
//! `tau = t (1 - r^2)` and `t = 1 / (1 - rho^2)`, and the Zernike disk
//! polynomials, which are the `rho = 0` case with a classical radial family.
//!
//! The functions are orthogonal for `(1-r^2)^a (r^2-rho^2)^b` but not
//! normalised: `<Z, Z> = pi_m t^-(a+b+m+1) / 2` with `pi_0 = 2 pi` and
//! `pi_m = pi` otherwise, since the radial families are orthonormal in
//! `tau`.

mod grid;
mod ops;
mod transform;

pub use grid::AnnulusGrid;
pub use ops::{Axis, CouplingBlock};

use crate::error::{Error, Result};
use crate::semiclassical::{global_cache, DerivativeChain, Hierarchy};
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Inner radius and weight exponents. `rho = 0` is the unit disk, where
/// `t = 1` and only `a` is meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusParams {
    pub rho: f64,
    pub t: f64,
    pub a: f64,
    pub b: f64,
}

impl AnnulusParams {
    pub fn new(rho: f64, a: f64, b: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!("inner radius must lie in (0, 1), got {rho}")));
        }
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::InvalidParameter(format!("weight exponents must exceed -1, got ({a}, {b})")));
        }
        // 1 - rho^2 = (1 - rho)(1 + rho) avoids cancellation for rho near 1
        Ok(AnnulusParams { rho, t: 1.0 / ((1.0 - rho) * (1.0 + rho)), a, b })
    }

    /// Unit disk with weight `(1 - r^2)^a`.
    pub fn disk(a: f64) -> Result<Self> {
        if !(a > -1.0) {
            return Err(Error::InvalidParameter(format!("weight exponent must exceed -1, got {a}")));
        }
        Ok(AnnulusParams { rho: 0.0, t: 1.0, a, b: 0.0 })
    }

    pub fn is_disk(&self) -> bool {
        self.rho == 0.0
    }

    /// Same domain, other weight.
    pub fn with_weight(&self, a: f64, b: f64) -> Self {
        AnnulusParams { a, b: if self.is_disk() { 0.0 } else { b }, ..*self }
    }

    /// `tau = t (1 - x^2 - y^2)`, with fused operations near `r = 1`.
    pub fn tau(&self, x: f64, y: f64) -> f64 {
        self.t * (-y).mul_add(y, (-x).mul_add(x, 1.0))
    }

    /// `(1 - r^2)^a (r^2 - rho^2)^b`.
    pub fn weight(&self, x: f64, y: f64) -> f64 {
        let one_minus = (-y).mul_add(y, (-x).mul_add(x, 1.0));
        let inner = x.mul_add(x, y.mul_add(y, -self.rho * self.rho));
        pow(one_minus, self.a) * pow(inner, self.b)
    }
}

fn pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e.fract() == 0.0 && e.abs() < 64.0 {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

/// Fourier order `m` and `j` (0 for sine, 1 for cosine).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    pub m: usize,
    pub j: usize,
}

impl ModeIndex {
    pub fn new(m: usize, j: usize) -> Result<Self> {
        if j > 1 || (m == 0 && j == 0) {
            return Err(Error::InvalidMode { n: m, m, j });
        }
        Ok(ModeIndex { m, j })
    }

    pub fn cos(m: usize) -> Self {
        ModeIndex { m, j: 1 }
    }

    pub fn sin(m: usize) -> Self {
        assert!(m > 0, "no sine mode at m = 0");
        ModeIndex { m, j: 0 }
    }

    /// Real (`j = 1`) or imaginary (`j = 0`) part of `(x + iy)^m`.
    pub fn harmonic(&self, x: f64, y: f64) -> f64 {
        let (mut re, mut im) = (1.0, 0.0);
        for _ in 0..self.m {
            (re, im) = (re * x - im * y, re * y + im * x);
        }
        if self.j == 1 {
            re
        } else {
            im
        }
    }

    /// `Y_{m,j}` as `cos(m theta)` or `sin(m theta)` without the `r^m`.
    pub fn angular(&self, theta: f64) -> f64 {
        let mt = self.m as f64 * theta;
        if self.j == 1 {
            mt.cos()
        } else {
            mt.sin()
        }
    }

    /// All modes up to order `mmax`, `(0,1), (1,0), (1,1), (2,0), ...`.
    pub fn all(mmax: usize) -> impl Iterator<Item = ModeIndex> {
        std::iter::once(ModeIndex::cos(0)).chain((1..=mmax).flat_map(|m| [ModeIndex { m, j: 0 }, ModeIndex { m, j: 1 }]))
    }
}

fn check_pairing(n: usize, mode: ModeIndex) -> Result<usize> {
    if mode.j > 1 || (mode.m == 0 && mode.j == 0) || mode.m > n || (n - mode.m) % 2 != 0 {
        return Err(Error::InvalidMode { n, m: mode.m, j: mode.j });
    }
    Ok((n - mode.m) / 2)
}

/// Round an odd truncation degree up to the next even one.
pub fn even_degree(n: usize) -> usize {
    n + n % 2
}

/// Coefficients for degree `<= N` (`N` even) stored as the
/// `(N/2 + 1) x (2N + 1)` matrix whose column `0` holds mode `(0,1)` and
/// columns `2m - 1`, `2m` hold `(m,0)` and `(m,1)`. Row `i` of a mode-`m`
/// column is the coefficient of degree `m + 2i`; entries past degree `N`
/// are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeCoefficients {
    degree: usize,
    rows: usize,
    data: Vec<f64>,
}

impl ModeCoefficients {
    pub fn zeros(degree: usize) -> Self {
        let degree = even_degree(degree);
        let rows = degree / 2 + 1;
        ModeCoefficients { degree, rows, data: vec![0.0; rows * (2 * degree + 1)] }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        2 * self.degree + 1
    }

    /// Number of coefficients `(N - m)/2 + 1` in mode `m`, or 0 past `N`.
    pub fn mode_len(&self, m: usize) -> usize {
        if m > self.degree {
            0
        } else {
            (self.degree - m) / 2 + 1
        }
    }

    pub fn column_of(mode: ModeIndex) -> usize {
        if mode.m == 0 {
            0
        } else {
            2 * mode.m - 1 + mode.j
        }
    }

    pub fn mode_of_column(c: usize) -> ModeIndex {
        if c == 0 {
            ModeIndex::cos(0)
        } else {
            ModeIndex { m: (c + 1) / 2, j: (c + 1) % 2 }
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> {
        ModeIndex::all(self.degree)
    }

    pub fn mode(&self, mode: ModeIndex) -> &[f64] {
        let c = Self::column_of(mode);
        &self.data[c * self.rows..c * self.rows + self.mode_len(mode.m)]
    }

    pub fn mode_mut(&mut self, mode: ModeIndex) -> &mut [f64] {
        let c = Self::column_of(mode);
        let len = self.mode_len(mode.m);
        &mut self.data[c * self.rows..c * self.rows + len]
    }

    /// Copies `v` into the mode, truncating or zero-padding.
    pub fn set_mode(&mut self, mode: ModeIndex, v: &[f64]) {
        let dst = self.mode_mut(mode);
        dst.fill(0.0);
        let k = dst.len().min(v.len());
        dst[..k].copy_from_slice(&v[..k]);
    }

    pub fn get(&self, n: usize, mode: ModeIndex) -> Result<f64> {
        let i = check_pairing(n, mode)?;
        Ok(self.mode(mode).get(i).copied().unwrap_or(0.0))
    }

    pub fn set(&mut self, n: usize, mode: ModeIndex, v: f64) -> Result<()> {
        let i = check_pairing(n, mode)?;
        if n > self.degree {
            return Err(Error::InvalidMode { n, m: mode.m, j: mode.j });
        }
        self.mode_mut(mode)[i] = v;
        Ok(())
    }

    /// `(n, m, j)` in the global order: by degree, then `m`, then `j`.
    pub fn global_order(degree: usize) -> Vec<(usize, ModeIndex)> {
        let mut out = Vec::with_capacity((degree + 1) * (degree + 2) / 2);
        for n in 0..=degree {
            for m in (n % 2..=n).step_by(2) {
                if m == 0 {
                    out.push((n, ModeIndex::cos(0)));
                } else {
                    out.push((n, ModeIndex { m, j: 0 }));
                    out.push((n, ModeIndex { m, j: 1 }));
                }
            }
        }
        out
    }

    pub fn interlace(&self) -> Vec<f64> {
        Self::global_order(self.degree)
            .into_iter()
            .map(|(n, mode)| self.mode(mode)[(n - mode.m) / 2])
            .collect()
    }

    pub fn from_interlaced(degree: usize, v: &[f64]) -> Result<Self> {
        let mut out = Self::zeros(degree);
        let order = Self::global_order(out.degree);
        if v.len() != order.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for degree {}, expected {}",
                v.len(),
                out.degree,
                order.len()
            )));
        }
        for ((n, mode), &x) in order.into_iter().zip(v) {
            out.mode_mut(mode)[(n - mode.m) / 2] = x;
        }
        Ok(out)
    }

    /// Number of basis functions, `(N+1)(N+2)/2`.
    pub fn dofs(&self) -> usize {
        (self.degree + 1) * (self.degree + 2) / 2
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.rows, self.cols(), &self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Re-truncates to another degree.
    pub fn resized(&self, degree: usize) -> Self {
        let mut out = Self::zeros(degree);
        for mode in out.modes().collect::<Vec<_>>() {
            if mode.m <= self.degree {
                out.set_mode(mode, self.mode(mode));
            }
        }
        out
    }
}

/// Zernike annular (or disk) basis for a fixed domain and weight, up to a
/// truncation degree. Hierarchies come from the process-wide cache; the
/// derivative chains are kept per basis.
pub struct AnnulusBasis {
    params: AnnulusParams,
    degree: usize,
    chains: RwLock<HashMap<(u64, u64), Arc<DerivativeChain>>>,
}

impl AnnulusBasis {
    pub fn new(params: AnnulusParams, degree: usize) -> Result<Self> {
        Ok(AnnulusBasis { params, degree: even_degree(degree), chains: RwLock::new(HashMap::new()) })
    }

    pub fn params(&self) -> &AnnulusParams {
        &self.params
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Mode length `(N - m)/2 + 1`, which equals `ceil((N + 1 - m)/2)`.
    pub fn mode_len(&self, m: usize) -> usize {
        if m > self.degree {
            0
        } else {
            (self.degree - m) / 2 + 1
        }
    }

    fn depth(&self) -> usize {
        self.degree + 4
    }

    fn rows_needed(&self) -> usize {
        self.degree / 2 + 16
    }

    /// Radial hierarchy for exponents `(a, b)` on this domain.
    pub fn hierarchy(&self, a: f64, b: f64) -> Result<Arc<Hierarchy>> {
        let b = if self.params.is_disk() { 0.0 } else { b };
        global_cache().get(self.params.t, a, b, self.depth(), self.rows_needed())
    }

    /// Derivative chain `(a, b, c) -> (a+1, b+1, c+1)` for every `c`.
    pub fn chain(&self, a: f64, b: f64) -> Result<Arc<DerivativeChain>> {
        let key = (a.to_bits(), b.to_bits());
        if let Some(c) = self.chains.read().expect("chain cache poisoned").get(&key) {
            return Ok(c.clone());
        }
        let base = self.hierarchy(a, b)?;
        let raised = self.hierarchy(a + 1.0, b + 1.0)?;
        let chain = Arc::new(DerivativeChain::build(&base, &raised, self.depth() - 1)?);
        self.chains.write().expect("chain cache poisoned").insert(key, chain.clone());
        Ok(chain)
    }

    /// `Z_{n,m,j}(x, y)` for this basis' weight.
    pub fn eval_z(&self, n: usize, mode: ModeIndex, x: f64, y: f64) -> Result<f64> {
        self.eval_z_with(self.params.a, self.params.b, n, mode, x, y)
    }

    /// `Z_{n,m,j}` for other weight exponents on the same domain.
    pub fn eval_z_with(&self, a: f64, b: f64, n: usize, mode: ModeIndex, x: f64, y: f64) -> Result<f64> {
        let i = check_pairing(n, mode)?;
        let h = self.hierarchy(a, b)?;
        let lvl = h.try_level(mode.m, i + 1)?;
        let tau = self.params.tau(x, y);
        Ok(mode.harmonic(x, y) * lvl.eval(i + 1, tau)[i])
    }

    /// `(1-r^2)^a (r^2-rho^2)^b Z_{n,m,j}(x, y)`.
    pub fn eval_weighted_w(&self, n: usize, mode: ModeIndex, x: f64, y: f64) -> Result<f64> {
        Ok(self.params.weight(x, y) * self.eval_z(n, mode, x, y)?)
    }

    /// `r^m sum_i c_i Q^(a,b,m)_i(tau(r))` and its derivative in `r`.
    pub fn radial_with_derivative(&self, a: f64, b: f64, m: usize, coeffs: &[f64], r: f64) -> Result<(f64, f64)> {
        let h = self.hierarchy(a, b)?;
        let lvl = h.try_level(m, coeffs.len())?;
        let t = self.params.t;
        let tau = t * (1.0 - r) * (1.0 + r);
        let (q, dq) = lvl.eval_with_derivative(coeffs.len(), tau);
        let s: f64 = coeffs.iter().zip(&q).map(|(c, v)| c * v).sum();
        let ds: f64 = coeffs.iter().zip(&dq).map(|(c, v)| c * v).sum();
        let rm = r.powi(m as i32);
        let drm = if m == 0 { 0.0 } else { m as f64 * r.powi(m as i32 - 1) };
        Ok((rm * s, drm * s - 2.0 * t * r * rm * ds))
    }

    /// Pointwise sum of an expansion in `Z` (or in the weighted `W`).
    pub fn eval_expansion(&self, coeffs: &ModeCoefficients, x: f64, y: f64, weighted: bool) -> Result<f64> {
        let h = self.hierarchy(self.params.a, self.params.b)?;
        let tau = self.params.tau(x, y);
        let mut total = 0.0;
        for mode in coeffs.modes() {
            let f = coeffs.mode(mode);
            if f.iter().all(|v| *v == 0.0) {
                continue;
            }
            let lvl = h.try_level(mode.m, f.len())?;
            total += mode.harmonic(x, y) * lvl.clenshaw(f, tau);
        }
        Ok(if weighted { total * self.params.weight(x, y) } else { total })
    }
}

/// Zernike disk basis with weight `(1 - r^2)^b`.
pub fn zernike_disk_basis(b: f64, degree: usize) -> Result<AnnulusBasis> {
    AnnulusBasis::new(AnnulusParams::disk(b)?, degree)
}
