//! Conversion between semiclassical and Chebyshev coefficients.

use super::Hierarchy;
use crate::banded::BandedMatrix;
use crate::classical::conversion_t_to_jacobi;
use crate::error::{Error, Result};

/// Which weight multiplies the expansion `sum_n f_n Q^(a,b,c)_n(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    None,
    /// `(t-x)^(c/2)`.
    HalfC,
}

/// `(t-x)^(sqrt_weight_power / 2) * sum_n coeffs[n] T_n(1 - 2x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebCoeffs {
    pub coeffs: Vec<f64>,
    pub sqrt_weight_power: i32,
}

/// Connection `T(1-2x) R_T S^{-1} = Q^(a,b,0)(x)` for a hierarchy's base family.
#[derive(Clone, Debug)]
pub struct ChebyshevConnection {
    r_t: BandedMatrix,
    s: Vec<f64>,
}

impl ChebyshevConnection {
    pub fn new(hier: &Hierarchy, n: usize) -> Result<Self> {
        let (r_t, s) = conversion_t_to_jacobi(hier.a(), hier.b(), n)?;
        Ok(ChebyshevConnection { r_t, s })
    }

    pub fn size(&self) -> usize {
        self.s.len()
    }

    fn check(&self, len: usize) -> Result<()> {
        if len > self.size() {
            return Err(Error::DimensionMismatch(format!(
                "Chebyshev connection of size {} used for length {len}",
                self.size()
            )));
        }
        Ok(())
    }

    /// Chebyshev coefficients of `sum_n v_n Q^(a,b,0)_n`.
    pub fn to_chebyshev(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v.len())?;
        let u: Vec<f64> = v.iter().zip(&self.s).map(|(a, s)| a / s).collect();
        let n = v.len();
        Ok((0..n).map(|i| (i..n).map(|j| self.r_t.get(i, j) * u[j]).sum()).collect())
    }

    pub fn from_chebyshev(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.check(g.len())?;
        let u = self.r_t.solve_upper(g)?;
        Ok(u.iter().zip(&self.s).map(|(a, s)| a * s).collect())
    }
}

/// Chebyshev coefficients of `sum_n f_n Q^(a,b,c)_n`, optionally times
/// `(t-x)^(c/2)`.
///
/// With the half weight, even `c` is reduced to `c = 0` by the orthogonal
/// factors `Q_{c-2}, ..., Q_0` and the result carries no weight. Odd `c`
/// stops at `c = 1` and uses one Cholesky factor, leaving `(t-x)^(-1/2)`.
/// Without weight the triangular factors are inverted instead.
pub fn to_chebyshev_coeffs(
    hier: &Hierarchy,
    conn: &ChebyshevConnection,
    c: usize,
    f: &[f64],
    mode: WeightMode,
) -> Result<ChebCoeffs> {
    let odd = c % 2 == 1;
    let (v, power) = match mode {
        WeightMode::HalfC => {
            let mut v = f.to_vec();
            for gamma in (0..c.saturating_sub(1)).rev().filter(|g| g % 2 == c % 2) {
                v.push(0.0);
                let q = &hier.try_level(gamma, v.len() + 1)?.q;
                q.apply(&mut v);
            }
            if odd {
                let r = &hier.try_level(0, v.len() + 1)?.chol;
                v.push(0.0);
                v = r.transpose().truncate(v.len(), v.len()).matvec(&v)?;
                (v, -1)
            } else {
                (v, 0)
            }
        }
        WeightMode::None => {
            let mut v = f.to_vec();
            for gamma in (0..c.saturating_sub(1)).rev().filter(|g| g % 2 == c % 2) {
                v = hier.try_level(gamma, v.len())?.qr_r.solve_upper(&v)?;
            }
            if odd {
                v = hier.try_level(0, v.len())?.chol.solve_upper(&v)?;
            }
            (v, 0)
        }
    };
    Ok(ChebCoeffs { coeffs: conn.to_chebyshev(&v)?, sqrt_weight_power: power })
}

/// Inverse of [`to_chebyshev_coeffs`], truncated to `n_out` coefficients.
pub fn from_chebyshev_coeffs(
    hier: &Hierarchy,
    conn: &ChebyshevConnection,
    c: usize,
    g: &[f64],
    mode: WeightMode,
    n_out: usize,
) -> Result<Vec<f64>> {
    let odd = c % 2 == 1;
    let mut v = conn.from_chebyshev(g)?;
    let len = v.len();
    match mode {
        WeightMode::HalfC => {
            if odd {
                v = hier.try_level(0, len)?.chol.solve_upper_transpose(&v)?;
            }
            for gamma in (0..c.saturating_sub(1)).filter(|g| g % 2 == c % 2) {
                hier.try_level(gamma, len + 1)?.q.apply_transpose(&mut v);
            }
        }
        WeightMode::None => {
            if odd {
                v = hier.try_level(0, len)?.chol.truncate(len, len).matvec(&v)?;
            }
            for gamma in (0..c.saturating_sub(1)).filter(|g| g % 2 == c % 2) {
                v = hier.try_level(gamma, len)?.qr_r.truncate(len, len).matvec(&v)?;
            }
        }
    }
    v.resize(n_out, 0.0);
    Ok(v)
}
