//! Semiclassical Jacobi families, orthonormal on `[0, 1]` for the weight
//! `x^a (1-x)^b (t-x)^c` with `t > 1`.
//!
//! Families for increasing `c` are generated from the classical `c = 0`
//! family by Cholesky or QR factorizations of `tI - X`, so the whole
//! hierarchy costs `O(c n)`. The same machinery with `t = 1` gives classical
//! Jacobi families whose second parameter is raised, which the disk cells use.

mod diff;
mod transform;

pub use diff::{derivative_by_quadrature, weighted_derivative, DerivativeChain, WeightSubset};
pub use diff::weighted_c_derivative;
pub use transform::{from_chebyshev_coeffs, to_chebyshev_coeffs, ChebCoeffs, ChebyshevConnection, WeightMode};

use crate::banded::{banded_cholesky, banded_qr, similarity_via_q, similarity_via_r, BandedMatrix, HouseholderQ};
use crate::classical::{self, ClassicalFamily};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// How the Jacobi matrix of `c + 1` or `c + 2` is obtained from that of `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// One Cholesky factorization per unit step, then `R X R^{-1}`.
    CholeskyR,
    /// QR of `tI - X` every two steps, then `Q^T X Q`.
    #[default]
    QrQ,
    /// QR of `tI - X` every two steps, then `R X R^{-1}`.
    QrR,
}

/// One family in a hierarchy.
#[derive(Clone, Debug)]
pub struct Level {
    pub jacobi: BandedMatrix,
    pub mass: f64,
    /// Upper bidiagonal `R` with `R^T R = sI - X`.
    pub chol: BandedMatrix,
    /// QR factors of `sI - X`, with positive diagonal in `R`.
    pub q: HouseholderQ,
    pub qr_r: BandedMatrix,
}

impl Level {
    pub fn size(&self) -> usize {
        self.jacobi.rows()
    }

    pub fn norm0(&self) -> f64 {
        1.0 / self.mass.sqrt()
    }

    /// `Q_0, ..., Q_{n-1}` at `x`.
    pub fn eval(&self, n: usize, x: f64) -> Vec<f64> {
        classical::eval_recurrence(&self.jacobi, self.norm0(), n, x)
    }

    pub fn eval_with_derivative(&self, n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
        classical::eval_with_derivative(&self.jacobi, self.norm0(), n, x)
    }

    pub fn clenshaw(&self, coeffs: &[f64], x: f64) -> f64 {
        classical::clenshaw(&self.jacobi, self.norm0(), coeffs, x)
    }

    fn build(jacobi: BandedMatrix, mass: f64, s: f64) -> Result<Level> {
        let shifted = jacobi.shift_neg(s);
        let chol = banded_cholesky(&shifted)?;
        let (q, qr_r) = banded_qr(&shifted)?;
        Ok(Level { jacobi, mass, chol, q, qr_r })
    }
}

/// Families `c = 0..=cmax` for fixed `(t, a, b)`.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    s: f64,
    a: f64,
    b: f64,
    strategy: Strategy,
    levels: Vec<Level>,
}

fn steps(c: usize, strategy: Strategy) -> usize {
    match strategy {
        Strategy::CholeskyR => c,
        _ => c / 2 + c % 2,
    }
}

impl Hierarchy {
    /// Semiclassical hierarchy; every level keeps at least `n_needed` rows.
    pub fn semiclassical(t: f64, a: f64, b: f64, cmax: usize, n_needed: usize, strategy: Strategy) -> Result<Self> {
        if !(t > 1.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("t must exceed 1, got {t}")));
        }
        let base = ClassicalFamily::unit_interval(a, b)?;
        let n0 = n_needed + 2 * steps(cmax, strategy) + 4;
        let size = |c: usize| n0 - 2 * steps(c, strategy);
        let mut levels: Vec<Level> = Vec::with_capacity(cmax + 1);
        levels.push(Level::build(base.jacobi_matrix(n0), base.mass(), t)?);
        for c in 1..=cmax {
            let prev = &levels[c - 1];
            let mass = prev.mass * (t - prev.jacobi.get(0, 0));
            let x = match strategy {
                Strategy::CholeskyR => similarity_via_r(&prev.jacobi, &prev.chol)?,
                _ if c == 1 => similarity_via_r(&prev.jacobi, &prev.chol)?,
                Strategy::QrQ => similarity_via_q(&levels[c - 2].jacobi, &levels[c - 2].q)?,
                Strategy::QrR => similarity_via_r(&levels[c - 2].jacobi, &levels[c - 2].qr_r)?,
            };
            let n = size(c);
            levels.push(Level::build(x.truncate(n, n), mass, t)?);
        }
        Ok(Hierarchy { s: t, a, b, strategy, levels })
    }

    /// Classical families with weight `x^a (1-x)^(b+c)` indexed by `c`, the
    /// `t = 1` limit of the semiclassical hierarchy.
    pub fn classical(a: f64, b: f64, cmax: usize, n_needed: usize) -> Result<Self> {
        let n = n_needed + 4;
        let levels = (0..=cmax)
            .map(|c| {
                let fam = ClassicalFamily::unit_interval(a, b + c as f64)?;
                Level::build(fam.jacobi_matrix(n), fam.mass(), 1.0)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Hierarchy { s: 1.0, a, b, strategy: Strategy::CholeskyR, levels })
    }

    /// `t`, or 1 for a classical hierarchy.
    pub fn t(&self) -> f64 {
        self.s
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn strategy(&self) -> Strategy {
        self.strategy
    }
    pub fn cmax(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, c: usize) -> &Level {
        &self.levels[c]
    }

    pub fn try_level(&self, c: usize, rows: usize) -> Result<&Level> {
        let lvl = self
            .levels
            .get(c)
            .ok_or_else(|| Error::InvalidParameter(format!("level {c} beyond hierarchy depth {}", self.cmax())))?;
        if lvl.size() < rows {
            return Err(Error::DimensionMismatch(format!(
                "level {c} has {} rows, {rows} requested",
                lvl.size()
            )));
        }
        Ok(lvl)
    }

    /// Leading `n x n` Jacobi matrix of level `c`.
    pub fn jacobi(&self, c: usize, n: usize) -> Result<BandedMatrix> {
        Ok(self.try_level(c, n)?.jacobi.truncate(n, n))
    }

    /// `R` with `Q^(c) = Q^(c+1) R`, i.e. the Cholesky factor of `sI - X_c`.
    pub fn raise_c(&self, c: usize, n: usize) -> Result<BandedMatrix> {
        Ok(self.try_level(c, n)?.chol.truncate(n, n))
    }

    pub(crate) fn min_size(&self) -> usize {
        self.levels.iter().map(Level::size).min().unwrap_or(0)
    }
}

/// Jacobi matrix of the semiclassical family `(t, a, b, c)`, `n x n`.
pub fn semiclassical_jacobi(t: f64, a: f64, b: f64, c: usize, n: usize, strategy: Strategy) -> Result<BandedMatrix> {
    Hierarchy::semiclassical(t, a, b, c, n, strategy)?.jacobi(c, n)
}

/// `R` with `Q^(a,b,c) = Q^(a+da, b+db, c+dc) R`, from the Jacobi matrix `x`
/// of `(a, b, c)`.
///
/// Uses one Cholesky factorization of `X^da (I-X)^db (tI-X)^dc`, computed
/// at full size and truncated by the total raise. If that product is too
/// ill-conditioned the raise is split into unit steps.
pub fn raising_connection(x: &BandedMatrix, t: f64, da: usize, db: usize, dc: usize) -> Result<BandedMatrix> {
    let n = x.rows();
    let total = da + db + dc;
    let out = n.checked_sub(total + 1).ok_or_else(|| Error::DimensionMismatch("section too small".into()))?;
    if total == 0 {
        return Ok(BandedMatrix::identity(out));
    }
    let factors: Vec<(f64, f64)> = std::iter::repeat((0.0, -1.0))
        .take(da)
        .chain(std::iter::repeat((1.0, 1.0)).take(db))
        .chain(std::iter::repeat((t, 1.0)).take(dc))
        .collect();
    // factor (s, sign) stands for s I - sign X
    let unit = |x: &BandedMatrix, (s, sign): (f64, f64)| -> BandedMatrix {
        if sign < 0.0 {
            x.clone()
        } else {
            x.shift_neg(s)
        }
    };
    let product = factors
        .iter()
        .try_fold(BandedMatrix::identity(n), |acc, &f| acc.matmul(&unit(x, f)))?;
    match banded_cholesky(&product) {
        Ok(r) => Ok(r.truncate(out, out)),
        Err(Error::NotPositiveDefinite { .. }) if total > 1 => {
            let mut cur = x.clone();
            let mut acc = BandedMatrix::identity(n);
            for &f in &factors {
                let r = banded_cholesky(&unit(&cur, f))?;
                let m = cur.rows();
                cur = similarity_via_r(&cur, &r)?.truncate(m - 1, m - 1);
                acc = r.truncate(m - 1, m - 1).matmul(&acc.truncate(m - 1, m - 1))?;
            }
            Ok(acc.truncate(out, out))
        }
        Err(e) => Err(e),
    }
}

type CacheKey = (u64, u64, u64, Strategy);

/// Shared hierarchies keyed by `(t, a, b)`. Readers never block each other;
/// a hierarchy that is too shallow or too small is rebuilt and replaced.
#[derive(Default)]
pub struct HierarchyCache {
    map: RwLock<HashMap<CacheKey, Arc<Hierarchy>>>,
}

impl HierarchyCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Hierarchy with depth at least `cmax` and at least `n_needed` rows
    /// per level. `t == 1` gives the classical hierarchy.
    pub fn get(&self, t: f64, a: f64, b: f64, cmax: usize, n_needed: usize) -> Result<Arc<Hierarchy>> {
        let strategy = Strategy::default();
        let key = (t.to_bits(), a.to_bits(), b.to_bits(), strategy);
        if let Some(h) = self.map.read().expect("cache poisoned").get(&key) {
            if h.cmax() >= cmax && h.min_size() >= n_needed + 4 {
                return Ok(h.clone());
            }
        }
        let (cmax, n_needed) = match self.map.read().expect("cache poisoned").get(&key) {
            Some(h) => (cmax.max(h.cmax()), n_needed.max(h.min_size().saturating_sub(4))),
            None => (cmax, n_needed),
        };
        let h = Arc::new(if t == 1.0 {
            Hierarchy::classical(a, b, cmax, n_needed)?
        } else {
            Hierarchy::semiclassical(t, a, b, cmax, n_needed, strategy)?
        });
        self.map.write().expect("cache poisoned").insert(key, h.clone());
        Ok(h)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.map.write().expect("cache poisoned").clear();
    }
}

/// Process-wide cache.
pub fn global_cache() -> &'static HierarchyCache {
    static CACHE: std::sync::OnceLock<HierarchyCache> = std::sync::OnceLock::new();
    CACHE.get_or_init(HierarchyCache::new)
}
