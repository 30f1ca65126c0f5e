//! Derivatives of semiclassical families, optionally weighted.

use super::{raising_connection, Hierarchy, Level};
use crate::banded::BandedMatrix;
use crate::classical;
use crate::error::{Error, Result};

/// Subset of the weight factors `x`, `1-x`, `t-x` that multiply the family
/// before differentiating.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct WeightSubset {
    pub a: bool,
    pub b: bool,
    pub c: bool,
}

impl WeightSubset {
    pub const NONE: Self = WeightSubset { a: false, b: false, c: false };
    pub const C: Self = WeightSubset { a: false, b: false, c: true };
    pub const AB: Self = WeightSubset { a: true, b: true, c: false };
    pub const ABC: Self = WeightSubset { a: true, b: true, c: true };

    pub fn len(&self) -> usize {
        self.a as usize + self.b as usize + self.c as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parameters of the target family: weighted ones drop by one, the
    /// others rise by one.
    pub fn target(&self, (a, b, c): (f64, f64, usize)) -> (f64, f64, isize) {
        let step = |w: bool| if w { -1.0 } else { 1.0 };
        (a + step(self.a), b + step(self.b), c as isize + step(self.c) as isize)
    }
}

/// `D^(a+1,b+1,c+1)_(a,b,c)` for every `c` in a hierarchy:
/// `d/dx Q^(a,b,c) = Q^(a+1,b+1,c+1) D_c`, upper bandwidth 2 on offsets 1..2.
#[derive(Clone, Debug)]
pub struct DerivativeChain {
    mats: Vec<BandedMatrix>,
}

impl DerivativeChain {
    /// `base` holds `(a, b, .)` and `raised` holds `(a+1, b+1, .)` with the
    /// same `t`; `raised` must reach level `cmax + 1`.
    pub fn build(base: &Hierarchy, raised: &Hierarchy, cmax: usize) -> Result<Self> {
        if raised.cmax() < cmax + 1 || base.cmax() < cmax {
            return Err(Error::InvalidParameter("hierarchies too shallow for derivative chain".into()));
        }
        let (a, b) = (base.a(), base.b());
        let n0 = base.level(0).size().min(raised.level(1).size());
        let mut d_cl = BandedMatrix::zeros(n0, n0, 0, 1);
        for k in 1..n0 {
            let kf = k as f64;
            d_cl.set(k - 1, k, (kf * (kf + a + b + 1.0)).sqrt());
        }
        let d0 = raised.level(0).chol.truncate(n0, n0).matmul(&d_cl)?;
        let mut mats = vec![d0.truncate(n0 - 1, n0 - 1)];
        for c in 0..cmax {
            let prev = &mats[c];
            let r_up = &raised.level(c + 1).chol;
            let r_c = &base.level(c).chol;
            let n = prev.rows().min(r_up.rows()).min(r_c.rows()) - 1;
            let mut d = BandedMatrix::zeros(n, n, 0, 2);
            for i in 0..n {
                // A = R_up D_c, entries (i, i+1) and (i, i+2)
                let a_at = |j: usize| -> f64 {
                    (i..=i + 1).map(|k| r_up.get(i, k) * prev.get(k, j)).sum()
                };
                let d1 = a_at(i + 1) / r_c.get(i + 1, i + 1);
                if i + 1 < n {
                    d.set(i, i + 1, d1);
                }
                if i + 2 < n {
                    let d2 = (a_at(i + 2) - d1 * r_c.get(i + 1, i + 2)) / r_c.get(i + 2, i + 2);
                    d.set(i, i + 2, d2);
                }
            }
            mats.push(d);
        }
        Ok(DerivativeChain { mats })
    }

    pub fn cmax(&self) -> usize {
        self.mats.len() - 1
    }

    pub fn get(&self, c: usize) -> &BandedMatrix {
        &self.mats[c]
    }

    /// Leading `rows x cols` block of `D_c`.
    pub fn block(&self, c: usize, rows: usize, cols: usize) -> Result<BandedMatrix> {
        let m = &self.mats[c];
        if m.rows() < rows.max(cols) {
            return Err(Error::DimensionMismatch(format!(
                "derivative at level {c} has {} rows, {} requested",
                m.rows(),
                rows.max(cols)
            )));
        }
        Ok(m.truncate(rows, cols))
    }
}

/// `D` with `d/dx[(t-x)^c Q^(a,b,c)] = (t-x)^(c-1) Q^(a+1,b+1,c-1) D`, for
/// `c >= 1`; upper bidiagonal, `n x n`.
///
/// Built as `R3^{-1} (R1^T D_up - c R2)` where `R1` raises `c` in the
/// `(a+1, b+1)` family, `R2` raises `a` and `b` together and `R3` raises
/// `c - 1` to `c`.
pub fn weighted_c_derivative(
    base: &Hierarchy,
    raised: &Hierarchy,
    chain: &DerivativeChain,
    c: usize,
    n: usize,
) -> Result<BandedMatrix> {
    if c == 0 {
        return Err(Error::InvalidParameter("weighted c-derivative needs c >= 1".into()));
    }
    let m = n + 2;
    let d_up = chain.block(c, m, m)?;
    let r1 = raised.raise_c(c, m)?;
    let r3 = raised.raise_c(c - 1, m)?;
    let x = &base.try_level(c, m + 3)?.jacobi;
    let r2 = raising_connection(&x.truncate(m + 3, m + 3), base.t(), 1, 1, 0)?.truncate(m, m);
    let h = r1.transpose().matmul(&d_up)?.sub(&r2.scale(c as f64))?;
    let mut d = BandedMatrix::zeros(n, n, 0, 1);
    for j in 0..n {
        let djj = h.get(j, j) / r3.get(j, j);
        d.set(j, j, djj);
        if j > 0 {
            d.set(j - 1, j, (h.get(j - 1, j) - r3.get(j - 1, j) * djj) / r3.get(j - 1, j - 1));
        }
    }
    Ok(d)
}

/// Weighted derivative for any subset, `n x n` in the target family.
///
/// `fam(a, b)` must return the hierarchy for parameters `(a, b)` at the
/// common `t`, deep enough for level `c + 1`.
pub fn weighted_derivative<'h>(
    fam: &dyn Fn(f64, f64) -> Result<&'h Hierarchy>,
    chain: &dyn Fn(f64, f64) -> Result<&'h DerivativeChain>,
    (a, b, c): (f64, f64, usize),
    subset: WeightSubset,
    n: usize,
) -> Result<BandedMatrix> {
    match subset {
        WeightSubset::NONE => chain(a, b)?.block(c, n, n),
        WeightSubset::C => weighted_c_derivative(fam(a, b)?, fam(a + 1.0, b + 1.0)?, chain(a, b)?, c, n),
        WeightSubset::AB => {
            // -(D_c from (a-1, b-1, c+1) to (a, b, c))^T
            let d = weighted_c_derivative(fam(a - 1.0, b - 1.0)?, fam(a, b)?, chain(a - 1.0, b - 1.0)?, c + 1, n + 1)?;
            Ok(d.transpose().scale(-1.0).truncate(n, n))
        }
        WeightSubset::ABC => {
            if c == 0 {
                return Err(Error::InvalidParameter("weighting by (t-x)^c needs c >= 1".into()));
            }
            let d = chain(a - 1.0, b - 1.0)?.block(c - 1, n + 1, n + 1)?;
            Ok(d.transpose().scale(-1.0).truncate(n, n))
        }
        _ => {
            let (ta, tb, tc) = subset.target((a, b, c));
            if tc < 0 {
                return Err(Error::InvalidParameter("weighting by (t-x)^c needs c >= 1".into()));
            }
            let src = fam(a, b)?;
            let tgt = fam(ta, tb)?;
            derivative_by_quadrature(src.t(), (a, b, c), src.level(c), tgt.level(tc as usize), subset, n)
        }
    }
}

/// Projection of `d/dx[w_S Q^src_k]` onto the target family by Gauss
/// quadrature in the target weight. Dense `n x n` result stored as banded
/// with full upper and lower bandwidth. Slow; meant for cross-checks and
/// for subsets without a closed recursion.
pub fn derivative_by_quadrature(
    t: f64,
    (a, b, c): (f64, f64, usize),
    src: &Level,
    tgt: &Level,
    subset: WeightSubset,
    n: usize,
) -> Result<BandedMatrix> {
    if src.size() < n + 1 || tgt.size() < n + 4 {
        return Err(Error::DimensionMismatch("levels too small for quadrature projection".into()));
    }
    let q = n + subset.len() + 2;
    let rule = classical::gauss_rule_from_jacobi(&tgt.jacobi.truncate(q, q), tgt.mass);
    let factors: Vec<(bool, f64, fn(f64, f64) -> (f64, f64))> = vec![
        (subset.a, a, |x, _| (x, 1.0)),
        (subset.b, b, |x, _| (1.0 - x, -1.0)),
        (subset.c, c as f64, |x, t| (t - x, -1.0)),
    ];
    let mut d = BandedMatrix::zeros(n, n, n, n);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (p, dp) = src.eval_with_derivative(n, x);
        let qt = tgt.eval(n, x);
        let active: Vec<(f64, f64, f64)> = factors
            .iter()
            .filter(|f| f.0)
            .map(|&(_, pw, f)| {
                let (v, dv) = f(x, t);
                (v, dv, pw)
            })
            .collect();
        let prod: f64 = active.iter().map(|f| f.0).product();
        // sum_s p_s f_s' prod_{s' != s} f_s'
        let dsum: f64 = (0..active.len())
            .map(|s| {
                active[s].2
                    * active[s].1
                    * active.iter().enumerate().filter(|(k, _)| *k != s).map(|(_, f)| f.0).product::<f64>()
            })
            .sum();
        for k in 0..n {
            let poly = dp[k] * prod + p[k] * dsum;
            for (i, qi) in qt.iter().enumerate() {
                d.add_to(i, k, w * poly * qi);
            }
        }
    }
    Ok(d)
}
