use super::BandedMatrix;
use crate::error::{Error, Result};

/// Upper-triangular `R` with `R^T R = A` for symmetric positive definite banded `A`.
///
/// `R` inherits the upper bandwidth of `A`. The factor of a finite section
/// equals the leading section of the factor of the infinite matrix.
pub fn banded_cholesky(a: &BandedMatrix) -> Result<BandedMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("cholesky of {:?}", a.shape())));
    }
    let n = a.rows();
    let p = a.upper().max(a.lower());
    let max_diag = a.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = 1e-14 * max_diag;
    let mut r = BandedMatrix::zeros(n, n, 0, p);
    for i in 0..n {
        let k0 = i.saturating_sub(p);
        let mut s = a.get(i, i);
        for k in k0..i {
            let v = r.get(k, i);
            s -= v * v;
        }
        if !(s > tol) {
            return Err(Error::NotPositiveDefinite { index: i, pivot: s });
        }
        let d = s.sqrt();
        r.set(i, i, d);
        for j in (i + 1)..(i + p + 1).min(n) {
            let mut s = a.get(i, j);
            for k in j.saturating_sub(p)..i {
                s -= r.get(k, i) * r.get(k, j);
            }
            r.set(i, j, s / d);
        }
    }
    Ok(r)
}

/// Householder reflector `I - tau v v^T` acting on rows `start..start+v.len()`, with `v[0] = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reflector {
    pub start: usize,
    pub v: Vec<f64>,
    pub tau: f64,
}

impl Reflector {
    #[inline]
    fn apply(&self, x: &mut [f64]) {
        let end = (self.start + self.v.len()).min(x.len());
        if self.start >= end || self.tau == 0.0 {
            return;
        }
        let seg = &mut x[self.start..end];
        let dot: f64 = seg.iter().zip(&self.v).map(|(a, b)| a * b).sum();
        let s = self.tau * dot;
        seg.iter_mut().zip(&self.v).for_each(|(a, b)| *a -= s * b);
    }
}

/// Orthogonal factor `Q = H_0 H_1 ... H_{n-1}` stored as reflectors.
#[derive(Clone, Debug, PartialEq)]
pub struct HouseholderQ {
    n: usize,
    reflectors: Vec<Reflector>,
}

impl HouseholderQ {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn reflectors(&self) -> &[Reflector] {
        &self.reflectors
    }

    /// `Q x`. Vectors shorter than `size()` are treated as zero-padded views
    /// and only reflectors inside them are applied.
    pub fn apply(&self, x: &mut [f64]) {
        for h in self.reflectors.iter().rev() {
            h.apply(x);
        }
    }

    /// `Q^T x`.
    pub fn apply_transpose(&self, x: &mut [f64]) {
        for h in &self.reflectors {
            h.apply(x);
        }
    }

    /// Lower bandwidth of `Q`, equal to the longest reflector minus one.
    pub fn lower_bandwidth(&self) -> usize {
        self.reflectors.iter().map(|h| h.v.len()).max().unwrap_or(1) - 1
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n;
        let mut q = nalgebra::DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            self.apply(&mut e);
            for i in 0..n {
                q[(i, j)] = e[i];
            }
        }
        q
    }
}

/// Banded QR with nonnegative diagonal in `R`.
///
/// `R` has upper bandwidth `l + u`; each reflector spans `l + 1` rows.
pub fn banded_qr(a: &BandedMatrix) -> Result<(HouseholderQ, BandedMatrix)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("qr of {:?}", a.shape())));
    }
    let n = a.rows();
    let (l, u) = (a.lower(), a.upper());
    let mut w = a.with_bandwidths(l, l + u);
    let mut reflectors = Vec::with_capacity(n);
    let mut col = vec![0.0; l + 1];
    for j in 0..n {
        let len = (l + 1).min(n - j);
        for (i, c) in col.iter_mut().enumerate().take(len) {
            *c = w.get(j + i, j);
        }
        let alpha = col[0];
        let sigma: f64 = col[1..len].iter().map(|v| v * v).sum();
        let norm = (alpha * alpha + sigma).sqrt();
        if norm == 0.0 {
            return Err(Error::RankDeficient { column: j });
        }
        if sigma == 0.0 && alpha >= 0.0 {
            reflectors.push(Reflector { start: j, v: vec![1.0], tau: 0.0 });
            continue;
        }
        // v = x - norm e1, written without cancellation when alpha > 0
        let v0 = if alpha <= 0.0 { alpha - norm } else { -sigma / (alpha + norm) };
        let mut v = Vec::with_capacity(len);
        v.push(1.0);
        v.extend(col[1..len].iter().map(|c| c / v0));
        let tau = 2.0 * v0 * v0 / (v0 * v0 + sigma);
        let end_col = (j + l + u + 1).min(n);
        for c in j..end_col {
            let dot: f64 = (0..len).map(|i| v[i] * w.get(j + i, c)).sum();
            if dot == 0.0 {
                continue;
            }
            let s = tau * dot;
            for (i, vi) in v.iter().enumerate() {
                if w.in_band(j + i, c) {
                    w.add_to(j + i, c, -s * vi);
                }
            }
        }
        w.set(j, j, norm);
        for i in 1..len {
            w.set(j + i, j, 0.0);
        }
        reflectors.push(Reflector { start: j, v, tau });
    }
    let mut r = BandedMatrix::zeros(n, n, 0, l + u);
    for i in 0..n {
        for j in i..(i + l + u + 1).min(n) {
            r.set(i, j, w.get(i, j));
        }
    }
    Ok((HouseholderQ { n, reflectors }, r))
}

/// `Y = R X R^{-1}` for symmetric tridiagonal `X` and upper-triangular `R`
/// with `R^T R` a polynomial in `X`.
///
/// The result is symmetric tridiagonal, so only the diagonal and the
/// sub-diagonal are computed, three operations each. The last diagonal entry
/// depends on the unseen row `n` and should be discarded by the caller.
pub fn similarity_via_r(x: &BandedMatrix, r: &BandedMatrix) -> Result<BandedMatrix> {
    let n = x.rows();
    if r.rows() < n || !x.is_square() {
        return Err(Error::DimensionMismatch(format!("similarity of {:?} by {:?}", x.shape(), r.shape())));
    }
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for i in 0..n {
        let rii = r.get(i, i);
        if rii == 0.0 {
            return Err(Error::SingularR { index: i });
        }
        let mut d = x.get(i, i);
        if i + 1 < n {
            d += r.get(i, i + 1) * x.get(i + 1, i) / rii;
            off[i] = x.get(i + 1, i) * r.get(i + 1, i + 1) / rii;
        }
        if i > 0 {
            d -= r.get(i - 1, i) * x.get(i, i - 1) / r.get(i - 1, i - 1);
        }
        diag[i] = d;
    }
    Ok(BandedMatrix::sym_tridiagonal(&diag, &off))
}

/// `Y = Q^T X Q` for symmetric tridiagonal `X` and a reflector chain with
/// reflectors of length at most two.
///
/// Each reflector is applied on both sides to a symmetric working band of
/// half-width two, which holds the transient bulge; the tridiagonal part is
/// returned. The last row is inexact, like the input section.
pub fn similarity_via_q(x: &BandedMatrix, q: &HouseholderQ) -> Result<BandedMatrix> {
    let n = x.rows();
    if q.size() < n || !x.is_square() {
        return Err(Error::DimensionMismatch(format!("similarity of {:?} by Q of size {}", x.shape(), q.size())));
    }
    if q.lower_bandwidth() > 1 {
        return Err(Error::InvalidParameter("similarity_via_q expects 2x2 reflectors".into()));
    }
    let hw = 2;
    let mut w = x.with_bandwidths(hw, hw);
    for h in q.reflectors() {
        let len = h.v.len();
        if h.tau == 0.0 || h.start + len > n {
            continue;
        }
        let (s, tau) = (h.start, h.tau);
        let lo = s.saturating_sub(hw);
        if len == 1 {
            let f = 1.0 - tau;
            for c in lo..(s + hw + 1).min(n) {
                if w.in_band(s, c) {
                    w.set(s, c, w.get(s, c) * f);
                }
                if c != s && w.in_band(c, s) {
                    w.set(c, s, w.get(c, s) * f);
                }
            }
            continue;
        }
        let v1 = h.v[1];
        let hi = (s + 1 + hw + 1).min(n);
        // left: rows s, s+1
        for c in lo..hi {
            let a0 = w.get(s, c);
            let a1 = w.get(s + 1, c);
            let t = tau * (a0 + v1 * a1);
            if w.in_band(s, c) {
                w.set(s, c, a0 - t);
            }
            if w.in_band(s + 1, c) {
                w.set(s + 1, c, a1 - t * v1);
            }
        }
        // right: columns s, s+1
        for rr in lo..hi {
            let a0 = w.get(rr, s);
            let a1 = w.get(rr, s + 1);
            let t = tau * (a0 + v1 * a1);
            if w.in_band(rr, s) {
                w.set(rr, s, a0 - t);
            }
            if w.in_band(rr, s + 1) {
                w.set(rr, s + 1, a1 - t * v1);
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| w.get(i, i)).collect();
    let off: Vec<f64> = (0..n.saturating_sub(1))
        .map(|i| 0.5 * (w.get(i + 1, i) + w.get(i, i + 1)))
        .collect();
    Ok(BandedMatrix::sym_tridiagonal(&diag, &off))
}
