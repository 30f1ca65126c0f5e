//! Classical orthogonal polynomial families on an interval.
//!
//! Jacobi matrices use the column convention `x p(x) = p(x) X` with
//! `p = (p_0, p_1, ...)` a row vector, so `X[n+1, n]` links `p_n` to `p_{n+1}`.

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyKind {
    /// Orthonormal Jacobi with weight `(1-y)^a (1+y)^b` on the reference interval.
    Jacobi { a: f64, b: f64 },
    /// Chebyshev first kind, `T_n(1) = 1`.
    ChebyshevT,
    /// Ultraspherical `C^(2)`, standard normalisation.
    Ultraspherical2,
}

/// A classical family mapped from `[-1, 1]` onto `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalFamily {
    pub kind: FamilyKind,
    pub lo: f64,
    pub hi: f64,
}

/// Nodes and weights of a Gauss rule.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Recurrence coefficients of orthonormal Jacobi on `[-1, 1]`:
/// diagonal `alpha_n` and off-diagonal `beta_n` linking `n-1` and `n`.
fn jacobi_alpha(a: f64, b: f64, n: usize) -> f64 {
    if n == 0 {
        return (b - a) / (a + b + 2.0);
    }
    let s = 2.0 * n as f64 + a + b;
    (b * b - a * a) / (s * (s + 2.0))
}

fn jacobi_beta(a: f64, b: f64, n: usize) -> f64 {
    debug_assert!(n >= 1);
    if n == 1 {
        let s = 2.0 + a + b;
        return (4.0 * (1.0 + a) * (1.0 + b) / (s * s * (s + 1.0))).sqrt();
    }
    let nf = n as f64;
    let s = 2.0 * nf + a + b;
    (4.0 * nf * (nf + a) * (nf + b) * (nf + a + b) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
}

impl ClassicalFamily {
    pub fn jacobi(a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::InvalidParameter(format!("Jacobi parameters must exceed -1, got ({a}, {b})")));
        }
        Ok(ClassicalFamily { kind: FamilyKind::Jacobi { a, b }, lo: -1.0, hi: 1.0 })
    }

    /// Orthonormal polynomials on `[0, 1]` with weight `x^a (1-x)^b`.
    pub fn unit_interval(a: f64, b: f64) -> Result<Self> {
        Ok(Self::jacobi(b, a)?.on_interval(0.0, 1.0))
    }

    pub fn chebyshev_t() -> Self {
        ClassicalFamily { kind: FamilyKind::ChebyshevT, lo: -1.0, hi: 1.0 }
    }

    pub fn ultraspherical2() -> Self {
        ClassicalFamily { kind: FamilyKind::Ultraspherical2, lo: -1.0, hi: 1.0 }
    }

    pub fn on_interval(self, lo: f64, hi: f64) -> Self {
        ClassicalFamily { lo, hi, ..self }
    }

    /// `n x n` Jacobi matrix on `[lo, hi]`.
    pub fn jacobi_matrix(&self, n: usize) -> BandedMatrix {
        let mut x = BandedMatrix::zeros(n, n, 1, 1);
        for k in 0..n {
            let (d, sub, sup) = match self.kind {
                FamilyKind::Jacobi { a, b } => {
                    let beta = jacobi_beta(a, b, k + 1);
                    (jacobi_alpha(a, b, k), beta, beta)
                }
                FamilyKind::ChebyshevT => (0.0, if k == 0 { 1.0 } else { 0.5 }, 0.5),
                FamilyKind::Ultraspherical2 => {
                    let kf = k as f64;
                    // x C_k = ((k+1) C_{k+1} + (k+3) C_{k-1}) / (2(k+2))
                    (0.0, (kf + 1.0) / (2.0 * (kf + 2.0)), (kf + 4.0) / (2.0 * (kf + 3.0)))
                }
            };
            x.set(k, k, d);
            if k + 1 < n {
                x.set(k + 1, k, sub);
                x.set(k, k + 1, sup);
            }
        }
        let half = 0.5 * (self.hi - self.lo);
        let mid = 0.5 * (self.hi + self.lo);
        let mut y = x.scale(half);
        for k in 0..n {
            y.add_to(k, k, mid);
        }
        y
    }

    /// Integral of the weight over `[lo, hi]`.
    pub fn mass(&self) -> f64 {
        let half = 0.5 * (self.hi - self.lo);
        match self.kind {
            FamilyKind::Jacobi { a, b } => {
                ((a + b + 1.0) * (self.hi - self.lo).ln() + ln_beta(a + 1.0, b + 1.0)).exp()
            }
            FamilyKind::ChebyshevT => std::f64::consts::PI * half,
            FamilyKind::Ultraspherical2 => 3.0 * std::f64::consts::PI / 8.0 * half,
        }
    }

    /// The constant polynomial `p_0`.
    pub fn p0(&self) -> f64 {
        match self.kind {
            FamilyKind::Jacobi { .. } => 1.0 / self.mass().sqrt(),
            _ => 1.0,
        }
    }

    /// `p_0(x), ..., p_{n-1}(x)`.
    pub fn eval_all(&self, n: usize, x: f64) -> Vec<f64> {
        eval_recurrence(&self.jacobi_matrix(n.max(1)), self.p0(), n, x)
    }

    /// `sum_k c_k p_k(x)`.
    pub fn clenshaw(&self, coeffs: &[f64], x: f64) -> f64 {
        clenshaw(&self.jacobi_matrix(coeffs.len().max(1)), self.p0(), coeffs, x)
    }

    /// Gauss rule with `n` nodes for the family's weight.
    pub fn gauss_rule(&self, n: usize) -> QuadratureRule {
        gauss_rule_from_jacobi(&self.jacobi_matrix(n), self.mass())
    }
}

/// `p_0(x), ..., p_{n-1}(x)` from a Jacobi matrix with at least `n` rows.
pub fn eval_recurrence(x_mat: &BandedMatrix, p0: f64, n: usize, x: f64) -> Vec<f64> {
    eval_with_derivative(x_mat, p0, n, x).0
}

/// Values and first derivatives of `p_0, ..., p_{n-1}` at `x`.
pub fn eval_with_derivative(x_mat: &BandedMatrix, p0: f64, n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n];
    let mut dp = vec![0.0; n];
    if n == 0 {
        return (p, dp);
    }
    p[0] = p0;
    for k in 0..n - 1 {
        let (pm, dpm, up) = if k > 0 { (p[k - 1], dp[k - 1], x_mat.get(k - 1, k)) } else { (0.0, 0.0, 0.0) };
        let sub = x_mat.get(k + 1, k);
        let d = x_mat.get(k, k);
        p[k + 1] = ((x - d) * p[k] - up * pm) / sub;
        dp[k + 1] = (p[k] + (x - d) * dp[k] - up * dpm) / sub;
    }
    (p, dp)
}

/// Clenshaw evaluation of `sum_k c_k p_k(x)`; `x_mat` needs `coeffs.len()` rows.
pub fn clenshaw(x_mat: &BandedMatrix, p0: f64, coeffs: &[f64], x: f64) -> f64 {
    let n = coeffs.len();
    if n == 0 {
        return 0.0;
    }
    let (mut b1, mut b2) = (0.0, 0.0);
    for k in (0..n).rev() {
        let a_k = if k + 1 < n { (x - x_mat.get(k, k)) / x_mat.get(k + 1, k) } else { 0.0 };
        let b_next = if k + 2 < n { -x_mat.get(k, k + 1) / x_mat.get(k + 2, k + 1) } else { 0.0 };
        let b = coeffs[k] + a_k * b1 + b_next * b2;
        b2 = b1;
        b1 = b;
    }
    p0 * b1
}

/// `sum_k c_k T_k(y)`.
pub fn chebyshev_t_eval(coeffs: &[f64], y: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for k in (1..coeffs.len()).rev() {
        let b = coeffs[k] + 2.0 * y * b1 - b2;
        b2 = b1;
        b1 = b;
    }
    match coeffs.first() {
        Some(&c0) => c0 + y * b1 - b2,
        None => 0.0,
    }
}

/// Value and derivative of `sum_k c_k T_k(y)`.
pub fn chebyshev_t_eval_with_derivative(coeffs: &[f64], y: f64) -> (f64, f64) {
    let (mut t0, mut t1) = (1.0, y);
    let (mut d0, mut d1) = (0.0, 1.0);
    let mut f = 0.0;
    let mut df = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        let (t, d) = match k {
            0 => (1.0, 0.0),
            1 => (y, 1.0),
            _ => {
                let t2 = 2.0 * y * t1 - t0;
                let d2 = 2.0 * t1 + 2.0 * y * d1 - d0;
                t0 = t1;
                t1 = t2;
                d0 = d1;
                d1 = d2;
                (t2, d2)
            }
        };
        f += c * t;
        df += c * d;
    }
    (f, df)
}

/// `sum_k c_k T_k(M)` for a square banded `M`, by matrix Clenshaw.
/// The result's bandwidth grows by that of `M` per degree.
pub fn chebyshev_t_matrix(coeffs: &[f64], m: &BandedMatrix) -> Result<BandedMatrix> {
    let n = m.rows();
    let deg = coeffs.len().saturating_sub(1);
    let (l, u) = (m.lower() * deg, m.upper() * deg);
    let mut b1 = BandedMatrix::zeros(n, n, l, u);
    let mut b2 = BandedMatrix::zeros(n, n, l, u);
    for k in (1..coeffs.len()).rev() {
        let mb = m.matmul(&b1)?.scale(2.0).with_bandwidths(l, u);
        let mut b = mb.sub(&b2)?.with_bandwidths(l, u);
        for i in 0..n {
            b.add_to(i, i, coeffs[k]);
        }
        b2 = b1;
        b1 = b;
    }
    let mut out = m.matmul(&b1)?.with_bandwidths(l, u).sub(&b2)?.with_bandwidths(l, u);
    if let Some(&c0) = coeffs.first() {
        for i in 0..n {
            out.add_to(i, i, c0);
        }
    }
    Ok(out)
}

/// Eigenvalues and first eigenvector components of a symmetric tridiagonal
/// matrix by implicit QL with Wilkinson shifts.
pub fn sym_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = off.iter().take(n.saturating_sub(1)).cloned().collect();
    e.push(0.0);
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    (idx.iter().map(|&i| d[i]).collect(), idx.iter().map(|&i| z[i]).collect())
}

/// Golub-Welsch rule from a (possibly non-symmetric) Jacobi matrix.
pub fn gauss_rule_from_jacobi(x: &BandedMatrix, mass: f64) -> QuadratureRule {
    let n = x.rows();
    let diag = x.diagonal();
    let off: Vec<f64> = (0..n.saturating_sub(1))
        .map(|k| (x.get(k + 1, k) * x.get(k, k + 1)).sqrt())
        .collect();
    let (nodes, z) = sym_tridiagonal_eigen(&diag, &off);
    let weights = z.iter().map(|v| mass * v * v).collect();
    QuadratureRule { nodes, weights }
}

/// `T -> C^(2)` conversion: `T(x) = C^(2)(x) S`, upper bandwidth 4.
pub fn conversion_t_to_c2(n: usize) -> BandedMatrix {
    // T -> C^(1): T_0 = C_0, T_1 = C_1 / 2, T_k = (C_k - C_{k-2}) / 2
    let mut s0 = BandedMatrix::zeros(n, n, 0, 2);
    // C^(1) -> C^(2): C1_k = (C2_k - C2_{k-2}) / (k + 1)
    let mut s1 = BandedMatrix::zeros(n, n, 0, 2);
    for k in 0..n {
        s0.set(k, k, if k == 0 { 1.0 } else { 0.5 });
        if k >= 2 {
            s0.set(k - 2, k, -0.5);
        }
        let f = 1.0 / (k as f64 + 1.0);
        s1.set(k, k, f);
        if k >= 2 {
            s1.set(k - 2, k, -f);
        }
    }
    s1.matmul(&s0).expect("square conversion")
}

/// Connection from Chebyshev to orthonormal Jacobi, in the variable
/// `y = 1 - 2x`: `T(y) R_T = P^(a,b)(y)`. Also returns the diagonal `S`
/// with `Q^(a,b)(x) = P^(a,b)(1 - 2x) S^{-1}`, where `Q^(a,b)` is orthonormal
/// on `[0, 1]` for the weight `x^a (1-x)^b`.
///
/// `R_T` is upper triangular and dense; only integer parameters are supported.
pub fn conversion_t_to_jacobi(a: f64, b: f64, n: usize) -> Result<(BandedMatrix, Vec<f64>)> {
    let integer = |v: f64| v >= 0.0 && v.fract() == 0.0;
    if !integer(a) || !integer(b) {
        return Err(Error::InvalidParameter(format!(
            "Chebyshev connection needs nonnegative integer parameters, got ({a}, {b})"
        )));
    }
    let fam = ClassicalFamily::jacobi(a, b)?;
    let mut r = BandedMatrix::zeros(n, n, 0, n.saturating_sub(1));
    let mut prev: Vec<f64> = Vec::new();
    let mut cur = vec![fam.p0()];
    for k in 0..n {
        for (i, &v) in cur.iter().enumerate() {
            r.set(i, k, v);
        }
        // y * sum c_i T_i = sum c_i (T_{i-1} + T_{i+1}) / 2, with y T_0 = T_1
        let mut next = vec![0.0; k + 2];
        for (i, &c) in cur.iter().enumerate() {
            if i == 0 {
                next[1] += c;
            } else {
                next[i - 1] += 0.5 * c;
                next[i + 1] += 0.5 * c;
            }
        }
        let alpha = jacobi_alpha(a, b, k);
        for (i, &c) in cur.iter().enumerate() {
            next[i] -= alpha * c;
        }
        if k > 0 {
            let beta = jacobi_beta(a, b, k);
            for (i, &c) in prev.iter().enumerate() {
                next[i] -= beta * c;
            }
        }
        let beta_next = jacobi_beta(a, b, k + 1);
        next.iter_mut().for_each(|v| *v /= beta_next);
        prev = std::mem::replace(&mut cur, next);
    }
    let scale = 2f64.powf(-(a + b + 1.0) / 2.0);
    let s = (0..n).map(|k| if k % 2 == 0 { scale } else { -scale }).collect();
    Ok((r, s))
}
