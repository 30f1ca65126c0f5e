//! Operator matrices acting on one Fourier mode at a time. Every factory
//! takes the number of coefficients `n` of the source mode block.

use super::{AnnulusBasis, ModeIndex};
use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::semiclassical::{raising_connection, weighted_c_derivative};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Block of a multiplication operator from one mode into `target`.
#[derive(Clone, Debug)]
pub struct CouplingBlock {
    pub target: ModeIndex,
    pub matrix: BandedMatrix,
}

impl AnnulusBasis {
    fn annulus_only(&self, what: &str) -> Result<()> {
        if self.params.is_disk() {
            return Err(Error::InvalidParameter(format!("{what} is defined on annuli only")));
        }
        Ok(())
    }

    fn disk_only(&self, what: &str) -> Result<()> {
        if !self.params.is_disk() {
            return Err(Error::InvalidParameter(format!("{what} is defined on the disk only")));
        }
        Ok(())
    }

    /// `R` with `Q^(1,1,m) R = Q^(0,0,m)`, `(n+2) x (n+2)`.
    pub fn lowering_factor(&self, m: usize, n: usize) -> Result<BandedMatrix> {
        let h = self.hierarchy(0.0, 0.0)?;
        let x = h.jacobi(m, n + 5)?;
        raising_connection(&x, self.params.t, 1, 1, 0)
    }

    /// `L` with `W^(1,1)_{m,j} = Z^(1,1)_{m,j} L`; pentadiagonal.
    pub fn lowering_weighted(&self, m: usize, n: usize) -> Result<BandedMatrix> {
        self.annulus_only("weighted lowering")?;
        let r = self.lowering_factor(m, n)?;
        let t = self.params.t;
        Ok(r.matmul(&r.transpose())?.truncate(n, n).with_bandwidths(2, 2).scale(1.0 / (t * t)))
    }

    /// `Delta W^(1,1)_{m,j} = Z^(1,1)_{m,j} D`; tridiagonal.
    pub fn laplacian_w(&self, m: usize, n: usize) -> Result<BandedMatrix> {
        self.annulus_only("weighted Laplacian")?;
        let base = self.hierarchy(0.0, 0.0)?;
        let raised = self.hierarchy(1.0, 1.0)?;
        let chain = self.chain(0.0, 0.0)?;
        let dc = weighted_c_derivative(&base, &raised, &chain, m + 1, n + 1)?;
        let t = self.params.t;
        Ok(dc.matmul(&dc.transpose())?.truncate(n, n).with_bandwidths(1, 1).scale(-4.0 / t))
    }

    /// `Delta Z^(a,b)_{m,j} = Z^(a+2,b+2)_{m,j} D`; upper with bandwidth 3.
    pub fn laplacian_z(&self, m: usize, n: usize) -> Result<BandedMatrix> {
        self.annulus_only("Laplacian into (a+2, b+2)")?;
        let (a, b) = (self.params.a, self.params.b);
        let d_up = self.chain(a, b)?.block(m, n, n)?;
        let base = self.hierarchy(a + 1.0, b + 1.0)?;
        let raised = self.hierarchy(a + 2.0, b + 2.0)?;
        let chain = self.chain(a + 1.0, b + 1.0)?;
        let dc = weighted_c_derivative(&base, &raised, &chain, m + 1, n)?;
        Ok(dc.matmul(&d_up)?.with_bandwidths(0, 3).scale(4.0 * self.params.t))
    }

    /// `R` with `Z^(a,b)_{m,j} = Z^(a+da,b+db)_{m,j} R`, `n x n`.
    pub fn raising(&self, m: usize, n: usize, da: usize, db: usize) -> Result<BandedMatrix> {
        let (a, b) = (self.params.a, self.params.b);
        let db = if self.params.is_disk() { 0 } else { db };
        let x = self.hierarchy(a, b)?.jacobi(m, n + da + db + 1)?;
        raising_connection(&x, self.params.t, da, db, 0)
    }

    /// `r^2 Z_{m,j} = Z_{m,j} (I - X/t)`.
    pub fn mult_r2(&self, m: usize, n: usize) -> Result<BandedMatrix> {
        let x = self.hierarchy(self.params.a, self.params.b)?.jacobi(m, n)?;
        Ok(x.scale(1.0 / self.params.t).shift_neg(1.0))
    }

    /// Multiplication by `x` or `y` on mode `(m, j)`: blocks into the
    /// neighbouring modes `m - 1` (`n + 1` rows) and `m + 1` (`n` rows).
    pub fn mult_xy(&self, mode: ModeIndex, axis: Axis, n: usize) -> Result<Vec<CouplingBlock>> {
        if mode.j > 1 || (mode.m == 0 && mode.j == 0) {
            return Err(Error::InvalidMode { n: mode.m, m: mode.m, j: mode.j });
        }
        let h = self.hierarchy(self.params.a, self.params.b)?;
        let t = self.params.t;
        let m = mode.m;
        // (target j, sign) for the lower and upper neighbours
        let (down, up) = match (axis, mode.j) {
            (Axis::X, j) => ((j, 1.0), (j, 1.0)),
            (Axis::Y, 1) => ((0, -1.0), (0, 1.0)),
            (Axis::Y, _) => ((1, 1.0), (1, -1.0)),
        };
        let mut out = Vec::with_capacity(2);
        if m > 0 && !(m == 1 && down.0 == 0) {
            let r = h.raise_c(m - 1, n + 1)?;
            out.push(CouplingBlock {
                target: ModeIndex { m: m - 1, j: down.0 },
                matrix: r.transpose().truncate(n + 1, n).scale(down.1 * 0.5 / t),
            });
        }
        let half = if m == 0 { 1.0 } else { 0.5 };
        out.push(CouplingBlock {
            target: ModeIndex { m: m + 1, j: up.0 },
            matrix: h.raise_c(m, n)?.scale(up.1 * half),
        });
        Ok(out)
    }

    /// Disk: `Delta Z^(a)_{m,j} = Z^(a+2)_{m,j} D`, non-zero only on the
    /// first super-diagonal.
    pub fn disk_laplacian(&self, m: usize, n: usize) -> Result<BandedMatrix> {
        self.disk_only("disk Laplacian")?;
        let a = self.params.a;
        let mf = m as f64;
        let mut d = BandedMatrix::zeros(n, n, 0, 1);
        for k in 1..n {
            let kf = k as f64;
            let v = (kf + mf) * (kf + a + 1.0) * kf * (kf + a + mf + 1.0);
            d.set(k - 1, k, -4.0 * v.sqrt());
        }
        Ok(d)
    }

    /// Disk with weight exponent 1: `Delta [(1-r^2) Z^(1)_{m,j}] = Z^(1)_{m,j} D`
    /// with `D` diagonal.
    pub fn disk_weighted_laplacian(&self, m: usize, n: usize) -> Result<BandedMatrix> {
        self.disk_only("weighted disk Laplacian")?;
        if self.params.a != 1.0 {
            return Err(Error::InvalidParameter("weighted disk Laplacian needs weight exponent 1".into()));
        }
        let d: Vec<f64> = (0..n).map(|i| -4.0 * (i as f64 + 1.0) * ((i + m) as f64 + 1.0)).collect();
        Ok(BandedMatrix::from_diagonal(&d))
    }

    /// Disk: `(1-r^2) Z^(a)_{m,j} = Z^(a)_{m,j} X`, the Jacobi matrix.
    pub fn disk_lowering_weighted(&self, m: usize, n: usize) -> Result<BandedMatrix> {
        self.disk_only("weighted disk lowering")?;
        self.hierarchy(self.params.a, 0.0)?.jacobi(m, n)
    }
}
