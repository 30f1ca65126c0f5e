use super::BandedMatrix;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Square system made of a few dense top rows, a banded core and optional
/// dense extra columns appended to the right of the core.
///
/// Layout:
/// ```text
/// [ top_rows              ]   p rows, n_core + e columns
/// [ core      | extra_cols ]   r rows
/// ```
#[derive(Clone, Debug)]
pub struct BorderedSystem {
    pub top_rows: Vec<Vec<f64>>,
    pub core: BandedMatrix,
    pub extra_cols: Vec<Vec<f64>>,
    /// Columns paired with the top rows in the Schur complement. Defaults
    /// to the first `p` columns.
    pub border_cols: Option<Vec<usize>>,
}

/// Below this size the system is solved densely.
const DENSE_CUTOFF: usize = 64;

impl BorderedSystem {
    pub fn new(top_rows: Vec<Vec<f64>>, core: BandedMatrix) -> Self {
        BorderedSystem { top_rows, core, extra_cols: Vec::new(), border_cols: None }
    }

    pub fn size(&self) -> usize {
        self.top_rows.len() + self.core.rows()
    }

    fn ncols(&self) -> usize {
        self.core.cols() + self.extra_cols.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.size();
        if self.ncols() != n {
            return Err(Error::DimensionMismatch(format!("bordered system is {}x{}", n, self.ncols())));
        }
        if self.top_rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("top row length".into()));
        }
        if self.extra_cols.iter().any(|c| c.len() != self.core.rows()) {
            return Err(Error::DimensionMismatch("extra column length".into()));
        }
        Ok(())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let p = self.top_rows.len();
        let n = self.size();
        let nc = self.core.cols();
        let mut a = DMatrix::zeros(n, n);
        for (i, row) in self.top_rows.iter().enumerate() {
            for j in 0..n {
                a[(i, j)] = row[j];
            }
        }
        for i in 0..self.core.rows() {
            for j in self.core.row_range(i) {
                a[(p + i, j)] = self.core.get(i, j);
            }
            for (e, col) in self.extra_cols.iter().enumerate() {
                a[(p + i, nc + e)] = col[i];
            }
        }
        a
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let nc = self.core.cols();
        let mut y: Vec<f64> = self
            .top_rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        let mut core = self.core.matvec_padded(&x[..nc]);
        for (e, col) in self.extra_cols.iter().enumerate() {
            for (c, v) in core.iter_mut().zip(col) {
                *c += v * x[nc + e];
            }
        }
        y.append(&mut core);
        y
    }

    /// Solves the system. Small systems use dense LU. Larger ones eliminate
    /// the border columns through a Schur complement and factor the rest
    /// with banded LU, falling back to dense LU if the residual is poor.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        if rhs.len() != self.size() {
            return Err(Error::DimensionMismatch(format!("rhs length {} for size {}", rhs.len(), self.size())));
        }
        if self.size() < DENSE_CUTOFF {
            return dense_solve(&self.to_dense(), rhs);
        }
        match self.schur_solve(rhs) {
            Ok(x) if self.residual_ok(&x, rhs) => Ok(x),
            _ => dense_solve(&self.to_dense(), rhs),
        }
    }

    /// Row-wise backward-error test:
    /// `|(Ax - b)_i| <= 1000 eps (|A_i|_1 |x|_inf + |b_i|)` for every row.
    fn residual_ok(&self, x: &[f64], b: &[f64]) -> bool {
        let xs = x.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        let ax = self.matvec(x);
        let p = self.top_rows.len();
        (0..self.size()).all(|i| {
            let row_norm = if i < p {
                self.top_rows[i].iter().map(|v| v.abs()).sum::<f64>()
            } else {
                let k = i - p;
                self.core.row_range(k).map(|j| self.core.get(k, j).abs()).sum::<f64>()
                    + self.extra_cols.iter().map(|c| c[k].abs()).sum::<f64>()
            };
            let res = (ax[i] - b[i]).abs();
            res.is_finite() && res <= 1e3 * f64::EPSILON * (row_norm * xs + b[i].abs())
        })
    }

    fn schur_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let p = self.top_rows.len();
        let n = self.size();
        let nc = self.core.cols();
        let border: Vec<usize> = self.border_cols.clone().unwrap_or_else(|| (0..p).collect());
        if border.len() != p || (nc..n).any(|c| !border.contains(&c)) {
            return Err(Error::InvalidParameter("border columns must cover all extra columns".into()));
        }
        let mut is_border = vec![false; n];
        border.iter().for_each(|&c| is_border[c] = true);
        let rest: Vec<usize> = (0..nc).filter(|&c| !is_border[c]).collect();
        let r = self.core.rows();
        if rest.len() != r {
            return Err(Error::DimensionMismatch("remaining block is not square".into()));
        }
        // Square banded block on the remaining columns.
        let shift = p;
        let mut c2 = BandedMatrix::zeros(r, r, self.core.lower() + shift, self.core.upper());
        let mut pos = vec![usize::MAX; nc];
        rest.iter().enumerate().for_each(|(k, &c)| pos[c] = k);
        for i in 0..r {
            for j in self.core.row_range(i) {
                if pos[j] != usize::MAX {
                    c2.set(i, pos[j], self.core.get(i, j));
                }
            }
        }
        let lu = BandedLu::factor(&c2)?;
        // Y = C2^{-1} [C1 | b2]
        let mut cols: Vec<Vec<f64>> = border
            .iter()
            .map(|&c| {
                if c < nc {
                    (0..r).map(|i| self.core.get(i, c)).collect()
                } else {
                    self.extra_cols[c - nc].clone()
                }
            })
            .collect();
        cols.push(rhs[p..].to_vec());
        let ys: Vec<Vec<f64>> = cols.iter().map(|c| lu.solve(c)).collect();
        // S = T1 - T2 Y1, s = b1 - T2 y_b
        let mut s = DMatrix::zeros(p, p);
        let mut sb = DVector::zeros(p);
        for (i, row) in self.top_rows.iter().enumerate() {
            for (k, &c) in border.iter().enumerate() {
                let t2y: f64 = rest.iter().enumerate().map(|(q, &col)| row[col] * ys[k][q]).sum();
                s[(i, k)] = row[c] - t2y;
            }
            let t2y: f64 = rest.iter().enumerate().map(|(q, &col)| row[col] * ys[p][q]).sum();
            sb[i] = rhs[i] - t2y;
        }
        let x1 = s.lu().solve(&sb).ok_or(Error::SingularSystem { mode: None })?;
        let mut x = vec![0.0; n];
        for (k, &c) in border.iter().enumerate() {
            x[c] = x1[k];
        }
        for (q, &col) in rest.iter().enumerate() {
            x[col] = ys[p][q] - (0..p).map(|k| ys[k][q] * x1[k]).sum::<f64>();
        }
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(Error::SingularSystem { mode: None })
        }
    }
}

pub(crate) fn dense_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let x = a
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(b))
        .ok_or(Error::SingularSystem { mode: None })?;
    if x.iter().all(|v| v.is_finite()) {
        Ok(x.as_slice().to_vec())
    } else {
        Err(Error::SingularSystem { mode: None })
    }
}

/// Banded LU with partial pivoting. `U` gains `lower` extra super-diagonals.
#[derive(Clone, Debug)]
pub struct BandedLu {
    lu: BandedMatrix,
    piv: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &BandedMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("LU of {:?}", a.shape())));
        }
        let n = a.rows();
        let l = a.lower();
        let mut m = a.with_bandwidths(l, l + a.upper());
        let ucap = l + a.upper();
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = (k + l).min(n - 1);
            let (mut p, mut best) = (k, m.get(k, k).abs());
            for i in (k + 1)..=last {
                let v = m.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[k] = p;
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularSystem { mode: None });
            }
            let cend = (k + ucap + 1).min(n);
            if p != k {
                for c in k..cend {
                    let a = m.get(k, c);
                    let b = m.get(p, c);
                    m.set(k, c, b);
                    m.set(p, c, a);
                }
            }
            let d = m.get(k, k);
            for i in (k + 1)..=last {
                let f = m.get(i, k) / d;
                m.set(i, k, f);
                if f == 0.0 {
                    continue;
                }
                for c in (k + 1)..cend {
                    let v = m.get(k, c);
                    if v != 0.0 {
                        m.add_to(i, c, -f * v);
                    }
                }
            }
        }
        Ok(BandedLu { lu: m, piv })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.piv.len();
        let l = self.lu.lower();
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            if xk != 0.0 {
                for i in (k + 1)..(k + l + 1).min(n) {
                    x[i] -= self.lu.get(i, k) * xk;
                }
            }
        }
        let u = self.lu.upper();
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..(i + u + 1).min(n) {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s / self.lu.get(i, i);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn core(r: usize, c: usize, dominant: usize) -> BandedMatrix {
        let mut a = BandedMatrix::zeros(r, c, 1, 4);
        for i in 0..r {
            for j in a.row_range(i) {
                let v = if j == i + dominant { 5.0 + i as f64 } else { ((i * 3 + j) as f64).sin() };
                a.set(i, j, v);
            }
        }
        a
    }

    #[test]
    fn banded_lu_matches_dense() {
        let mut a = BandedMatrix::zeros(50, 50, 2, 3);
        for i in 0..50 {
            for j in a.row_range(i) {
                a.set(i, j, ((i * 5 + j * 11) as f64 * 0.37).sin());
            }
        }
        let lu = BandedLu::factor(&a).unwrap();
        let b: Vec<f64> = (0..50).map(|i| (i as f64).cos()).collect();
        let x = lu.solve(&b);
        let ax = a.matvec(&x).unwrap();
        for i in 0..50 {
            assert!((ax[i] - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn schur_path_matches_dense() {
        for n in [20usize, 120] {
            let top = vec![
                (0..n + 2).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect(),
                vec![1.0; n + 2],
            ];
            let sys = BorderedSystem::new(top, core(n, n + 2, 2));
            let b: Vec<f64> = (0..n + 2).map(|i| (i as f64 * 0.3).sin()).collect();
            let x = sys.solve(&b).unwrap();
            let xd = dense_solve(&sys.to_dense(), &b).unwrap();
            for i in 0..n + 2 {
                assert!((x[i] - xd[i]).abs() < 1e-9 * (1.0 + xd[i].abs()));
            }
        }
    }

    #[test]
    fn extra_columns_in_border() {
        let n = 100;
        let top = vec![(0..n + 2).map(|j| 1.0 / (1.0 + j as f64)).collect(), vec![1.0; n + 2]];
        let mut sys = BorderedSystem::new(top, core(n, n + 1, 1));
        let mut e = vec![0.0; n];
        e[n - 1] = 1.0;
        sys.extra_cols.push(e);
        sys.border_cols = Some(vec![0, n + 1]);
        let b: Vec<f64> = (0..n + 2).map(|i| 1.0 + i as f64 * 0.01).collect();
        let x = sys.schur_solve(&b).unwrap();
        let ax = sys.matvec(&x);
        for i in 0..n + 2 {
            assert!((ax[i] - b[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_system_reported() {
        let sys = BorderedSystem::new(vec![vec![0.0; 3]], BandedMatrix::zeros(2, 3, 0, 2));
        assert!(matches!(sys.solve(&[1.0, 0.0, 0.0]), Err(Error::SingularSystem { .. })));
    }
}
