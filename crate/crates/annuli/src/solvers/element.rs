//! Tau spectral-element method on a disk (or annulus) split into a
//! central cell and concentric annular cells.
//!
//! Per Fourier order `m` with `k = ceil((N + 1 - m)/2)` the unknowns are
//! `k + 1` coefficients per cell in the unweighted `Z^(0)` / `Z^(0,0)`
//! bases followed by one tau value per annular cell. Rows are the outer
//! boundary condition, a value and a derivative continuity row per
//! interface (outermost first), an inner boundary row when the central
//! cell is an annulus, then `k` equation rows per cell in the `Z^(2)` /
//! `Z^(2,2)` bases. The tau column of an annular cell is `E_m` on its last
//! equation row, and it enters the value row at the cell's inner edge
//! scaled by [`default_tau_scale`].

use super::{sample_grid, zernike_mode_size, CellField};
use crate::annulus::{zernike_disk_basis, AnnulusBasis, AnnulusGrid, AnnulusParams, ModeCoefficients, ModeIndex};
use crate::banded::{BandedMatrix, BorderedSystem};
use crate::error::{Error, Result};
use crate::par_map;
use nalgebra::DMatrix;
use std::sync::Arc;

/// `1 - exp(-(m + 1))`.
pub fn default_tau_scale(m: usize) -> f64 {
    1.0 - (-((m + 1) as f64)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Disk { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

impl Cell {
    pub fn inner(&self) -> f64 {
        match self {
            Cell::Disk { .. } => 0.0,
            Cell::Annulus { inner, .. } => *inner,
        }
    }

    pub fn outer(&self) -> f64 {
        match self {
            Cell::Disk { radius } => *radius,
            Cell::Annulus { outer, .. } => *outer,
        }
    }

    /// Inner radius in the cell's unit-radius coordinates.
    pub fn local_rho(&self) -> f64 {
        self.inner() / self.outer()
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.inner() && r <= self.outer()
    }
}

/// Cells between consecutive radii; a leading radius of 0 makes the
/// central cell a disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    cells: Vec<Cell>,
}

impl Mesh {
    pub fn new(radii: &[f64]) -> Result<Self> {
        if radii.len() < 2 {
            return Err(Error::MeshError("a mesh needs at least two radii".into()));
        }
        if radii[0] < 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::MeshError(format!("radii must be nonnegative and strictly increasing: {radii:?}")));
        }
        if *radii.last().unwrap() != 1.0 {
            return Err(Error::MeshError("the outer radius must be 1".into()));
        }
        let cells = radii
            .windows(2)
            .map(|w| if w[0] == 0.0 { Cell::Disk { radius: w[1] } } else { Cell::Annulus { inner: w[0], outer: w[1] } })
            .collect();
        Ok(Mesh { cells })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Cell holding radius `r`; interfaces go to the inner cell.
    pub fn cell_of(&self, r: f64) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(r))
    }
}

struct CellBasis {
    cell: Cell,
    trial: Arc<AnnulusBasis>,
    test: AnnulusBasis,
    kappa: f64,
}

impl CellBasis {
    fn new(cell: Cell, degree: usize, kappa: f64) -> Result<Self> {
        let (trial, test) = match cell {
            Cell::Disk { .. } => (zernike_disk_basis(0.0, degree + 2)?, zernike_disk_basis(2.0, degree)?),
            Cell::Annulus { .. } => {
                let rho = cell.local_rho();
                (
                    AnnulusBasis::new(AnnulusParams::new(rho, 0.0, 0.0)?, degree + 2)?,
                    AnnulusBasis::new(AnnulusParams::new(rho, 2.0, 2.0)?, degree)?,
                )
            }
        };
        Ok(CellBasis { cell, trial: Arc::new(trial), test, kappa })
    }

    fn is_disk(&self) -> bool {
        matches!(self.cell, Cell::Disk { .. })
    }

    /// `k x (k + 1)` block of `Delta + kappa` from the trial into the test basis.
    fn block(&self, m: usize, k: usize) -> Result<BandedMatrix> {
        let nb = k + 1;
        let s = 1.0 / (self.cell.outer() * self.cell.outer());
        let (lap, raise) = if self.is_disk() {
            (self.trial.disk_laplacian(m, nb)?, self.trial.raising(m, nb, 2, 0)?)
        } else {
            (self.trial.laplacian_z(m, nb)?, self.trial.raising(m, nb, 2, 2)?)
        };
        let a = lap.with_bandwidths(0, 4).axpby(s, &raise.with_bandwidths(0, 4), self.kappa)?;
        Ok(a.truncate(k, nb))
    }

    /// Values and physical radial derivatives of the `nb` trial functions
    /// of order `m` at local radius `r`.
    fn radial(&self, m: usize, nb: usize, r: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let h = self.trial.hierarchy(0.0, 0.0)?;
        let lvl = h.try_level(m, nb)?;
        let t = self.trial.params().t;
        let tau = t * (1.0 - r) * (1.0 + r);
        let (q, dq) = lvl.eval_with_derivative(nb, tau);
        let rm = r.powi(m as i32);
        let drm = if m == 0 { 0.0 } else { m as f64 * r.powi(m as i32 - 1) };
        let scale = self.cell.outer();
        let v = q.iter().map(|qi| rm * qi).collect();
        let d = q.iter().zip(&dq).map(|(qi, dqi)| (drm * qi - 2.0 * t * r * rm * dqi) / scale).collect();
        Ok((v, d))
    }
}

/// Per-cell expansions in the unweighted trial bases.
#[derive(Clone)]
pub struct ElementSolution {
    pub cells: Vec<Cell>,
    pub bases: Vec<Arc<AnnulusBasis>>,
    pub coeffs: Vec<ModeCoefficients>,
    /// Tau values per mode, one per annular cell.
    pub taus: Vec<(ModeIndex, Vec<f64>)>,
}

impl ElementSolution {
    /// Values on a grid in the local coordinates of cell `c`.
    pub fn values_on(&self, c: usize, grid: &AnnulusGrid) -> Result<DMatrix<f64>> {
        self.bases[c].synthesis(&self.coeffs[c], grid, false)
    }

    /// Values of cell `c` at physical radii `r` and `l` equispaced angles.
    pub fn values_at(&self, c: usize, r: &[f64], l: usize) -> Result<DMatrix<f64>> {
        let s = self.cells[c].outer();
        let local: Vec<f64> = r.iter().map(|v| v / s).collect();
        self.bases[c].synthesis_at(&self.coeffs[c], &local, l, false)
    }

    /// Value and physical radial derivative of cell `c` at `(r, theta)`.
    pub fn radial_derivative(&self, c: usize, r: f64, theta: f64) -> Result<(f64, f64)> {
        let s = self.cells[c].outer();
        let (mut u, mut du) = (0.0, 0.0);
        for mode in self.coeffs[c].modes() {
            let f = self.coeffs[c].mode(mode);
            if f.iter().all(|v| *v == 0.0) {
                continue;
            }
            let (v, d) = self.bases[c].radial_with_derivative(0.0, 0.0, mode.m, f, r / s)?;
            let a = mode.angular(theta);
            u += a * v;
            du += a * d / s;
        }
        Ok((u, du))
    }

    /// Largest value and radial-derivative jumps over `samples` angles on
    /// each interface.
    pub fn interface_jumps(&self, samples: usize) -> Result<(f64, f64)> {
        let (mut jv, mut jd) = (0.0_f64, 0.0_f64);
        for c in 0..self.cells.len().saturating_sub(1) {
            let r = self.cells[c].outer();
            for i in 0..samples {
                let th = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
                let (a, da) = self.radial_derivative(c, r, th)?;
                let (b, db) = self.radial_derivative(c + 1, r, th)?;
                jv = jv.max((a - b).abs());
                jd = jd.max((da - db).abs());
            }
        }
        Ok((jv, jd))
    }

    pub fn dofs(&self) -> usize {
        self.coeffs.iter().map(|c| c.dofs()).sum::<usize>() + self.taus.iter().map(|(_, t)| t.len()).sum::<usize>()
    }

    /// Local grid for cell `c` with `factor` times the degree-`n` radii.
    pub fn cell_grid(&self, c: usize, n: usize, factor: usize) -> AnnulusGrid {
        AnnulusGrid::oversampled(self.cells[c].local_rho(), n, factor)
    }

    pub fn eval_cell(&self, c: usize, x: f64, y: f64) -> Result<f64> {
        let s = self.cells[c].outer();
        self.bases[c].eval_expansion(&self.coeffs[c], x / s, y / s, false)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let r = x.hypot(y);
        let c = self
            .cells
            .iter()
            .position(|cell| cell.contains(r))
            .ok_or_else(|| Error::InvalidParameter(format!("point at radius {r} lies outside the mesh")))?;
        self.eval_cell(c, x, y)
    }
}

pub struct SpectralElementSolver {
    degree: usize,
    cells: Vec<CellBasis>,
    tau_scale: fn(usize) -> f64,
}

impl SpectralElementSolver {
    /// `kappa` holds one constant per cell.
    pub fn new(mesh: &Mesh, degree: usize, kappa: &[f64]) -> Result<Self> {
        if kappa.len() != mesh.cells().len() {
            return Err(Error::DimensionMismatch(format!("{} coefficients for {} cells", kappa.len(), mesh.cells().len())));
        }
        let degree = crate::annulus::even_degree(degree);
        let cells = mesh
            .cells()
            .iter()
            .zip(kappa)
            .map(|(c, &k)| CellBasis::new(*c, degree, k))
            .collect::<Result<_>>()?;
        Ok(SpectralElementSolver { degree, cells, tau_scale: default_tau_scale })
    }

    pub fn with_tau_scale(mut self, f: fn(usize) -> f64) -> Self {
        self.tau_scale = f;
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn annular_cells(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&c| !self.cells[c].is_disk()).collect()
    }

    /// Number of unknowns over all modes.
    pub fn dofs(&self) -> usize {
        (0..=self.degree).map(|m| self.mode_size(m) * if m == 0 { 1 } else { 2 }).sum()
    }

    pub fn mode_size(&self, m: usize) -> usize {
        let k = zernike_mode_size(self.degree, m);
        if k == 0 {
            0
        } else {
            self.cells.len() * (k + 1) + self.annular_cells().len()
        }
    }

    pub fn mode_system(&self, m: usize) -> Result<BorderedSystem> {
        let k = zernike_mode_size(self.degree, m);
        if k == 0 {
            return Err(Error::InvalidMode { n: self.degree, m, j: 1 });
        }
        let nb = k + 1;
        let nc = self.cells.len();
        let annular = self.annular_cells();
        let ncols = nc * nb + annular.len();
        let tau_col = |c: usize| annular.iter().position(|&a| a == c).map(|q| nc * nb + q);
        let mut top = Vec::new();
        let outer = &self.cells[nc - 1];
        let mut row = vec![0.0; ncols];
        let (v, _) = outer.radial(m, nb, 1.0)?;
        row[(nc - 1) * nb..nc * nb].copy_from_slice(&v);
        top.push(row);
        for c in (0..nc - 1).rev() {
            let (inner, outer) = (&self.cells[c], &self.cells[c + 1]);
            let (vi, di) = inner.radial(m, nb, 1.0)?;
            let (vo, dov) = outer.radial(m, nb, outer.cell.local_rho())?;
            let mut value = vec![0.0; ncols];
            let mut deriv = vec![0.0; ncols];
            for i in 0..nb {
                value[c * nb + i] = vi[i];
                value[(c + 1) * nb + i] = -vo[i];
                deriv[c * nb + i] = di[i];
                deriv[(c + 1) * nb + i] = -dov[i];
            }
            if let Some(q) = tau_col(c + 1) {
                value[q] = (self.tau_scale)(m);
            }
            top.push(value);
            top.push(deriv);
        }
        if !self.cells[0].is_disk() {
            let (v, _) = self.cells[0].radial(m, nb, self.cells[0].cell.local_rho())?;
            let mut row = vec![0.0; ncols];
            row[..nb].copy_from_slice(&v);
            top.push(row);
        }
        let mut core = BandedMatrix::zeros(nc * k, nc * nb, 0, nc + 3);
        let mut extra = Vec::new();
        for (c, cell) in self.cells.iter().enumerate() {
            let b = cell.block(m, k)?;
            for i in 0..k {
                for j in b.row_range(i) {
                    core.set(c * k + i, c * nb + j, b.get(i, j));
                }
            }
            if tau_col(c).is_some() {
                let mut e = vec![0.0; nc * k];
                e[c * k + k - 1] = 1.0;
                extra.push(e);
            }
        }
        let mut border: Vec<usize> = (0..nc).map(|c| c * nb).collect();
        border.extend(nc * nb..ncols);
        Ok(BorderedSystem { top_rows: top, core, extra_cols: extra, border_cols: Some(border) })
    }

    /// Right-hand sides in the test bases, one per cell.
    pub fn expand(&self, f: CellField) -> Result<Vec<ModeCoefficients>> {
        self.cells
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                let grid = AnnulusGrid::new(cell.cell.local_rho(), self.degree);
                let vals = sample_grid(&grid, cell.cell.outer(), &|x, y| f(c, x, y));
                cell.test.analysis(&vals, false)
            })
            .collect()
    }

    pub fn solve(&self, f: CellField) -> Result<ElementSolution> {
        let rhs = self.expand(f)?;
        let nc = self.cells.len();
        let n = self.degree;
        let solved: Vec<Result<Vec<(ModeIndex, Vec<f64>)>>> = par_map((0..=n).collect(), |m| {
            let sys = self.mode_system(m)?;
            let k = zernike_mode_size(n, m);
            let modes: Vec<ModeIndex> = if m == 0 { vec![ModeIndex::cos(0)] } else { vec![ModeIndex::sin(m), ModeIndex::cos(m)] };
            modes
                .into_iter()
                .map(|mode| {
                    let mut b = vec![0.0; sys.top_rows.len()];
                    for f in &rhs {
                        b.extend_from_slice(&f.mode(mode)[..k]);
                    }
                    if b.iter().all(|v| *v == 0.0) {
                        return Ok((mode, vec![0.0; sys.size()]));
                    }
                    let x = sys.solve(&b).map_err(|_| Error::SingularSystem { mode: Some((mode.m, mode.j)) })?;
                    Ok((mode, x))
                })
                .collect()
        });
        let mut coeffs = vec![ModeCoefficients::zeros(n + 2); nc];
        let mut taus = Vec::new();
        for block in solved {
            for (mode, x) in block? {
                let nb = zernike_mode_size(n, mode.m) + 1;
                for (c, co) in coeffs.iter_mut().enumerate() {
                    co.set_mode(mode, &x[c * nb..(c + 1) * nb]);
                }
                taus.push((mode, x[nc * nb..].to_vec()));
            }
        }
        Ok(ElementSolution {
            cells: self.cells.iter().map(|c| c.cell).collect(),
            bases: self.cells.iter().map(|c| c.trial.clone()).collect(),
            coeffs,
            taus,
        })
    }
}
