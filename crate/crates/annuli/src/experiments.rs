//! Experiment configs and the drivers behind the `solve`, `convergence`
//! and `structure` commands.

use crate::annulus::{AnnulusGrid, ModeCoefficients};
use crate::error::{Error, Result};
use crate::solvers::problems::{catalog, Domain, Problem};
use crate::solvers::{
    zernike_mode_size, CfSolution, ChebFourierSolver, Coefficient, ElementSolution, Mesh, ModeSystem,
    SpectralElementSolver, ZernikeAnnularSolver, ZernikeDiskSolver, ZernikeSolution,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    ChebyshevFourier,
    ZernikeAnnular,
    /// Weighted Zernike on the unit disk, one element.
    ZernikeDisk,
    SpectralElement,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::ChebyshevFourier => "chebyshev-fourier",
            SolverKind::ZernikeAnnular => "zernike-annular",
            SolverKind::ZernikeDisk => "zernike-disk",
            SolverKind::SpectralElement => "spectral-element",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    pub solver: SolverKind,
    pub n: usize,
}

fn default_oversampling() -> usize {
    4
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// Built-in problem id.
    pub rhs: String,
    /// Inner radius (interface radius for the five-Gaussian problems).
    #[serde(default)]
    pub rho: Option<f64>,
    /// Spectral-element mesh; defaults to the problem's own cells.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    pub solvers: Vec<SolverKind>,
    /// Truncation degrees, strictly increasing.
    pub n: Vec<usize>,
    /// Per-solver overrides of `n`.
    #[serde(default)]
    pub sweeps: BTreeMap<SolverKind, Vec<usize>>,
    #[serde(default = "default_oversampling")]
    pub oversampling: usize,
    /// Reference for problems without a closed-form solution; defaults to
    /// each solver at 1.5 times its largest degree.
    #[serde(default)]
    pub reference: Option<ReferenceSpec>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Write measured wall times; `false` writes zeros so output is reproducible byte for byte.
    #[serde(default = "default_true")]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let problem = self.problem()?;
        if self.solvers.is_empty() {
            return Err(Error::Config("no solvers listed".into()));
        }
        if self.oversampling == 0 {
            return Err(Error::Config("oversampling must be positive".into()));
        }
        for s in &self.solvers {
            let sweep = self.sweep(*s);
            if sweep.is_empty() || sweep.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config(format!("sweep for {} must be non-empty and strictly increasing", s.name())));
            }
            check_compatible(&problem, *s)?;
        }
        if let Some(r) = &self.radii {
            Mesh::new(r)?;
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<Problem> {
        catalog(&self.rhs, self.rho)
    }

    pub fn sweep(&self, solver: SolverKind) -> &[usize] {
        self.sweeps.get(&solver).map(|v| v.as_slice()).unwrap_or(&self.n)
    }

    /// Largest degree over all sweeps; sets the error grid.
    pub fn max_degree(&self) -> usize {
        self.solvers.iter().flat_map(|s| self.sweep(*s).iter().copied()).max().unwrap_or(0)
    }
}

fn check_compatible(p: &Problem, s: SolverKind) -> Result<()> {
    let ok = match s {
        SolverKind::ChebyshevFourier | SolverKind::ZernikeAnnular => matches!(p.domain, Domain::Annulus(_)),
        SolverKind::ZernikeDisk => {
            p.domain.inner_radius() == 0.0 && p.has_uniform_coefficient() && matches!(p.lambda, Coefficient::Constant(_))
        }
        SolverKind::SpectralElement => matches!(p.lambda, Coefficient::Constant(_)),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("solver {} does not apply to problem {}", s.name(), p.id)))
    }
}

/// A computed solution from any of the solvers.
#[derive(Clone)]
pub enum Solution {
    ChebyshevFourier(CfSolution),
    Zernike(ZernikeSolution),
    Element(ElementSolution),
}

impl Solution {
    pub fn dofs(&self) -> usize {
        match self {
            Solution::ChebyshevFourier(s) => s.coeffs.dofs(),
            Solution::Zernike(s) => s.dofs(),
            Solution::Element(s) => s.dofs(),
        }
    }

    /// Values at physical radii `r` (inside one problem cell) and `l` angles.
    pub fn values_at(&self, r: &[f64], l: usize) -> Result<DMatrix<f64>> {
        match self {
            Solution::ChebyshevFourier(s) => s.values_at(r, l),
            Solution::Zernike(s) => s.values_at(r, l),
            Solution::Element(s) => {
                let mut out = DMatrix::zeros(r.len(), l);
                for c in 0..s.cells.len() {
                    let rows: Vec<usize> = (0..r.len())
                        .filter(|&k| s.cells[c].contains(r[k]) && (c == 0 || r[k] > s.cells[c].inner()))
                        .collect();
                    if rows.is_empty() {
                        continue;
                    }
                    let rr: Vec<f64> = rows.iter().map(|&k| r[k]).collect();
                    let v = s.values_at(c, &rr, l)?;
                    for (q, &k) in rows.iter().enumerate() {
                        out.row_mut(k).copy_from(&v.row(q));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Largest coefficient of degree in the top tenth, relative to the
    /// largest coefficient. Zernike coefficients are scaled by the basis
    /// norm `t^(-m/2)` first, since unnormalised high-`m` terms are tiny.
    pub fn coefficient_tail(&self) -> f64 {
        fn zernike_tail(c: &ModeCoefficients, t: f64) -> (f64, f64) {
            let n = c.degree();
            let cut = n - (n / 10).max(2).min(n);
            let (mut tail, mut max) = (0.0_f64, 0.0_f64);
            for mode in c.modes() {
                let s = t.powf(-0.5 * mode.m as f64);
                for (i, v) in c.mode(mode).iter().enumerate() {
                    let v = (v * s).abs();
                    max = max.max(v);
                    if mode.m + 2 * i >= cut {
                        tail = tail.max(v);
                    }
                }
            }
            (tail, max)
        }
        let (tail, max) = match self {
            Solution::ChebyshevFourier(s) => {
                let c = &s.coeffs;
                let (rows, mmax) = (c.rows(), c.mmax());
                let mut tail = 0.0_f64;
                for mode in c.modes() {
                    for (i, v) in c.mode(mode).iter().enumerate() {
                        if 10 * i >= 9 * rows || 10 * mode.m >= 9 * mmax.max(1) {
                            tail = tail.max(v.abs());
                        }
                    }
                }
                (tail, c.max_abs())
            }
            Solution::Zernike(s) => zernike_tail(&s.coeffs, s.basis.params().t),
            Solution::Element(s) => s
                .coeffs
                .iter()
                .zip(&s.bases)
                .map(|(c, b)| zernike_tail(c, b.params().t))
                .fold((0.0, 0.0), |(a, b), (c, d)| (f64::max(a, c), f64::max(b, d))),
        };
        if max == 0.0 {
            0.0
        } else {
            tail / max
        }
    }

    /// Mode-major JSON description of the coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        let modes_of = |c: &ModeCoefficients| -> Vec<serde_json::Value> {
            c.modes().map(|m| json!({"m": m.m, "j": m.j, "coefficients": c.mode(m)})).collect()
        };
        match self {
            Solution::ChebyshevFourier(s) => json!({
                "basis": "chebyshev-fourier",
                "rho": s.basis.rho(),
                "degree": s.basis.degree(),
                "cells": [{
                    "inner": s.basis.rho(),
                    "outer": 1.0,
                    "modes": s.coeffs.modes().map(|m| json!({"m": m.m, "j": m.j, "coefficients": s.coeffs.mode(m)})).collect::<Vec<_>>(),
                }],
            }),
            Solution::Zernike(s) => {
                let p = s.basis.params();
                json!({
                    "basis": "weighted-zernike",
                    "weight": [p.a, p.b],
                    "degree": s.coeffs.degree(),
                    "cells": [{"inner": p.rho * s.scale, "outer": s.scale, "modes": modes_of(&s.coeffs)}],
                })
            }
            Solution::Element(s) => json!({
                "basis": "zernike-element",
                "degree": s.coeffs.first().map(|c| c.degree()).unwrap_or(0),
                "cells": s.cells.iter().zip(&s.coeffs).map(|(cell, c)| json!({
                    "inner": cell.inner(),
                    "outer": cell.outer(),
                    "modes": modes_of(c),
                })).collect::<Vec<_>>(),
                "taus": s.taus.iter().map(|(m, t)| json!({"m": m.m, "j": m.j, "values": t})).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Solves `problem` with one solver at degree `n`. `radii` overrides the
/// spectral-element mesh.
pub fn solve(problem: &Problem, solver: SolverKind, n: usize, radii: Option<&[f64]>) -> Result<Solution> {
    check_compatible(problem, solver)?;
    let f = |x: f64, y: f64| problem.rhs_at(x, y);
    let constant = match &problem.lambda {
        Coefficient::Constant(c) => *c,
        Coefficient::ChebyshevR2(_) => 0.0,
    };
    Ok(match solver {
        SolverKind::ChebyshevFourier => {
            let rho = problem.domain.inner_radius();
            Solution::ChebyshevFourier(ChebFourierSolver::new(rho, n, &problem.lambda)?.solve(&f)?)
        }
        SolverKind::ZernikeAnnular => {
            let rho = problem.domain.inner_radius();
            Solution::Zernike(ZernikeAnnularSolver::new(rho, n, &problem.lambda)?.solve(&f)?)
        }
        SolverKind::ZernikeDisk => Solution::Zernike(ZernikeDiskSolver::new(n, constant + problem.kappa[0], 1.0)?.solve(&f)?),
        SolverKind::SpectralElement => {
            let radii = radii.map(|r| r.to_vec()).unwrap_or_else(|| problem.domain.radii());
            let mesh = Mesh::new(&radii)?;
            // each element takes the coefficient and data of the problem cell around its midpoint
            let owner: Vec<usize> = mesh.cells().iter().map(|c| problem.cell_of(0.5 * (c.inner() + c.outer()))).collect();
            for (c, cell) in mesh.cells().iter().enumerate() {
                if problem.cell_of(cell.inner() + 1e-12) != owner[c] || problem.cell_of(cell.outer()) != owner[c] {
                    return Err(Error::MeshError(format!("element {c} straddles a coefficient jump")));
                }
            }
            let kappa: Vec<f64> = owner.iter().map(|&o| constant + problem.kappa[o]).collect();
            let rhs = |c: usize, x: f64, y: f64| (problem.rhs)(owner[c], x, y);
            Solution::Element(SpectralElementSolver::new(&mesh, n, &kappa)?.solve(&rhs)?)
        }
    })
}

/// Error-grid radii and angle count for each problem cell.
pub fn error_grids(problem: &Problem, degree: usize, oversampling: usize) -> Vec<(Vec<f64>, usize)> {
    problem
        .domain
        .radii()
        .windows(2)
        .map(|w| {
            let g = AnnulusGrid::oversampled(w[0] / w[1], degree, oversampling);
            (g.r.iter().map(|r| r * w[1]).collect(), g.l())
        })
        .collect()
}

/// Reference values on the error grids.
pub enum Reference {
    Exact,
    Solved(SolverKind, usize, f64),
}

struct ReferenceValues {
    values: Vec<DMatrix<f64>>,
    tail: Option<f64>,
}

fn exact_values(problem: &Problem, grids: &[(Vec<f64>, usize)]) -> Option<Vec<DMatrix<f64>>> {
    let u = problem.exact.as_ref()?;
    Some(
        grids
            .iter()
            .enumerate()
            .map(|(c, (r, l))| {
                let trig: Vec<(f64, f64)> =
                    (0..*l).map(|j| (2.0 * std::f64::consts::PI * j as f64 / *l as f64).sin_cos()).collect();
                DMatrix::from_fn(r.len(), *l, |k, j| u(c, r[k] * trig[j].1, r[k] * trig[j].0))
            })
            .collect(),
    )
}

fn solution_values(sol: &Solution, grids: &[(Vec<f64>, usize)]) -> Result<Vec<DMatrix<f64>>> {
    grids.iter().map(|(r, l)| sol.values_at(r, *l)).collect()
}

fn grid_errors(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> Result<Vec<f64>> {
    a.iter().zip(b).map(|(x, y)| crate::solvers::error_on_grid(x, y)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub experiment: String,
    pub solver: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub dofs: usize,
    pub sup_error: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Error per problem cell, parallel to `rows`.
    pub per_cell: Vec<Vec<f64>>,
    /// Largest interface jumps (value, radial derivative) for element rows.
    pub jumps: Vec<Option<(f64, f64)>>,
    /// Relative coefficient tail of each computed reference.
    pub reference_tails: Vec<(SolverKind, usize, f64)>,
}

impl ConvergenceReport {
    pub fn errors(&self, solver: SolverKind) -> Vec<(usize, usize, f64)> {
        self.rows.iter().filter(|r| r.solver == solver.name()).map(|r| (r.n, r.dofs, r.sup_error)).collect()
    }
}

fn reference_degree(n: usize) -> usize {
    let r = (3 * n).div_ceil(2);
    r + r % 2
}

pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    let grids = error_grids(&problem, cfg.max_degree(), cfg.oversampling);
    let exact = exact_values(&problem, &grids);
    let mut shared: Option<ReferenceValues> = None;
    if exact.is_none() {
        if let Some(spec) = &cfg.reference {
            let sol = solve(&problem, spec.solver, spec.n, cfg.radii.as_deref())?;
            shared = Some(ReferenceValues { values: solution_values(&sol, &grids)?, tail: Some(sol.coefficient_tail()) });
        }
    }
    let mut report = ConvergenceReport { rows: Vec::new(), per_cell: Vec::new(), jumps: Vec::new(), reference_tails: Vec::new() };
    if let (Some(spec), Some(r)) = (&cfg.reference, &shared) {
        report.reference_tails.push((spec.solver, spec.n, r.tail.unwrap_or(0.0)));
    }
    for &solver in &cfg.solvers {
        let sweep = cfg.sweep(solver);
        let own;
        let reference: &[DMatrix<f64>] = match (&exact, &shared) {
            (Some(e), _) => e,
            (None, Some(r)) => &r.values,
            (None, None) => {
                let n = reference_degree(*sweep.last().unwrap());
                let sol = solve(&problem, solver, n, cfg.radii.as_deref())?;
                report.reference_tails.push((solver, n, sol.coefficient_tail()));
                own = solution_values(&sol, &grids)?;
                &own
            }
        };
        for &n in sweep {
            // no clock is read without timing, so the run also works where none exists
            let t = cfg.timing.then(Instant::now);
            let sol = solve(&problem, solver, n, cfg.radii.as_deref())?;
            let wall = t.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3);
            let per_cell = grid_errors(&solution_values(&sol, &grids)?, reference)?;
            let sup = per_cell.iter().fold(0.0_f64, |m, v| m.max(*v));
            report.jumps.push(match &sol {
                Solution::Element(s) => Some(s.interface_jumps(50)?),
                _ => None,
            });
            report.rows.push(ConvergenceRow {
                experiment: cfg.experiment.clone(),
                solver: solver.name().to_string(),
                n,
                dofs: sol.dofs(),
                sup_error: sup,
                wall_ms: (wall * 1e3).round() / 1e3,
            });
            report.per_cell.push(per_cell);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureRow {
    pub experiment: String,
    pub solver: String,
    pub m: usize,
    pub size: usize,
    pub dense_rows: usize,
    pub lower: usize,
    pub upper: usize,
    pub cond: f64,
    pub cond_precond: f64,
}

/// 2-norm condition number from the singular values.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let s = a.clone().singular_values();
    let (max, min) = (s.max(), s.min());
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `diag(A)^{-1} A`, leaving rows with a zero diagonal entry unscaled.
pub fn diagonally_preconditioned(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = a.clone();
    for i in 0..a.nrows().min(a.ncols()) {
        let d = a[(i, i)];
        if d != 0.0 {
            out.row_mut(i).scale_mut(1.0 / d);
        }
    }
    out
}

fn structure_row(cfg: &ExperimentConfig, solver: SolverKind, m: usize, sys: ModeSystem) -> StructureRow {
    let dense = sys.to_dense();
    let (lower, upper) = sys.bandwidths();
    StructureRow {
        experiment: cfg.experiment.clone(),
        solver: solver.name().to_string(),
        m,
        size: sys.size(),
        dense_rows: sys.dense_rows(),
        lower,
        upper,
        cond: condition_number(&dense),
        cond_precond: condition_number(&diagonally_preconditioned(&dense)),
    }
}

/// Per-mode sizes, bandwidths and condition numbers at the largest degree
/// of each solver's sweep.
pub fn run_structure(cfg: &ExperimentConfig) -> Result<Vec<StructureRow>> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    let mut rows = Vec::new();
    for &solver in &cfg.solvers {
        let n = *cfg.sweep(solver).last().unwrap();
        let systems: Vec<Result<(usize, ModeSystem)>> = match solver {
            SolverKind::ChebyshevFourier => {
                let s = ChebFourierSolver::new(problem.domain.inner_radius(), n, &problem.lambda)?;
                crate::par_map((0..=n).collect(), |m| Ok((m, ModeSystem::Bordered(s.mode_system(m)?))))
            }
            SolverKind::ZernikeAnnular => {
                let s = ZernikeAnnularSolver::new(problem.domain.inner_radius(), s_degree(n), &problem.lambda)?;
                let n = s.degree();
                crate::par_map((0..=n).collect(), |m| Ok((m, ModeSystem::Banded(s.mode_system(m)?))))
            }
            SolverKind::ZernikeDisk => {
                let c = match problem.lambda {
                    Coefficient::Constant(c) => c,
                    _ => 0.0,
                };
                let s = ZernikeDiskSolver::new(n, c + problem.kappa[0], 1.0)?;
                let n = s.degree();
                crate::par_map((0..=n).collect(), |m| Ok((m, ModeSystem::Banded(s.mode_system(m)?))))
            }
            SolverKind::SpectralElement => {
                let radii = cfg.radii.clone().unwrap_or_else(|| problem.domain.radii());
                let mesh = Mesh::new(&radii)?;
                let c = match problem.lambda {
                    Coefficient::Constant(c) => c,
                    _ => 0.0,
                };
                let kappa: Vec<f64> = mesh
                    .cells()
                    .iter()
                    .map(|cell| c + problem.kappa[problem.cell_of(0.5 * (cell.inner() + cell.outer()))])
                    .collect();
                let s = SpectralElementSolver::new(&mesh, n, &kappa)?;
                let n = s.degree();
                crate::par_map((0..=n).collect(), |m| Ok((m, ModeSystem::Bordered(s.mode_system(m)?))))
            }
        };
        let computed: Vec<Result<StructureRow>> =
            crate::par_map(systems, |r| r.map(|(m, sys)| structure_row(cfg, solver, m, sys)));
        for r in computed {
            rows.push(r?);
        }
    }
    Ok(rows)
}

fn s_degree(n: usize) -> usize {
    crate::annulus::even_degree(n)
}

/// Exact mode sizes: `ceil((N+1-m)/2)` for Zernike, `N + 2` for
/// Chebyshev-Fourier, `2k + 3` for the two-cell element method.
pub fn expected_size(solver: SolverKind, n: usize, m: usize, cells: usize, annular_cells: usize) -> usize {
    let n = match solver {
        SolverKind::ChebyshevFourier => n,
        _ => s_degree(n),
    };
    let k = zernike_mode_size(n, m);
    match solver {
        SolverKind::ChebyshevFourier => n + 2,
        SolverKind::ZernikeAnnular | SolverKind::ZernikeDisk => k,
        SolverKind::SpectralElement => cells * (k + 1) + annular_cells,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solver: SolverKind,
    pub n: usize,
    pub dofs: usize,
    pub sup_error: Option<f64>,
    pub files: Vec<PathBuf>,
}

/// Solves at the largest degree of each sweep and writes a coefficient
/// file and a grid-value file per solver into `out`.
pub fn run_solve(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<SolveReport>> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    std::fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let mut reports = Vec::new();
    for &solver in &cfg.solvers {
        let n = *cfg.sweep(solver).last().unwrap();
        let sol = solve(&problem, solver, n, cfg.radii.as_deref())?;
        let grids = error_grids(&problem, n, cfg.oversampling);
        let values = solution_values(&sol, &grids)?;
        let exact = exact_values(&problem, &grids);
        let sup_error = match &exact {
            Some(e) => Some(grid_errors(&values, e)?.into_iter().fold(0.0, f64::max)),
            None => None,
        };
        let stem = format!("{}_{}", cfg.experiment, solver.name());
        let mut doc = sol.to_json();
        doc["experiment"] = cfg.experiment.clone().into();
        doc["solver"] = solver.name().into();
        doc["N"] = n.into();
        doc["dofs"] = sol.dofs().into();
        let coeff_path = out.join(format!("{stem}_coefficients.json"));
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&coeff_path, text).map_err(|e| Error::Io(format!("{}: {e}", coeff_path.display())))?;
        let values_path = out.join(format!("{stem}_values.csv"));
        write_values(&values_path, &grids, &values)?;
        reports.push(SolveReport { solver, n, dofs: sol.dofs(), sup_error, files: vec![coeff_path, values_path] });
    }
    Ok(reports)
}

#[derive(Serialize)]
struct ValueRow {
    cell: usize,
    r: f64,
    theta: f64,
    x: f64,
    y: f64,
    u: f64,
}

fn write_values(path: &Path, grids: &[(Vec<f64>, usize)], values: &[DMatrix<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    for (c, ((r, l), v)) in grids.iter().zip(values).enumerate() {
        for (k, &rk) in r.iter().enumerate() {
            for j in 0..*l {
                let th = 2.0 * std::f64::consts::PI * j as f64 / *l as f64;
                let row = ValueRow { cell: c, r: rk, theta: th, x: rk * th.cos(), y: rk * th.sin(), u: v[(k, j)] };
                w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
            }
        }
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Writes serializable rows as CSV with a header.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
