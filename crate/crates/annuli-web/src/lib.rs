//! Browser bindings: solve a catalog problem, inspect one Fourier mode's
//! operator, and run a small convergence sweep. Every function returns JSON.

use annuli::experiments::{run_convergence, solve, ExperimentConfig, SolverKind};
use annuli::solvers::problems::catalog;
use annuli::solvers::{ChebFourierSolver, ModeSystem, ZernikeAnnularSolver};
use nalgebra::DMatrix;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn solver_kind(name: &str) -> Result<SolverKind, String> {
    serde_json::from_value(Value::String(name.to_string())).map_err(|_| format!("unknown solver {name}"))
}

fn finish(v: Result<Value, String>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

/// Solves problem `rhs` on the annulus with inner radius `rho` and returns
/// values on an `nr` by `nt` polar grid covering the whole domain.
pub fn solve_grid_json(rhs: &str, solver: &str, rho: f64, n: usize, nr: usize, nt: usize) -> Result<Value, String> {
    let problem = catalog(rhs, Some(rho)).map_err(|e| e.to_string())?;
    let kind = solver_kind(solver)?;
    let sol = solve(&problem, kind, n, None).map_err(|e| e.to_string())?;
    let radii = problem.domain.radii();
    let (inner, outer) = (radii[0], *radii.last().unwrap());
    let r: Vec<f64> = (0..nr).map(|k| inner + (outer - inner) * k as f64 / (nr - 1).max(1) as f64).collect();
    // evaluate on a fine enough angular grid, then keep every `k`-th angle
    let k = (2 * n + 1).div_ceil(nt.max(1));
    let fine = sol.values_at(&r, nt * k).map_err(|e| e.to_string())?;
    let v = DMatrix::from_fn(nr, nt, |i, j| fine[(i, j * k)]);
    let mut err = None;
    if let Some(u) = &problem.exact {
        let mut e = 0.0_f64;
        for (k, &rk) in r.iter().enumerate() {
            let c = problem.cell_of(rk);
            for j in 0..nt {
                let (s, co) = (2.0 * std::f64::consts::PI * j as f64 / nt as f64).sin_cos();
                e = e.max((v[(k, j)] - u(c, rk * co, rk * s)).abs());
            }
        }
        err = Some(e);
    }
    let values: Vec<f64> = (0..nr).flat_map(|k| (0..nt).map(move |j| (k, j))).map(|(k, j)| v[(k, j)]).collect();
    Ok(json!({"r": r, "nt": nt, "values": values, "dofs": sol.dofs(), "max_error": err}))
}

/// Nonzero pattern, size and bandwidths of the mode-`m` system for both
/// annular discretisations of the Poisson problem.
pub fn structure_json(rho: f64, n: usize, m: usize) -> Result<Value, String> {
    let lambda = catalog("zero", Some(rho)).map_err(|e| e.to_string())?.lambda;
    let za = ZernikeAnnularSolver::new(rho, n, &lambda).map_err(|e| e.to_string())?;
    let cf = ChebFourierSolver::new(rho, n, &lambda).map_err(|e| e.to_string())?;
    let describe = |name: &str, sys: ModeSystem| {
        let a = sys.to_dense();
        let nonzero: Vec<[usize; 2]> =
            (0..a.nrows()).flat_map(|i| (0..a.ncols()).map(move |j| (i, j))).filter(|&(i, j)| a[(i, j)] != 0.0).map(|(i, j)| [i, j]).collect();
        let (lower, upper) = sys.bandwidths();
        json!({"solver": name, "size": sys.size(), "dense_rows": sys.dense_rows(), "lower": lower, "upper": upper, "nonzero": nonzero})
    };
    let mut out = Vec::new();
    if m <= za.degree() {
        out.push(describe("zernike-annular", ModeSystem::Banded(za.mode_system(m).map_err(|e| e.to_string())?)));
    }
    out.push(describe("chebyshev-fourier", ModeSystem::Bordered(cf.mode_system(m).map_err(|e| e.to_string())?)));
    Ok(Value::Array(out))
}

/// Convergence rows for both annular solvers at degrees `step, 2 step, ..`
/// up to `nmax`.
pub fn convergence_json(rhs: &str, rho: f64, nmax: usize, step: usize) -> Result<Value, String> {
    let step = step.max(2) & !1;
    let n: Vec<usize> = (1..=nmax / step).map(|k| k * step).collect();
    let cfg = json!({
        "experiment": "browser",
        "rhs": rhs,
        "rho": rho,
        "solvers": ["zernike-annular", "chebyshev-fourier"],
        "n": n,
        "oversampling": 2,
        "timing": false,
    });
    let cfg = ExperimentConfig::from_json(&cfg.to_string()).map_err(|e| e.to_string())?;
    let report = run_convergence(&cfg).map_err(|e| e.to_string())?;
    serde_json::to_value(&report.rows).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn solve_grid(rhs: &str, solver: &str, rho: f64, n: usize, nr: usize, nt: usize) -> Result<String, JsValue> {
    finish(solve_grid_json(rhs, solver, rho, n, nr, nt))
}

#[wasm_bindgen]
pub fn structure(rho: f64, n: usize, m: usize) -> Result<String, JsValue> {
    finish(structure_json(rho, n, m))
}

#[wasm_bindgen]
pub fn convergence(rhs: &str, rho: f64, nmax: usize, step: usize) -> Result<String, JsValue> {
    finish(convergence_json(rhs, rho, nmax, step))
}
