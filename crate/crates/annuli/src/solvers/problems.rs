//! Built-in right-hand sides and reference solutions.

use super::Coefficient;
use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

/// `g(cell, x, y)`; single-domain problems ignore the cell.
pub type CellFn = Arc<dyn Fn(usize, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// Unit disk.
    Disk,
    /// Annulus `rho <= r <= 1`.
    Annulus(f64),
    /// Disk (first radius 0) or annulus split at the given radii.
    Cells(Vec<f64>),
}

impl Domain {
    pub fn inner_radius(&self) -> f64 {
        match self {
            Domain::Disk => 0.0,
            Domain::Annulus(rho) => *rho,
            Domain::Cells(r) => r[0],
        }
    }

    /// Cell radii; a single cell for unsplit domains.
    pub fn radii(&self) -> Vec<f64> {
        match self {
            Domain::Cells(r) => r.clone(),
            _ => vec![self.inner_radius(), 1.0],
        }
    }
}

/// `Delta u + lambda u = f` with `u = 0` on the boundary.
#[derive(Clone)]
pub struct Problem {
    pub id: String,
    pub domain: Domain,
    /// Radial coefficient for single-domain solvers.
    pub lambda: Coefficient,
    /// Constant coefficient per cell of [`Domain::radii`].
    pub kappa: Vec<f64>,
    pub rhs: CellFn,
    pub exact: Option<CellFn>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("lambda", &self.lambda)
            .field("kappa", &self.kappa)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl Problem {
    /// Cell holding radius `r`; interfaces go to the inner cell.
    pub fn cell_of(&self, r: f64) -> usize {
        let radii = self.domain.radii();
        radii[1..radii.len() - 1].iter().filter(|&&b| r > b).count()
    }

    /// Right-hand side with the cell taken from the radius.
    pub fn rhs_at(&self, x: f64, y: f64) -> f64 {
        (self.rhs)(self.cell_of(x.hypot(y)), x, y)
    }

    /// Whether a single-domain solver sees a constant (or radial) coefficient.
    pub fn has_uniform_coefficient(&self) -> bool {
        self.kappa.windows(2).all(|w| w[0] == w[1])
    }
}

/// Ids accepted by [`catalog`].
pub const PROBLEM_IDS: [&str; 6] =
    ["zero", "manufactured", "gaussian-bump", "forced-helmholtz", "five-gaussian-poisson", "five-gaussian-helmholtz"];

/// Looks up a built-in problem. `rho` is the inner radius, or the
/// interface radius for the five-Gaussian problems.
pub fn catalog(id: &str, rho: Option<f64>) -> Result<Problem> {
    let annulus = |default: f64| -> Result<f64> {
        let r = rho.unwrap_or(default);
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!("inner radius must lie in (0, 1), got {r}")));
        }
        Ok(r)
    };
    let p = match id {
        "zero" => {
            let rho = annulus(0.5)?;
            single(id, rho, Coefficient::Constant(0.0), Arc::new(|_, _, _| 0.0), Some(Arc::new(|_, _, _| 0.0)))
        }
        "manufactured" => {
            let rho = annulus(0.5)?;
            let f = move |_: usize, x: f64, y: f64| 4.0 * (1.0 + rho * rho) - 16.0 * (x * x + y * y);
            let u = move |_: usize, x: f64, y: f64| {
                let r2 = x * x + y * y;
                (1.0 - r2) * (r2 - rho * rho)
            };
            single(id, rho, Coefficient::Constant(0.0), Arc::new(f), Some(Arc::new(u)))
        }
        "gaussian-bump" => {
            let rho = annulus(0.2)?;
            let bump = Gaussian { a: 250.0, b: 0.0, c: 0.6 };
            // u is the bump itself; its boundary values are below 1e-17
            single(
                id,
                rho,
                Coefficient::Constant(0.0),
                Arc::new(move |_, x, y| bump.laplacian(x, y)),
                Some(Arc::new(move |_, x, y| bump.value(x, y))),
            )
        }
        "forced-helmholtz" => {
            let rho = annulus(0.5)?;
            let lambda = Coefficient::from_r2_polynomial(rho, &[0.0, 6400.0]);
            single(id, rho, lambda, Arc::new(|_, x, _| (100.0 * x).sin()), None)
        }
        "five-gaussian-poisson" | "five-gaussian-helmholtz" => {
            let field = FiveGaussian::new(annulus(0.5)?, 100.0, 1.0);
            let helmholtz = id.ends_with("helmholtz");
            let (k0, k1) = (field.kappa0, field.kappa1);
            let (fa, fb) = (field.clone(), field.clone());
            let rhs: CellFn = Arc::new(move |c, x, y| {
                let k = if c == 0 { k0 } else { k1 };
                let lap = fa.laplacian(c, x, y);
                if helmholtz {
                    lap + k * fa.value(c, x, y)
                } else {
                    lap
                }
            });
            Problem {
                id: id.to_string(),
                domain: Domain::Cells(vec![0.0, field.rho, 1.0]),
                lambda: Coefficient::Constant(0.0),
                kappa: if helmholtz { vec![k0, k1] } else { vec![0.0, 0.0] },
                rhs,
                exact: Some(Arc::new(move |c, x, y| fb.value(c, x, y))),
            }
        }
        _ => return Err(Error::UnknownRhs(id.to_string())),
    };
    Ok(p)
}

fn single(id: &str, rho: f64, lambda: Coefficient, rhs: CellFn, exact: Option<CellFn>) -> Problem {
    Problem { id: id.to_string(), domain: Domain::Annulus(rho), lambda, kappa: vec![0.0], rhs, exact }
}

/// `exp(-a ((x - b)^2 + (y - c)^2))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Gaussian {
    fn offset(&self, x: f64, y: f64) -> (f64, f64) {
        (x - self.b, y - self.c)
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = self.offset(x, y);
        (-self.a * (dx * dx + dy * dy)).exp()
    }

    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let (dx, dy) = self.offset(x, y);
        let g = -2.0 * self.a * self.value(x, y);
        (g * dx, g * dy)
    }

    /// `-4a g (1 - a d^2)`.
    pub fn laplacian(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = self.offset(x, y);
        -4.0 * self.a * self.value(x, y) * (1.0 - self.a * (dx * dx + dy * dy))
    }
}

/// Sum of five Gaussians times a C^1 radial factor `h` that is quadratic
/// inside `r < rho`, quadratic plus a logarithm outside, and zero at `r = 1`.
/// `Delta h` equals `kappa0` inside and `kappa1` outside.
#[derive(Clone, Debug, PartialEq)]
pub struct FiveGaussian {
    pub rho: f64,
    pub kappa0: f64,
    pub kappa1: f64,
    pub bumps: Vec<Gaussian>,
}

impl FiveGaussian {
    pub fn new(rho: f64, kappa0: f64, kappa1: f64) -> Self {
        let mut bumps: Vec<Gaussian> = [0.0, PI / 2.0, PI / 3.0, 5.0 * PI / 4.0]
            .iter()
            .enumerate()
            .map(|(i, th)| Gaussian { a: 10.0 * (i + 1) as f64, b: rho * th.cos(), c: rho * th.sin() })
            .collect();
        let th = 3.0 * PI / 4.0;
        bumps.push(Gaussian { a: 50.0, b: 0.9 * th.cos(), c: 0.9 * th.sin() });
        FiveGaussian { rho, kappa0, kappa1, bumps }
    }

    fn log_factor(&self) -> f64 {
        (self.kappa0 - self.kappa1) * self.rho * self.rho / 2.0
    }

    /// `h(r)` on cell `c` (0 inside).
    pub fn radial(&self, c: usize, r: f64) -> f64 {
        let (k0, k1, rho) = (self.kappa0, self.kappa1, self.rho);
        if c == 0 {
            k0 * r * r / 4.0 + (k1 - k0) * rho * rho / 4.0 - k1 / 4.0 + self.log_factor() * rho.ln()
        } else {
            k1 * r * r / 4.0 - k1 / 4.0 + self.log_factor() * r.ln()
        }
    }

    /// `h'(r) / r`.
    fn radial_gradient_factor(&self, c: usize, r: f64) -> f64 {
        if c == 0 {
            self.kappa0 / 2.0
        } else {
            self.kappa1 / 2.0 + self.log_factor() / (r * r)
        }
    }

    fn sum(&self, x: f64, y: f64) -> f64 {
        self.bumps.iter().map(|g| g.value(x, y)).sum()
    }

    pub fn value(&self, c: usize, x: f64, y: f64) -> f64 {
        self.sum(x, y) * self.radial(c, x.hypot(y))
    }

    /// `h Delta G + 2 grad G . grad h + G Delta h`.
    pub fn laplacian(&self, c: usize, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        let (mut lap, mut gx, mut gy) = (0.0, 0.0, 0.0);
        for g in &self.bumps {
            lap += g.laplacian(x, y);
            let (a, b) = g.gradient(x, y);
            gx += a;
            gy += b;
        }
        let k = if c == 0 { self.kappa0 } else { self.kappa1 };
        let phi = self.radial_gradient_factor(c, r);
        self.radial(c, r) * lap + 2.0 * phi * (gx * x + gy * y) + k * self.sum(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_laplacian(f: impl Fn(f64, f64) -> f64, x: f64, y: f64) -> f64 {
        let h = 1e-3;
        let d2 = |g: &dyn Fn(f64) -> f64| (-g(2.0 * h) + 16.0 * g(h) - 30.0 * g(0.0) + 16.0 * g(-h) - g(-2.0 * h)) / (12.0 * h * h);
        d2(&|s| f(x + s, y)) + d2(&|s| f(x, y + s))
    }

    #[test]
    fn gaussian_laplacian() {
        let g = Gaussian { a: 25.0, b: 0.1, c: 0.6 };
        for (x, y) in [(0.0, 0.5), (0.3, 0.7), (-0.2, 0.2)] {
            let fd = fd_laplacian(|x, y| g.value(x, y), x, y);
            assert!((fd - g.laplacian(x, y)).abs() < 1e-5 * g.a * g.a);
        }
    }

    #[test]
    fn five_gaussian_field() {
        let u = FiveGaussian::new(0.5, 100.0, 1.0);
        // C^1 across the interface and zero on the boundary
        let (a, b) = (u.radial(0, 0.5), u.radial(1, 0.5));
        assert!((a - b).abs() < 1e-13);
        let d = |c, r: f64| (u.radial(c, r + 1e-6) - u.radial(c, r - 1e-6)) / 2e-6;
        assert!((d(0, 0.5) - d(1, 0.5)).abs() < 1e-6);
        assert!(u.radial(1, 1.0).abs() < 1e-15);
        for (c, x, y) in [(0, 0.1, 0.2), (0, -0.3, 0.25), (1, 0.6, 0.1), (1, -0.5, 0.6)] {
            let fd = fd_laplacian(|x, y| u.value(c, x, y), x, y);
            let exact = u.laplacian(c, x, y);
            assert!((fd - exact).abs() < 1e-6 * exact.abs().max(100.0), "{fd} vs {exact}");
        }
    }

    #[test]
    fn catalog_lookup() {
        for id in PROBLEM_IDS {
            let p = catalog(id, None).unwrap();
            assert_eq!(p.kappa.len(), p.domain.radii().len() - 1);
        }
        match catalog("nope", None) {
            Err(Error::UnknownRhs(id)) => assert_eq!(id, "nope"),
            other => panic!("{other:?}"),
        }
        let p = catalog("five-gaussian-helmholtz", None).unwrap();
        assert_eq!(p.cell_of(0.5), 0);
        assert_eq!(p.cell_of(0.51), 1);
        assert_eq!(p.kappa, vec![100.0, 1.0]);
        let bump = catalog("gaussian-bump", None).unwrap();
        let u = bump.exact.unwrap();
        for i in 0..100 {
            let th = i as f64 * 0.0628;
            assert!(u(0, th.cos(), th.sin()).abs() < 1e-17);
            assert!(u(0, 0.2 * th.cos(), 0.2 * th.sin()).abs() < 1e-17);
        }
    }
}
