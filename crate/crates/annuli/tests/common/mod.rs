//! Independent oracles shared by the integration tests and the acceptance
//! harness. Each check returns a relative defect so callers pick the
//! tolerance.
#![allow(dead_code)]

use annuli::annulus::{AnnulusBasis, AnnulusGrid, AnnulusParams, Axis, ModeCoefficients, ModeIndex};
use annuli::banded::BandedMatrix;
use annuli::chebfourier::ChebFourierBasis;
use annuli::classical::{
    chebyshev_t_eval, chebyshev_t_matrix, conversion_t_to_c2, conversion_t_to_jacobi, ClassicalFamily,
};
use annuli::semiclassical::{raising_connection, weighted_derivative, DerivativeChain, Hierarchy, Strategy, WeightSubset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Central stencils of order 8; exact for polynomials of degree 8 (first
/// derivative) and 9 (second derivative) up to rounding.
const D1: [f64; 9] = [
    1.0 / 280.0,
    -4.0 / 105.0,
    1.0 / 5.0,
    -4.0 / 5.0,
    0.0,
    4.0 / 5.0,
    -1.0 / 5.0,
    4.0 / 105.0,
    -1.0 / 280.0,
];
const D2: [f64; 9] = [
    -1.0 / 560.0,
    8.0 / 315.0,
    -1.0 / 5.0,
    8.0 / 5.0,
    -205.0 / 72.0,
    8.0 / 5.0,
    -1.0 / 5.0,
    8.0 / 315.0,
    -1.0 / 560.0,
];
pub const FD_STEP: f64 = 0.05;

pub fn fd_first(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let h = FD_STEP;
    D1.iter().enumerate().map(|(k, w)| w * f(x + (k as f64 - 4.0) * h)).sum::<f64>() / h
}

pub fn fd_second(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let h = FD_STEP;
    D2.iter().enumerate().map(|(k, w)| w * f(x + (k as f64 - 4.0) * h)).sum::<f64>() / (h * h)
}

pub fn fd_laplacian(f: &dyn Fn(f64, f64) -> f64, x: f64, y: f64) -> f64 {
    fd_second(&|s| f(s, y), x) + fd_second(&|s| f(x, s), y)
}

pub fn random_points(rho: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = rng.gen_range(rho + 0.05..0.95);
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            (r * th.cos(), r * th.sin())
        })
        .collect()
}

pub fn column(mat: &BandedMatrix, j: usize) -> Vec<f64> {
    (0..mat.rows()).map(|i| mat.get(i, j)).collect()
}

pub fn unit(j: usize) -> Vec<f64> {
    let mut e = vec![0.0; j + 1];
    e[j] = 1.0;
    e
}

pub fn mode_sum(basis: &AnnulusBasis, a: f64, b: f64, mode: ModeIndex, v: &[f64], x: f64, y: f64) -> f64 {
    v.iter().enumerate().map(|(i, c)| c * basis.eval_z_with(a, b, mode.m + 2 * i, mode, x, y).unwrap()).sum()
}

/// Collects `(column, expected, got)` triples and reports the largest
/// defect relative to each column's largest expected value. Columns whose
/// exact value vanishes (derivatives of constants) are measured against a
/// thousandth of the largest value in the check.
#[derive(Default)]
pub struct Defect {
    entries: Vec<(usize, f64, f64)>,
}

impl Defect {
    pub fn push(&mut self, col: usize, expected: f64, got: f64) {
        self.entries.push((col, expected, got));
    }

    pub fn relative(&self) -> f64 {
        let global = self.entries.iter().fold(0.0_f64, |m, p| m.max(p.1.abs()));
        let mut worst = 0.0_f64;
        for &(k, e, g) in &self.entries {
            let col = self.entries.iter().filter(|p| p.0 == k).fold(0.0_f64, |m, p| m.max(p.1.abs()));
            let scale = col.max(1e-3 * global);
            worst = worst.max(if scale > 0.0 { (e - g).abs() / scale } else { (e - g).abs() });
        }
        worst
    }
}

fn annulus(rho: f64, a: f64, b: f64, degree: usize) -> AnnulusBasis {
    AnnulusBasis::new(AnnulusParams::new(rho, a, b).unwrap(), degree).unwrap()
}

fn disk(a: f64, degree: usize) -> AnnulusBasis {
    AnnulusBasis::new(AnnulusParams::disk(a).unwrap(), degree).unwrap()
}

fn modes_of(m: usize) -> Vec<ModeIndex> {
    if m == 0 {
        vec![ModeIndex::cos(0)]
    } else {
        vec![ModeIndex::sin(m), ModeIndex::cos(m)]
    }
}

/// Multiplication blocks for `x` or `y`, checked pointwise.
fn check_mult_xy(basis: &AnnulusBasis, a: f64, b: f64, m: usize, n: usize, pts: &[(f64, f64)], d: &mut Defect) {
    for mode in modes_of(m) {
        for axis in [Axis::X, Axis::Y] {
            let blocks = basis.mult_xy(mode, axis, n).unwrap();
            for &(x, y) in pts {
                for k in 0..n {
                    let z = basis.eval_z(m + 2 * k, mode, x, y).unwrap();
                    let lhs = if axis == Axis::X { x } else { y } * z;
                    let rhs: f64 =
                        blocks.iter().map(|blk| mode_sum(basis, a, b, blk.target, &column(&blk.matrix, k), x, y)).sum();
                    d.push(k, lhs, rhs);
                }
            }
        }
    }
}

/// Sampled identities of the annulus operator factories on mode `m`:
/// weighted lowering, raising, `r^2` and `x`/`y` multiplication.
pub fn annulus_sampled_defect(rho: f64, m: usize, n: usize, seed: u64) -> f64 {
    let pts = random_points(rho, 8, seed);
    let b11 = annulus(rho, 1.0, 1.0, 2 * n + m + 8);
    let b00 = annulus(rho, 0.0, 0.0, 2 * n + m + 8);
    let mut worst = 0.0_f64;
    let mode = ModeIndex::cos(m);

    let mut d = Defect::default();
    let l = b11.lowering_weighted(m, n + 2).unwrap();
    for &(x, y) in &pts {
        for k in 0..n {
            let w = b11.eval_weighted_w(m + 2 * k, mode, x, y).unwrap();
            d.push(k, w, mode_sum(&b11, 1.0, 1.0, mode, &column(&l, k), x, y));
        }
    }
    worst = worst.max(d.relative());

    for (da, db) in [(1, 1), (2, 2), (1, 0), (0, 1)] {
        let mut d = Defect::default();
        let r = b00.raising(m, n, da, db).unwrap();
        for &(x, y) in &pts {
            for k in 0..r.cols() {
                let z = b00.eval_z(m + 2 * k, mode, x, y).unwrap();
                d.push(k, z, mode_sum(&b00, da as f64, db as f64, mode, &column(&r, k), x, y));
            }
        }
        worst = worst.max(d.relative());
    }

    let mut d = Defect::default();
    let mr = b11.mult_r2(m, n + 1).unwrap();
    for &(x, y) in &pts {
        for k in 0..n {
            let lhs = (x * x + y * y) * b11.eval_z(m + 2 * k, mode, x, y).unwrap();
            d.push(k, lhs, mode_sum(&b11, 1.0, 1.0, mode, &column(&mr, k), x, y));
        }
    }
    worst = worst.max(d.relative());

    let mut d = Defect::default();
    check_mult_xy(&b11, 1.0, 1.0, m, n, &pts, &mut d);
    worst.max(d.relative())
}

/// Sampled identities of the disk factories on mode `m`.
pub fn disk_sampled_defect(m: usize, n: usize, seed: u64) -> f64 {
    let pts = random_points(0.0, 8, seed);
    let b1 = disk(1.0, 2 * n + m + 8);
    let b0 = disk(0.0, 2 * n + m + 8);
    let mode = ModeIndex::cos(m);
    let mut worst = 0.0_f64;

    let mut d = Defect::default();
    let xw = b1.disk_lowering_weighted(m, n + 1).unwrap();
    for &(x, y) in &pts {
        for k in 0..n {
            let lhs = b1.eval_weighted_w(m + 2 * k, mode, x, y).unwrap();
            d.push(k, lhs, mode_sum(&b1, 1.0, 0.0, mode, &column(&xw, k), x, y));
        }
    }
    worst = worst.max(d.relative());

    for da in [1, 2] {
        let mut d = Defect::default();
        let r = b0.raising(m, n, da, 0).unwrap();
        for &(x, y) in &pts {
            for k in 0..r.cols() {
                let z = b0.eval_z(m + 2 * k, mode, x, y).unwrap();
                d.push(k, z, mode_sum(&b0, da as f64, 0.0, mode, &column(&r, k), x, y));
            }
        }
        worst = worst.max(d.relative());
    }

    let mut d = Defect::default();
    let mr = b1.mult_r2(m, n + 1).unwrap();
    for &(x, y) in &pts {
        for k in 0..n {
            let lhs = (x * x + y * y) * b1.eval_z(m + 2 * k, mode, x, y).unwrap();
            d.push(k, lhs, mode_sum(&b1, 1.0, 0.0, mode, &column(&mr, k), x, y));
        }
    }
    worst = worst.max(d.relative());

    let mut d = Defect::default();
    check_mult_xy(&b1, 1.0, 0.0, m, n, &pts, &mut d);
    worst.max(d.relative())
}

/// Finite-difference checks of the annulus Laplacians on mode `m`. Only
/// polynomial degrees the stencil differentiates exactly are used.
pub fn annulus_fd_defect(rho: f64, m: usize, seed: u64) -> f64 {
    let pts = random_points(rho, 6, seed);
    let mut worst = 0.0_f64;
    let mode = ModeIndex::sin(m.max(1));
    let m = mode.m;

    // W^(1,1) has degree m + 2k + 4
    let b11 = annulus(rho, 1.0, 1.0, 24);
    let nw = (9usize.saturating_sub(m + 4)) / 2 + 1;
    if m + 4 <= 9 {
        let d_w = b11.laplacian_w(m, nw + 1).unwrap();
        let mut d = Defect::default();
        for &(x, y) in &pts {
            for k in 0..nw {
                let f = |x: f64, y: f64| b11.eval_weighted_w(m + 2 * k, mode, x, y).unwrap();
                d.push(k, fd_laplacian(&f, x, y), mode_sum(&b11, 1.0, 1.0, mode, &column(&d_w, k), x, y));
            }
        }
        worst = worst.max(d.relative());
    }

    let nz = (9usize.saturating_sub(m)) / 2 + 1;
    for (a, b) in [(0.0, 0.0), (1.0, 1.0)] {
        let basis = annulus(rho, a, b, 24);
        let d_z = basis.laplacian_z(m, nz).unwrap();
        let mut d = Defect::default();
        for &(x, y) in &pts {
            for k in 0..nz {
                let f = |x: f64, y: f64| basis.eval_z(m + 2 * k, mode, x, y).unwrap();
                d.push(k, fd_laplacian(&f, x, y), mode_sum(&basis, a + 2.0, b + 2.0, mode, &column(&d_z, k), x, y));
            }
        }
        worst = worst.max(d.relative());
    }
    worst
}

/// Finite-difference checks of the disk Laplacians on mode `m`.
pub fn disk_fd_defect(m: usize, seed: u64) -> f64 {
    let pts = random_points(0.0, 6, seed);
    let mode = ModeIndex::cos(m);
    let mut worst = 0.0_f64;

    let b0 = disk(0.0, 24);
    let nz = (9usize.saturating_sub(m)) / 2 + 1;
    let d_z = b0.disk_laplacian(m, nz).unwrap();
    let mut d = Defect::default();
    for &(x, y) in &pts {
        for k in 0..nz {
            let f = |x: f64, y: f64| b0.eval_z(m + 2 * k, mode, x, y).unwrap();
            d.push(k, fd_laplacian(&f, x, y), mode_sum(&b0, 2.0, 0.0, mode, &column(&d_z, k), x, y));
        }
    }
    worst = worst.max(d.relative());

    if m + 2 <= 9 {
        let b1 = disk(1.0, 24);
        let nw = (9 - (m + 2)) / 2 + 1;
        let d_w = b1.disk_weighted_laplacian(m, nw).unwrap();
        let mut d = Defect::default();
        for &(x, y) in &pts {
            for k in 0..nw {
                let f = |x: f64, y: f64| b1.eval_weighted_w(m + 2 * k, mode, x, y).unwrap();
                d.push(k, fd_laplacian(&f, x, y), mode_sum(&b1, 1.0, 0.0, mode, &column(&d_w, k), x, y));
            }
        }
        worst = worst.max(d.relative());
    }
    worst
}

/// Chebyshev-Fourier operators: `R` and `X` sampled, `D` by finite
/// differences. Returns `(sampled, fd)`.
pub fn chebfourier_defect(rho: f64, seed: u64) -> (f64, f64) {
    let basis = ChebFourierBasis::new(rho, 12).unwrap();
    let ops = basis.operators(14);
    let c2 = ClassicalFamily::ultraspherical2();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sampled, mut fd) = (Defect::default(), Defect::default());
    for _ in 0..8 {
        let r: f64 = rng.gen_range(rho..1.0);
        let s = basis.radial_variable(r);
        for j in 0..12 {
            let t = |r: f64| chebyshev_t_eval(&unit(j), basis.radial_variable(r));
            sampled.push(j, t(r), c2.clenshaw(&column(&ops.r, j), s));
            sampled.push(100 + j, r * c2.clenshaw(&unit(j), s), c2.clenshaw(&column(&ops.x, j), s));
            if j <= 8 {
                let expected = r * r * fd_second(&t, r) + r * fd_first(&t, r);
                fd.push(j, expected, c2.clenshaw(&column(&ops.d, j), s));
            }
        }
    }
    (sampled.relative(), fd.relative())
}

/// Classical factories: Jacobi matrices against the recurrence they
/// encode, `T -> C2` and `T -> P^(a,b)` conversions, and `f(X)` by Clenshaw.
pub fn classical_defect(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = Defect::default();
    let n = 10;
    let conv = conversion_t_to_c2(n);
    let c2 = ClassicalFamily::ultraspherical2();
    let (a, b) = (rng.gen_range(0..3) as f64, rng.gen_range(0..3) as f64);
    let jac = ClassicalFamily::jacobi(a, b).unwrap();
    let (r_t, _) = conversion_t_to_jacobi(a, b, n).unwrap();
    let xm = ClassicalFamily::chebyshev_t().jacobi_matrix(n + 2);
    let f = [0.3, -1.2, 0.5, 0.25];
    let fx = chebyshev_t_matrix(&f, &xm).unwrap();
    for _ in 0..8 {
        let x: f64 = rng.gen_range(-1.0..1.0);
        let p = jac.eval_all(n + 1, x);
        let xj = jac.jacobi_matrix(n + 1);
        for k in 0..n {
            let t = chebyshev_t_eval(&unit(k), x);
            d.push(k, t, c2.clenshaw(&column(&conv, k), x));
            // x p_k = sum_i X[i, k] p_i
            let rhs: f64 = (0..n + 1).map(|i| xj.get(i, k) * p[i]).sum();
            d.push(100 + k, x * p[k], rhs);
            // T(x) R_T = P^(a,b)(x)
            let got: f64 = (0..n).map(|i| r_t.get(i, k) * chebyshev_t_eval(&unit(i), x)).sum();
            d.push(200 + k, p[k], got);
            if k + 4 < n {
                let got = chebyshev_t_eval(&column(&fx, k), x);
                d.push(300 + k, chebyshev_t_eval(&f, x) * t, got);
            }
        }
    }
    d.relative()
}

/// Semiclassical raising connections `Q^(a,b,c) = Q^(a+da,b+db,c+dc) R`.
pub fn semiclassical_sampled_defect(t: f64, a: f64, b: f64, c: usize, seed: u64) -> f64 {
    let n = 10;
    let h = Hierarchy::semiclassical(t, a, b, c + 1, n + 8, Strategy::QrQ).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for (da, db, dc) in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 1, 1)] {
        let x = h.jacobi(c, n + 5).unwrap();
        let r = raising_connection(&x, t, da, db, dc).unwrap();
        let up = Hierarchy::semiclassical(t, a + da as f64, b + db as f64, c + dc, n + 8, Strategy::QrQ).unwrap();
        let mut d = Defect::default();
        for _ in 0..8 {
            let x: f64 = rng.gen_range(0.0..1.0);
            let lo = h.level(c).eval(r.cols(), x);
            let hi = up.level(c + dc).eval(r.rows(), x);
            for k in 0..r.cols() {
                let got: f64 = (0..r.rows()).map(|i| r.get(i, k) * hi[i]).sum();
                d.push(k, lo[k], got);
            }
        }
        worst = worst.max(d.relative());
    }
    worst
}

/// Finite-difference checks of the semiclassical derivative matrices for
/// every weight subset, with integer exponents so the weighted functions
/// stay polynomial.
pub fn semiclassical_fd_defect(t: f64, c: usize, seed: u64) -> f64 {
    let n = 12;
    let depth = c + 3;
    let params = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)];
    let hier: Vec<Hierarchy> = params
        .iter()
        .map(|&(a, b)| Hierarchy::semiclassical(t, a, b, depth, n + 8, Strategy::QrQ).unwrap())
        .collect();
    let chains: Vec<DerivativeChain> =
        (0..2).map(|i| DerivativeChain::build(&hier[i], &hier[i + 1], depth - 1).unwrap()).collect();
    let idx = |a: f64, b: f64| params.iter().position(|p| *p == (a, b));
    let fam = |a: f64, b: f64| -> annuli::Result<&Hierarchy> {
        idx(a, b).map(|i| &hier[i]).ok_or_else(|| annuli::Error::InvalidParameter("no such family".into()))
    };
    let chain = |a: f64, b: f64| -> annuli::Result<&DerivativeChain> {
        idx(a, b).filter(|i| *i < 2).map(|i| &chains[i]).ok_or_else(|| annuli::Error::InvalidParameter("no chain".into()))
    };
    let (a, b) = (1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..6).map(|_| rng.gen_range(0.05..0.95)).collect();
    let mut worst = 0.0_f64;
    for subset in [WeightSubset::NONE, WeightSubset::C, WeightSubset::AB, WeightSubset::ABC] {
        let dmat = weighted_derivative(&fam, &chain, (a, b, c), subset, 8).unwrap();
        let (ta, tb, tc) = subset.target((a, b, c));
        let src = fam(a, b).unwrap().level(c);
        let tgt = fam(ta, tb).unwrap().level(tc as usize);
        let weight = |x: f64, shift: f64| {
            let mut w = 1.0;
            if subset.a {
                w *= x.powf(a + shift);
            }
            if subset.b {
                w *= (1.0 - x).powf(b + shift);
            }
            if subset.c {
                w *= (t - x).powf(c as f64 + shift);
            }
            w
        };
        let extra = a as usize * subset.a as usize + b as usize * subset.b as usize + c * subset.c as usize;
        let mut d = Defect::default();
        for k in 0..8 {
            if k + extra > 8 {
                continue;
            }
            let g = |x: f64| weight(x, 0.0) * src.eval(k + 1, x)[k];
            for &x in &xs {
                let q = tgt.eval(8, x);
                let got: f64 = weight(x, -1.0) * (0..8).map(|i| dmat.get(i, k) * q[i]).sum::<f64>();
                d.push(k, fd_first(&g, x), got);
            }
        }
        worst = worst.max(d.relative());
    }
    worst
}

pub fn random_coeffs(n: usize, seed: u64) -> ModeCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = ModeCoefficients::global_order(n).len();
    let v: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ModeCoefficients::from_interlaced(n, &v).unwrap()
}

/// Largest coefficient change after synthesis then analysis at even
/// degree `n`. `rho = 0`
/// is the disk.
pub fn round_trip_defect(rho: f64, a: f64, b: f64, n: usize, weighted: bool, seed: u64) -> f64 {
    let params = if rho == 0.0 { AnnulusParams::disk(a).unwrap() } else { AnnulusParams::new(rho, a, b).unwrap() };
    let basis = AnnulusBasis::new(params, n).unwrap();
    let c = random_coeffs(n, seed);
    let grid = AnnulusGrid::new(rho, n);
    let back = basis.analysis(&basis.synthesis(&c, &grid, weighted).unwrap(), weighted).unwrap();
    c.interlace().iter().zip(back.interlace()).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Orthonormality defect of `Q^(a,b,c)_0..deg` on `(0, 1)` for weight
/// `x^a (1-x)^b (t-x)^c`, by Gauss-Jacobi quadrature exact for the integrand.
pub fn semiclassical_gram_defect(t: f64, a: f64, b: f64, c: usize, deg: usize, strategy: Strategy) -> f64 {
    let h = Hierarchy::semiclassical(t, a, b, c, deg + 2, strategy).unwrap();
    let lvl = h.level(c);
    let rule = ClassicalFamily::unit_interval(a, b).unwrap().gauss_rule(deg + c / 2 + 4);
    let n = deg + 1;
    let mut gram = vec![vec![0.0; n]; n];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let q = lvl.eval(n, x);
        let wt = w * (t - x).powi(c as i32);
        for i in 0..n {
            for j in 0..n {
                gram[i][j] += wt * q[i] * q[j];
            }
        }
    }
    let mut err = 0.0_f64;
    for (i, row) in gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            err = err.max((g - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    err
}

/// Gram matrix of the 2D family `Z^(a,b)` up to degree `deg`, normalised
/// by the closed-form norms `pi_m t^-(a+b+m+1) / 2`, against the identity.
pub fn annulus_gram_defect(rho: f64, a: f64, b: f64, deg: usize) -> f64 {
    use std::f64::consts::PI;
    let params = AnnulusParams::new(rho, a, b).unwrap();
    let basis = AnnulusBasis::new(params, deg).unwrap();
    let rule = ClassicalFamily::jacobi(0.0, 0.0).unwrap().on_interval(rho * rho, 1.0).gauss_rule(deg + 8);
    let nth = 2 * deg + 3;
    let funcs = ModeCoefficients::global_order(deg);
    let nf = funcs.len();
    let norms: Vec<f64> = funcs
        .iter()
        .map(|&(_, md)| {
            let pi_m = if md.m == 0 { 2.0 * PI } else { PI };
            (pi_m * params.t.powf(-(a + b + md.m as f64 + 1.0)) / 2.0).sqrt()
        })
        .collect();
    let mut gram = vec![0.0; nf * nf];
    for (s, w) in rule.nodes.iter().zip(&rule.weights) {
        let r = s.sqrt();
        for l in 0..nth {
            let th = 2.0 * PI * l as f64 / nth as f64;
            let (x, y) = (r * th.cos(), r * th.sin());
            // dx dy = (1/2) d(r^2) dtheta
            let wt = 0.5 * w * (2.0 * PI / nth as f64) * params.weight(x, y);
            let v: Vec<f64> =
                funcs.iter().zip(&norms).map(|(&(n, md), s)| basis.eval_z(n, md, x, y).unwrap() / s).collect();
            for i in 0..nf {
                for j in 0..nf {
                    gram[i * nf + j] += wt * v[i] * v[j];
                }
            }
        }
    }
    let mut err = 0.0_f64;
    for i in 0..nf {
        for j in 0..nf {
            err = err.max((gram[i * nf + j] - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    err
}

/// Largest coefficient outside mode `(m, cos)` relative to the largest
/// inside it, for a right-hand side `Re (x + iy)^m e^(-r^2)`, across the
/// annular, disk, Chebyshev-Fourier and spectral-element solvers.
pub fn decoupling_defect(rho: f64, m: usize, n: usize) -> f64 {
    use annuli::solvers::{
        ChebFourierSolver, Coefficient, Mesh, SpectralElementSolver, ZernikeAnnularSolver, ZernikeDiskSolver,
    };
    let target = ModeIndex::cos(m);
    let f = move |x: f64, y: f64| target.harmonic(x, y) * (-(x * x + y * y)).exp();
    let leak = |c: &ModeCoefficients| -> (f64, f64) {
        let mut off = 0.0_f64;
        for mode in c.modes() {
            if mode != target {
                off = c.mode(mode).iter().fold(off, |a, v| a.max(v.abs()));
            }
        }
        (off, c.mode(target).iter().fold(0.0_f64, |a, v| a.max(v.abs())))
    };
    let ratio = |(off, on): (f64, f64)| if on > 0.0 { off / on } else { f64::INFINITY };
    let mut worst = 0.0_f64;

    let za = ZernikeAnnularSolver::new(rho, n, &Coefficient::Constant(3.0)).unwrap().solve(&f).unwrap();
    worst = worst.max(ratio(leak(&za.coeffs)));
    let zd = ZernikeDiskSolver::new(n, 3.0, 1.0).unwrap().solve(&f).unwrap();
    worst = worst.max(ratio(leak(&zd.coeffs)));

    let cf = ChebFourierSolver::new(rho, n, &Coefficient::Constant(3.0)).unwrap().solve(&f).unwrap();
    let (mut off, mut on) = (0.0_f64, 0.0_f64);
    for mode in cf.coeffs.modes() {
        let v = cf.coeffs.mode(mode).iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if mode == target {
            on = v;
        } else {
            off = off.max(v);
        }
    }
    worst = worst.max(ratio((off, on)));

    let mesh = Mesh::new(&[0.0, rho, 1.0]).unwrap();
    let se = SpectralElementSolver::new(&mesh, n, &[3.0, 1.0]).unwrap().solve(&|_, x, y| f(x, y)).unwrap();
    let (off, on) = se.coeffs.iter().map(leak).fold((0.0_f64, 0.0_f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    worst.max(ratio((off, on)))
}
