use super::even_degree;
use std::f64::consts::PI;

/// Synthesis grid: `K` radii and `L = 4K - 3` equispaced angles.
///
/// `r_k^2 = cos^2(phi_k) + rho^2 sin^2(phi_k)` with
/// `phi_k = (2k+1) pi / (4K)`, so `1 - 2 tau(r_k) = cos(2 phi_k)` is a
/// Chebyshev point of the first kind.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusGrid {
    pub rho: f64,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
}

impl AnnulusGrid {
    /// Grid for truncation degree `n` (odd degrees are padded).
    pub fn new(rho: f64, n: usize) -> Self {
        Self::with_radial_points(rho, even_degree(n) / 2 + 1)
    }

    pub fn with_radial_points(rho: f64, k: usize) -> Self {
        let k = k.max(1);
        let r = (0..k)
            .map(|i| {
                let phi = (2 * i + 1) as f64 * PI / (4 * k) as f64;
                let (s, c) = phi.sin_cos();
                (c * c + rho * rho * s * s).sqrt()
            })
            .collect();
        let l = 4 * k - 3;
        let theta = (0..l).map(|i| 2.0 * PI * i as f64 / l as f64).collect();
        AnnulusGrid { rho, r, theta }
    }

    /// Grid with `factor` times the radial points of the degree-`n` grid.
    pub fn oversampled(rho: f64, n: usize, factor: usize) -> Self {
        Self::with_radial_points(rho, factor.max(1) * (even_degree(n) / 2 + 1))
    }

    pub fn k(&self) -> usize {
        self.r.len()
    }

    pub fn l(&self) -> usize {
        self.theta.len()
    }

    /// Largest even degree this grid resolves exactly.
    pub fn degree(&self) -> usize {
        2 * (self.k() - 1)
    }

    /// Angle `phi_k` with `1 - 2 tau_k = cos(2 phi_k)`.
    pub fn chebyshev_angle(&self, k: usize) -> f64 {
        (2 * k + 1) as f64 * PI / (2 * self.k()) as f64
    }

    /// Points `(x, y)` in row-major `(k, l)` order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.r.iter().flat_map(move |&r| self.theta.iter().map(move |&t| (r * t.cos(), r * t.sin())))
    }

    /// The same grid scaled to radius `scale`.
    pub fn scaled_points(&self, scale: f64) -> Vec<(f64, f64)> {
        self.points().map(|(x, y)| (scale * x, scale * y)).collect()
    }
}
