//! Real Fourier sums at equispaced angles `theta_l = 2 pi l / L`.
//!
//! Columns follow the mode layout of [`ModeCoefficients`]: column 0 is
//! `(0, cos)`, columns `2m - 1` and `2m` are `(m, sin)` and `(m, cos)`.
//!
//! [`ModeCoefficients`]: crate::annulus::ModeCoefficients

use crate::annulus::{ModeCoefficients, ModeIndex};
use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// `values[(k, l)] = sum over modes of radial[k] * angular(theta_l)`.
/// Needs `L >= 2 mmax + 1`.
pub(crate) fn synthesize(rows: usize, l: usize, terms: &[(ModeIndex, Vec<f64>)]) -> DMatrix<f64> {
    let mut spec = vec![vec![Complex::new(0.0, 0.0); l]; rows];
    for (mode, vals) in terms {
        debug_assert!(2 * mode.m < l);
        for (k, row) in spec.iter_mut().enumerate() {
            // a cos + b sin = Re[(a - i b) e^{i m theta}]
            row[mode.m] += if mode.j == 1 { Complex::new(vals[k], 0.0) } else { Complex::new(0.0, -vals[k]) };
        }
    }
    let fft = FftPlanner::new().plan_fft_inverse(l);
    let mut out = DMatrix::zeros(rows, l);
    for (k, row) in spec.iter_mut().enumerate() {
        fft.process(row);
        for (j, v) in row.iter().enumerate() {
            out[(k, j)] = v.re;
        }
    }
    out
}

/// Cosine and sine coefficients of each row for modes `0..=mmax`, as a
/// `rows x (2 mmax + 1)` matrix. Exact for trigonometric data of order
/// below `L / 2`.
pub(crate) fn analyze(values: &DMatrix<f64>, mmax: usize) -> DMatrix<f64> {
    let (rows, l) = values.shape();
    let fft = FftPlanner::new().plan_fft_forward(l);
    let norm = l as f64;
    let mut out = DMatrix::zeros(rows, 2 * mmax + 1);
    let mut buf = vec![Complex::new(0.0, 0.0); l];
    for k in 0..rows {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = Complex::new(values[(k, j)], 0.0);
        }
        fft.process(&mut buf);
        for mode in ModeIndex::all(mmax) {
            let c = buf[mode.m];
            let v = match (mode.m, mode.j) {
                (0, _) => c.re / norm,
                (_, 1) => 2.0 * c.re / norm,
                _ => -2.0 * c.im / norm,
            };
            out[(k, ModeCoefficients::column_of(mode))] = v;
        }
    }
    out
}

/// Coefficients `g_p` with `sum_p g_p T_p(cos phi_k) = v_k` at the
/// first-kind points `phi_k = (2k + 1) pi / (2K)`.
pub(crate) fn chebyshev_from_values(v: &[f64]) -> Vec<f64> {
    let kk = v.len();
    let kf = kk as f64;
    (0..kk)
        .map(|p| {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(k, x)| x * (p as f64 * (2 * k + 1) as f64 * std::f64::consts::PI / (2.0 * kf)).cos())
                .sum();
            if p == 0 {
                s / kf
            } else {
                2.0 * s / kf
            }
        })
        .collect()
}
