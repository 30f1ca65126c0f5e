//! Banded matrices and the factorizations used to build operators.

mod bordered;
mod factor;
mod matrix;

pub use bordered::{BandedLu, BorderedSystem};
pub use factor::{banded_cholesky, banded_qr, similarity_via_q, similarity_via_r, HouseholderQ, Reflector};
pub use matrix::BandedMatrix;

use nalgebra::DMatrix;

/// 2-norm condition number from the singular values.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Condition number after scaling each row by the inverse of its diagonal
/// entry (rows with a zero diagonal are left alone).
pub fn diag_preconditioned_condition(a: &DMatrix<f64>) -> f64 {
    let mut b = a.clone();
    for i in 0..b.nrows().min(b.ncols()) {
        let d = a[(i, i)];
        if d != 0.0 {
            b.row_mut(i).scale_mut(1.0 / d);
        }
    }
    condition_number(&b)
}
