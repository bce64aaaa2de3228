//! Small dense helpers shared by the least-squares and IRLS fits.

use nalgebra::{DMatrix, DVector};

use crate::ratings::DesignRow;

/// Accumulates `X'WX` and `X'Wv` for sparse design rows.
pub(crate) fn weighted_normal_equations(
    rows: &[DesignRow],
    weights: impl Iterator<Item = f64>,
    rhs: impl Iterator<Item = f64>,
    dim: usize,
) -> (DMatrix<f64>, DVector<f64>) {
    let mut xtx = DMatrix::<f64>::zeros(dim, dim);
    let mut xtv = DVector::<f64>::zeros(dim);
    for ((row, w), v) in rows.iter().zip(weights).zip(rhs) {
        let entries = row.entries();
        for &(i, xi) in entries.iter().flatten() {
            xtv[i] += w * xi * v;
            for &(j, xj) in entries.iter().flatten() {
                xtx[(i, j)] += w * xi * xj;
            }
        }
    }
    (xtx, xtv)
}
