//! Nonstationary blur stored as explicit sparse row weights.

use super::{Shape, Vector};
use crate::error::{Error, Result};

/// A sparse operator given row by row: entry lists of (source index, weight).
///
/// Used for spatially varying blurs that are not convolutions. The column
/// (transpose) structure is precomputed for the adjoint. The stored norm
/// bound is the certified estimate sqrt(max column sum * max row sum), which
/// dominates the spectral norm for nonnegative weights.
#[derive(Clone, Debug)]
pub struct RowSparseOp {
    shape: Shape,
    rows: Vec<Vec<(u32, f64)>>,
    cols: Vec<Vec<(u32, f64)>>,
    norm: f64,
}

impl RowSparseOp {
    pub fn new(shape: Shape, rows: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        let n = shape.len();
        if rows.len() != n {
            return Err(Error::invalid("row count does not match shape"));
        }
        let mut cols = vec![Vec::new(); n];
        let mut max_row = 0.0f64;
        let mut col_sums = vec![0.0f64; n];
        for (r, row) in rows.iter().enumerate() {
            let mut row_sum = 0.0;
            for &(c, w) in row {
                if (c as usize) >= n {
                    return Err(Error::invalid("column index out of range"));
                }
                if !w.is_finite() {
                    return Err(Error::NonFinite("sparse row weight"));
                }
                cols[c as usize].push((r as u32, w));
                row_sum += w.abs();
                col_sums[c as usize] += w.abs();
            }
            max_row = max_row.max(row_sum);
        }
        let max_col = col_sums.iter().copied().fold(0.0, f64::max);
        let norm = (max_row * max_col).sqrt();
        Ok(RowSparseOp {
            shape,
            rows,
            cols,
            norm,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        let d = x.as_slice();
        let out = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(c, w)| w * d[c as usize]).sum())
            .collect();
        Vector::from_parts(out, self.shape.clone())
    }

    pub fn apply_adjoint(&self, y: &Vector) -> Vector {
        let d = y.as_slice();
        let out = self
            .cols
            .iter()
            .map(|col| col.iter().map(|&(r, w)| w * d[r as usize]).sum())
            .collect();
        Vector::from_parts(out, self.shape.clone())
    }
}

/// Builds the spatially varying Gaussian blur of an `h x w` image: pixel
/// (i, j) is replaced by an average of its neighbors weighted by an isotropic
/// Gaussian window with standard deviation `sigmas[i*w + j]`, truncated at
/// radius ceil(3 sigma), renormalized to sum 1, with periodic wrap.
///
/// Standard deviations below 0.05 degenerate to the identity row.
pub fn variable_gaussian_blur(height: usize, width: usize, sigmas: &[f64]) -> Result<RowSparseOp> {
    let n = height * width;
    if sigmas.len() != n {
        return Err(Error::invalid("sigma field does not match image shape"));
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..height {
        for j in 0..width {
            let sigma = sigmas[i * width + j];
            if !(0.0..=64.0).contains(&sigma) {
                return Err(Error::invalid("sigma out of range"));
            }
            if sigma < 0.05 {
                rows.push(vec![((i * width + j) as u32, 1.0)]);
                continue;
            }
            let radius = (3.0 * sigma).ceil() as isize;
            let mut row = Vec::new();
            let mut total = 0.0;
            for di in -radius..=radius {
                for dj in -radius..=radius {
                    let wgt = (-((di * di + dj * dj) as f64) / (2.0 * sigma * sigma)).exp();
                    let r = (i as isize + di).rem_euclid(height as isize) as usize;
                    let c = (j as isize + dj).rem_euclid(width as isize) as usize;
                    row.push(((r * width + c) as u32, wgt));
                    total += wgt;
                }
            }
            for (_, w) in row.iter_mut() {
                *w /= total;
            }
            rows.push(row);
        }
    }
    RowSparseOp::new(Shape::Grid(height, width), rows)
}
