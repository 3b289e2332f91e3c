//! Explicit dense matrices, mainly for small instances and oracles.

use super::{Shape, Vector};
use crate::error::{Error, Result};

/// A dense matrix acting between arbitrary shapes. The stored norm bound is
/// the Frobenius norm, an upper bound on the spectral norm.
#[derive(Clone, Debug)]
pub struct DenseOp {
    in_shape: Shape,
    out_shape: Shape,
    /// Row-major, `out_shape.len()` rows by `in_shape.len()` columns.
    entries: Vec<f64>,
    norm: f64,
}

impl DenseOp {
    pub fn new(entries: Vec<f64>, out_shape: Shape, in_shape: Shape) -> Result<Self> {
        let (m, n) = (out_shape.len(), in_shape.len());
        if entries.len() != m * n {
            return Err(Error::invalid("matrix size does not match shapes"));
        }
        if !entries.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("dense matrix entries"));
        }
        let norm = entries.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(DenseOp {
            in_shape,
            out_shape,
            entries,
            norm,
        })
    }

    /// Square matrix on flat vectors.
    pub fn square(entries: Vec<f64>, n: usize) -> Result<Self> {
        Self::new(entries, Shape::Flat(n), Shape::Flat(n))
    }

    pub fn in_shape(&self) -> &Shape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &Shape {
        &self.out_shape
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        let n = self.in_shape.len();
        let m = self.out_shape.len();
        let d = x.as_slice();
        let out = self
            .entries
            .chunks(n)
            .take(m)
            .map(|row| row.iter().zip(d).map(|(a, b)| a * b).sum())
            .collect();
        Vector::from_parts(out, self.out_shape.clone())
    }

    pub fn apply_adjoint(&self, y: &Vector) -> Vector {
        let n = self.in_shape.len();
        let m = self.out_shape.len();
        let mut out = vec![0.0; n];
        for (row, &yi) in self.entries.chunks(n).zip(y.as_slice()).take(m) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
        Vector::from_parts(out, self.in_shape.clone())
    }
}
