//! Vectors of a finite-dimensional real Hilbert space.

use super::Shape;
use crate::error::{Error, Result};

/// An element of a finite-dimensional real Hilbert space: a flat array of
/// f64 entries plus a [`Shape`] tag describing its layout.
///
/// Entries are finite by construction; arithmetic between vectors of
/// different shapes panics (contract violation).
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
    shape: Shape,
}

impl Vector {
    /// Builds a vector, validating length and finiteness of all entries.
    pub fn new(data: Vec<f64>, shape: Shape) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::ShapeMismatch {
                expected: shape,
                got: Shape::Flat(data.len()),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("vector entries"));
        }
        Ok(Vector { data, shape })
    }

    /// Internal constructor for values produced by crate arithmetic.
    pub(crate) fn from_parts(data: Vec<f64>, shape: Shape) -> Self {
        debug_assert_eq!(data.len(), shape.len());
        Vector { data, shape }
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.len();
        Vector {
            data: vec![0.0; n],
            shape,
        }
    }

    pub fn constant(shape: Shape, value: f64) -> Self {
        let n = shape.len();
        Vector {
            data: vec![value; n],
            shape,
        }
    }

    /// Flat vector from a slice.
    pub fn flat(data: &[f64]) -> Self {
        Vector::new(data.to_vec(), Shape::Flat(data.len())).expect("finite entries")
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize) -> f64) -> Self {
        let n = shape.len();
        Vector {
            data: (0..n).map(&mut f).collect(),
            shape,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Reinterprets the same data under a new shape of equal length.
    pub fn reshaped(mut self, shape: Shape) -> Result<Self> {
        if shape.len() != self.data.len() {
            return Err(Error::ShapeMismatch {
                expected: shape,
                got: self.shape,
            });
        }
        self.shape = shape;
        Ok(self)
    }

    /// Slice of the `i`-th contiguous block of a product-space vector.
    pub fn block(&self, i: usize) -> &[f64] {
        let r = self.shape.block_ranges()[i].clone();
        &self.data[r]
    }

    /// The `i`-th block as an owned vector with its own shape tag.
    pub fn block_vector(&self, i: usize) -> Vector {
        let blocks = self.shape.blocks();
        let r = self.shape.block_ranges()[i].clone();
        Vector::from_parts(self.data[r].to_vec(), blocks[i].clone())
    }

    /// Concatenates blocks into one product-space vector.
    pub fn concat(parts: &[Vector]) -> Vector {
        let shape = Shape::Product(parts.iter().map(|p| p.shape.clone()).collect());
        let mut data = Vec::with_capacity(shape.len());
        for p in parts {
            data.extend_from_slice(&p.data);
        }
        Vector { data, shape }
    }

    fn assert_same_shape(&self, other: &Vector, what: &str) {
        assert_eq!(
            self.shape, other.shape,
            "{what}: shape mismatch ({} vs {})",
            self.shape, other.shape
        );
    }

    /// Euclidean inner product ⟨x, y⟩ = Σ x_k y_k.
    pub fn dot(&self, other: &Vector) -> f64 {
        self.assert_same_shape(other, "inner product");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.assert_same_shape(other, "distance");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, alpha: f64) -> Vector {
        Vector {
            data: self.data.iter().map(|a| alpha * a).collect(),
            shape: self.shape.clone(),
        }
    }

    pub fn scale_in_place(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    /// self += alpha * other
    pub fn axpy(&mut self, alpha: f64, other: &Vector) {
        self.assert_same_shape(other, "axpy");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.assert_same_shape(other, "add");
        Vector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
            shape: self.shape.clone(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.assert_same_shape(other, "sub");
        Vector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
            shape: self.shape.clone(),
        }
    }

    /// a*self + b*other
    pub fn lincomb(&self, a: f64, b: f64, other: &Vector) -> Vector {
        self.assert_same_shape(other, "lincomb");
        Vector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            shape: self.shape.clone(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector {
            data: self.data.iter().map(|&a| f(a)).collect(),
            shape: self.shape.clone(),
        }
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            0.0
        } else {
            self.sum() / self.data.len() as f64
        }
    }
}

/// Euclidean inner product ⟨x, y⟩; panics on shape mismatch.
pub fn inner(x: &Vector, y: &Vector) -> f64 {
    x.dot(y)
}

impl std::ops::Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector::add(self, rhs)
    }
}

impl std::ops::Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector::sub(self, rhs)
    }
}

impl std::ops::Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, rhs: f64) -> Vector {
        self.scaled(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_basic() {
        let x = Vector::flat(&[1.0, 2.0]);
        let y = Vector::flat(&[3.0, 4.0]);
        assert_eq!(inner(&x, &y), 11.0);
        assert!(inner(&x, &x) >= 0.0);
        assert_eq!(inner(&x, &y), inner(&y, &x));
    }

    #[test]
    fn rejects_nonfinite() {
        assert!(Vector::new(vec![1.0, f64::NAN], Shape::Flat(2)).is_err());
        assert!(Vector::new(vec![1.0], Shape::Flat(2)).is_err());
    }

    #[test]
    #[should_panic(expected = "shape mismatch")]
    fn inner_shape_mismatch_panics() {
        let x = Vector::flat(&[1.0, 2.0]);
        let y = Vector::flat(&[1.0, 2.0, 3.0]);
        inner(&x, &y);
    }

    #[test]
    fn blocks_roundtrip() {
        let p = Vector::concat(&[Vector::flat(&[1.0, 2.0]), Vector::flat(&[3.0])]);
        assert_eq!(p.block(0), &[1.0, 2.0]);
        assert_eq!(p.block(1), &[3.0]);
        assert_eq!(p.block_vector(1).as_slice(), &[3.0]);
    }
}
