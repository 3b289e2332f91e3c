//! Finite-dimensional Hilbert-space vectors and matrix-free linear operators.

mod conv;
mod dense;
pub mod fft;
mod grad;
pub(crate) mod normal;
mod shape;
mod varblur;
mod vector;

pub use conv::ConvolutionOp;
pub use dense::DenseOp;
pub use grad::GradientOp;
pub use normal::{solve_normal, NormalTerm, SolveOptions};
pub use shape::Shape;
pub use varblur::{variable_gaussian_blur, RowSparseOp};
pub use vector::{inner, Vector};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Backing implementation for user-supplied matrix-free operators.
pub trait LinOpImpl: Send + Sync {
    fn in_shape(&self) -> Shape;
    fn out_shape(&self) -> Shape;
    /// Upper bound on the operator norm.
    fn norm_bound(&self) -> f64;
    fn apply(&self, x: &Vector) -> Vector;
    fn apply_adjoint(&self, y: &Vector) -> Vector;
}

#[derive(Clone)]
enum OpKind {
    Identity,
    Convolution(ConvolutionOp),
    Gradient(GradientOp),
    Mask(Arc<[bool]>),
    RowSparse(Arc<RowSparseOp>),
    Dense(Arc<DenseOp>),
    SelectBlock(usize),
    Scaled(f64, Box<Op>),
    Composed(Box<Op>, Box<Op>),
    Stacked(Vec<Op>),
    Sum(Vec<Op>),
    Custom(Arc<dyn LinOpImpl>),
}

/// A matrix-free bounded linear operator: forward map, adjoint map, and an
/// upper bound on the operator norm.
///
/// Operators are immutable and cheap to clone; applying one to a vector of
/// the wrong shape panics.
#[derive(Clone)]
pub struct Op {
    kind: OpKind,
    in_shape: Shape,
    out_shape: Shape,
    norm: f64,
}

impl std::fmt::Debug for Op {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match &self.kind {
            OpKind::Identity => "Identity",
            OpKind::Convolution(_) => "Convolution",
            OpKind::Gradient(_) => "Gradient",
            OpKind::Mask(_) => "Mask",
            OpKind::RowSparse(_) => "RowSparse",
            OpKind::Dense(_) => "Dense",
            OpKind::SelectBlock(_) => "SelectBlock",
            OpKind::Scaled(..) => "Scaled",
            OpKind::Composed(..) => "Composed",
            OpKind::Stacked(_) => "Stacked",
            OpKind::Sum(_) => "Sum",
            OpKind::Custom(_) => "Custom",
        };
        write!(f, "Op::{name}({} -> {})", self.in_shape, self.out_shape)
    }
}

impl Op {
    pub fn identity(shape: Shape) -> Op {
        Op {
            kind: OpKind::Identity,
            in_shape: shape.clone(),
            out_shape: shape,
            norm: 1.0,
        }
    }

    pub fn convolution(conv: ConvolutionOp) -> Op {
        let shape = conv.shape();
        let norm = conv.norm_bound();
        Op {
            kind: OpKind::Convolution(conv),
            in_shape: shape.clone(),
            out_shape: shape,
            norm,
        }
    }

    pub fn gradient(height: usize, width: usize) -> Op {
        let g = GradientOp::new(height, width);
        let (in_shape, out_shape, norm) = (g.in_shape(), g.out_shape(), g.norm_bound());
        Op {
            kind: OpKind::Gradient(g),
            in_shape,
            out_shape,
            norm,
        }
    }

    /// Diagonal 0/1 operator keeping the flagged coordinates (a coordinate
    /// subspace projector).
    pub fn mask(shape: Shape, keep: Vec<bool>) -> Result<Op> {
        if keep.len() != shape.len() {
            return Err(Error::invalid("mask length does not match shape"));
        }
        let norm = if keep.iter().any(|&b| b) { 1.0 } else { 0.0 };
        Ok(Op {
            kind: OpKind::Mask(keep.into()),
            in_shape: shape.clone(),
            out_shape: shape,
            norm,
        })
    }

    pub fn row_sparse(op: RowSparseOp) -> Op {
        let shape = op.shape().clone();
        let norm = op.norm_bound();
        Op {
            kind: OpKind::RowSparse(Arc::new(op)),
            in_shape: shape.clone(),
            out_shape: shape,
            norm,
        }
    }

    pub fn dense(op: DenseOp) -> Op {
        let (in_shape, out_shape, norm) =
            (op.in_shape().clone(), op.out_shape().clone(), op.norm_bound());
        Op {
            kind: OpKind::Dense(Arc::new(op)),
            in_shape,
            out_shape,
            norm,
        }
    }

    /// Extracts one block of a product-space vector; the adjoint embeds it
    /// back padded with zeros.
    pub fn select_block(in_shape: Shape, index: usize) -> Result<Op> {
        let blocks = in_shape.blocks();
        if index >= blocks.len() {
            return Err(Error::invalid("block index out of range"));
        }
        let out_shape = blocks[index].clone();
        Ok(Op {
            kind: OpKind::SelectBlock(index),
            in_shape,
            out_shape,
            norm: 1.0,
        })
    }

    pub fn custom(imp: Arc<dyn LinOpImpl>) -> Op {
        let (in_shape, out_shape, norm) = (imp.in_shape(), imp.out_shape(), imp.norm_bound());
        Op {
            kind: OpKind::Custom(imp),
            in_shape,
            out_shape,
            norm,
        }
    }

    /// α·L; the norm bound scales by |α|.
    pub fn scaled(self, alpha: f64) -> Op {
        let (in_shape, out_shape) = (self.in_shape.clone(), self.out_shape.clone());
        let norm = alpha.abs() * self.norm;
        Op {
            kind: OpKind::Scaled(alpha, Box::new(self)),
            in_shape,
            out_shape,
            norm,
        }
    }

    /// self ∘ other (apply `other` first); norm bounds multiply.
    pub fn compose(self, other: Op) -> Result<Op> {
        if self.in_shape != other.out_shape {
            return Err(Error::ShapeMismatch {
                expected: self.in_shape.clone(),
                got: other.out_shape.clone(),
            });
        }
        let in_shape = other.in_shape.clone();
        let out_shape = self.out_shape.clone();
        let norm = self.norm * other.norm;
        Ok(Op {
            kind: OpKind::Composed(Box::new(self), Box::new(other)),
            in_shape,
            out_shape,
            norm,
        })
    }

    /// x ↦ (L_1 x, …, L_m x) into the product of the output shapes; the norm
    /// bound is the root of the sum of squared bounds.
    pub fn stack(ops: Vec<Op>) -> Result<Op> {
        let first = ops
            .first()
            .ok_or_else(|| Error::invalid("stack of zero operators"))?;
        if ops.iter().any(|o| o.in_shape != first.in_shape) {
            return Err(Error::invalid("stacked operators disagree on input shape"));
        }
        let in_shape = first.in_shape.clone();
        let out_shape = Shape::Product(ops.iter().map(|o| o.out_shape.clone()).collect());
        let norm = ops.iter().map(|o| o.norm * o.norm).sum::<f64>().sqrt();
        Ok(Op {
            kind: OpKind::Stacked(ops),
            in_shape,
            out_shape,
            norm,
        })
    }

    /// Pointwise sum of operators with identical shapes; norm bounds add.
    pub fn sum(ops: Vec<Op>) -> Result<Op> {
        let first = ops
            .first()
            .ok_or_else(|| Error::invalid("sum of zero operators"))?;
        let same = ops
            .iter()
            .all(|o| o.in_shape == first.in_shape && o.out_shape == first.out_shape);
        if !same {
            return Err(Error::invalid("summed operators disagree on shapes"));
        }
        let in_shape = first.in_shape.clone();
        let out_shape = first.out_shape.clone();
        let norm = ops.iter().map(|o| o.norm).sum();
        Ok(Op {
            kind: OpKind::Sum(ops),
            in_shape,
            out_shape,
            norm,
        })
    }

    /// Id − P for a projector P (same input and output shape).
    pub fn complement_projector(p: Op) -> Result<Op> {
        if p.in_shape != p.out_shape {
            return Err(Error::invalid("projector must be square"));
        }
        if let OpKind::Mask(keep) = &p.kind {
            let flipped: Vec<bool> = keep.iter().map(|b| !b).collect();
            return Op::mask(p.in_shape.clone(), flipped);
        }
        let id = Op::identity(p.in_shape.clone());
        Op::sum(vec![id, p.scaled(-1.0)])
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, OpKind::Identity)
    }

    pub fn in_shape(&self) -> &Shape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &Shape {
        &self.out_shape
    }

    /// Upper bound on the operator norm: ‖L x‖ ≤ norm_bound()·‖x‖.
    pub fn norm_bound(&self) -> f64 {
        self.norm
    }

    fn check(&self, x: &Vector, expected: &Shape, what: &str) {
        assert_eq!(
            x.shape(),
            expected,
            "{what}: operator expects {expected}, got {}",
            x.shape()
        );
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        self.check(x, &self.in_shape, "apply");
        match &self.kind {
            OpKind::Identity => x.clone(),
            OpKind::Convolution(c) => c.apply(x),
            OpKind::Gradient(g) => g.apply(x),
            OpKind::Mask(keep) => Vector::from_parts(
                x.as_slice()
                    .iter()
                    .zip(keep.iter())
                    .map(|(&v, &k)| if k { v } else { 0.0 })
                    .collect(),
                self.out_shape.clone(),
            ),
            OpKind::RowSparse(s) => s.apply(x),
            OpKind::Dense(d) => d.apply(x),
            OpKind::SelectBlock(i) => {
                let r = self.in_shape.block_ranges()[*i].clone();
                Vector::from_parts(x.as_slice()[r].to_vec(), self.out_shape.clone())
            }
            OpKind::Scaled(a, op) => op.apply(x).scaled(*a),
            OpKind::Composed(a, b) => a.apply(&b.apply(x)),
            OpKind::Stacked(ops) => {
                let mut data = Vec::with_capacity(self.out_shape.len());
                for op in ops {
                    data.extend_from_slice(op.apply(x).as_slice());
                }
                Vector::from_parts(data, self.out_shape.clone())
            }
            OpKind::Sum(ops) => {
                let mut acc = ops[0].apply(x);
                for op in &ops[1..] {
                    acc.axpy(1.0, &op.apply(x));
                }
                acc
            }
            OpKind::Custom(imp) => {
                let y = imp.apply(x);
                self.check(&y, &self.out_shape, "custom apply output");
                y
            }
        }
    }

    pub fn apply_adjoint(&self, y: &Vector) -> Vector {
        self.check(y, &self.out_shape, "apply_adjoint");
        match &self.kind {
            OpKind::Identity => y.clone(),
            OpKind::Convolution(c) => c.apply_adjoint(y),
            OpKind::Gradient(g) => g.apply_adjoint(y),
            OpKind::Mask(keep) => Vector::from_parts(
                y.as_slice()
                    .iter()
                    .zip(keep.iter())
                    .map(|(&v, &k)| if k { v } else { 0.0 })
                    .collect(),
                self.in_shape.clone(),
            ),
            OpKind::RowSparse(s) => s.apply_adjoint(y),
            OpKind::Dense(d) => d.apply_adjoint(y),
            OpKind::SelectBlock(i) => {
                let mut data = vec![0.0; self.in_shape.len()];
                let r = self.in_shape.block_ranges()[*i].clone();
                data[r].copy_from_slice(y.as_slice());
                Vector::from_parts(data, self.in_shape.clone())
            }
            OpKind::Scaled(a, op) => op.apply_adjoint(y).scaled(*a),
            OpKind::Composed(a, b) => b.apply_adjoint(&a.apply_adjoint(y)),
            OpKind::Stacked(ops) => {
                let ranges = self.out_shape.block_ranges();
                let mut acc = Vector::zeros(self.in_shape.clone());
                for (op, r) in ops.iter().zip(ranges) {
                    let part =
                        Vector::from_parts(y.as_slice()[r].to_vec(), op.out_shape.clone());
                    acc.axpy(1.0, &op.apply_adjoint(&part));
                }
                acc
            }
            OpKind::Sum(ops) => {
                let mut acc = ops[0].apply_adjoint(y);
                for op in &ops[1..] {
                    acc.axpy(1.0, &op.apply_adjoint(y));
                }
                acc
            }
            OpKind::Custom(imp) => {
                let x = imp.apply_adjoint(y);
                self.check(&x, &self.in_shape, "custom adjoint output");
                x
            }
        }
    }

    /// The DFT multiplier of this operator on an `h x w` grid, when it is
    /// diagonal in the unitary Fourier domain. Used by the frequency-domain
    /// fast path of [`solve_normal`].
    pub(crate) fn frequency_response(&self, h: usize, w: usize) -> Option<Vec<Complex64>> {
        if self.in_shape.len() != h * w || self.out_shape.len() != h * w {
            return None;
        }
        match &self.kind {
            OpKind::Identity => Some(vec![Complex64::new(1.0, 0.0); h * w]),
            OpKind::Convolution(c) => {
                if c.shape() == Shape::Grid(h, w) {
                    Some(c.frequency_response().to_vec())
                } else {
                    None
                }
            }
            OpKind::Scaled(a, op) => {
                let mut f = op.frequency_response(h, w)?;
                for v in f.iter_mut() {
                    *v *= *a;
                }
                Some(f)
            }
            OpKind::Composed(a, b) => {
                let fa = a.frequency_response(h, w)?;
                let fb = b.frequency_response(h, w)?;
                Some(fa.iter().zip(&fb).map(|(x, y)| x * y).collect())
            }
            OpKind::Sum(ops) => {
                let mut acc = vec![Complex64::new(0.0, 0.0); h * w];
                for op in ops {
                    let f = op.frequency_response(h, w)?;
                    for (a, b) in acc.iter_mut().zip(&f) {
                        *a += b;
                    }
                }
                Some(acc)
            }
            _ => None,
        }
    }
}

/// Convenience free function mirroring [`Op::apply`].
pub fn apply(op: &Op, x: &Vector) -> Vector {
    op.apply(x)
}

/// Convenience free function mirroring [`Op::apply_adjoint`].
pub fn apply_adjoint(op: &Op, y: &Vector) -> Vector {
    op.apply_adjoint(y)
}
