//! Dimension descriptors for vectors and operators.

use std::fmt;
use std::ops::Range;

/// Describes the layout of a vector in a finite-dimensional real Hilbert
/// space: a flat array, a 2-D grid, or a product space of contiguous blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Flat vector of the given length.
    Flat(usize),
    /// 2-D grid stored row-major, `Grid(height, width)`.
    Grid(usize, usize),
    /// Product space: contiguous blocks, one per factor.
    Product(Vec<Shape>),
}

impl Shape {
    /// Total number of scalar entries.
    pub fn len(&self) -> usize {
        match self {
            Shape::Flat(n) => *n,
            Shape::Grid(h, w) => h * w,
            Shape::Product(parts) => parts.iter().map(Shape::len).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid dimensions, if this is a 2-D shape.
    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        match self {
            Shape::Grid(h, w) => Some((*h, *w)),
            _ => None,
        }
    }

    /// The factor shapes of a product space; a non-product shape is its own
    /// single factor.
    pub fn blocks(&self) -> &[Shape] {
        match self {
            Shape::Product(parts) => parts,
            _ => std::slice::from_ref(self),
        }
    }

    /// Index ranges of the contiguous blocks.
    pub fn block_ranges(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for b in self.blocks() {
            let n = b.len();
            out.push(start..start + n);
            start += n;
        }
        out
    }

    /// Product of `count` copies of `block`.
    pub fn repeated(block: Shape, count: usize) -> Shape {
        Shape::Product(vec![block; count])
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Flat(n) => write!(f, "R^{n}"),
            Shape::Grid(h, w) => write!(f, "{h}x{w}"),
            Shape::Product(parts) => {
                let mut first = true;
                for p in parts {
                    if !first {
                        write!(f, " x ")?;
                    }
                    write!(f, "({p})")?;
                    first = false;
                }
                Ok(())
            }
        }
    }
}
