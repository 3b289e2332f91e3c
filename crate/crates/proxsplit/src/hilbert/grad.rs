//! Discrete gradient operator with periodic boundary.

use super::{Shape, Vector};

/// First-order circular difference operator D: x ↦ (G1 x, G2 x), where G1
/// and G2 are the horizontal and vertical differences of an `h x w` image.
///
/// The squared operator norm of D is exactly 8 for even grid sizes (circulant
/// eigenvalue analysis), and bounded by 8 always; `norm_bound` is sqrt(8).
#[derive(Clone, Debug)]
pub struct GradientOp {
    height: usize,
    width: usize,
}

impl GradientOp {
    pub fn new(height: usize, width: usize) -> Self {
        assert!(height > 0 && width > 0, "empty image shape");
        GradientOp { height, width }
    }

    pub fn in_shape(&self) -> Shape {
        Shape::Grid(self.height, self.width)
    }

    pub fn out_shape(&self) -> Shape {
        Shape::Product(vec![
            Shape::Grid(self.height, self.width),
            Shape::Grid(self.height, self.width),
        ])
    }

    pub fn norm_bound(&self) -> f64 {
        8f64.sqrt()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        let (h, w) = (self.height, self.width);
        let d = x.as_slice();
        let n = h * w;
        let mut out = vec![0.0; 2 * n];
        for i in 0..h {
            for j in 0..w {
                let p = i * w + j;
                let right = i * w + (j + 1) % w;
                let down = ((i + 1) % h) * w + j;
                out[p] = d[right] - d[p];
                out[n + p] = d[down] - d[p];
            }
        }
        Vector::from_parts(out, self.out_shape())
    }

    /// Adjoint (negative divergence with circular wrap).
    pub fn apply_adjoint(&self, y: &Vector) -> Vector {
        let (h, w) = (self.height, self.width);
        let n = h * w;
        let d = y.as_slice();
        let (g1, g2) = d.split_at(n);
        let mut out = vec![0.0; n];
        for i in 0..h {
            for j in 0..w {
                let p = i * w + j;
                let left = i * w + (j + w - 1) % w;
                let up = ((i + h - 1) % h) * w + j;
                out[p] = g1[left] - g1[p] + g2[up] - g2[p];
            }
        }
        Vector::from_parts(out, self.in_shape())
    }
}
