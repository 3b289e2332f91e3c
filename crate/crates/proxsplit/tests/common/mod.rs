//! Shared helpers for the integration tests.

use proxsplit::hilbert::{Shape, Vector};
use proxsplit::prox::ProxFunImpl;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::atomic::{AtomicUsize, Ordering};

pub fn randn(rng: &mut ChaCha8Rng, shape: Shape, scale: f64) -> Vector {
    Vector::from_fn(shape, |_| rng.random_range(-scale..scale))
}

/// The strictly convex quadratic ½⟨x, Ax⟩ with A = [[18, −14], [−14, 18]]
/// (eigenvalues 4 and 32), with closed-form prox via the 2x2 inverse of
/// I + γA. Gradient evaluations are counted for instrumentation.
pub struct PlaneQuadratic {
    pub grad_calls: AtomicUsize,
}

impl PlaneQuadratic {
    pub fn new() -> Self {
        PlaneQuadratic {
            grad_calls: AtomicUsize::new(0),
        }
    }

    const A: [f64; 4] = [18.0, -14.0, -14.0, 18.0];
}

impl ProxFunImpl for PlaneQuadratic {
    fn shape(&self) -> Shape {
        Shape::Flat(2)
    }

    fn value(&self, x: &Vector) -> Option<f64> {
        let [a, b, c, d] = Self::A;
        let s = x.as_slice();
        Some(0.5 * (a * s[0] * s[0] + (b + c) * s[0] * s[1] + d * s[1] * s[1]))
    }

    fn prox(&self, gamma: f64, x: &Vector) -> Vector {
        let [a, b, c, d] = Self::A;
        let (m00, m01, m10, m11) = (1.0 + gamma * a, gamma * b, gamma * c, 1.0 + gamma * d);
        let det = m00 * m11 - m01 * m10;
        let s = x.as_slice();
        Vector::flat(&[
            (m11 * s[0] - m01 * s[1]) / det,
            (-m10 * s[0] + m00 * s[1]) / det,
        ])
    }

    fn smoothness(&self) -> Option<f64> {
        Some(32.0)
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        self.grad_calls.fetch_add(1, Ordering::Relaxed);
        let [a, b, c, d] = Self::A;
        let s = x.as_slice();
        Some(Vector::flat(&[a * s[0] + b * s[1], c * s[0] + d * s[1]]))
    }
}
