//! Unitary 2-D discrete Fourier transforms on row-major grids.
//!
//! The unitary convention (1/sqrt(N) in each direction) is used everywhere in
//! this crate so that Parseval's identity holds exactly and frequency-domain
//! projections preserve norms.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Forward and inverse unitary 2-D FFT plans for a fixed grid size.
///
/// The underlying rustfft plans are immutable and shareable; scratch buffers
/// are allocated per call.
#[derive(Clone)]
pub struct Fft2 {
    height: usize,
    width: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.height, self.width)
    }
}

impl Fft2 {
    pub fn new(height: usize, width: usize) -> Self {
        assert!(height > 0 && width > 0, "empty grid");
        let mut planner = FftPlanner::new();
        Fft2 {
            height,
            width,
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    fn transform(&self, buf: &mut [Complex64], forward: bool) {
        let (h, w) = (self.height, self.width);
        assert_eq!(buf.len(), h * w, "buffer does not match grid");
        let row = if forward { &self.row_fwd } else { &self.row_inv };
        let col = if forward { &self.col_fwd } else { &self.col_inv };
        for r in 0..h {
            row.process(&mut buf[r * w..(r + 1) * w]);
        }
        let mut column = vec![Complex64::default(); h];
        for c in 0..w {
            for r in 0..h {
                column[r] = buf[r * w + c];
            }
            col.process(&mut column);
            for r in 0..h {
                buf[r * w + c] = column[r];
            }
        }
        let scale = 1.0 / ((h * w) as f64).sqrt();
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    /// In-place forward unitary DFT.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, true);
    }

    /// In-place inverse unitary DFT.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, false);
    }

    /// Forward unitary DFT of a real grid.
    pub fn forward_real(&self, data: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }

    /// Real part of the inverse unitary DFT. The imaginary residual of a
    /// Hermitian-consistent spectrum is at rounding level and is dropped.
    pub fn inverse_to_real(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse(&mut buf);
        buf.into_iter().map(|v| v.re).collect()
    }
}

/// Index of the conjugate frequency (-u mod h, -v mod w).
pub fn conjugate_index(u: usize, v: usize, h: usize, w: usize) -> (usize, usize) {
    ((h - u % h) % h, (w - v % w) % w)
}
