//! Circular convolution operators diagonalized by the 2-D DFT.

use super::fft::Fft2;
use super::{Shape, Vector};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Stationary blur: circular convolution of an `h x w` image with a kernel
/// anchored at its center (floor of each kernel dimension over 2).
///
/// The operator is block-circulant, hence diagonal in the Fourier domain.
/// `freq` holds the circulant eigenvalues (the unnormalized DFT of the
/// zero-padded, center-anchored kernel), so applying the operator in the
/// unitary DFT domain is exactly a pointwise multiplication by `freq`, and
/// the operator norm is the maximum modulus of `freq`.
#[derive(Clone, Debug)]
pub struct ConvolutionOp {
    height: usize,
    width: usize,
    kernel: Vec<f64>,
    kernel_dims: (usize, usize),
    freq: Vec<Complex64>,
    fft: Fft2,
    norm: f64,
}

impl ConvolutionOp {
    /// `kernel` is row-major `k_h x k_w`; boundary handling is periodic.
    pub fn new(kernel: &[f64], k_h: usize, k_w: usize, height: usize, width: usize) -> Result<Self> {
        if kernel.len() != k_h * k_w || k_h == 0 || k_w == 0 {
            return Err(Error::invalid("kernel dimensions do not match data"));
        }
        if height == 0 || width == 0 {
            return Err(Error::invalid("empty image shape"));
        }
        if !kernel.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("convolution kernel"));
        }
        // Center-anchored zero padding: kernel element (i, j) contributes at
        // offset (i - k_h/2, j - k_w/2) modulo the image dimensions.
        let mut padded = vec![0.0; height * width];
        let (ch, cw) = (k_h / 2, k_w / 2);
        for i in 0..k_h {
            for j in 0..k_w {
                let r = (i as isize - ch as isize).rem_euclid(height as isize) as usize;
                let c = (j as isize - cw as isize).rem_euclid(width as isize) as usize;
                padded[r * width + c] += kernel[i * k_w + j];
            }
        }
        let fft = Fft2::new(height, width);
        let mut freq = fft.forward_real(&padded);
        // Circulant eigenvalues are the unnormalized DFT of the padded kernel.
        let scale = ((height * width) as f64).sqrt();
        for v in freq.iter_mut() {
            *v *= scale;
        }
        let norm = freq.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Ok(ConvolutionOp {
            height,
            width,
            kernel: kernel.to_vec(),
            kernel_dims: (k_h, k_w),
            freq,
            fft,
            norm,
        })
    }

    /// Uniform rectangular kernel normalized to sum 1.
    pub fn uniform(k_h: usize, k_w: usize, height: usize, width: usize) -> Result<Self> {
        let kernel = vec![1.0 / (k_h * k_w) as f64; k_h * k_w];
        Self::new(&kernel, k_h, k_w, height, width)
    }

    pub fn shape(&self) -> Shape {
        Shape::Grid(self.height, self.width)
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm
    }

    pub fn kernel(&self) -> (&[f64], (usize, usize)) {
        (&self.kernel, self.kernel_dims)
    }

    pub(crate) fn frequency_response(&self) -> &[Complex64] {
        &self.freq
    }

    fn multiply_in_frequency(&self, x: &Vector, conjugate: bool) -> Vector {
        let mut spec = self.fft.forward_real(x.as_slice());
        for (s, f) in spec.iter_mut().zip(&self.freq) {
            *s *= if conjugate { f.conj() } else { *f };
        }
        Vector::from_parts(self.fft.inverse_to_real(spec), x.shape().clone())
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        self.multiply_in_frequency(x, false)
    }

    /// Circular correlation: multiplication by the conjugate response.
    pub fn apply_adjoint(&self, y: &Vector) -> Vector {
        self.multiply_in_frequency(y, true)
    }
}
