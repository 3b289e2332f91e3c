//! Grayscale images, binary PGM I/O, and the built-in test scene.

use proxsplit::hilbert::{Shape, Vector};
use std::io::{Read, Write};
use std::path::Path;

/// A grayscale image with f64 pixels in the nominal range [0, 255].
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> anyhow::Result<Self> {
        anyhow::ensure!(data.len() == height * width, "pixel count mismatch");
        anyhow::ensure!(data.iter().all(|v| v.is_finite()), "non-finite pixels");
        Ok(Image {
            height,
            width,
            data,
        })
    }

    pub fn to_vector(&self) -> Vector {
        Vector::new(self.data.clone(), Shape::Grid(self.height, self.width))
            .expect("finite image")
    }

    pub fn from_vector(v: &Vector) -> anyhow::Result<Self> {
        let (h, w) = v
            .shape()
            .grid_dims()
            .ok_or_else(|| anyhow::anyhow!("vector is not a 2-D grid"))?;
        Image::new(h, w, v.as_slice().to_vec())
    }

    /// Nearest-neighbor resample to a square side length.
    pub fn resized(&self, side: usize) -> Image {
        let mut data = Vec::with_capacity(side * side);
        for i in 0..side {
            for j in 0..side {
                let si = i * self.height / side;
                let sj = j * self.width / side;
                data.push(self.data[si * self.width + sj]);
            }
        }
        Image {
            height: side,
            width: side,
            data,
        }
    }

    /// Reads a binary (P5) PGM with maxval 255.
    pub fn read_pgm(path: &Path) -> anyhow::Result<Image> {
        let mut raw = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut raw)?;
        let mut pos = 0usize;
        let mut token = || -> anyhow::Result<String> {
            // Skip whitespace and '#' comments between header tokens.
            loop {
                while pos < raw.len() && raw[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < raw.len() && raw[pos] == b'#' {
                    while pos < raw.len() && raw[pos] != b'\n' {
                        pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = pos;
            while pos < raw.len() && !raw[pos].is_ascii_whitespace() {
                pos += 1;
            }
            anyhow::ensure!(start < pos, "truncated PGM header");
            Ok(String::from_utf8_lossy(&raw[start..pos]).into_owned())
        };
        let magic = token()?;
        anyhow::ensure!(magic == "P5", "expected binary PGM (P5), got {magic}");
        let width: usize = token()?.parse()?;
        let height: usize = token()?.parse()?;
        let maxval: usize = token()?.parse()?;
        anyhow::ensure!(maxval == 255, "only maxval 255 is supported");
        pos += 1; // single whitespace after maxval
        anyhow::ensure!(raw.len() - pos >= width * height, "truncated PGM data");
        let data = raw[pos..pos + width * height]
            .iter()
            .map(|&b| b as f64)
            .collect();
        Image::new(height, width, data)
    }

    /// Writes a binary (P5) PGM, rounding and clamping pixels to 0..=255.
    pub fn write_pgm(&self, path: &Path) -> anyhow::Result<()> {
        let mut f = std::fs::File::create(path)?;
        write!(f, "P5\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self
            .data
            .iter()
            .map(|&v| v.round().clamp(0.0, 255.0) as u8)
            .collect();
        f.write_all(&bytes)?;
        Ok(())
    }

    /// Deterministic synthetic scene at any side length: a dark background
    /// with a bright disk, a mid-gray block, a thin vertical line, and a
    /// small bright square. Mostly zero, so sparsity and total-variation
    /// penalties are both meaningful.
    pub fn phantom(side: usize) -> Image {
        assert!(side >= 8, "phantom needs side >= 8");
        let s = side as f64;
        let mut data = vec![0.0; side * side];
        let mut put = |i: usize, j: usize, v: f64| data[i * side + j] = v;
        for i in 0..side {
            for j in 0..side {
                let (y, x) = (i as f64 / s, j as f64 / s);
                // Bright disk.
                let (cy, cx, r) = (0.38, 0.42, 0.23);
                if (y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r {
                    put(i, j, 210.0);
                }
                // Mid-gray block with a gentle horizontal ramp.
                if (0.62..0.80).contains(&y) && (0.12..0.55).contains(&x) {
                    put(i, j, 110.0 + 40.0 * (x - 0.12) / 0.43);
                }
                // Thin bright vertical line.
                if (0.10..0.90).contains(&y) && (x - 0.82).abs() < 0.5 / s {
                    put(i, j, 255.0);
                }
                // Small bright square.
                if (0.08..0.16).contains(&y) && (0.70..0.78).contains(&x) {
                    put(i, j, 235.0);
                }
            }
        }
        Image {
            height: side,
            width: side,
            data,
        }
    }
}
