//! Exact projectors onto closed convex sets.

use crate::error::{Error, Result};
use crate::hilbert::fft::{conjugate_index, Fft2};
use crate::hilbert::{Shape, Vector};
use num_complex::Complex64;

/// Default absolute tolerance on the defining functional for membership
/// tests.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
enum SetKind {
    /// Entrywise bounds [lo, hi].
    Box { lo: f64, hi: f64 },
    /// {x : ⟨a, x⟩ = b}.
    Hyperplane { normal: Vector, offset: f64 },
    /// {x : ⟨a, x⟩ ≤ b}.
    Halfspace { normal: Vector, offset: f64 },
    /// {x : ‖x − c‖ ≤ r}.
    Ball { center: Vector, radius: f64 },
    /// The singleton {c}.
    Point { center: Vector },
    /// Coordinate subspace {x : x_k = 0 for unflagged k}.
    Mask { keep: Vec<bool> },
    /// {x : x̂(k) = t(k) on an index set closed under Hermitian symmetry}.
    DftData {
        fft: Fft2,
        entries: Vec<(usize, Complex64)>,
    },
    /// {x : ∠x̂ = θ}: per frequency, x̂(k) lies on the ray ρ·e^{iθ(k)}, ρ ≥ 0.
    Phase { fft: Fft2, unit: Vec<Complex64> },
}

/// A nonempty closed convex set exposing an exact projection map and a
/// membership test. Immutable and shareable.
#[derive(Clone, Debug)]
pub struct ConvexSet {
    shape: Shape,
    kind: SetKind,
}

impl ConvexSet {
    /// {x : lo ≤ x_k ≤ hi entrywise}; its projection clamps.
    pub fn box_set(shape: Shape, lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::invalid("box requires lo <= hi"));
        }
        Ok(ConvexSet {
            shape,
            kind: SetKind::Box { lo, hi },
        })
    }

    /// {x : ⟨a, x⟩ = b} for a ≠ 0.
    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self> {
        if normal.norm_sq() == 0.0 {
            return Err(Error::invalid("hyperplane normal must be nonzero"));
        }
        Ok(ConvexSet {
            shape: normal.shape().clone(),
            kind: SetKind::Hyperplane { normal, offset },
        })
    }

    /// {x : ⟨a, x⟩ ≤ b} for a ≠ 0.
    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        if normal.norm_sq() == 0.0 {
            return Err(Error::invalid("halfspace normal must be nonzero"));
        }
        Ok(ConvexSet {
            shape: normal.shape().clone(),
            kind: SetKind::Halfspace { normal, offset },
        })
    }

    /// Closed ball of strictly positive radius.
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid("ball requires radius > 0"));
        }
        Ok(ConvexSet {
            shape: center.shape().clone(),
            kind: SetKind::Ball { center, radius },
        })
    }

    /// The singleton {c}.
    pub fn point(center: Vector) -> Self {
        ConvexSet {
            shape: center.shape().clone(),
            kind: SetKind::Point { center },
        }
    }

    /// The origin of the given space.
    pub fn origin(shape: Shape) -> Self {
        ConvexSet::point(Vector::zeros(shape))
    }

    /// Coordinate subspace keeping the flagged entries; the projector zeroes
    /// the rest, and `Id − proj_V` is the projector of the complement mask.
    pub fn subspace_mask(shape: Shape, keep: Vec<bool>) -> Result<Self> {
        if keep.len() != shape.len() {
            return Err(Error::invalid("mask length does not match shape"));
        }
        Ok(ConvexSet {
            shape,
            kind: SetKind::Mask { keep },
        })
    }

    /// Set of images whose unitary DFT equals `target` on the given
    /// frequency index set.
    ///
    /// Indices are given as (row, col) pairs of one half-plane and are
    /// symmetrized automatically (the conjugate frequency receives the
    /// conjugate target). Conflicting duplicate indices, or self-conjugate
    /// frequencies with a non-real target, are rejected.
    pub fn dft_data(
        height: usize,
        width: usize,
        entries: &[((usize, usize), Complex64)],
    ) -> Result<Self> {
        let mut table: Vec<Option<Complex64>> = vec![None; height * width];
        let mut put = |idx: usize, val: Complex64| -> Result<()> {
            match table[idx] {
                None => {
                    table[idx] = Some(val);
                    Ok(())
                }
                Some(prev) => {
                    if (prev - val).norm() <= 1e-9 * (1.0 + prev.norm()) {
                        Ok(())
                    } else {
                        Err(Error::rejected(
                            "conflicting DFT targets violate Hermitian symmetry",
                        ))
                    }
                }
            }
        };
        for &((u, v), t) in entries {
            if u >= height || v >= width {
                return Err(Error::invalid("frequency index out of range"));
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::NonFinite("DFT target"));
            }
            let (cu, cv) = conjugate_index(u, v, height, width);
            if (cu, cv) == (u, v) && t.im.abs() > 1e-9 * (1.0 + t.norm()) {
                return Err(Error::rejected(
                    "self-conjugate frequency requires a real target",
                ));
            }
            put(u * width + v, t)?;
            put(cu * width + cv, t.conj())?;
        }
        let entries: Vec<(usize, Complex64)> = table
            .into_iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (i, t)))
            .collect();
        Ok(ConvexSet {
            shape: Shape::Grid(height, width),
            kind: SetKind::DftData {
                fft: Fft2::new(height, width),
                entries,
            },
        })
    }

    /// Set of images whose DFT phase equals θ. The phase array must be
    /// Hermitian-antisymmetric (θ(−k) ≡ −θ(k) modulo 2π) so that real images
    /// exist.
    pub fn phase(height: usize, width: usize, theta: &[f64]) -> Result<Self> {
        if theta.len() != height * width {
            return Err(Error::invalid("phase array does not match shape"));
        }
        let unit: Vec<Complex64> = theta
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect();
        for u in 0..height {
            for v in 0..width {
                let (cu, cv) = conjugate_index(u, v, height, width);
                let a = unit[u * width + v];
                let b = unit[cu * width + cv];
                if (a.conj() - b).norm() > 1e-8 {
                    return Err(Error::rejected(
                        "phase array is not Hermitian-antisymmetric",
                    ));
                }
            }
        }
        Ok(ConvexSet {
            shape: Shape::Grid(height, width),
            kind: SetKind::Phase {
                fft: Fft2::new(height, width),
                unit,
            },
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    fn check(&self, x: &Vector) {
        assert_eq!(
            x.shape(),
            &self.shape,
            "projection: set lives on {}, got {}",
            self.shape,
            x.shape()
        );
    }

    /// The unique closest point of the set.
    pub fn project(&self, x: &Vector) -> Vector {
        self.check(x);
        match &self.kind {
            SetKind::Box { lo, hi } => x.map(|v| v.clamp(*lo, *hi)),
            SetKind::Hyperplane { normal, offset } => {
                let shift = (offset - normal.dot(x)) / normal.norm_sq();
                let mut out = x.clone();
                out.axpy(shift, normal);
                out
            }
            SetKind::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    let mut out = x.clone();
                    out.axpy(-excess / normal.norm_sq(), normal);
                    out
                }
            }
            SetKind::Ball { center, radius } => {
                let d = x.dist(center);
                if d <= *radius {
                    x.clone()
                } else {
                    center.lincomb(1.0 - radius / d, radius / d, x)
                }
            }
            SetKind::Point { center } => center.clone(),
            SetKind::Mask { keep } => Vector::from_parts(
                x.as_slice()
                    .iter()
                    .zip(keep)
                    .map(|(&v, &k)| if k { v } else { 0.0 })
                    .collect(),
                self.shape.clone(),
            ),
            SetKind::DftData { fft, entries } => {
                if entries.is_empty() {
                    return x.clone();
                }
                let mut spec = fft.forward_real(x.as_slice());
                for &(idx, t) in entries {
                    spec[idx] = t;
                }
                Vector::from_parts(fft.inverse_to_real(spec), self.shape.clone())
            }
            SetKind::Phase { fft, unit } => {
                let mut spec = fft.forward_real(x.as_slice());
                for (s, u) in spec.iter_mut().zip(unit) {
                    let amplitude = (*s * u.conj()).re.max(0.0);
                    *s = amplitude * u;
                }
                Vector::from_parts(fft.inverse_to_real(spec), self.shape.clone())
            }
        }
    }

    /// Distance to the set, d_C(x) = ‖x − proj_C(x)‖.
    pub fn distance(&self, x: &Vector) -> f64 {
        self.project_with_distance(x).1
    }

    /// Projection and distance in one pass.
    pub fn project_with_distance(&self, x: &Vector) -> (Vector, f64) {
        match &self.kind {
            // Cheap defining functionals avoid forming the projection twice.
            SetKind::Ball { center, radius } => {
                let d = (x.dist(center) - radius).max(0.0);
                (self.project(x), d)
            }
            _ => {
                let p = self.project(x);
                let d = x.dist(&p);
                (p, d)
            }
        }
    }

    /// Membership test with an absolute tolerance on the defining
    /// functional.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.check(x);
        match &self.kind {
            SetKind::Box { lo, hi } => x
                .as_slice()
                .iter()
                .all(|&v| v >= lo - tol && v <= hi + tol),
            SetKind::Hyperplane { normal, offset } => (normal.dot(x) - offset).abs() <= tol,
            SetKind::Halfspace { normal, offset } => normal.dot(x) - offset <= tol,
            SetKind::Ball { center, radius } => x.dist(center) <= radius + tol,
            SetKind::Point { center } => x.dist(center) <= tol,
            SetKind::Mask { keep } => x
                .as_slice()
                .iter()
                .zip(keep)
                .all(|(&v, &k)| k || v.abs() <= tol),
            SetKind::DftData { fft, entries } => {
                let spec = fft.forward_real(x.as_slice());
                let d2: f64 = entries
                    .iter()
                    .map(|&(idx, t)| (spec[idx] - t).norm_sqr())
                    .sum();
                d2.sqrt() <= tol
            }
            SetKind::Phase { .. } => self.distance(x) <= tol,
        }
    }

    /// True when the set is bounded (used by the qualification advisory).
    pub fn is_bounded(&self) -> bool {
        matches!(
            self.kind,
            SetKind::Box { .. } | SetKind::Ball { .. } | SetKind::Point { .. }
        )
    }

    /// True when the set is a closed vector subspace.
    pub fn is_subspace(&self) -> bool {
        match &self.kind {
            SetKind::Mask { .. } => true,
            SetKind::Hyperplane { offset, .. } => *offset == 0.0,
            SetKind::Point { center } => center.norm_sq() == 0.0,
            _ => false,
        }
    }
}

/// Entrywise clamp projector onto [lo, hi]^N.
pub fn project_box(shape: Shape, lo: f64, hi: f64) -> Result<ConvexSet> {
    ConvexSet::box_set(shape, lo, hi)
}

/// Projector onto {x : ⟨a, x⟩ = b}.
pub fn project_hyperplane(a: Vector, b: f64) -> Result<ConvexSet> {
    ConvexSet::hyperplane(a, b)
}

/// Projector onto the closed ball of the given center and radius.
pub fn project_ball(center: Vector, radius: f64) -> Result<ConvexSet> {
    ConvexSet::ball(center, radius)
}

/// Projector replacing DFT coefficients on a symmetric index set.
pub fn project_dft_data(
    height: usize,
    width: usize,
    entries: &[((usize, usize), Complex64)],
) -> Result<ConvexSet> {
    ConvexSet::dft_data(height, width, entries)
}

/// Projector onto the cone of images with prescribed DFT phase.
pub fn project_phase(height: usize, width: usize, theta: &[f64]) -> Result<ConvexSet> {
    ConvexSet::phase(height, width, theta)
}

/// Projector onto a coordinate subspace.
pub fn project_subspace_mask(shape: Shape, keep: Vec<bool>) -> Result<ConvexSet> {
    ConvexSet::subspace_mask(shape, keep)
}
