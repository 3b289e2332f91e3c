//! Solver for systems (Id + γ Σ αᵢ Lᵢ* Pᵢ Lᵢ) x = b with orthogonal
//! projectors Pᵢ.

use super::fft::Fft2;
use super::{Op, Shape, Vector};
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One term αᵢ Lᵢ* Pᵢ Lᵢ of the normal system. `projector: None` means
/// Pᵢ = Id.
#[derive(Clone, Debug)]
pub struct NormalTerm {
    pub alpha: f64,
    pub op: Op,
    pub projector: Option<Op>,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Required residual relative to ‖b‖.
    pub rel_tol: f64,
    /// Iteration cap for the conjugate-gradient path.
    pub max_iters: usize,
    /// Probe each projector for idempotence and self-adjointness. Callers
    /// that validated at construction switch this off.
    pub validate_projectors: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rel_tol: 1e-8,
            max_iters: 2000,
            validate_projectors: true,
        }
    }
}

pub(crate) fn validate_projector(p: &Op, shape: &Shape) -> Result<()> {
    if p.in_shape() != shape || p.out_shape() != shape {
        return Err(Error::ShapeMismatch {
            expected: shape.clone(),
            got: p.in_shape().clone(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let u = Vector::from_fn(shape.clone(), |_| rng.random_range(-1.0..1.0));
    let v = Vector::from_fn(shape.clone(), |_| rng.random_range(-1.0..1.0));
    let pu = p.apply(&u);
    let ppu = p.apply(&pu);
    let scale = pu.norm() + 1.0;
    if ppu.sub(&pu).norm() > 1e-8 * scale {
        return Err(Error::invalid("projector is not idempotent"));
    }
    let sym = (pu.dot(&v) - u.dot(&p.apply(&v))).abs();
    if sym > 1e-8 * (u.norm() * v.norm() + 1.0) {
        return Err(Error::invalid("projector is not self-adjoint"));
    }
    Ok(())
}

/// Solves (Id + γ Σ αᵢ Lᵢ* Pᵢ Lᵢ) x = b to residual ≤ rel_tol·‖b‖.
///
/// When every Lᵢ is DFT-diagonal on the grid of `b` and every Pᵢ is the
/// identity, the solve is an exact frequency-domain division. Otherwise a
/// conjugate-gradient iteration on the symmetric positive definite system is
/// run; non-convergence within `max_iters` is an explicit error carrying the
/// reached residual.
pub fn solve_normal(
    terms: &[NormalTerm],
    gamma: f64,
    b: &Vector,
    opts: &SolveOptions,
) -> Result<Vector> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::invalid("solve_normal requires gamma > 0"));
    }
    for t in terms {
        if t.alpha <= 0.0 || !t.alpha.is_finite() {
            return Err(Error::invalid("solve_normal requires alpha > 0"));
        }
        if t.op.in_shape() != b.shape() {
            return Err(Error::ShapeMismatch {
                expected: b.shape().clone(),
                got: t.op.in_shape().clone(),
            });
        }
        if opts.validate_projectors {
            if let Some(p) = &t.projector {
                validate_projector(p, t.op.out_shape())?;
            }
        }
    }

    if let Some(x) = try_frequency_path(terms, gamma, b) {
        return Ok(x);
    }

    conjugate_gradient(terms, gamma, b, opts)
}

fn try_frequency_path(terms: &[NormalTerm], gamma: f64, b: &Vector) -> Option<Vector> {
    let (h, w) = b.shape().grid_dims()?;
    if terms.iter().any(|t| t.projector.is_some()) {
        return None;
    }
    let mut multiplier = vec![1.0f64; h * w];
    for t in terms {
        let f = t.op.frequency_response(h, w)?;
        for (m, c) in multiplier.iter_mut().zip(&f) {
            *m += gamma * t.alpha * c.norm_sqr();
        }
    }
    let fft = Fft2::new(h, w);
    let mut spec = fft.forward_real(b.as_slice());
    for (s, m) in spec.iter_mut().zip(&multiplier) {
        *s /= *m;
    }
    Some(Vector::from_parts(
        fft.inverse_to_real(spec),
        b.shape().clone(),
    ))
}

fn apply_system(terms: &[NormalTerm], gamma: f64, x: &Vector) -> Vector {
    let mut out = x.clone();
    for t in terms {
        let lx = t.op.apply(x);
        let plx = match &t.projector {
            Some(p) => p.apply(&lx),
            None => lx,
        };
        out.axpy(gamma * t.alpha, &t.op.apply_adjoint(&plx));
    }
    out
}

fn conjugate_gradient(
    terms: &[NormalTerm],
    gamma: f64,
    b: &Vector,
    opts: &SolveOptions,
) -> Result<Vector> {
    let b_norm = b.norm();
    let required = opts.rel_tol * b_norm;
    let mut x = Vector::zeros(b.shape().clone());
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = r.norm_sq();
    if rs.sqrt() <= required {
        return Ok(x);
    }
    for _ in 0..opts.max_iters {
        let ap = apply_system(terms, gamma, &p);
        let denom = p.dot(&ap);
        if denom <= 0.0 {
            // The system is positive definite; a nonpositive curvature value
            // can only come from rounding on a converged residual.
            break;
        }
        let alpha = rs / denom;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        let rs_new = r.norm_sq();
        if rs_new.sqrt() <= required {
            return Ok(x);
        }
        p = r.lincomb(1.0, rs_new / rs, &p);
        rs = rs_new;
    }
    // Recompute the true residual before reporting.
    let residual = b.sub(&apply_system(terms, gamma, &x)).norm();
    if residual <= required {
        Ok(x)
    } else {
        Err(Error::SolveFailed {
            residual,
            required,
            iters: opts.max_iters,
        })
    }
}
