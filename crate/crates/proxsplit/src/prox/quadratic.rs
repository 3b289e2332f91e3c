//! Quadratic subspace-distance penalties with affine gradient and prox.

use crate::error::{Error, Result};
use crate::hilbert::normal::validate_projector;
use crate::hilbert::{solve_normal, NormalTerm, Op, Shape, SolveOptions, Vector};

/// One term of h(x) = ½ Σ αᵢ d²_{Vᵢ}(Lᵢ x − rᵢ).
#[derive(Clone, Debug)]
pub struct QuadraticTerm {
    pub alpha: f64,
    pub op: Op,
    /// Orthogonal projector onto the subspace Vᵢ; `None` means Vᵢ = {0}, in
    /// which case the term is the plain least squares ½αᵢ‖Lᵢx − rᵢ‖².
    pub subspace_projector: Option<Op>,
    pub target: Vector,
}

#[derive(Clone, Debug)]
pub(crate) struct QuadraticTerms {
    terms: Vec<(f64, Op, Option<Op>, Vector)>, // alpha, L, proj onto V-perp, r
    beta: f64,
    /// Σ αᵢ Lᵢ* proj_{Vᵢ⊥} rᵢ, the constant offset of the prox system.
    shift: Vector,
    solve_opts: SolveOptions,
}

impl QuadraticTerms {
    pub(crate) fn new(shape: &Shape, input: Vec<QuadraticTerm>) -> Result<Self> {
        if input.is_empty() {
            return Err(Error::invalid("quadratic penalty needs at least one term"));
        }
        let mut terms = Vec::with_capacity(input.len());
        let mut beta = 0.0;
        let mut shift = Vector::zeros(shape.clone());
        for t in input {
            if !(t.alpha > 0.0) || !t.alpha.is_finite() {
                return Err(Error::invalid("quadratic term requires alpha > 0"));
            }
            if t.op.in_shape() != shape {
                return Err(Error::ShapeMismatch {
                    expected: shape.clone(),
                    got: t.op.in_shape().clone(),
                });
            }
            if t.target.shape() != t.op.out_shape() {
                return Err(Error::ShapeMismatch {
                    expected: t.op.out_shape().clone(),
                    got: t.target.shape().clone(),
                });
            }
            let perp = match t.subspace_projector {
                None => None,
                Some(p) => {
                    validate_projector(&p, t.op.out_shape())?;
                    Some(Op::complement_projector(p)?)
                }
            };
            beta += t.alpha * t.op.norm_bound() * t.op.norm_bound();
            let pr = match &perp {
                Some(p) => p.apply(&t.target),
                None => t.target.clone(),
            };
            shift.axpy(t.alpha, &t.op.apply_adjoint(&pr));
            terms.push((t.alpha, t.op, perp, t.target));
        }
        Ok(QuadraticTerms {
            terms,
            beta,
            shift,
            solve_opts: SolveOptions {
                validate_projectors: false,
                ..SolveOptions::default()
            },
        })
    }

    pub(crate) fn beta(&self) -> f64 {
        self.beta
    }

    pub(crate) fn value(&self, x: &Vector) -> f64 {
        let mut total = 0.0;
        for (alpha, op, perp, r) in &self.terms {
            let res = op.apply(x).sub(r);
            let pres = match perp {
                Some(p) => p.apply(&res),
                None => res,
            };
            total += 0.5 * alpha * pres.norm_sq();
        }
        total
    }

    pub(crate) fn gradient(&self, x: &Vector) -> Vector {
        let mut grad = Vector::zeros(x.shape().clone());
        for (alpha, op, perp, r) in &self.terms {
            let res = op.apply(x).sub(r);
            let pres = match perp {
                Some(p) => p.apply(&res),
                None => res,
            };
            grad.axpy(*alpha, &op.apply_adjoint(&pres));
        }
        grad
    }

    /// prox_{γh} x = (Id + γ Σ αᵢ Lᵢ* proj_{Vᵢ⊥} Lᵢ)⁻¹ (x + γ Σ αᵢ Lᵢ* proj_{Vᵢ⊥} rᵢ).
    pub(crate) fn prox(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        let normal: Vec<NormalTerm> = self
            .terms
            .iter()
            .map(|(alpha, op, perp, _)| NormalTerm {
                alpha: *alpha,
                op: op.clone(),
                projector: perp.clone(),
            })
            .collect();
        let mut rhs = x.clone();
        rhs.axpy(gamma, &self.shift);
        solve_normal(&normal, gamma, &rhs, &self.solve_opts)
    }
}
