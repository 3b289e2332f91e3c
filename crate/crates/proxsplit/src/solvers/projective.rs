//! Projective splitting with explicit smooth-term handling.

use super::{Recorder, RunOptions, Schedule, StopReason, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::hilbert::{Op, Vector};
use crate::model::CompositeProblem;
use crate::prox::ProxFun;

enum TermKind<'a> {
    Proximal(&'a ProxFun),
    Smooth(&'a ProxFun),
}

/// Projective splitting: each iteration evaluates one prox of f, one prox
/// (for i ∈ I) or two gradients (for j ∈ J) per term, assembles an affine
/// separator, and projects the primal-dual point onto it. When the
/// separator degenerates (τ_n = 0) the current prox output is an exact
/// solution and the run terminates finitely.
///
/// Schedules: γ_n and each μ_{k,n} positive and bounded, λ_n ∈ (0, 2)
/// bounded away from the endpoints. The μ schedules follow the term order
/// proximal-then-smooth. Dual variables start at 0; see
/// [`projective_splitting_with_duals`] to supply them.
pub fn projective_splitting(
    problem: &CompositeProblem,
    gamma: &Schedule,
    mus: &[Schedule],
    lambda: &Schedule,
    x0: &Vector,
    opts: &RunOptions,
    callback: &mut dyn FnMut(&TraceRecord, &Vector),
) -> Result<Trace> {
    projective_splitting_with_duals(problem, gamma, mus, lambda, x0, None, opts, callback)
}

/// [`projective_splitting`] with caller-supplied initial dual vectors, one
/// per term in proximal-then-smooth order.
#[allow(clippy::too_many_arguments)]
pub fn projective_splitting_with_duals(
    problem: &CompositeProblem,
    gamma: &Schedule,
    mus: &[Schedule],
    lambda: &Schedule,
    x0: &Vector,
    initial_duals: Option<Vec<Vector>>,
    opts: &RunOptions,
    callback: &mut dyn FnMut(&TraceRecord, &Vector),
) -> Result<Trace> {
    gamma.validate("gamma")?;
    lambda.validate("lambda")?;
    for m in mus {
        m.validate("mu")?;
    }
    let terms: Vec<(TermKind, &Op)> = problem
        .nonsmooth()
        .iter()
        .map(|t| (TermKind::Proximal(&t.g), &t.op))
        .chain(
            problem
                .smooth()
                .iter()
                .map(|t| (TermKind::Smooth(&t.h), &t.op)),
        )
        .collect();
    if mus.len() != terms.len() {
        return Err(Error::invalid(
            "one mu schedule per term (proximal then smooth) is required",
        ));
    }
    if gamma.inf() <= 0.0 || !gamma.sup().is_finite() {
        return Err(Error::invalid("gamma must be positive and bounded"));
    }
    if mus.iter().any(|m| m.inf() <= 0.0 || !m.sup().is_finite()) {
        return Err(Error::invalid("mu schedules must be positive and bounded"));
    }
    if lambda.inf() <= 0.0 || lambda.sup() >= 2.0 {
        return Err(Error::invalid(
            "relaxation must lie in (0, 2) bounded away from the endpoints",
        ));
    }

    let f = problem.f();
    let mut rec = Recorder::new(problem, opts.reference, callback);
    let mut x = x0.clone();
    let mut duals: Vec<Vector> = match initial_duals {
        Some(duals) => {
            if duals.len() != terms.len()
                || duals
                    .iter()
                    .zip(&terms)
                    .any(|(v, (_, op))| v.shape() != op.out_shape())
            {
                return Err(Error::invalid(
                    "initial duals must match the terms (proximal then smooth)",
                ));
            }
            duals
        }
        None => terms
            .iter()
            .map(|(_, op)| Vector::zeros(op.out_shape().clone()))
            .collect(),
    };
    let mut feasible = x0.clone();
    rec.record(0, &x)?;
    let mut reason = StopReason::MaxIterations;
    for n in 0..opts.max_iters {
        let g = gamma.at(n);
        let mut l_star = Vector::zeros(problem.shape().clone());
        for ((_, op), v) in terms.iter().zip(&duals) {
            l_star.axpy(1.0, &op.apply_adjoint(v));
        }
        let mut arg = x.clone();
        arg.axpy(-g, &l_star);
        let a = f.prox(g, &arg)?;
        let mut a_star = x.sub(&a).scaled(1.0 / g);
        a_star.axpy(-1.0, &l_star);

        let mut b = Vec::with_capacity(terms.len());
        let mut b_star = Vec::with_capacity(terms.len());
        let mut t = Vec::with_capacity(terms.len());
        for (k, ((kind, op), v)) in terms.iter().zip(&duals).enumerate() {
            let mu = mus[k].at(n);
            let l_k = op.apply(&x);
            let (b_k, bs_k) = match kind {
                TermKind::Proximal(g_k) => {
                    let mut input = l_k.clone();
                    input.axpy(mu, v);
                    let b_k = g_k.prox(mu, &input)?;
                    let mut bs_k = v.clone();
                    bs_k.axpy(1.0 / mu, &l_k.sub(&b_k));
                    (b_k, bs_k)
                }
                TermKind::Smooth(h_k) => {
                    // Two gradient evaluations: an explicit step toward the
                    // dual, then the gradient at the stepped point.
                    let grad_l = h_k.gradient(&l_k)?;
                    let mut b_k = l_k.clone();
                    b_k.axpy(-mu, &grad_l.sub(v));
                    let bs_k = h_k.gradient(&b_k)?;
                    (b_k, bs_k)
                }
            };
            t.push(b_k.sub(&op.apply(&a)));
            b.push(b_k);
            b_star.push(bs_k);
        }

        let mut t_star = a_star.clone();
        for ((_, op), bs) in terms.iter().zip(&b_star) {
            t_star.axpy(1.0, &op.apply_adjoint(bs));
        }
        let tau: f64 = t_star.norm_sq() + t.iter().map(Vector::norm_sq).sum::<f64>();
        if tau < 1e-28 {
            rec.record(n + 1, &a)?;
            feasible = a.clone();
            x = a;
            reason = StopReason::FiniteTermination;
            break;
        }
        let mut inner = x.dot(&t_star) - a.dot(&a_star);
        for k in 0..terms.len() {
            inner += t[k].dot(&duals[k]) - b[k].dot(&b_star[k]);
        }
        let theta = lambda.at(n) / tau * inner.max(0.0);
        let mut x_next = x.clone();
        x_next.axpy(-theta, &t_star);
        for (v, t_k) in duals.iter_mut().zip(&t) {
            v.axpy(-theta, t_k);
        }
        rec.record(n + 1, &x_next)?;
        let stop = super::should_stop(opts.tol, &x, &x_next);
        feasible = a;
        x = x_next;
        if stop {
            reason = StopReason::ToleranceReached;
            break;
        }
    }
    Ok(Trace {
        records: rec.records,
        final_iterate: x,
        final_feasible: feasible,
        reason,
    })
}
