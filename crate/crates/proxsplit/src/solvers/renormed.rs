//! Forward-backward iteration in a renormed primal-dual space.

use super::{Recorder, RunOptions, Schedule, StopReason, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::model::CompositeProblem;

/// The step-size functional that must stay below 1:
/// sqrt(τ_n Σ_i σ_{i,n}‖L_i‖²) + ½ max{τ_n, max_i σ_{i,n}} Σ_j μ_j‖L_j‖²,
/// maximized over the schedule entries.
pub fn renormed_bound(
    problem: &CompositeProblem,
    tau: &Schedule,
    sigmas: &[Schedule],
) -> f64 {
    let smooth_sum = problem.smooth_beta();
    let horizon = tau
        .table_len()
        .max(sigmas.iter().map(Schedule::table_len).max().unwrap_or(1));
    let mut worst = f64::NEG_INFINITY;
    for n in 0..horizon {
        let t = tau.at(n);
        let mut dual = 0.0;
        let mut sigma_max = 0.0f64;
        for (s, term) in sigmas.iter().zip(problem.nonsmooth()) {
            let sv = s.at(n);
            dual += sv * term.op.norm_bound() * term.op.norm_bound();
            sigma_max = sigma_max.max(sv);
        }
        let bound = (t * dual).sqrt() + 0.5 * t.max(sigma_max) * smooth_sum;
        worst = worst.max(bound);
    }
    worst
}

/// Renormed primal-dual forward-backward iteration: a primal
/// gradient-then-prox step with step τ_n, a reflection z_n = 2x_{n+1} − x_n,
/// and dual prox steps with steps σ_{i,n} through the Moreau identity.
///
/// τ_n and every σ_{i,n} must be positive and nondecreasing, one σ schedule
/// per proximal term, and the step-size bound must stay below 1; violations
/// are rejected at construction with the computed bound.
pub fn renormed_primal_dual(
    problem: &CompositeProblem,
    tau: &Schedule,
    sigmas: &[Schedule],
    x0: &Vector,
    opts: &RunOptions,
    callback: &mut dyn FnMut(&TraceRecord, &Vector),
) -> Result<Trace> {
    tau.validate("tau")?;
    for s in sigmas {
        s.validate("sigma")?;
    }
    if sigmas.len() != problem.nonsmooth().len() {
        return Err(Error::invalid(
            "one sigma schedule per proximal term is required",
        ));
    }
    if tau.inf() <= 0.0 || sigmas.iter().any(|s| s.inf() <= 0.0) {
        return Err(Error::invalid("step sizes must be positive"));
    }
    if !tau.is_nondecreasing() || sigmas.iter().any(|s| !s.is_nondecreasing()) {
        return Err(Error::invalid("step schedules must be nondecreasing"));
    }
    let bound = renormed_bound(problem, tau, sigmas);
    if !(bound < 1.0) {
        return Err(Error::invalid(format!(
            "renormed step-size bound must be < 1, computed {bound:.12}"
        )));
    }

    let f = problem.f();
    let nonsmooth = problem.nonsmooth();
    let smooth = problem.smooth();
    let mut rec = Recorder::new(problem, opts.reference, callback);
    let mut x = x0.clone();
    let mut duals: Vec<Vector> = nonsmooth
        .iter()
        .map(|t| Vector::zeros(t.op.out_shape().clone()))
        .collect();
    rec.record(0, &x)?;
    let mut reason = StopReason::MaxIterations;
    for n in 0..opts.max_iters {
        let t_n = tau.at(n);
        let mut y1 = x.clone();
        for (term, v) in nonsmooth.iter().zip(&duals) {
            y1.axpy(-t_n, &term.op.apply_adjoint(v));
        }
        for term in smooth {
            let gr = term.h.gradient(&term.op.apply(&x))?;
            y1.axpy(-t_n, &term.op.apply_adjoint(&gr));
        }
        let x_next = f.prox(t_n, &y1)?;
        let z = x_next.lincomb(2.0, -1.0, &x);
        for ((term, sched), v) in nonsmooth.iter().zip(sigmas).zip(duals.iter_mut()) {
            let s = sched.at(n);
            let mut y2 = v.clone();
            y2.axpy(s, &term.op.apply(&z));
            let mut p = y2.clone();
            p.axpy(-s, &term.g.prox(1.0 / s, &y2.scaled(1.0 / s))?);
            *v = p;
        }
        rec.record(n + 1, &x_next)?;
        let stop = super::should_stop(opts.tol, &x, &x_next);
        x = x_next;
        if stop {
            reason = StopReason::ToleranceReached;
            break;
        }
    }
    Ok(Trace {
        records: rec.records,
        final_feasible: x.clone(),
        final_iterate: x,
        reason,
    })
}
