//! Primal-dual forward-backward-forward iteration.

use super::{Recorder, RunOptions, Schedule, StopReason, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::model::CompositeProblem;

/// One forward-backward-forward sweep per iteration: a gradient/dual
/// forward step, prox steps on f and on the duals of the g_i (through the
/// Moreau identity p = y − γ prox_{g/γ}(y/γ)), and a correcting forward
/// step. Step sizes must satisfy 0 < inf γ_n ≤ sup γ_n < 1/β with
/// β = sqrt(Σ_I ‖L_i‖²) + Σ_J μ_j‖L_j‖².
///
/// Dual variables start at 0. The reported iterate is x_n; the feasible
/// estimate is the last prox output p_{1,n}.
pub fn fbf_primal_dual(
    problem: &CompositeProblem,
    gamma: &Schedule,
    x0: &Vector,
    opts: &RunOptions,
    callback: &mut dyn FnMut(&TraceRecord, &Vector),
) -> Result<Trace> {
    gamma.validate("gamma")?;
    let beta = problem.primal_dual_beta();
    if gamma.inf() <= 0.0 {
        return Err(Error::invalid("step sizes must be positive"));
    }
    if beta > 0.0 && gamma.sup() >= 1.0 / beta {
        return Err(Error::invalid(format!(
            "forward-backward-forward requires sup gamma < 1/beta = {:.6e}, got {:.6e}",
            1.0 / beta,
            gamma.sup()
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
    let mut feasible = x0.clone();
    rec.record(0, &x)?;
    let mut reason = StopReason::MaxIterations;
    for n in 0..opts.max_iters {
        let g = gamma.at(n);
        // Forward step on x.
        let mut y1 = x.clone();
        for (t, v) in nonsmooth.iter().zip(&duals) {
            y1.axpy(-g, &t.op.apply_adjoint(v));
        }
        for t in smooth {
            let gr = t.h.gradient(&t.op.apply(&x))?;
            y1.axpy(-g, &t.op.apply_adjoint(&gr));
        }
        let p1 = f.prox(g, &y1)?;

        // Dual prox steps via the Moreau identity.
        let mut p2 = Vec::with_capacity(duals.len());
        for (t, v) in nonsmooth.iter().zip(&duals) {
            let mut y2 = v.clone();
            y2.axpy(g, &t.op.apply(&x));
            let mut p = y2.clone();
            p.axpy(-g, &t.g.prox(1.0 / g, &y2.scaled(1.0 / g))?);
            p2.push(p);
        }
        for ((t, v), p) in nonsmooth.iter().zip(duals.iter_mut()).zip(&p2) {
            // v ← v − y2 + q2 with q2 = p2 + γ L p1 and y2 = v + γ L x.
            let correction = t.op.apply(&p1.sub(&x));
            *v = p.add(&correction.scaled(g));
        }

        // Correcting forward step.
        let mut q1 = p1.clone();
        for (t, p) in nonsmooth.iter().zip(&p2) {
            q1.axpy(-g, &t.op.apply_adjoint(p));
        }
        for t in smooth {
            let gr = t.h.gradient(&t.op.apply(&p1))?;
            q1.axpy(-g, &t.op.apply_adjoint(&gr));
        }
        let x_next = x.sub(&y1).add(&q1);
        rec.record(n + 1, &x_next)?;
        let stop = super::should_stop(opts.tol, &x, &x_next);
        feasible = p1;
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
