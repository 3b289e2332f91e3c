//! Douglas-Rachford splitting for two-term problems.

use super::{Recorder, RunOptions, Schedule, StopReason, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::model::CompositeProblem;
use crate::prox::ProxFun;

/// Internal variables of the last iteration, useful to diagnose
/// inconsistent problems: on infeasible two-set problems the governing
/// sequence y_n diverges while x_n − z_n tends to the gap vector between
/// the sets.
#[derive(Clone, Debug)]
pub struct DrState {
    pub y: Vector,
    pub z: Vector,
    pub x: Vector,
}

fn two_term(problem: &CompositeProblem) -> Result<&ProxFun> {
    let terms = problem.nonsmooth().len() + problem.smooth().len();
    if terms != 1 {
        return Err(Error::rejected(
            "Douglas-Rachford handles exactly two functions (f plus one identity-composed term)",
        ));
    }
    if let Some(t) = problem.nonsmooth().first() {
        if !t.op.is_identity() {
            return Err(Error::rejected(
                "Douglas-Rachford requires the second term to be composed with the identity",
            ));
        }
        return Ok(&t.g);
    }
    let t = &problem.smooth()[0];
    if !t.op.is_identity() {
        return Err(Error::rejected(
            "Douglas-Rachford requires the second term to be composed with the identity",
        ));
    }
    Ok(&t.h)
}

/// Douglas-Rachford iteration z_n = prox_{γg} y_n, x_n = prox_{γf}(2z_n −
/// y_n), y_{n+1} = y_n + λ_n(x_n − z_n); the reported iterate is x_n.
/// Requires γ > 0 and λ_n ∈ [0, 2] with inf λ_n(2 − λ_n) > 0. Both terms
/// are activated proximally, so the second term may be smooth or not.
pub fn douglas_rachford(
    problem: &CompositeProblem,
    gamma: f64,
    lambda: &Schedule,
    y0: &Vector,
    opts: &RunOptions,
    callback: &mut dyn FnMut(&TraceRecord, &Vector),
) -> Result<Trace> {
    douglas_rachford_with_state(problem, gamma, lambda, y0, opts, callback).map(|(t, _)| t)
}

/// [`douglas_rachford`] returning the final internal state alongside the
/// trace.
pub fn douglas_rachford_with_state(
    problem: &CompositeProblem,
    gamma: f64,
    lambda: &Schedule,
    y0: &Vector,
    opts: &RunOptions,
    callback: &mut dyn FnMut(&TraceRecord, &Vector),
) -> Result<(Trace, DrState)> {
    lambda.validate("lambda")?;
    let g = two_term(problem)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid("Douglas-Rachford requires gamma > 0"));
    }
    if lambda.inf() < 0.0 || lambda.sup() > 2.0 {
        return Err(Error::invalid("relaxation must lie in [0, 2]"));
    }
    // λ(2−λ) is concave, so its infimum over the schedule is at an endpoint.
    let slack = (lambda.inf() * (2.0 - lambda.inf()))
        .min(lambda.sup() * (2.0 - lambda.sup()));
    if slack <= 0.0 {
        return Err(Error::invalid(
            "relaxation must keep lambda(2 - lambda) bounded away from 0",
        ));
    }

    let f = problem.f();
    let mut rec = Recorder::new(problem, opts.reference, callback);
    let mut y = y0.clone();
    let mut x_prev = y0.clone();
    let mut state = DrState {
        y: y.clone(),
        z: y0.clone(),
        x: y0.clone(),
    };
    rec.record(0, &x_prev)?;
    let mut reason = StopReason::MaxIterations;
    for n in 0..opts.max_iters {
        let z = g.prox(gamma, &y)?;
        let x = f.prox(gamma, &z.lincomb(2.0, -1.0, &y))?;
        y.axpy(lambda.at(n), &x.sub(&z));
        rec.record(n + 1, &x)?;
        let stop = super::should_stop(opts.tol, &x_prev, &x);
        state = DrState {
            y: y.clone(),
            z,
            x: x.clone(),
        };
        x_prev = x;
        if stop {
            reason = StopReason::ToleranceReached;
            break;
        }
    }
    Ok((
        Trace {
            records: rec.records,
            final_feasible: x_prev.clone(),
            final_iterate: x_prev,
            reason,
        },
        state,
    ))
}
