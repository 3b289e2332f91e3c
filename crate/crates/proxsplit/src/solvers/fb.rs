//! Forward-backward splitting and its inertial variant.

use super::{Recorder, RunOptions, Schedule, StopReason, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::model::CompositeProblem;

fn require_smooth_only(problem: &CompositeProblem) -> Result<f64> {
    if !problem.nonsmooth().is_empty() {
        return Err(Error::rejected(
            "forward-backward handles f plus smooth terms only; fold nonsmooth terms into f or use a primal-dual method",
        ));
    }
    Ok(problem.smooth_beta())
}

/// Forward-backward iteration: y_n = x_n − γ_n ∇h(x_n), x_{n+1} =
/// prox_{γ_n f} y_n, for step sizes 0 < inf γ_n ≤ sup γ_n < 2/β.
pub fn forward_backward(
    problem: &CompositeProblem,
    gamma: &Schedule,
    x0: &Vector,
    opts: &RunOptions,
    callback: &mut dyn FnMut(&TraceRecord, &Vector),
) -> Result<Trace> {
    gamma.validate("gamma")?;
    let beta = require_smooth_only(problem)?;
    if gamma.inf() <= 0.0 {
        return Err(Error::invalid("forward-backward requires inf gamma > 0"));
    }
    if beta > 0.0 && gamma.sup() >= 2.0 / beta {
        return Err(Error::invalid(format!(
            "forward-backward requires sup gamma < 2/beta = {:.6e}, got {:.6e}",
            2.0 / beta,
            gamma.sup()
        )));
    }

    let mut rec = Recorder::new(problem, opts.reference, callback);
    let mut x = x0.clone();
    rec.record(0, &x)?;
    let mut reason = StopReason::MaxIterations;
    for n in 0..opts.max_iters {
        let g = gamma.at(n);
        let mut y = x.clone();
        y.axpy(-g, &problem.smooth_gradient(&x)?);
        let x_next = problem.f().prox(g, &y)?;
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

/// Extrapolation weight (n−1)/(n+α); at n = 0 this is −1/α, harmless since
/// x_0 = x_{−1}.
fn inertial_coefficient(n: usize, alpha: f64) -> f64 {
    (n as f64 - 1.0) / (n as f64 + alpha)
}

/// Inertial forward-backward iteration: z_n = x_n + (n−1)/(n+α)·(x_n −
/// x_{n−1}) followed by a forward-backward step from z_n; requires
/// γ ∈ (0, 1/β] and α > 2.
pub fn inertial_forward_backward(
    problem: &CompositeProblem,
    gamma: f64,
    alpha: f64,
    x0: &Vector,
    opts: &RunOptions,
    callback: &mut dyn FnMut(&TraceRecord, &Vector),
) -> Result<Trace> {
    let beta = require_smooth_only(problem)?;
    if !(gamma > 0.0) || (beta > 0.0 && gamma > 1.0 / beta) {
        return Err(Error::invalid(format!(
            "inertial forward-backward requires gamma in (0, 1/beta], 1/beta = {:.6e}",
            1.0 / beta
        )));
    }
    if !(alpha > 2.0) {
        return Err(Error::invalid(
            "inertial forward-backward requires alpha > 2",
        ));
    }

    let mut rec = Recorder::new(problem, opts.reference, callback);
    let mut x = x0.clone();
    let mut x_prev = x0.clone();
    rec.record(0, &x)?;
    let mut reason = StopReason::MaxIterations;
    for n in 0..opts.max_iters {
        let w = inertial_coefficient(n, alpha);
        let z = x.lincomb(1.0 + w, -w, &x_prev);
        let mut y = z.clone();
        y.axpy(-gamma, &problem.smooth_gradient(&z)?);
        let x_next = problem.f().prox(gamma, &y)?;
        rec.record(n + 1, &x_next)?;
        let stop = super::should_stop(opts.tol, &x, &x_next);
        x_prev = x;
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_coefficient_at_zero() {
        let alpha = 2.01;
        assert!((inertial_coefficient(0, alpha) + 1.0 / alpha).abs() < 1e-15);
        assert_eq!(inertial_coefficient(1, 3.0), 0.0);
    }
}
