//! Proximal splitting algorithms emitting per-iteration traces.
//!
//! All solvers consume a [`CompositeProblem`] (the two-term methods require
//! the corresponding specialization), run a deterministic sequential
//! iteration, and report a [`Trace`] with one record per iteration plus the
//! initialization row.

mod dr;
mod fb;
mod fbf;
mod projective;
mod renormed;

pub use dr::{douglas_rachford, douglas_rachford_with_state, DrState};
pub use fb::{forward_backward, inertial_forward_backward};
pub use fbf::fbf_primal_dual;
pub use projective::{projective_splitting, projective_splitting_with_duals};
pub use renormed::{renormed_bound, renormed_primal_dual};

use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::model::CompositeProblem;
use std::io::Write;
use std::time::Instant;

/// A per-iteration parameter sequence. Tables repeat their last entry.
#[derive(Clone, Debug)]
pub enum Schedule {
    Constant(f64),
    Table(Vec<f64>),
}

impl Schedule {
    pub fn at(&self, n: usize) -> f64 {
        match self {
            Schedule::Constant(c) => *c,
            Schedule::Table(t) => t[n.min(t.len() - 1)],
        }
    }

    pub fn inf(&self) -> f64 {
        match self {
            Schedule::Constant(c) => *c,
            Schedule::Table(t) => t.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            Schedule::Constant(c) => *c,
            Schedule::Table(t) => t.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        match self {
            Schedule::Constant(_) => true,
            Schedule::Table(t) => t.windows(2).all(|w| w[1] >= w[0]),
        }
    }

    /// Number of distinct prefix entries (1 for constants).
    pub fn table_len(&self) -> usize {
        match self {
            Schedule::Constant(_) => 1,
            Schedule::Table(t) => t.len(),
        }
    }

    pub(crate) fn validate(&self, name: &str) -> Result<()> {
        let ok = match self {
            Schedule::Constant(c) => c.is_finite(),
            Schedule::Table(t) => !t.is_empty() && t.iter().all(|v| v.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("schedule {name} must be finite and nonempty")))
        }
    }
}

/// Algorithm selector with its step parameters.
#[derive(Clone, Debug)]
pub enum Algorithm {
    /// Explicit gradient step on the smooth part, prox step on f;
    /// requires sup γ_n < 2/β.
    ForwardBackward { gamma: Schedule },
    /// Forward-backward with inertial extrapolation (n−1)/(n+α);
    /// requires γ ≤ 1/β and α > 2.
    InertialForwardBackward { gamma: f64, alpha: f64 },
    /// Fully proximal two-term splitting; any γ > 0, relaxation λ_n ∈ [0, 2]
    /// bounded away from the endpoints in the product λ(2−λ).
    DouglasRachford { gamma: f64, lambda: Schedule },
    /// Primal-dual forward-backward-forward iteration;
    /// requires sup γ_n < 1/β with β = sqrt(Σ_I‖L_i‖²) + Σ_J μ_j‖L_j‖².
    FbfPrimalDual { gamma: Schedule },
    /// Forward-backward in a renormed primal-dual space; τ_n and σ_{i,n}
    /// nondecreasing with the step-size bound below 1 (validated).
    RenormedPrimalDual { tau: Schedule, sigmas: Vec<Schedule> },
    /// Projective splitting with per-term proximal parameters μ_{k,n} and
    /// relaxations λ_n ∈ (0, 2); terminates finitely when the affine
    /// separator degenerates.
    ProjectiveSplitting {
        gamma: Schedule,
        mus: Vec<Schedule>,
        lambda: Schedule,
    },
}

/// Full solver configuration.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub max_iters: usize,
    /// Relative iterate-change stopping tolerance; 0 disables early stopping
    /// and runs exactly `max_iters` iterations.
    pub tol: f64,
    /// Reserved for randomized variants; the shipped algorithms are
    /// deterministic.
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, max_iters: usize) -> Self {
        SolverConfig {
            algorithm,
            max_iters,
            tol: 0.0,
            seed: 0,
        }
    }
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    MaxIterations,
    ToleranceReached,
    /// Projective splitting detected an exact solution.
    FiniteTermination,
}

/// One trace row. `objective` is `None` when the objective is infinite at
/// the iterate; `dist_ref` is the raw distance to the supplied reference.
#[derive(Clone, Debug)]
pub struct TraceRecord {
    pub iter: usize,
    pub time_s: f64,
    pub objective: Option<f64>,
    pub dist_ref: Option<f64>,
}

/// Iterate stream summary: the per-iteration records (row 0 is the initial
/// point), the final iterate, and the last point produced by a prox of f
/// (always in dom f, used as the feasible solution estimate).
#[derive(Clone, Debug)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub final_iterate: Vector,
    pub final_feasible: Vector,
    pub reason: StopReason,
}

impl Trace {
    /// Serializes to CSV with columns `iter,time_s,objective,dist_ref_db`.
    ///
    /// The distance column is normalized to decibels against the
    /// initialization row, 20·log10(‖x_n − x‖/‖x_0 − x‖), and left empty
    /// when no reference was supplied (or the run started at the
    /// reference). Wall times are written only when `include_time` is set,
    /// since they vary across runs; the default keeps the bytes of the file
    /// a pure function of the inputs.
    pub fn write_csv<W: Write>(&self, mut w: W, include_time: bool) -> std::io::Result<()> {
        writeln!(w, "iter,time_s,objective,dist_ref_db")?;
        let base = self.records.first().and_then(|r| r.dist_ref);
        for r in &self.records {
            write!(w, "{},", r.iter)?;
            if include_time {
                write!(w, "{}", r.time_s)?;
            }
            match r.objective {
                Some(v) => write!(w, ",{v}")?,
                None => write!(w, ",inf")?,
            }
            match (base, r.dist_ref) {
                (Some(d0), Some(d)) if d0 > 0.0 => {
                    if d > 0.0 {
                        write!(w, ",{}", 20.0 * (d / d0).log10())?;
                    } else {
                        write!(w, ",-inf")?;
                    }
                }
                _ => write!(w, ",")?,
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn csv_string(&self, include_time: bool) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, include_time).expect("in-memory write");
        String::from_utf8(buf).expect("csv is utf8")
    }

    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    /// dist_ref of the record at the given iteration, in dB relative to the
    /// initialization row.
    pub fn dist_db_at(&self, iter: usize) -> Option<f64> {
        let base = self.records.first()?.dist_ref?;
        let d = self.records.get(iter)?.dist_ref?;
        if base > 0.0 && d > 0.0 {
            Some(20.0 * (d / base).log10())
        } else {
            None
        }
    }
}

/// Shared per-iteration bookkeeping: wall clock, objective, reference
/// distance, and the user callback.
pub(crate) struct Recorder<'a> {
    problem: &'a CompositeProblem,
    reference: Option<&'a Vector>,
    start: Instant,
    callback: &'a mut dyn FnMut(&TraceRecord, &Vector),
    pub records: Vec<TraceRecord>,
}

impl<'a> Recorder<'a> {
    pub fn new(
        problem: &'a CompositeProblem,
        reference: Option<&'a Vector>,
        callback: &'a mut dyn FnMut(&TraceRecord, &Vector),
    ) -> Self {
        Recorder {
            problem,
            reference,
            start: Instant::now(),
            callback,
            records: Vec::new(),
        }
    }

    pub fn record(&mut self, iter: usize, x: &Vector) -> Result<()> {
        let objective = self
            .problem
            .objective(x)?
            .filter(|v| v.is_finite());
        let rec = TraceRecord {
            iter,
            time_s: self.start.elapsed().as_secs_f64(),
            objective,
            dist_ref: self.reference.map(|r| x.dist(r)),
        };
        (self.callback)(&rec, x);
        self.records.push(rec);
        Ok(())
    }
}

/// Relative iterate-change stopping rule; `tol = 0` never stops early.
pub(crate) fn should_stop(tol: f64, x_prev: &Vector, x_next: &Vector) -> bool {
    tol > 0.0 && x_next.dist(x_prev) <= tol * (1.0 + x_prev.norm())
}

/// Runs the configured algorithm from `x0`, recording the distance to
/// `reference` when supplied. Dual variables, where applicable, start at 0.
pub fn run(
    problem: &CompositeProblem,
    config: &SolverConfig,
    x0: &Vector,
    reference: Option<&Vector>,
) -> Result<Trace> {
    run_with_callback(problem, config, x0, reference, |_, _| {})
}

/// [`run`] with a per-iteration callback receiving each record and a read
/// view of the iterate.
pub fn run_with_callback(
    problem: &CompositeProblem,
    config: &SolverConfig,
    x0: &Vector,
    reference: Option<&Vector>,
    mut callback: impl FnMut(&TraceRecord, &Vector),
) -> Result<Trace> {
    if x0.shape() != problem.shape() {
        return Err(Error::ShapeMismatch {
            expected: problem.shape().clone(),
            got: x0.shape().clone(),
        });
    }
    let opts = RunOptions {
        max_iters: config.max_iters,
        tol: config.tol,
        reference,
    };
    let cb: &mut dyn FnMut(&TraceRecord, &Vector) = &mut callback;
    match &config.algorithm {
        Algorithm::ForwardBackward { gamma } => forward_backward(problem, gamma, x0, &opts, cb),
        Algorithm::InertialForwardBackward { gamma, alpha } => {
            inertial_forward_backward(problem, *gamma, *alpha, x0, &opts, cb)
        }
        Algorithm::DouglasRachford { gamma, lambda } => {
            douglas_rachford(problem, *gamma, lambda, x0, &opts, cb)
        }
        Algorithm::FbfPrimalDual { gamma } => fbf_primal_dual(problem, gamma, x0, &opts, cb),
        Algorithm::RenormedPrimalDual { tau, sigmas } => {
            renormed_primal_dual(problem, tau, sigmas, x0, &opts, cb)
        }
        Algorithm::ProjectiveSplitting { gamma, mus, lambda } => {
            projective_splitting(problem, gamma, mus, lambda, x0, &opts, cb)
        }
    }
}

/// Options threaded through the algorithm entry points.
#[derive(Clone, Copy)]
pub struct RunOptions<'a> {
    pub max_iters: usize,
    pub tol: f64,
    pub reference: Option<&'a Vector>,
}

impl<'a> RunOptions<'a> {
    pub fn fixed(max_iters: usize) -> Self {
        RunOptions {
            max_iters,
            tol: 0.0,
            reference: None,
        }
    }
}
