// Guards of the form `!(x > 0.0)` deliberately reject NaN along with the
// out-of-window values; the negated comparison is the contract.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Matrix-free convex optimization toolkit.
//!
//! The crate provides, in order of dependency:
//!
//! * [`hilbert`] — vectors of finite-dimensional real Hilbert spaces and
//!   matrix-free linear operators with adjoints, including FFT-diagonalized
//!   circular convolutions and a solver for (Id + γΣαᵢLᵢ*PᵢLᵢ)x = b.
//! * [`sets`] — exact projectors onto the closed convex sets used in image
//!   recovery (boxes, hyperplanes, balls, coordinate subspaces, Fourier data
//!   and Fourier phase constraints).
//! * [`scalar`] — one-dimensional convex functions with closed-form proximity
//!   operators and a guarded-Newton fallback.
//! * [`prox`] — a catalog of convex function objects exposing value, exact
//!   proximity operator, and (when smooth) gradient with a Lipschitz
//!   constant: distance compositions, Huber and log penalties, separable and
//!   group penalties over orthonormal bases, Moreau envelopes, and quadratic
//!   subspace penalties.
//! * [`model`] — composite minimization problems mixing proximal and smooth
//!   terms through linear operators, and a penalty-based relaxation builder
//!   for (possibly inconsistent) convex feasibility problems.
//! * [`solvers`] — six proximal splitting algorithms (forward-backward,
//!   inertial forward-backward, Douglas-Rachford, primal-dual
//!   forward-backward-forward, a renormed primal-dual forward-backward
//!   iteration, and projective splitting) emitting per-iteration traces.
//! * [`oracles`] — independent verification oracles: brute-force proximity
//!   operators, finite-difference gradients, dense operator references.

pub mod error;
pub mod hilbert;
pub mod model;
pub mod oracles;
pub mod prox;
pub mod scalar;
pub mod sets;
pub mod solvers;

pub use error::{Error, Result};
pub use hilbert::{inner, Op, Shape, Vector};
pub use model::{CompositeProblem, FeasibilityRelaxation};
pub use prox::ProxFun;
pub use scalar::ScalarFun;
pub use sets::ConvexSet;
pub use solvers::{SolverConfig, Trace};
