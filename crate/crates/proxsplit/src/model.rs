//! Composite minimization problems and the relaxation of convex
//! feasibility problems.

use crate::error::{Error, Result};
use crate::hilbert::{Op, Shape, Vector};
use crate::prox::ProxFun;
use crate::scalar::ScalarFun;
use crate::sets::ConvexSet;

/// A term g(L·) activated through its proximity operator.
#[derive(Clone, Debug)]
pub struct NonsmoothTerm {
    pub g: ProxFun,
    pub op: Op,
}

/// A term h(L·) with h smooth; the Lipschitz constant μ of ∇h comes from
/// `h.smoothness()`.
#[derive(Clone, Debug)]
pub struct SmoothTerm {
    pub h: ProxFun,
    pub op: Op,
}

/// minimize f(x) + Σ_{i∈I} g_i(L_i x) + Σ_{j∈J} h_j(L_j x).
///
/// Immutable after construction; all operators are nonzero and every smooth
/// term carries its Lipschitz constant.
#[derive(Clone, Debug)]
pub struct CompositeProblem {
    f: ProxFun,
    nonsmooth: Vec<NonsmoothTerm>,
    smooth: Vec<SmoothTerm>,
}

impl CompositeProblem {
    pub fn new(
        f: ProxFun,
        nonsmooth: Vec<NonsmoothTerm>,
        smooth: Vec<SmoothTerm>,
    ) -> Result<Self> {
        let shape = f.shape();
        for t in &nonsmooth {
            if t.op.in_shape() != shape {
                return Err(Error::ShapeMismatch {
                    expected: shape.clone(),
                    got: t.op.in_shape().clone(),
                });
            }
            if t.g.shape() != t.op.out_shape() {
                return Err(Error::ShapeMismatch {
                    expected: t.op.out_shape().clone(),
                    got: t.g.shape().clone(),
                });
            }
            if t.op.norm_bound() <= 0.0 {
                return Err(Error::invalid("operators must be nonzero"));
            }
        }
        for t in &smooth {
            if t.op.in_shape() != shape {
                return Err(Error::ShapeMismatch {
                    expected: shape.clone(),
                    got: t.op.in_shape().clone(),
                });
            }
            if t.h.shape() != t.op.out_shape() {
                return Err(Error::ShapeMismatch {
                    expected: t.op.out_shape().clone(),
                    got: t.h.shape().clone(),
                });
            }
            if t.op.norm_bound() <= 0.0 {
                return Err(Error::invalid("operators must be nonzero"));
            }
            if !t.h.is_smooth() {
                return Err(Error::rejected(
                    "smooth terms must carry a Lipschitz gradient constant",
                ));
            }
        }
        Ok(CompositeProblem {
            f,
            nonsmooth,
            smooth,
        })
    }

    /// Two-term problem f + h with h smooth.
    pub fn smooth_pair(f: ProxFun, h: ProxFun) -> Result<Self> {
        let id = Op::identity(f.shape().clone());
        CompositeProblem::new(f, Vec::new(), vec![SmoothTerm { h, op: id }])
    }

    /// Two-term problem f + g, g activated proximally.
    pub fn proximal_pair(f: ProxFun, g: ProxFun) -> Result<Self> {
        let id = Op::identity(f.shape().clone());
        CompositeProblem::new(f, vec![NonsmoothTerm { g, op: id }], Vec::new())
    }

    pub fn shape(&self) -> &Shape {
        self.f.shape()
    }

    pub fn f(&self) -> &ProxFun {
        &self.f
    }

    pub fn nonsmooth(&self) -> &[NonsmoothTerm] {
        &self.nonsmooth
    }

    pub fn smooth(&self) -> &[SmoothTerm] {
        &self.smooth
    }

    /// f(x) + Σ g_i(L_i x) + Σ h_j(L_j x); `None` when x ∉ dom f (or any
    /// term is infinite).
    pub fn objective(&self, x: &Vector) -> Result<Option<f64>> {
        let mut total = match self.f.value(x)? {
            Some(v) => v,
            None => return Ok(None),
        };
        for t in &self.nonsmooth {
            match t.g.value(&t.op.apply(x))? {
                Some(v) => total += v,
                None => return Ok(None),
            }
        }
        for t in &self.smooth {
            match t.h.value(&t.op.apply(x))? {
                Some(v) => total += v,
                None => return Ok(None),
            }
        }
        Ok(Some(total))
    }

    /// Gradient of the aggregated smooth part x ↦ Σ h_j(L_j x).
    pub fn smooth_gradient(&self, x: &Vector) -> Result<Vector> {
        let mut grad = Vector::zeros(self.shape().clone());
        for t in &self.smooth {
            let g = t.h.gradient(&t.op.apply(x))?;
            grad.axpy(1.0, &t.op.apply_adjoint(&g));
        }
        Ok(grad)
    }

    /// Lipschitz constant Σ μ_j ‖L_j‖² of the aggregated smooth gradient.
    pub fn smooth_beta(&self) -> f64 {
        self.smooth
            .iter()
            .map(|t| {
                let mu = t.h.smoothness().expect("validated smooth");
                mu * t.op.norm_bound() * t.op.norm_bound()
            })
            .sum()
    }

    /// The constant β = sqrt(Σ_I ‖L_i‖²) + Σ_J μ_j ‖L_j‖² governing the
    /// primal-dual step-size windows.
    pub fn primal_dual_beta(&self) -> f64 {
        let dual: f64 = self
            .nonsmooth
            .iter()
            .map(|t| t.op.norm_bound() * t.op.norm_bound())
            .sum();
        dual.sqrt() + self.smooth_beta()
    }
}

/// Convenience mirror of [`CompositeProblem::objective`].
pub fn objective(problem: &CompositeProblem, x: &Vector) -> Result<Option<f64>> {
    problem.objective(x)
}

/// Scalar penalty applied to the distance d_C(L·) of one relaxed constraint.
#[derive(Clone, Debug)]
pub enum Penalty {
    /// Hard constraint: the indicator of {0}, keeping the set exact.
    Indicator,
    /// d_C itself (nonsmooth, exact penalty).
    Abs,
    /// ½ d²_C (smooth least-squares penalty).
    Square,
    /// Huber blend with threshold ρ.
    Huber(f64),
    /// ε-insensitive penalty; `psi: None` is the nonsmooth hinge
    /// max(d − ε, 0), `Some(ψ)` the smooth variant ψ(max(d − ε, 0)).
    Vapnik { eps: f64, psi: Option<ScalarFun> },
    /// ω d − ln(1 + ω d).
    Log(f64),
    /// Any even scalar function vanishing only at 0.
    Custom(ScalarFun),
}

impl Penalty {
    fn to_scalar(&self) -> Result<ScalarFun> {
        Ok(match self {
            Penalty::Indicator => ScalarFun::point_indicator(),
            Penalty::Abs => ScalarFun::abs(),
            Penalty::Square => ScalarFun::square(),
            Penalty::Huber(rho) => ScalarFun::huber(*rho)?,
            Penalty::Vapnik { eps, psi } => match psi {
                Some(psi) => ScalarFun::smooth_vapnik(psi.clone(), *eps)?,
                None => ScalarFun::vapnik(*eps)?,
            },
            Penalty::Log(omega) => ScalarFun::log_penalty(*omega)?,
            Penalty::Custom(phi) => phi.clone(),
        })
    }
}

/// One relaxed constraint L x ∈ C with its penalty and weight.
#[derive(Clone, Debug)]
pub struct PenaltyTerm {
    pub set: ConvexSet,
    pub op: Op,
    pub penalty: Penalty,
    pub weight: f64,
}

/// Relaxation of the feasibility problem "find x ∈ E with L_k x ∈ C_k for
/// all k": minimize over E the sum of even penalties of the distances
/// d_{C_k}(L_k x). With all-indicator penalties this is the feasibility
/// problem itself; when the intersection is empty the minimizers balance the
/// constraint violations.
#[derive(Clone, Debug)]
pub struct FeasibilityRelaxation {
    shape: Shape,
    hard: Option<ConvexSet>,
    terms: Vec<PenaltyTerm>,
}

impl FeasibilityRelaxation {
    /// `hard: None` means E is the whole space.
    pub fn new(
        shape: Shape,
        hard: Option<ConvexSet>,
        terms: Vec<PenaltyTerm>,
    ) -> Result<Self> {
        if let Some(e) = &hard {
            if e.shape() != &shape {
                return Err(Error::ShapeMismatch {
                    expected: shape.clone(),
                    got: e.shape().clone(),
                });
            }
        }
        if terms.is_empty() {
            return Err(Error::invalid("relaxation needs at least one constraint"));
        }
        for t in &terms {
            if t.op.in_shape() != &shape {
                return Err(Error::ShapeMismatch {
                    expected: shape.clone(),
                    got: t.op.in_shape().clone(),
                });
            }
            if t.set.shape() != t.op.out_shape() {
                return Err(Error::ShapeMismatch {
                    expected: t.op.out_shape().clone(),
                    got: t.set.shape().clone(),
                });
            }
            if !(t.weight > 0.0) || !t.weight.is_finite() {
                return Err(Error::invalid("penalty weight must be positive"));
            }
            let phi = t.penalty.to_scalar()?;
            if !phi.is_even() {
                return Err(Error::rejected("relaxation penalties must be even"));
            }
            if !matches!(t.penalty, Penalty::Indicator) && !phi.vanishes_only_at_zero() {
                return Err(Error::rejected(
                    "relaxation penalties must vanish only at 0",
                ));
            }
        }
        Ok(FeasibilityRelaxation { shape, hard, terms })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn terms(&self) -> &[PenaltyTerm] {
        &self.terms
    }

    pub fn hard_set(&self) -> Option<&ConvexSet> {
        self.hard.as_ref()
    }

    /// Compiles to a composite problem: f = ι_E, indicator penalties become
    /// exact set indicators, smooth penalties go to the smooth block, the
    /// rest to the proximal block. Weights are folded into the scalar
    /// penalties.
    pub fn relax(&self) -> Result<CompositeProblem> {
        let f = match &self.hard {
            Some(e) => ProxFun::indicator(e.clone()),
            None => ProxFun::zero(self.shape.clone()),
        };
        let mut nonsmooth = Vec::new();
        let mut smooth = Vec::new();
        for t in &self.terms {
            if matches!(t.penalty, Penalty::Indicator) {
                nonsmooth.push(NonsmoothTerm {
                    g: ProxFun::indicator(t.set.clone()),
                    op: t.op.clone(),
                });
                continue;
            }
            let mut phi = t.penalty.to_scalar()?;
            if t.weight != 1.0 {
                phi = ScalarFun::scaled(t.weight, phi)?;
            }
            let smooth_phi = phi.lipschitz().is_some();
            let fun = ProxFun::dist_compose(phi, t.set.clone())?;
            if smooth_phi {
                smooth.push(SmoothTerm {
                    h: fun,
                    op: t.op.clone(),
                });
            } else {
                nonsmooth.push(NonsmoothTerm {
                    g: fun,
                    op: t.op.clone(),
                });
            }
        }
        CompositeProblem::new(f, nonsmooth, smooth)
    }

    /// Fully proximal compilation: every non-indicator penalty goes to the
    /// proximal block regardless of smoothness.
    pub fn relax_fully_proximal(&self) -> Result<CompositeProblem> {
        let p = self.relax()?;
        let mut nonsmooth = p.nonsmooth;
        for t in p.smooth {
            nonsmooth.push(NonsmoothTerm { g: t.h, op: t.op });
        }
        CompositeProblem::new(p.f, nonsmooth, Vec::new())
    }
}

/// Convenience mirror of [`FeasibilityRelaxation::relax`].
pub fn relax(spec: &FeasibilityRelaxation) -> Result<CompositeProblem> {
    spec.relax()
}

/// Outcome of the solution-existence advisory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QualificationReport {
    /// f has bounded domain and every other term is real-valued, which
    /// guarantees existence of a minimizer.
    SufficientConditionHolds,
    /// The sufficient condition could not be established structurally; the
    /// problem may still be well posed.
    Inconclusive,
}

impl std::fmt::Display for QualificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QualificationReport::SufficientConditionHolds => write!(
                f,
                "sufficient condition holds: f has bounded domain and all other terms are real-valued"
            ),
            QualificationReport::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Advisory check: reports whether f has bounded domain while all remaining
/// terms are finite everywhere. This is the sufficient existence condition
/// used by the shipped experiments; no general range condition is attempted.
pub fn check_qualification(problem: &CompositeProblem) -> QualificationReport {
    let f_bounded = problem.f().has_bounded_domain();
    let rest_real = problem.nonsmooth().iter().all(|t| t.g.is_real_valued())
        && problem.smooth().iter().all(|t| t.h.is_real_valued());
    if f_bounded && rest_real {
        QualificationReport::SufficientConditionHolds
    } else {
        QualificationReport::Inconclusive
    }
}
