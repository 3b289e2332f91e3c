//! Catalog of convex function objects with exact proximity operators.
//!
//! Every entry exposes its value (with an explicit out-of-domain flag for
//! +∞), its proximity operator prox_{γh} for any γ > 0, and, when the
//! function is smooth, its gradient together with a Lipschitz constant of
//! the gradient.

mod quadratic;

pub use quadratic::QuadraticTerm;
use quadratic::QuadraticTerms;

use crate::error::{Error, Result};
use crate::hilbert::{Op, Shape, Vector};
use crate::scalar::ScalarFun;
use crate::sets::{ConvexSet, MEMBERSHIP_TOL};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Backing implementation for user-supplied function objects.
pub trait ProxFunImpl: Send + Sync {
    fn shape(&self) -> Shape;
    /// `None` encodes +∞.
    fn value(&self, x: &Vector) -> Option<f64>;
    fn prox(&self, gamma: f64, x: &Vector) -> Vector;
    /// Lipschitz constant of the gradient, when smooth.
    fn smoothness(&self) -> Option<f64> {
        None
    }
    /// Must be provided when `smoothness` returns `Some`.
    fn gradient(&self, _x: &Vector) -> Option<Vector> {
        None
    }
}

#[derive(Clone)]
struct SemiOrthoTerm {
    phi: ScalarFun,
    set: ConvexSet,
    m: Op,
    theta: f64,
}

#[derive(Clone)]
enum ProxKind {
    Zero,
    Indicator(ConvexSet),
    SeparableUniform(ScalarFun),
    Separable(Arc<Vec<ScalarFun>>),
    Group(ScalarFun),
    DistCompose { phi: ScalarFun, set: ConvexSet },
    SemiOrtho(Box<SemiOrthoTerm>),
    Quadratic(Box<QuadraticTerms>),
    MoreauEnvelope { g: Box<ProxFun>, beta: f64 },
    AntiEnvelope { phi: Box<ProxFun>, beta: f64 },
    PointwiseDist { phi: ScalarFun, set: ConvexSet, weights: Arc<Vec<f64>> },
    RowsDistance { target: Vector, rows: Arc<Vec<bool>> },
    Scaled { weight: f64, inner: Box<ProxFun> },
    Custom(Arc<dyn ProxFunImpl>),
}

/// A proper lower semicontinuous convex function with a computable proximity
/// operator. Immutable and shareable; prox and gradient calls are pure.
#[derive(Clone)]
pub struct ProxFun {
    shape: Shape,
    kind: ProxKind,
}

impl std::fmt::Debug for ProxFun {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match &self.kind {
            ProxKind::Zero => "Zero".into(),
            ProxKind::Indicator(_) => "Indicator".into(),
            ProxKind::SeparableUniform(p) => format!("Separable({p:?})"),
            ProxKind::Separable(_) => "Separable(per-coordinate)".into(),
            ProxKind::Group(p) => format!("Group({p:?})"),
            ProxKind::DistCompose { phi, .. } => format!("DistCompose({phi:?})"),
            ProxKind::SemiOrtho(t) => {
                format!("SemiOrtho({:?}, theta={})", t.phi, t.theta)
            }
            ProxKind::Quadratic(_) => "Quadratic".into(),
            ProxKind::MoreauEnvelope { beta, .. } => format!("MoreauEnvelope(beta={beta})"),
            ProxKind::AntiEnvelope { beta, .. } => format!("AntiEnvelope(beta={beta})"),
            ProxKind::PointwiseDist { phi, .. } => format!("PointwiseDist({phi:?})"),
            ProxKind::RowsDistance { .. } => "RowsDistance".into(),
            ProxKind::Scaled { weight, inner } => format!("{weight}*{inner:?}"),
            ProxKind::Custom(_) => "Custom".into(),
        };
        write!(f, "ProxFun::{name} on {}", self.shape)
    }
}

impl ProxFun {
    // ----- constructors -------------------------------------------------

    /// The zero function; its prox is the identity.
    pub fn zero(shape: Shape) -> Self {
        ProxFun {
            shape,
            kind: ProxKind::Zero,
        }
    }

    /// Indicator of a closed convex set; its prox is the projection.
    pub fn indicator(set: ConvexSet) -> Self {
        ProxFun {
            shape: set.shape().clone(),
            kind: ProxKind::Indicator(set),
        }
    }

    /// h(x) = Σ_k φ(⟨x, e_k⟩) in the canonical basis, one φ for all
    /// coordinates.
    pub fn separable_uniform(shape: Shape, phi: ScalarFun) -> Self {
        ProxFun {
            shape,
            kind: ProxKind::SeparableUniform(phi),
        }
    }

    /// h(x) = Σ_k φ_k(⟨x, e_k⟩) in the canonical basis.
    pub fn separable_basis(shape: Shape, phis: Vec<ScalarFun>) -> Result<Self> {
        if phis.len() != shape.len() {
            return Err(Error::invalid(
                "separable family length does not match shape",
            ));
        }
        Ok(ProxFun {
            shape,
            kind: ProxKind::Separable(Arc::new(phis)),
        })
    }

    /// The ℓ1 norm.
    pub fn l1(shape: Shape) -> Self {
        ProxFun::separable_uniform(shape, ScalarFun::abs())
    }

    /// h(x_1,…,x_M) = Σ_k φ(‖(⟨x_1,e_k⟩,…,⟨x_M,e_k⟩)‖₂) over a product of M
    /// equal-length blocks; φ = |·| gives the ‖·‖_{1,2} group norm.
    pub fn group_basis(shape: Shape, phi: ScalarFun) -> Result<Self> {
        let blocks = shape.blocks();
        if blocks.is_empty() {
            return Err(Error::invalid("group penalty needs at least one block"));
        }
        let len = blocks[0].len();
        if blocks.iter().any(|b| b.len() != len) {
            return Err(Error::invalid("group penalty requires equal-length blocks"));
        }
        if !phi.is_even() {
            return Err(Error::rejected("group penalty requires an even phi"));
        }
        Ok(ProxFun {
            shape,
            kind: ProxKind::Group(phi),
        })
    }

    /// h = φ ∘ d_C for even convex φ. When φ is smooth so is h, with the
    /// same Lipschitz modulus; when dom φ = {0} the function degenerates to
    /// the indicator of C and the prox to the projection.
    pub fn dist_compose(phi: ScalarFun, set: ConvexSet) -> Result<Self> {
        if !phi.is_even() {
            return Err(Error::rejected(
                "distance composition requires an even phi",
            ));
        }
        if phi.is_point_indicator() {
            // dom phi = {0}: phi ∘ d_C is the indicator of C.
            return Ok(ProxFun::indicator(set));
        }
        Ok(ProxFun {
            shape: set.shape().clone(),
            kind: ProxKind::DistCompose { phi, set },
        })
    }

    /// Smooth abstract Vapnik loss h = ψ ∘ max(d_C − ε, 0): flat inside the
    /// ε-enlargement of C, ψ-penalized outside.
    pub fn vapnik_smooth(psi: ScalarFun, eps: f64, set: ConvexSet) -> Result<Self> {
        ProxFun::dist_compose(ScalarFun::smooth_vapnik(psi, eps)?, set)
    }

    /// Abstract Huber penalty of the distance to C: quadratic within ρ,
    /// linear growth beyond; the gradient is nonexpansive (β = 1).
    pub fn huber_dist(rho: f64, set: ConvexSet) -> Result<Self> {
        ProxFun::dist_compose(ScalarFun::huber(rho)?, set)
    }

    /// h = ω d_C − ln(1 + ω d_C), smooth with β = ω².
    pub fn log_dist(omega: f64, set: ConvexSet) -> Result<Self> {
        ProxFun::dist_compose(ScalarFun::log_penalty(omega)?, set)
    }

    /// h = φ ∘ d_D ∘ M for a semi-orthogonal M (MM* = θ Id); the identity is
    /// probed by a randomized test at construction.
    pub fn semiorthogonal_compose(
        phi: ScalarFun,
        set: ConvexSet,
        m: Op,
        theta: f64,
    ) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::invalid("semi-orthogonality requires theta > 0"));
        }
        if !phi.is_even() {
            return Err(Error::rejected("distance composition requires an even phi"));
        }
        if m.out_shape() != set.shape() {
            return Err(Error::ShapeMismatch {
                expected: set.shape().clone(),
                got: m.out_shape().clone(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed5eed);
        for _ in 0..5 {
            let y = Vector::from_fn(m.out_shape().clone(), |_| rng.random_range(-1.0..1.0));
            let mmy = m.apply(&m.apply_adjoint(&y));
            let residual = mmy.sub(&y.scaled(theta)).norm();
            if residual > 1e-8 * (1.0 + theta) * (1.0 + y.norm()) {
                return Err(Error::rejected(format!(
                    "MM* deviates from theta*Id by {residual:.3e}"
                )));
            }
        }
        Ok(ProxFun {
            shape: m.in_shape().clone(),
            kind: ProxKind::SemiOrtho(Box::new(SemiOrthoTerm {
                phi,
                set,
                m,
                theta,
            })),
        })
    }

    /// h(x) = ½ Σ αᵢ d²_{Vᵢ}(Lᵢ x − rᵢ): affine gradient, prox by one linear
    /// solve (frequency-domain division when every Lᵢ is a convolution and
    /// Vᵢ = {0}, conjugate gradient otherwise).
    pub fn quadratic_subspace(shape: Shape, terms: Vec<QuadraticTerm>) -> Result<Self> {
        let q = QuadraticTerms::new(&shape, terms)?;
        Ok(ProxFun {
            shape,
            kind: ProxKind::Quadratic(Box::new(q)),
        })
    }

    /// c·‖L x − y‖² as a quadratic penalty (α = 2c).
    pub fn least_squares(weight: f64, op: Op, target: Vector) -> Result<Self> {
        if !(weight > 0.0) {
            return Err(Error::invalid("least squares requires weight > 0"));
        }
        let shape = op.in_shape().clone();
        ProxFun::quadratic_subspace(
            shape,
            vec![QuadraticTerm {
                alpha: 2.0 * weight,
                op,
                subspace_projector: None,
                target,
            }],
        )
    }

    /// The infimal convolution h = g □ (βq): the Moreau-type smoothing of g
    /// with modulus β.
    pub fn moreau_infconv(g: ProxFun, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::invalid("inf-convolution requires beta > 0"));
        }
        Ok(ProxFun {
            shape: g.shape.clone(),
            kind: ProxKind::MoreauEnvelope {
                g: Box::new(g),
                beta,
            },
        })
    }

    /// h = βq − (βq) □ φ; for φ the indicator of [−ρ, ρ] and β = 1 this is
    /// the standard Huber function.
    pub fn antienvelope(phi: ProxFun, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::invalid("antienvelope requires beta > 0"));
        }
        Ok(ProxFun {
            shape: phi.shape.clone(),
            kind: ProxKind::AntiEnvelope {
                phi: Box::new(phi),
                beta,
            },
        })
    }

    /// Finite weighted-sum discretization of an integral penalty:
    /// h(x) = Σ_ω w_ω φ(d_C(x_ω)) over the blocks of a product space; the
    /// prox applies the distance-composition formula pointwise with index
    /// γ·w_ω.
    pub fn integral_discretized(
        phi: ScalarFun,
        set: ConvexSet,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("discretization needs at least one point"));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("discretization weights must be positive"));
        }
        if !phi.is_even() {
            return Err(Error::rejected("distance composition requires an even phi"));
        }
        let shape = Shape::repeated(set.shape().clone(), weights.len());
        Ok(ProxFun {
            shape,
            kind: ProxKind::PointwiseDist {
                phi,
                set,
                weights: Arc::new(weights),
            },
        })
    }

    /// Σ_{i∈R} ‖x^(i) − y^(i)‖₂ over the rows of a grid: zero on unflagged
    /// rows, Euclidean distance to the target row elsewhere.
    pub fn rows_distance(target: Vector, rows: Vec<bool>) -> Result<Self> {
        let (h, _) = target
            .shape()
            .grid_dims()
            .ok_or_else(|| Error::invalid("row penalty requires a grid target"))?;
        if rows.len() != h {
            return Err(Error::invalid("row flags do not match grid height"));
        }
        Ok(ProxFun {
            shape: target.shape().clone(),
            kind: ProxKind::RowsDistance {
                target,
                rows: Arc::new(rows),
            },
        })
    }

    /// w·h for w > 0.
    pub fn scaled(weight: f64, inner: ProxFun) -> Result<Self> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::invalid("scaling weight must be positive"));
        }
        Ok(ProxFun {
            shape: inner.shape.clone(),
            kind: ProxKind::Scaled {
                weight,
                inner: Box::new(inner),
            },
        })
    }

    pub fn custom(imp: Arc<dyn ProxFunImpl>) -> Self {
        ProxFun {
            shape: imp.shape(),
            kind: ProxKind::Custom(imp),
        }
    }

    // ----- evaluation ---------------------------------------------------

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    fn check(&self, x: &Vector, what: &str) {
        assert_eq!(
            x.shape(),
            &self.shape,
            "{what}: function lives on {}, got {}",
            self.shape,
            x.shape()
        );
    }

    /// h(x); `Ok(None)` encodes +∞ (x outside the domain).
    pub fn value(&self, x: &Vector) -> Result<Option<f64>> {
        self.check(x, "value");
        match &self.kind {
            ProxKind::Zero => Ok(Some(0.0)),
            ProxKind::Indicator(set) => {
                Ok(set.contains(x, MEMBERSHIP_TOL).then_some(0.0))
            }
            ProxKind::SeparableUniform(phi) => {
                let mut total = 0.0;
                for &v in x.as_slice() {
                    match phi.value(v) {
                        Some(t) => total += t,
                        None => return Ok(None),
                    }
                }
                Ok(Some(total))
            }
            ProxKind::Separable(phis) => {
                let mut total = 0.0;
                for (&v, phi) in x.as_slice().iter().zip(phis.iter()) {
                    match phi.value(v) {
                        Some(t) => total += t,
                        None => return Ok(None),
                    }
                }
                Ok(Some(total))
            }
            ProxKind::Group(phi) => {
                let mut total = 0.0;
                for norm in column_norms(x) {
                    match phi.value(norm) {
                        Some(t) => total += t,
                        None => return Ok(None),
                    }
                }
                Ok(Some(total))
            }
            ProxKind::DistCompose { phi, set } => Ok(phi.value(set.distance(x))),
            ProxKind::SemiOrtho(t) => Ok(t.phi.value(t.set.distance(&t.m.apply(x)))),
            ProxKind::Quadratic(q) => Ok(Some(q.value(x))),
            ProxKind::MoreauEnvelope { g, beta } => {
                let p = g.prox(1.0 / beta, x)?;
                // p lies in dom g by construction; a None can only be an
                // indicator boundary at tolerance level, where the value is 0.
                let gv = g.value(&p)?.unwrap_or(0.0);
                Ok(Some(gv + 0.5 * beta * x.dist(&p).powi(2)))
            }
            ProxKind::AntiEnvelope { phi, beta } => {
                let p = phi.prox(1.0 / beta, x)?;
                let pv = phi.value(&p)?.unwrap_or(0.0);
                let envelope = pv + 0.5 * beta * x.dist(&p).powi(2);
                Ok(Some(0.5 * beta * x.norm_sq() - envelope))
            }
            ProxKind::PointwiseDist { phi, set, weights } => {
                let mut total = 0.0;
                for (i, &w) in weights.iter().enumerate() {
                    let block = x.block_vector(i);
                    match phi.value(set.distance(&block)) {
                        Some(t) => total += w * t,
                        None => return Ok(None),
                    }
                }
                Ok(Some(total))
            }
            ProxKind::RowsDistance { target, rows } => {
                let (_, w) = self.shape.grid_dims().expect("grid shape");
                let mut total = 0.0;
                for (i, &flag) in rows.iter().enumerate() {
                    if flag {
                        let xs = &x.as_slice()[i * w..(i + 1) * w];
                        let ys = &target.as_slice()[i * w..(i + 1) * w];
                        total += xs
                            .iter()
                            .zip(ys)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                            .sqrt();
                    }
                }
                Ok(Some(total))
            }
            ProxKind::Scaled { weight, inner } => {
                Ok(inner.value(x)?.map(|v| weight * v))
            }
            ProxKind::Custom(imp) => Ok(imp.value(x)),
        }
    }

    /// prox_{γh}(x) = argmin_y h(y) + ‖x − y‖²/(2γ), for γ > 0.
    pub fn prox(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        self.check(x, "prox");
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::invalid("prox requires gamma > 0"));
        }
        match &self.kind {
            ProxKind::Zero => Ok(x.clone()),
            ProxKind::Indicator(set) => Ok(set.project(x)),
            ProxKind::SeparableUniform(phi) => Ok(x.map(|v| phi.prox(gamma, v))),
            ProxKind::Separable(phis) => Ok(Vector::from_parts(
                x.as_slice()
                    .iter()
                    .zip(phis.iter())
                    .map(|(&v, phi)| phi.prox(gamma, v))
                    .collect(),
                self.shape.clone(),
            )),
            ProxKind::Group(phi) => {
                // Per-column shrinkage: δ_k = prox_{γφ}(ν_k)/ν_k, δ_k = 1 on
                // zero columns.
                let deltas: Vec<f64> = column_norms(x)
                    .into_iter()
                    .map(|norm| {
                        if norm > 0.0 {
                            phi.prox(gamma, norm) / norm
                        } else {
                            1.0
                        }
                    })
                    .collect();
                Ok(scale_columns(x, &deltas))
            }
            ProxKind::DistCompose { phi, set } => {
                let (p, d) = set.project_with_distance(x);
                if d == 0.0 {
                    return Ok(x.clone());
                }
                let coef = phi.prox(gamma, d) / d;
                Ok(p.lincomb(1.0 - coef, coef, x))
            }
            ProxKind::SemiOrtho(t) => {
                let mx = t.m.apply(x);
                let (p, d) = t.set.project_with_distance(&mx);
                if d == 0.0 {
                    return Ok(x.clone());
                }
                let shrunk = t.phi.prox(gamma * t.theta, d);
                let coef = (d - shrunk) / (t.theta * d);
                let mut out = x.clone();
                out.axpy(coef, &t.m.apply_adjoint(&p.sub(&mx)));
                Ok(out)
            }
            ProxKind::Quadratic(q) => q.prox(gamma, x),
            ProxKind::MoreauEnvelope { g, beta } => {
                let lambda = (gamma * beta + 1.0) / beta;
                let inner = g.prox(lambda, x)?;
                let t = gamma * beta / (gamma * beta + 1.0);
                Ok(x.lincomb(1.0 - t, t, &inner))
            }
            ProxKind::AntiEnvelope { phi, beta } => {
                let denom = 1.0 + beta * gamma;
                let inner = phi.prox(1.0 / (beta * denom), &x.scaled(1.0 / denom))?;
                let mut out = x.clone();
                out.axpy(-beta * gamma, &inner);
                Ok(out)
            }
            ProxKind::PointwiseDist { phi, set, weights } => {
                let mut parts = Vec::with_capacity(weights.len());
                for (i, &w) in weights.iter().enumerate() {
                    let block = x.block_vector(i);
                    let (p, d) = set.project_with_distance(&block);
                    if d == 0.0 {
                        parts.push(block);
                    } else {
                        let coef = phi.prox(gamma * w, d) / d;
                        parts.push(p.lincomb(1.0 - coef, coef, &block));
                    }
                }
                Ok(Vector::concat(&parts).reshaped(self.shape.clone())?)
            }
            ProxKind::RowsDistance { target, rows } => {
                let (_, w) = self.shape.grid_dims().expect("grid shape");
                let mut out = x.as_slice().to_vec();
                for (i, &flag) in rows.iter().enumerate() {
                    if !flag {
                        continue;
                    }
                    let range = i * w..(i + 1) * w;
                    let ys = &target.as_slice()[range.clone()];
                    let norm: f64 = out[range.clone()]
                        .iter()
                        .zip(ys)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    let keep = 1.0 - gamma / norm.max(gamma);
                    for (o, &y) in out[range].iter_mut().zip(ys) {
                        *o = y + keep * (*o - y);
                    }
                }
                Ok(Vector::from_parts(out, self.shape.clone()))
            }
            ProxKind::Scaled { weight, inner } => inner.prox(weight * gamma, x),
            ProxKind::Custom(imp) => Ok(imp.prox(gamma, x)),
        }
    }

    /// Lipschitz constant of the gradient, when the function is smooth.
    pub fn smoothness(&self) -> Option<f64> {
        match &self.kind {
            ProxKind::Zero => Some(0.0),
            ProxKind::Indicator(_) => None,
            ProxKind::SeparableUniform(phi) => phi.lipschitz(),
            ProxKind::Separable(phis) => {
                let mut beta = 0.0f64;
                for phi in phis.iter() {
                    beta = beta.max(phi.lipschitz()?);
                }
                Some(beta)
            }
            ProxKind::Group(phi) => phi.lipschitz(),
            ProxKind::DistCompose { phi, .. } => phi.lipschitz(),
            ProxKind::SemiOrtho(t) => t.phi.lipschitz().map(|l| l * t.theta),
            ProxKind::Quadratic(q) => Some(q.beta()),
            ProxKind::MoreauEnvelope { beta, .. } => Some(*beta),
            ProxKind::AntiEnvelope { beta, .. } => Some(*beta),
            ProxKind::PointwiseDist { phi, weights, .. } => {
                let wmax = weights.iter().copied().fold(0.0, f64::max);
                phi.lipschitz().map(|l| l * wmax)
            }
            ProxKind::RowsDistance { .. } => None,
            ProxKind::Scaled { weight, inner } => inner.smoothness().map(|b| weight * b),
            ProxKind::Custom(imp) => imp.smoothness(),
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.smoothness().is_some()
    }

    /// True when the function is known to be finite everywhere (conservative
    /// for custom implementations).
    pub fn is_real_valued(&self) -> bool {
        match &self.kind {
            ProxKind::Zero
            | ProxKind::Quadratic(_)
            | ProxKind::MoreauEnvelope { .. }
            | ProxKind::AntiEnvelope { .. }
            | ProxKind::RowsDistance { .. } => true,
            ProxKind::Indicator(_) => false,
            ProxKind::SeparableUniform(phi) | ProxKind::Group(phi) => phi.full_domain(),
            ProxKind::Separable(phis) => phis.iter().all(ScalarFun::full_domain),
            ProxKind::DistCompose { phi, .. } | ProxKind::PointwiseDist { phi, .. } => {
                phi.full_domain()
            }
            ProxKind::SemiOrtho(t) => t.phi.full_domain(),
            ProxKind::Scaled { inner, .. } => inner.is_real_valued(),
            ProxKind::Custom(_) => false,
        }
    }

    /// True when the domain is known to be bounded (conservative).
    pub fn has_bounded_domain(&self) -> bool {
        match &self.kind {
            ProxKind::Indicator(set) => set.is_bounded(),
            ProxKind::SeparableUniform(phi) => phi.bounded_domain(),
            ProxKind::Separable(phis) => phis.iter().all(ScalarFun::bounded_domain),
            ProxKind::Scaled { inner, .. } => inner.has_bounded_domain(),
            _ => false,
        }
    }

    /// ∇h(x). Panics when the function is not smooth; see [`Self::smoothness`].
    pub fn gradient(&self, x: &Vector) -> Result<Vector> {
        self.check(x, "gradient");
        assert!(
            self.is_smooth(),
            "gradient requested from a nonsmooth function: {self:?}"
        );
        match &self.kind {
            ProxKind::Zero => Ok(Vector::zeros(self.shape.clone())),
            ProxKind::SeparableUniform(phi) => {
                Ok(x.map(|v| phi.derivative(v).expect("smooth scalar")))
            }
            ProxKind::Separable(phis) => Ok(Vector::from_parts(
                x.as_slice()
                    .iter()
                    .zip(phis.iter())
                    .map(|(&v, phi)| phi.derivative(v).expect("smooth scalar"))
                    .collect(),
                self.shape.clone(),
            )),
            ProxKind::Group(phi) => {
                let alphas: Vec<f64> = column_norms(x)
                    .into_iter()
                    .map(|norm| {
                        if norm > 0.0 {
                            phi.derivative(norm).expect("smooth scalar") / norm
                        } else {
                            0.0
                        }
                    })
                    .collect();
                Ok(scale_columns(x, &alphas))
            }
            ProxKind::DistCompose { phi, set } => {
                let (p, d) = set.project_with_distance(x);
                if d == 0.0 {
                    return Ok(Vector::zeros(self.shape.clone()));
                }
                let coef = phi.derivative(d).expect("smooth scalar") / d;
                Ok(x.sub(&p).scaled(coef))
            }
            ProxKind::SemiOrtho(t) => {
                let mx = t.m.apply(x);
                let (p, d) = t.set.project_with_distance(&mx);
                if d == 0.0 {
                    return Ok(Vector::zeros(self.shape.clone()));
                }
                let coef = t.phi.derivative(d).expect("smooth scalar") / d;
                Ok(t.m.apply_adjoint(&mx.sub(&p)).scaled(coef))
            }
            ProxKind::Quadratic(q) => Ok(q.gradient(x)),
            ProxKind::MoreauEnvelope { g, beta } => {
                let p = g.prox(1.0 / beta, x)?;
                Ok(x.sub(&p).scaled(*beta))
            }
            ProxKind::AntiEnvelope { phi, beta } => {
                Ok(phi.prox(1.0 / beta, x)?.scaled(*beta))
            }
            ProxKind::PointwiseDist { phi, set, weights } => {
                let mut parts = Vec::with_capacity(weights.len());
                for (i, &w) in weights.iter().enumerate() {
                    let block = x.block_vector(i);
                    let (p, d) = set.project_with_distance(&block);
                    if d == 0.0 {
                        parts.push(Vector::zeros(block.shape().clone()));
                    } else {
                        let coef = w * phi.derivative(d).expect("smooth scalar") / d;
                        parts.push(block.sub(&p).scaled(coef));
                    }
                }
                Ok(Vector::concat(&parts).reshaped(self.shape.clone())?)
            }
            ProxKind::Scaled { weight, inner } => Ok(inner.gradient(x)?.scaled(*weight)),
            ProxKind::Custom(imp) => Ok(imp
                .gradient(x)
                .expect("custom function declared smooth must provide a gradient")),
            ProxKind::Indicator(_) | ProxKind::RowsDistance { .. } => {
                unreachable!("guarded by smoothness assert")
            }
        }
    }
}

/// Norms of the per-index columns across the equal-length blocks of a
/// product-space vector.
fn column_norms(x: &Vector) -> Vec<f64> {
    let ranges = x.shape().block_ranges();
    let len = ranges[0].len();
    let data = x.as_slice();
    (0..len)
        .map(|k| {
            ranges
                .iter()
                .map(|r| {
                    let v = data[r.start + k];
                    v * v
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Multiplies column k of every block by factors[k].
fn scale_columns(x: &Vector, factors: &[f64]) -> Vector {
    let ranges = x.shape().block_ranges();
    let mut out = x.as_slice().to_vec();
    for r in ranges {
        for (k, &f) in factors.iter().enumerate() {
            out[r.start + k] *= f;
        }
    }
    Vector::from_parts(out, x.shape().clone())
}
