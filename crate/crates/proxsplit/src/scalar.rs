//! One-dimensional convex functions with exact proximity operators.
//!
//! These are the scalar building blocks composed with distances, orthonormal
//! decompositions, and group norms by the [`crate::prox`] catalog. Values of
//! +∞ are represented by `None`, never by a floating-point infinity fed into
//! arithmetic.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Backing implementation for user-supplied smooth scalar functions.
///
/// The proximity operator of a custom function is computed by a guarded
/// Newton iteration on the monotone stationarity map p ↦ p + γφ'(p), so the
/// derivative must be available everywhere.
pub trait ScalarFunImpl: Send + Sync {
    fn value(&self, xi: f64) -> f64;
    fn derivative(&self, xi: f64) -> f64;
    /// Lipschitz constant of the derivative, when known.
    fn lipschitz(&self) -> Option<f64> {
        None
    }
}

#[derive(Clone)]
enum ScalarKind {
    Zero,
    Abs,
    /// ξ²/2.
    Square,
    Huber(f64),
    /// max(|ξ| − ε, 0).
    Vapnik(f64),
    SmoothVapnik { psi: Box<ScalarFun>, eps: f64 },
    /// ω|ξ| − ln(1 + ω|ξ|).
    Log(f64),
    /// Indicator of {0}.
    PointIndicator,
    /// φ(d_{[lo, hi]}(ξ)) for even convex φ.
    IntervalDist { phi: Box<ScalarFun>, lo: f64, hi: f64 },
    /// |ξ| + indicator of [lo, hi].
    AbsBox { lo: f64, hi: f64 },
    Scaled(f64, Box<ScalarFun>),
    Custom { imp: Arc<dyn ScalarFunImpl>, even: bool },
}

/// A convex lower semicontinuous function on the real line exposing value,
/// proximity operator, and (when smooth) derivative with a Lipschitz
/// constant.
#[derive(Clone)]
pub struct ScalarFun {
    kind: ScalarKind,
}

impl std::fmt::Debug for ScalarFun {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            ScalarKind::Zero => write!(f, "0"),
            ScalarKind::Abs => write!(f, "|.|"),
            ScalarKind::Square => write!(f, "q"),
            ScalarKind::Huber(r) => write!(f, "huber({r})"),
            ScalarKind::Vapnik(e) => write!(f, "vapnik({e})"),
            ScalarKind::SmoothVapnik { psi, eps } => write!(f, "{psi:?}∘vapnik({eps})"),
            ScalarKind::Log(w) => write!(f, "log({w})"),
            ScalarKind::PointIndicator => write!(f, "ind{{0}}"),
            ScalarKind::IntervalDist { phi, lo, hi } => {
                write!(f, "{phi:?}∘dist[{lo},{hi}]")
            }
            ScalarKind::AbsBox { lo, hi } => write!(f, "|.|+ind[{lo},{hi}]"),
            ScalarKind::Scaled(w, g) => write!(f, "{w}*{g:?}"),
            ScalarKind::Custom { .. } => write!(f, "custom"),
        }
    }
}

fn interval_distance(xi: f64, lo: f64, hi: f64) -> f64 {
    if xi < lo {
        lo - xi
    } else if xi > hi {
        xi - hi
    } else {
        0.0
    }
}

impl ScalarFun {
    pub fn zero() -> Self {
        ScalarFun {
            kind: ScalarKind::Zero,
        }
    }

    /// The absolute value; its prox is the soft threshold.
    pub fn abs() -> Self {
        ScalarFun {
            kind: ScalarKind::Abs,
        }
    }

    /// ξ ↦ ξ²/2.
    pub fn square() -> Self {
        ScalarFun {
            kind: ScalarKind::Square,
        }
    }

    /// The Huber function with threshold ρ: ξ²/2 inside [−ρ, ρ], affine
    /// continuation ρ|ξ| − ρ²/2 outside. Its derivative is 1-Lipschitz.
    pub fn huber(rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::invalid("huber requires rho > 0"));
        }
        Ok(ScalarFun {
            kind: ScalarKind::Huber(rho),
        })
    }

    /// The ε-insensitive loss max(|ξ| − ε, 0).
    pub fn vapnik(eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::invalid("vapnik requires eps > 0"));
        }
        Ok(ScalarFun {
            kind: ScalarKind::Vapnik(eps),
        })
    }

    /// ψ(max(|ξ| − ε, 0)) for even smooth convex ψ.
    pub fn smooth_vapnik(psi: ScalarFun, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::invalid("smooth vapnik requires eps > 0"));
        }
        if !psi.is_even() {
            return Err(Error::rejected("smooth vapnik requires an even psi"));
        }
        if psi.lipschitz().is_none() {
            return Err(Error::rejected(
                "smooth vapnik requires psi with Lipschitzian derivative",
            ));
        }
        Ok(ScalarFun {
            kind: ScalarKind::SmoothVapnik {
                psi: Box::new(psi),
                eps,
            },
        })
    }

    /// ξ ↦ ω|ξ| − ln(1 + ω|ξ|); its derivative is ω²-Lipschitz.
    pub fn log_penalty(omega: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::invalid("log penalty requires omega > 0"));
        }
        Ok(ScalarFun {
            kind: ScalarKind::Log(omega),
        })
    }

    /// Indicator of {0}; its prox collapses to 0.
    pub fn point_indicator() -> Self {
        ScalarFun {
            kind: ScalarKind::PointIndicator,
        }
    }

    /// φ(d_{[lo, hi]}(ξ)) for even convex φ. Endpoints may be infinite to
    /// describe half-lines (they are used in comparisons only).
    pub fn interval_dist(phi: ScalarFun, lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::invalid("interval requires lo <= hi"));
        }
        if !phi.is_even() {
            return Err(Error::rejected("interval distance requires an even phi"));
        }
        Ok(ScalarFun {
            kind: ScalarKind::IntervalDist {
                phi: Box::new(phi),
                lo,
                hi,
            },
        })
    }

    /// ½ d²_{[lo, hi]}; for [1, +∞) this is the squared hinge loss.
    pub fn square_dist(lo: f64, hi: f64) -> Result<Self> {
        ScalarFun::interval_dist(ScalarFun::square(), lo, hi)
    }

    /// |ξ| + indicator of [lo, hi]; its prox is the clamp of the soft
    /// threshold.
    pub fn abs_box(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::invalid("box requires lo <= hi"));
        }
        Ok(ScalarFun {
            kind: ScalarKind::AbsBox { lo, hi },
        })
    }

    /// w·φ for w > 0.
    pub fn scaled(weight: f64, inner: ScalarFun) -> Result<Self> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::invalid("scaling weight must be positive"));
        }
        Ok(ScalarFun {
            kind: ScalarKind::Scaled(weight, Box::new(inner)),
        })
    }

    /// Wraps a user-supplied smooth convex function. Evenness is probed by
    /// sampling at construction and cached.
    pub fn custom(imp: Arc<dyn ScalarFunImpl>) -> Self {
        let even = (0..20).all(|k| {
            let t = 0.1 * 1.7f64.powi(k);
            let (a, b) = (imp.value(t), imp.value(-t));
            (a - b).abs() <= 1e-9 * (1.0 + a.abs())
        });
        ScalarFun {
            kind: ScalarKind::Custom { imp, even },
        }
    }

    /// φ(ξ); `None` encodes +∞ (out of domain).
    pub fn value(&self, xi: f64) -> Option<f64> {
        match &self.kind {
            ScalarKind::Zero => Some(0.0),
            ScalarKind::Abs => Some(xi.abs()),
            ScalarKind::Square => Some(0.5 * xi * xi),
            ScalarKind::Huber(rho) => Some(if xi.abs() <= *rho {
                0.5 * xi * xi
            } else {
                rho * xi.abs() - 0.5 * rho * rho
            }),
            ScalarKind::Vapnik(eps) => Some((xi.abs() - eps).max(0.0)),
            ScalarKind::SmoothVapnik { psi, eps } => psi.value((xi.abs() - eps).max(0.0)),
            ScalarKind::Log(w) => {
                let t = w * xi.abs();
                Some(t - t.ln_1p())
            }
            ScalarKind::PointIndicator => (xi == 0.0).then_some(0.0),
            ScalarKind::IntervalDist { phi, lo, hi } => phi.value(interval_distance(xi, *lo, *hi)),
            ScalarKind::AbsBox { lo, hi } => (*lo..=*hi).contains(&xi).then(|| xi.abs()),
            ScalarKind::Scaled(w, g) => g.value(xi).map(|v| w * v),
            ScalarKind::Custom { imp, .. } => Some(imp.value(xi)),
        }
    }

    /// prox_{γφ}(ξ) = argmin_p φ(p) + (ξ − p)²/(2γ), for γ > 0.
    pub fn prox(&self, gamma: f64, xi: f64) -> f64 {
        debug_assert!(gamma > 0.0, "prox requires gamma > 0");
        match &self.kind {
            ScalarKind::Zero => xi,
            ScalarKind::Abs => soft_threshold(gamma, xi),
            ScalarKind::Square => xi / (1.0 + gamma),
            ScalarKind::Huber(rho) => {
                if xi.abs() <= (gamma + 1.0) * rho {
                    xi / (gamma + 1.0)
                } else {
                    xi - gamma * rho * xi.signum()
                }
            }
            ScalarKind::Vapnik(eps) => {
                let a = xi.abs();
                if a <= *eps {
                    xi
                } else if a <= eps + gamma {
                    eps * xi.signum()
                } else {
                    (a - gamma) * xi.signum()
                }
            }
            ScalarKind::SmoothVapnik { psi, eps } => {
                let a = xi.abs();
                if a <= *eps {
                    xi
                } else {
                    (eps + psi.prox(gamma, a - eps)) * xi.signum()
                }
            }
            ScalarKind::Log(w) => {
                if xi == 0.0 {
                    return 0.0;
                }
                let a = xi.abs();
                // Positive root of w p² + (1 + γw² − a w) p − a = 0, the
                // stationarity condition of the restriction to the ray.
                let b = 1.0 + gamma * w * w - a * w;
                let p = (-b + (b * b + 4.0 * w * a).sqrt()) / (2.0 * w);
                p.max(0.0) * xi.signum()
            }
            ScalarKind::PointIndicator => 0.0,
            ScalarKind::IntervalDist { phi, lo, hi } => {
                if xi > *hi {
                    hi + phi.prox(gamma, xi - hi)
                } else if xi < *lo {
                    lo - phi.prox(gamma, lo - xi)
                } else {
                    xi
                }
            }
            ScalarKind::AbsBox { lo, hi } => soft_threshold(gamma, xi).clamp(*lo, *hi),
            ScalarKind::Scaled(w, g) => g.prox(w * gamma, xi),
            ScalarKind::Custom { imp, .. } => newton_prox(imp.as_ref(), gamma, xi),
        }
    }

    /// φ'(ξ) when φ is differentiable everywhere, else `None`.
    pub fn derivative(&self, xi: f64) -> Option<f64> {
        match &self.kind {
            ScalarKind::Zero => Some(0.0),
            ScalarKind::Square => Some(xi),
            ScalarKind::Huber(rho) => Some(if xi.abs() <= *rho {
                xi
            } else {
                rho * xi.signum()
            }),
            ScalarKind::SmoothVapnik { psi, eps } => {
                let a = xi.abs();
                if a <= *eps {
                    Some(0.0)
                } else {
                    psi.derivative(a - eps).map(|d| d * xi.signum())
                }
            }
            ScalarKind::Log(w) => Some(w * w * xi / (1.0 + w * xi.abs())),
            ScalarKind::IntervalDist { phi, lo, hi } => {
                if xi > *hi {
                    phi.derivative(xi - hi)
                } else if xi < *lo {
                    phi.derivative(lo - xi).map(|d| -d)
                } else {
                    phi.derivative(0.0).map(|_| 0.0)
                }
            }
            ScalarKind::Scaled(w, g) => g.derivative(xi).map(|d| w * d),
            ScalarKind::Custom { imp, .. } => Some(imp.derivative(xi)),
            ScalarKind::Abs
            | ScalarKind::Vapnik(_)
            | ScalarKind::PointIndicator
            | ScalarKind::AbsBox { .. } => None,
        }
    }

    /// Lipschitz constant of the derivative, when the function is smooth
    /// with a Lipschitzian derivative.
    pub fn lipschitz(&self) -> Option<f64> {
        match &self.kind {
            ScalarKind::Zero => Some(0.0),
            ScalarKind::Square => Some(1.0),
            ScalarKind::Huber(_) => Some(1.0),
            ScalarKind::SmoothVapnik { psi, .. } => psi.lipschitz(),
            ScalarKind::Log(w) => Some(w * w),
            ScalarKind::IntervalDist { phi, .. } => phi.lipschitz(),
            ScalarKind::Scaled(w, g) => g.lipschitz().map(|l| w * l),
            ScalarKind::Custom { imp, .. } => imp.lipschitz(),
            ScalarKind::Abs
            | ScalarKind::Vapnik(_)
            | ScalarKind::PointIndicator
            | ScalarKind::AbsBox { .. } => None,
        }
    }

    pub fn is_even(&self) -> bool {
        match &self.kind {
            ScalarKind::Zero
            | ScalarKind::Abs
            | ScalarKind::Square
            | ScalarKind::Huber(_)
            | ScalarKind::Vapnik(_)
            | ScalarKind::SmoothVapnik { .. }
            | ScalarKind::Log(_)
            | ScalarKind::PointIndicator => true,
            ScalarKind::IntervalDist { lo, hi, .. } => {
                *lo == -*hi || (*lo == f64::NEG_INFINITY && *hi == f64::INFINITY)
            }
            ScalarKind::AbsBox { lo, hi } => *lo == -*hi,
            ScalarKind::Scaled(_, g) => g.is_even(),
            ScalarKind::Custom { even, .. } => *even,
        }
    }

    /// True when the function is finite on all of the real line.
    pub fn full_domain(&self) -> bool {
        match &self.kind {
            ScalarKind::PointIndicator | ScalarKind::AbsBox { .. } => false,
            ScalarKind::IntervalDist { phi, .. } => phi.full_domain(),
            ScalarKind::SmoothVapnik { psi, .. } => psi.full_domain(),
            ScalarKind::Scaled(_, g) => g.full_domain(),
            _ => true,
        }
    }

    /// True when the domain is known to be bounded.
    pub fn bounded_domain(&self) -> bool {
        match &self.kind {
            ScalarKind::PointIndicator => true,
            ScalarKind::AbsBox { lo, hi } => lo.is_finite() && hi.is_finite(),
            ScalarKind::Scaled(_, g) => g.bounded_domain(),
            _ => false,
        }
    }

    /// True when the function is the indicator of {0} (up to positive
    /// scaling), i.e. dom φ = {0}.
    pub fn is_point_indicator(&self) -> bool {
        match &self.kind {
            ScalarKind::PointIndicator => true,
            ScalarKind::Scaled(_, g) => g.is_point_indicator(),
            _ => false,
        }
    }

    /// True when φ vanishes at 0 and is strictly positive elsewhere, which
    /// the feasibility-relaxation penalties must satisfy.
    pub fn vanishes_only_at_zero(&self) -> bool {
        if self.value(0.0) != Some(0.0) {
            return false;
        }
        [1e-3, 0.1, 1.0, 10.0, 1e3].iter().all(|&t| {
            let pos = self.value(t).is_none_or(|v| v > 0.0);
            let neg = self.value(-t).is_none_or(|v| v > 0.0);
            pos && neg
        })
    }
}

/// Soft threshold on [−γ, γ].
pub fn soft_threshold(gamma: f64, xi: f64) -> f64 {
    xi.signum() * (xi.abs() - gamma).max(0.0)
}

/// Guarded Newton on the monotone map m(p) = p + γφ'(p): brackets the root
/// of m(p) = ξ by doubling, then mixes Newton steps with bisection.
fn newton_prox(imp: &dyn ScalarFunImpl, gamma: f64, xi: f64) -> f64 {
    let m = |p: f64| p + gamma * imp.derivative(p);
    let mut lo = xi;
    let mut hi = xi;
    let mut step = 1.0 + xi.abs() * 0.1;
    for _ in 0..200 {
        if m(lo) <= xi {
            break;
        }
        lo -= step;
        step *= 2.0;
    }
    step = 1.0 + xi.abs() * 0.1;
    for _ in 0..200 {
        if m(hi) >= xi {
            break;
        }
        hi += step;
        step *= 2.0;
    }
    let scale = 1.0 + xi.abs();
    let mut p = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = m(p) - xi;
        if f.abs() <= 1e-12 * scale {
            return p;
        }
        if f > 0.0 {
            hi = p;
        } else {
            lo = p;
        }
        // Derivative of m by central difference; fall back to bisection when
        // the Newton step leaves the bracket.
        let h = 1e-6 * scale;
        let dm = (m(p + h) - m(p - h)) / (2.0 * h);
        let newton = p - f / dm;
        p = if dm.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-14 * scale {
            return 0.5 * (lo + hi);
        }
    }
    p
}
