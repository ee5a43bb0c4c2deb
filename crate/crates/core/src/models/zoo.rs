//! Closed-form diffusions: Brownian motion with drift and Bessel processes.

use super::classify::classify_endpoint;
use super::expr::Expr;
use super::function::RealFunction;
use super::spec::{BoundaryKind, DiffusionSpec, EndpointClass, ExtReal, Side};
use crate::error::{Error, Result};
use crate::specialfn::{hyp0f1_ratio, k_ratio};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    /// ∓1: the sign that makes the branch's quantities positive.
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => -1.0,
            Branch::Minus => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(Error::Validation(format!("unknown branch '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroBoundary {
    Killing,
    Reflecting,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZooModel {
    BrownianDrift { mu: f64, x0: f64 },
    Bessel { p: f64, zero: ZeroBoundary, x0: f64 },
}

impl ZooModel {
    pub fn brownian(mu: f64) -> Self {
        ZooModel::BrownianDrift { mu, x0: 0.0 }
    }

    pub fn bessel(p: f64) -> Self {
        ZooModel::Bessel {
            p,
            zero: ZeroBoundary::None,
            x0: 1.0,
        }
    }

    pub fn with_start(self, x0: f64) -> Self {
        match self {
            ZooModel::BrownianDrift { mu, .. } => ZooModel::BrownianDrift { mu, x0 },
            ZooModel::Bessel { p, zero, .. } => ZooModel::Bessel { p, zero, x0 },
        }
    }

    pub fn with_zero(self, zero: ZeroBoundary) -> Self {
        match self {
            ZooModel::Bessel { p, x0, .. } => ZooModel::Bessel { p, zero, x0 },
            other => other,
        }
    }

    pub fn x0(&self) -> f64 {
        match *self {
            ZooModel::BrownianDrift { x0, .. } | ZooModel::Bessel { x0, .. } => x0,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ZooModel::BrownianDrift { mu, .. } => format!("BM(mu={mu})"),
            ZooModel::Bessel { p, zero, .. } => match zero {
                ZeroBoundary::None => format!("BES({p})"),
                ZeroBoundary::Killing => format!("BES({p}), 0 killing"),
                ZeroBoundary::Reflecting => format!("BES({p}), 0 reflecting"),
            },
        }
    }

    /// The induced diffusion. For Bessel processes the nature of 0 comes
    /// from the boundary integrals: a killing or reflecting rule may only
    /// be attached when 0 is non-singular, and `None` only when it is not.
    pub fn spec(&self) -> Result<DiffusionSpec> {
        match *self {
            ZooModel::BrownianDrift { mu, x0 } => {
                if !mu.is_finite() {
                    return Err(Error::Domain(format!("drift {mu} is not finite")));
                }
                DiffusionSpec::new(
                    ExtReal::NegInf,
                    ExtReal::PosInf,
                    RealFunction::constant(1.0),
                    RealFunction::constant(mu),
                    x0,
                    BoundaryKind::Natural,
                    BoundaryKind::Natural,
                    self.label(),
                )
            }
            ZooModel::Bessel { p, zero, x0 } => {
                if !p.is_finite() || p.abs() > 50.0 {
                    return Err(Error::Domain(format!("Bessel parameter {p} out of range")));
                }
                let wprime = RealFunction::expr(Expr::monomial(p + 0.5, -1));
                let probe = DiffusionSpec {
                    l: ExtReal::Finite(0.0),
                    r: ExtReal::PosInf,
                    a: RealFunction::constant(1.0),
                    wprime: wprime.clone(),
                    x0: if x0 > 0.0 { x0 } else { 1.0 },
                    left: BoundaryKind::Natural,
                    right: BoundaryKind::Natural,
                    label: self.label(),
                };
                let class0 = classify_endpoint(&probe, Side::Left)?;
                let class_inf = classify_endpoint(&probe, Side::Right)?;
                let left = match (zero, class0) {
                    (ZeroBoundary::None, EndpointClass::NonSingular) => {
                        return Err(Error::Domain(format!(
                            "0 is non-singular for BES({p}); choose killing or reflecting"
                        )))
                    }
                    (ZeroBoundary::None, c) => c.singular_kind().expect("singular"),
                    (ZeroBoundary::Killing, EndpointClass::NonSingular) => BoundaryKind::Killing,
                    (ZeroBoundary::Reflecting, EndpointClass::NonSingular) => {
                        BoundaryKind::Reflecting
                    }
                    (_, c) => {
                        return Err(Error::Domain(format!(
                            "0 is {} for BES({p}); no boundary rule can be imposed",
                            c.name()
                        )))
                    }
                };
                let right = class_inf.singular_kind().ok_or_else(|| {
                    Error::numerical("infinity classified non-singular for a Bessel process", 0.0)
                })?;
                DiffusionSpec::new(
                    ExtReal::Finite(0.0),
                    ExtReal::PosInf,
                    RealFunction::constant(1.0),
                    wprime,
                    x0,
                    left,
                    right,
                    self.label(),
                )
            }
        }
    }

    /// Order ν of the Bessel function I_ν in φ−(x, λ) = x^{−p} I_ν(√(2λ) x).
    fn minus_order(p: f64, zero: ZeroBoundary) -> f64 {
        if p >= 0.0 || (p > -1.0 && zero == ZeroBoundary::Reflecting) {
            p
        } else {
            -p
        }
    }

    /// Identifies a diffusion with a zoo model from its symbolic characteristics.
    pub fn recognize(spec: &DiffusionSpec) -> Option<ZooModel> {
        let a = spec.a.as_expr()?.laurent()?;
        if a.len() != 1 || a.get(&0) != Some(&1.0) {
            return None;
        }
        let w = spec.wprime.as_expr()?.laurent()?;
        match (spec.l, spec.r) {
            (ExtReal::NegInf, ExtReal::PosInf) if w.keys().all(|&k| k == 0) => {
                Some(ZooModel::BrownianDrift {
                    mu: w.get(&0).copied().unwrap_or(0.0),
                    x0: spec.x0,
                })
            }
            (ExtReal::Finite(l), ExtReal::PosInf) if l == 0.0 && w.keys().all(|&k| k == -1) => {
                let c = w.get(&-1).copied().unwrap_or(0.0);
                let zero = match spec.left {
                    BoundaryKind::Killing => ZeroBoundary::Killing,
                    BoundaryKind::Reflecting => ZeroBoundary::Reflecting,
                    _ => ZeroBoundary::None,
                };
                Some(ZooModel::Bessel {
                    p: c - 0.5,
                    zero,
                    x0: spec.x0,
                })
            }
            _ => None,
        }
    }
}

/// U±(x, λ) in closed form.
///
/// Brownian drift: −μ ∓ √(μ² + 2λ) with the principal square root.
/// Bessel: U+ = −√(2λ) K_{p+1}(√(2λ)x)/K_p(√(2λ)x); U− = (ν−p)/x +
/// λx/(ν+1) ρ_{ν+1}(λx²/2) with ρ_b the ₀F₁ ratio.
pub fn zoo_riccati(model: &ZooModel, branch: Branch, x: f64, lambda: Complex64) -> Result<Complex64> {
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::Domain(format!("lambda = {lambda} is not finite")));
    }
    match *model {
        ZooModel::BrownianDrift { mu, .. } => {
            if lambda.im == 0.0 && lambda.re < -mu * mu / 2.0 {
                return Err(Error::Domain(format!(
                    "lambda = {} lies on the branch cut (-inf, {}]",
                    lambda.re,
                    -mu * mu / 2.0
                )));
            }
            let root = (lambda * 2.0 + mu * mu).sqrt();
            Ok(match branch {
                Branch::Plus => -root - mu,
                Branch::Minus => root - mu,
            })
        }
        ZooModel::Bessel { p, zero, .. } => {
            if !(x > 0.0) {
                return Err(Error::Domain(format!("Bessel Riccati variable needs x > 0, got {x}")));
            }
            if lambda.im == 0.0 && lambda.re < 0.0 && branch == Branch::Plus {
                return Err(Error::Domain(format!(
                    "lambda = {} lies on the branch cut of U+",
                    lambda.re
                )));
            }
            match branch {
                Branch::Minus => {
                    let nu = ZooModel::minus_order(p, zero);
                    let w = lambda * (x * x / 2.0);
                    let rho = hyp0f1_ratio(nu + 1.0, w)?;
                    Ok(Complex64::new((nu - p) / x, 0.0) + lambda * (x / (nu + 1.0)) * rho)
                }
                Branch::Plus => {
                    if lambda.norm() == 0.0 {
                        return Ok(Complex64::new(-2.0 * p.max(0.0) / x, 0.0));
                    }
                    let s = (lambda * 2.0).sqrt();
                    let r = k_ratio(p, s * x)?;
                    Ok(-s * r)
                }
            }
        }
    }
}

/// ln φ±(x, 0), normalized to vanish at the start point.
pub fn zoo_log_phi0(model: &ZooModel, branch: Branch) -> Expr {
    match *model {
        ZooModel::BrownianDrift { mu, x0 } => {
            let k = match branch {
                Branch::Plus => -mu - mu.abs(),
                Branch::Minus => -mu + mu.abs(),
            };
            Expr::add(Expr::monomial(k, 1), Expr::num(-k * x0)).simplify()
        }
        ZooModel::Bessel { p, zero, x0 } => {
            let k = match branch {
                Branch::Plus => -2.0 * p.max(0.0),
                Branch::Minus => ZooModel::minus_order(p, zero) - p,
            };
            if k == 0.0 {
                return Expr::num(0.0);
            }
            let anchor = if x0 > 0.0 { x0 } else { 1.0 };
            Expr::sub(
                Expr::mul(Expr::num(k), Expr::ln(Expr::X)),
                Expr::num(k * anchor.ln()),
            )
        }
    }
}

/// h = φ±(·, 0) with h(x0) = 1.
pub fn zoo_phi0(model: &ZooModel, branch: Branch) -> RealFunction {
    let lnh = zoo_log_phi0(model, branch);
    if lnh.constant() == Some(0.0) {
        return RealFunction::constant(1.0);
    }
    RealFunction::expr(Expr::exp(lnh))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_its_own_specs() {
        for m in [
            ZooModel::brownian(1.0),
            ZooModel::bessel(0.5),
            ZooModel::bessel(-2.0),
            ZooModel::bessel(-0.5).with_zero(ZeroBoundary::Killing),
        ] {
            let spec = m.spec().unwrap();
            assert_eq!(ZooModel::recognize(&spec), Some(m));
        }
    }

    #[test]
    fn bessel_zero_rules_follow_classification() {
        assert!(ZooModel::bessel(-0.5).spec().is_err());
        assert!(ZooModel::bessel(1.5).with_zero(ZeroBoundary::Killing).spec().is_err());
        let s = ZooModel::bessel(-1.5).spec().unwrap();
        assert_eq!(s.left, BoundaryKind::ExitNotEntrance);
    }
}
