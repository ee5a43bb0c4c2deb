use super::expr::Expr;
use super::function::RealFunction;
use crate::error::{Error, Result};
use crate::quad;
use serde::{Deserialize, Serialize};
use std::fmt;

/// An endpoint of the state interval, with explicit infinities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_json(self) -> serde_json::Value {
        match self {
            ExtReal::NegInf => "-inf".into(),
            ExtReal::PosInf => "inf".into(),
            ExtReal::Finite(v) => v.into(),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Number(n) => Ok(ExtReal::Finite(n.as_f64().unwrap_or(f64::NAN))),
            serde_json::Value::String(s) => match s.trim() {
                "-inf" | "-infinity" => Ok(ExtReal::NegInf),
                "inf" | "+inf" | "infinity" => Ok(ExtReal::PosInf),
                other => other
                    .parse::<f64>()
                    .map(ExtReal::Finite)
                    .map_err(|_| Error::Validation(format!("bad interval endpoint '{other}'"))),
            },
            other => Err(Error::Validation(format!("bad interval endpoint {other}"))),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::PosInf => write!(f, "+inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Natural,
    Killing,
    Reflecting,
    EntranceNotExit,
    ExitNotEntrance,
}

impl BoundaryKind {
    pub fn is_singular(self) -> bool {
        !matches!(self, BoundaryKind::Killing | BoundaryKind::Reflecting)
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::Natural => "natural",
            BoundaryKind::Killing => "killing",
            BoundaryKind::Reflecting => "reflecting",
            BoundaryKind::EntranceNotExit => "entrance-not-exit",
            BoundaryKind::ExitNotEntrance => "exit-not-entrance",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "natural" => BoundaryKind::Natural,
            "killing" => BoundaryKind::Killing,
            "reflecting" => BoundaryKind::Reflecting,
            "entrance-not-exit" | "entrance" => BoundaryKind::EntranceNotExit,
            "exit-not-entrance" | "exit" => BoundaryKind::ExitNotEntrance,
            other => return Err(Error::Validation(format!("unknown boundary kind '{other}'"))),
        })
    }
}

/// Feller classification of an endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndpointClass {
    NonSingular,
    EntranceNotExit,
    ExitNotEntrance,
    Natural,
}

impl EndpointClass {
    pub fn name(self) -> &'static str {
        match self {
            EndpointClass::NonSingular => "non-singular",
            EndpointClass::EntranceNotExit => "entrance-not-exit",
            EndpointClass::ExitNotEntrance => "exit-not-entrance",
            EndpointClass::Natural => "natural",
        }
    }

    /// Boundary kind of a singular endpoint.
    pub fn singular_kind(self) -> Option<BoundaryKind> {
        match self {
            EndpointClass::NonSingular => None,
            EndpointClass::EntranceNotExit => Some(BoundaryKind::EntranceNotExit),
            EndpointClass::ExitNotEntrance => Some(BoundaryKind::ExitNotEntrance),
            EndpointClass::Natural => Some(BoundaryKind::Natural),
        }
    }
}

/// A one-dimensional diffusion with generator (a/2) e^{-2W} d/dx e^{2W} d/dx.
#[derive(Debug, Clone)]
pub struct DiffusionSpec {
    pub l: ExtReal,
    pub r: ExtReal,
    /// Instantaneous variance a(x).
    pub a: RealFunction,
    /// Environment derivative W'(x) = b(x)/a(x).
    pub wprime: RealFunction,
    pub x0: f64,
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    pub label: String,
}

impl DiffusionSpec {
    /// Builds a spec after checking the interval, the start point and the
    /// positivity of a on a handful of interior points.
    pub fn new(
        l: ExtReal,
        r: ExtReal,
        a: RealFunction,
        wprime: RealFunction,
        x0: f64,
        left: BoundaryKind,
        right: BoundaryKind,
        label: impl Into<String>,
    ) -> Result<Self> {
        let spec = DiffusionSpec {
            l,
            r,
            a,
            wprime,
            x0,
            left,
            right,
            label: label.into(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let lo = match self.l {
            ExtReal::PosInf => return Err(Error::Validation("left endpoint is +inf".into())),
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
        };
        let hi = match self.r {
            ExtReal::NegInf => return Err(Error::Validation("right endpoint is -inf".into())),
            ExtReal::PosInf => f64::INFINITY,
            ExtReal::Finite(v) => v,
        };
        if !(lo < hi) {
            return Err(Error::Validation(format!("empty interval ({}, {})", self.l, self.r)));
        }
        let x0_ok = (lo < self.x0 && self.x0 < hi)
            || (self.x0 == lo && self.left == BoundaryKind::Reflecting)
            || (self.x0 == hi && self.right == BoundaryKind::Reflecting);
        if !x0_ok || !self.x0.is_finite() {
            return Err(Error::Validation(format!(
                "start point {} must lie inside ({}, {}) or on a reflecting endpoint",
                self.x0, self.l, self.r
            )));
        }
        if matches!(self.l, ExtReal::NegInf) && !self.left.is_singular()
            || matches!(self.r, ExtReal::PosInf) && !self.right.is_singular()
        {
            return Err(Error::Validation(
                "infinite endpoints cannot be killing or reflecting".into(),
            ));
        }
        for x in self.test_points(7) {
            let a = self.a.eval(x);
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::Validation(format!("a({x}) = {a} is not positive")));
            }
            if !self.wprime.eval(x).is_finite() {
                return Err(Error::Validation(format!("W'({x}) is not finite")));
            }
        }
        Ok(())
    }

    /// The reference point where W = 0: the start point when interior,
    /// otherwise a point one unit (or half the interval) inside.
    pub fn anchor(&self) -> f64 {
        let interior = |x: f64| {
            self.l.finite().is_none_or(|l| x > l) && self.r.finite().is_none_or(|r| x < r)
        };
        if interior(self.x0) {
            return self.x0;
        }
        match (self.l, self.r) {
            (ExtReal::Finite(l), ExtReal::Finite(r)) => 0.5 * (l + r),
            (ExtReal::Finite(l), _) => l + 1.0,
            (_, ExtReal::Finite(r)) => r - 1.0,
            _ => self.x0,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.l.finite().is_none_or(|l| x > l) && self.r.finite().is_none_or(|r| x < r)
    }

    /// Interior points spread around the anchor.
    pub fn test_points(&self, n: usize) -> Vec<f64> {
        let c = self.anchor();
        let (lo, hi) = match (self.l.finite(), self.r.finite()) {
            (Some(l), Some(r)) => (l + 0.05 * (r - l), r - 0.05 * (r - l)),
            (Some(l), None) => (l + 0.1 * (c - l), c + 2.0 * (c - l).max(1.0)),
            (None, Some(r)) => (c - 2.0 * (r - c).max(1.0), r - 0.1 * (r - c)),
            (None, None) => (c - 2.0, c + 2.0),
        };
        (0..n)
            .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
            .collect()
    }

    /// W(x) = ∫_anchor^x W'(y) dy, in closed form when W' is a monomial sum.
    pub fn w(&self, x: f64) -> Result<f64> {
        let c = self.anchor();
        if x == c {
            return Ok(0.0);
        }
        if let Some(anti) = self.wprime.as_expr().and_then(Expr::antiderivative) {
            let v = anti.eval(x) - anti.eval(c);
            if v.is_finite() {
                return Ok(v);
            }
        }
        let wp = &self.wprime;
        let q = quad::integrate(|y| wp.eval(y), c, x, 1e-14, 1e-13)?;
        Ok(q.value)
    }

    pub fn ln_scale_density(&self, x: f64) -> Result<f64> {
        Ok(-2.0 * self.w(x)?)
    }

    /// s'(x) = exp(−2W(x)), equal to 1 at the anchor.
    pub fn scale_density(&self, x: f64) -> Result<f64> {
        self.require_interior(x)?;
        Ok(self.ln_scale_density(x)?.exp())
    }

    /// Density of the speed measure m(dx) = (2/a) e^{2W} dx.
    pub fn speed_density(&self, x: f64) -> Result<f64> {
        self.require_interior(x)?;
        Ok(2.0 / self.a.eval(x) * (2.0 * self.w(x)?).exp())
    }

    fn require_interior(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "x = {x} is outside ({}, {})",
                self.l, self.r
            )))
        }
    }

    pub fn boundary(&self, side: Side) -> BoundaryKind {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    pub fn endpoint(&self, side: Side) -> ExtReal {
        match side {
            Side::Left => self.l,
            Side::Right => self.r,
        }
    }

    /// Equality of the characteristics (interval, a, W', boundary kinds).
    pub fn same_characteristics(&self, other: &DiffusionSpec) -> bool {
        self.l == other.l
            && self.r == other.r
            && self.left == other.left
            && self.right == other.right
            && self.a.same_as(&other.a)
            && self.wprime.same_as(&other.wprime)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": "custom",
            "l": self.l.to_json(),
            "r": self.r.to_json(),
            "a": self.a.to_string(),
            "wprime": self.wprime.to_string(),
            "x0": self.x0,
            "left": self.left.name(),
            "right": self.right.name(),
            "label": self.label,
        })
    }
}

impl fmt::Display for DiffusionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on ({}, {}) [{} | {}], a = {}, W' = {}, x0 = {}",
            self.label,
            self.l,
            self.r,
            self.left.name(),
            self.right.name(),
            self.a,
            self.wprime,
            self.x0
        )
    }
}
