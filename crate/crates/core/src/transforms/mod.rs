//! h-transforms, Krein duality and their composition 𝒯_h.
//!
//! Characteristics are carried as (a, W'), so the maps act by
//!
//! * h-transform: W' → W' + h'/h, a unchanged;
//! * Krein duality: W' → a'/(2a) − W' (speed and scale density swap);
//! * 𝒯_h: the h-transform followed by duality.
//!
//! The anchor of W is the start point in every case, so s'(x0) = 1 holds for
//! all the diffusions produced.
//!
//! Boundary kinds of the output are re-derived from the entrance and exit
//! integrals. Only non-singular endpoints need a rule; see [`h_transform_with`]
//! and [`krein_dual`].

mod ct;
mod table;

pub use ct::{ct_pair, CtNote, CtPair, HypothesisCheck};
pub use table::{table2, verify_table2, Table2Check, Table2Row};

use crate::error::{Error, Result};
use crate::models::{
    classify_endpoint, zoo_phi0, zoo_riccati, Branch, BoundaryKind, DiffusionSpec, EndpointClass, Expr,
    ExtReal, RealFunction, Side, ZooModel,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformKind {
    #[serde(rename = "h_transform")]
    HTransform,
    #[serde(rename = "krein_dual")]
    KreinDual,
    #[serde(rename = "T_h")]
    TH,
}

/// One application of a map, with the function h it used (h ≡ 1 for
/// duality).
#[derive(Debug, Clone)]
pub struct TransformRecord {
    pub kind: TransformKind,
    pub branch: Option<Branch>,
    pub input: DiffusionSpec,
    pub h: RealFunction,
    /// h'/h.
    pub h_log_derivative: RealFunction,
    pub output: DiffusionSpec,
}

/// Behaviour of h at a finite endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
enum HLimit {
    Zero,
    Finite,
    Infinite,
}

/// h'/h, symbolic whenever h is.
fn log_derivative(h: &RealFunction) -> Result<RealFunction> {
    if let Some(e) = h.as_expr() {
        if e.constant().is_some() {
            return Ok(RealFunction::constant(0.0));
        }
        if let Expr::Exp(g) = e {
            return Ok(RealFunction::expr(g.deriv()));
        }
        return Ok(RealFunction::expr(Expr::div(e.deriv(), e.clone())));
    }
    if !h.has_deriv() {
        return Err(Error::Precondition("h must come with its derivative".into()));
    }
    let g = h.clone();
    Ok(RealFunction::native(
        format!("{h}'/{h}"),
        move |x| g.deriv(x).unwrap() / g.eval(x),
        None,
    ))
}

/// ln h without overflow for h = exp(g).
fn ln_h(h: &RealFunction, x: f64) -> Result<f64> {
    if let Some(Expr::Exp(g)) = h.as_expr() {
        let v = g.eval(x);
        if !v.is_finite() {
            return Err(Error::InvalidH { x, value: h.eval(x) });
        }
        return Ok(v);
    }
    let v = h.eval(x);
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidH { x, value: v });
    }
    Ok(v.ln())
}

/// Points at distance 10^{−j}·span from a finite endpoint.
fn approach(spec: &DiffusionSpec, side: Side, j: i32) -> Option<f64> {
    let e = spec.endpoint(side).finite()?;
    let span = (e - spec.anchor()).abs();
    let d = span * 10f64.powi(-j);
    Some(match side {
        Side::Left => e + d,
        Side::Right => e - d,
    })
}

/// Classifies lim h at a finite endpoint by the log-log slope of h between
/// distances 10^{−8} and 10^{−10} of the endpoint.
fn h_limit(h: &RealFunction, spec: &DiffusionSpec, side: Side) -> Result<HLimit> {
    let (Some(x8), Some(x10)) = (approach(spec, side, 8), approach(spec, side, 10)) else {
        return Ok(HLimit::Finite);
    };
    let slope = (ln_h(h, x10)? - ln_h(h, x8)?) / (-2.0 * std::f64::consts::LN_10);
    Ok(if slope < -1e-3 {
        HLimit::Infinite
    } else if slope > 1e-3 {
        HLimit::Zero
    } else {
        HLimit::Finite
    })
}

fn check_positive(h: &RealFunction, spec: &DiffusionSpec) -> Result<()> {
    let mut xs = spec.test_points(25);
    xs.push(spec.x0);
    for side in [Side::Left, Side::Right] {
        for j in 1..=10 {
            xs.extend(approach(spec, side, j));
        }
    }
    for x in xs.into_iter().filter(|&x| spec.contains(x)) {
        ln_h(h, x)?;
    }
    Ok(())
}

fn side_name(spec: &DiffusionSpec, side: Side) -> String {
    let e = spec.endpoint(side);
    match side {
        Side::Left => format!("left endpoint {e}"),
        Side::Right => format!("right endpoint {e}"),
    }
}

/// Endpoint kinds for new characteristics: singular kinds come from the
/// classification, non-singular ones from `rule`.
fn assemble(
    input: &DiffusionSpec,
    wprime: RealFunction,
    mut rule: impl FnMut(Side) -> Result<BoundaryKind>,
) -> Result<DiffusionSpec> {
    let probe = DiffusionSpec {
        l: input.l,
        r: input.r,
        a: input.a.clone(),
        wprime,
        x0: input.x0,
        left: BoundaryKind::Natural,
        right: BoundaryKind::Natural,
        label: String::new(),
    };
    let mut kinds = [BoundaryKind::Natural; 2];
    for (i, side) in [Side::Left, Side::Right].into_iter().enumerate() {
        kinds[i] = match classify_endpoint(&probe, side)? {
            EndpointClass::NonSingular => rule(side)?,
            c => c.singular_kind().expect("singular class"),
        };
    }
    let mut out = DiffusionSpec::new(
        probe.l,
        probe.r,
        probe.a,
        probe.wprime,
        probe.x0,
        kinds[0],
        kinds[1],
        "",
    )?;
    out.label = ZooModel::recognize(&out)
        .and_then(|m| m.spec().ok().map(|_| m.label()))
        .unwrap_or_else(|| format!("transform of {}", input.label));
    Ok(out)
}

fn non_singular_rule(spec: &DiffusionSpec, side: Side) -> Result<Option<BoundaryKind>> {
    Ok(match classify_endpoint(spec, side)? {
        EndpointClass::NonSingular => Some(spec.boundary(side)),
        _ => None,
    })
}

/// The h-transform for a caller-supplied h > 0.
///
/// At a non-singular endpoint of the result the rule is read off the domain
/// of the new generator, f ↦ h⁻¹ G(hf): where h → ∞ the functions f = g/h
/// vanish and the endpoint is killing; where h has a finite positive limit
/// the rule of the input is inherited.
pub fn h_transform_with(spec: &DiffusionSpec, h: RealFunction, branch: Option<Branch>) -> Result<TransformRecord> {
    check_positive(&h, spec)?;
    let hl = log_derivative(&h)?;
    let wprime = spec.wprime.plus(&hl);
    let output = assemble(spec, wprime, |side| {
        let what = side_name(spec, side);
        match h_limit(&h, spec, side)? {
            HLimit::Infinite => Ok(BoundaryKind::Killing),
            HLimit::Finite => match non_singular_rule(spec, side)? {
                Some(k @ (BoundaryKind::Killing | BoundaryKind::Reflecting)) => Ok(k),
                _ => Err(Error::Precondition(format!(
                    "{what} becomes non-singular with a finite h but carries no killing or reflecting rule"
                ))),
            },
            HLimit::Zero => Err(Error::Precondition(format!(
                "{what} becomes non-singular while h vanishes there; no boundary rule is implied"
            ))),
        }
    })?;
    Ok(TransformRecord {
        kind: TransformKind::HTransform,
        branch,
        input: spec.clone(),
        h,
        h_log_derivative: hl,
        output,
    })
}

/// The φ±(·,0)-transform of a zoo diffusion.
pub fn h_transform(spec: &DiffusionSpec, branch: Branch) -> Result<TransformRecord> {
    let model = ZooModel::recognize(spec).ok_or_else(|| {
        Error::Precondition(format!(
            "no closed form for φ{}(·,0) of {}; supply h through h_transform_with",
            if branch == Branch::Plus { "+" } else { "-" },
            spec.label
        ))
    })?;
    h_transform_with(spec, zoo_phi0(&model, branch), Some(branch))
}

/// The Krein dual: speed density and scale density exchange roles, with
/// reflecting and killing endpoints swapped.
///
/// Non-singular endpoints must carry a reflecting or killing rule. Killing
/// endpoints are accepted because the dual of a killed diffusion is the
/// reflected one, which is what the second half of 𝒯_h needs after an
/// h-transform has made an endpoint killing.
pub fn krein_dual(spec: &DiffusionSpec) -> Result<TransformRecord> {
    for side in [Side::Left, Side::Right] {
        if let Some(k) = non_singular_rule(spec, side)? {
            if !matches!(k, BoundaryKind::Killing | BoundaryKind::Reflecting) {
                return Err(Error::Precondition(format!(
                    "{} is non-singular but declared {}",
                    side_name(spec, side),
                    k.name()
                )));
            }
        }
    }
    let half = spec
        .a
        .half_log_derivative()
        .ok_or_else(|| Error::Precondition("duality needs a'(x)".into()))?;
    let wprime = half.plus(&spec.wprime.scaled(-1.0));
    let output = assemble(spec, wprime, |side| match spec.boundary(side) {
        BoundaryKind::Reflecting => Ok(BoundaryKind::Killing),
        BoundaryKind::Killing => Ok(BoundaryKind::Reflecting),
        k => Err(Error::Precondition(format!(
            "{} is singular ({}) but its dual is not",
            side_name(spec, side),
            k.name()
        ))),
    })?;
    Ok(TransformRecord {
        kind: TransformKind::KreinDual,
        branch: None,
        input: spec.clone(),
        h: RealFunction::constant(1.0),
        h_log_derivative: RealFunction::constant(0.0),
        output,
    })
}

/// 𝒯_h(X) for a caller-supplied h.
pub fn t_h_with(spec: &DiffusionSpec, h: RealFunction, branch: Option<Branch>) -> Result<TransformRecord> {
    let y = h_transform_with(spec, h, branch)?;
    let z = krein_dual(&y.output)?;
    Ok(TransformRecord {
        kind: TransformKind::TH,
        output: z.output,
        ..y
    })
}

/// 𝒯_h(X) with h = φ±(·,0) of a zoo diffusion.
pub fn t_h(spec: &DiffusionSpec, branch: Branch) -> Result<TransformRecord> {
    let y = h_transform(spec, branch)?;
    let z = krein_dual(&y.output)?;
    Ok(TransformRecord {
        kind: TransformKind::TH,
        output: z.output,
        ..y
    })
}

/// Laurent coefficients of a symbolic function, compared with a relative
/// tolerance.
fn same_function(a: &RealFunction, b: &RealFunction, tol: f64) -> bool {
    match (a.as_expr().and_then(Expr::laurent), b.as_expr().and_then(Expr::laurent)) {
        (Some(la), Some(lb)) => {
            let keys: std::collections::BTreeSet<i32> = la.keys().chain(lb.keys()).copied().collect();
            keys.into_iter().all(|k| {
                let (ca, cb) = (la.get(&k).copied().unwrap_or(0.0), lb.get(&k).copied().unwrap_or(0.0));
                (ca - cb).abs() <= tol * ca.abs().max(cb.abs()).max(1.0)
            })
        }
        _ => a.same_as(b),
    }
}

/// Equality of interval, boundary kinds, a and W' (the latter two up to a
/// relative tolerance on their Laurent coefficients).
pub fn same_characteristics(a: &DiffusionSpec, b: &DiffusionSpec, tol: f64) -> bool {
    a.l == b.l
        && a.r == b.r
        && a.left == b.left
        && a.right == b.right
        && same_function(&a.a, &b.a, tol)
        && same_function(&a.wprime, &b.wprime, tol)
}

impl TransformRecord {
    /// Largest relative violation of the Riccati identity of the map over
    /// the given points, using the closed forms of zoo input and output:
    ///
    /// * h-transform: U^Y = U − h'/h;
    /// * duality: U·U* = 2λ/a, on both branches;
    /// * 𝒯_h: U^Z·(U − h'/h) = 2λ/a.
    pub fn riccati_residual(&self, xs: &[f64], lambdas: &[f64]) -> Result<f64> {
        let zoo = |s: &DiffusionSpec| {
            ZooModel::recognize(s)
                .ok_or_else(|| Error::Precondition(format!("{} has no closed-form Riccati variable", s.label)))
        };
        let (mx, my) = (zoo(&self.input)?, zoo(&self.output)?);
        let branches: Vec<Branch> = match (self.kind, self.branch) {
            (TransformKind::KreinDual, _) | (_, None) => vec![Branch::Minus, Branch::Plus],
            (_, Some(b)) => vec![b],
        };
        let mut worst = 0.0f64;
        for &b in &branches {
            for &x in xs {
                let hl = self.h_log_derivative.eval(x);
                let a = self.input.a.eval(x);
                for &lam in lambdas {
                    let l = Complex64::new(lam, 0.0);
                    let u = zoo_riccati(&mx, b, x, l)?.re;
                    let v = zoo_riccati(&my, b, x, l)?.re;
                    let r = match self.kind {
                        TransformKind::HTransform => (v - (u - hl)).abs() / v.abs().max(1.0),
                        TransformKind::KreinDual => (u * v * a / (2.0 * lam) - 1.0).abs(),
                        TransformKind::TH => (v * (u - hl) * a / (2.0 * lam) - 1.0).abs(),
                    };
                    worst = worst.max(r);
                }
            }
        }
        Ok(worst)
    }

    /// JSON with the characteristics of input and output sampled on `n`
    /// interior points.
    pub fn to_json(&self, n: usize) -> Result<Value> {
        let mut samples = Vec::with_capacity(n);
        for x in self.input.test_points(n) {
            samples.push(json!({
                "x": x,
                "a": self.input.a.eval(x),
                "h": self.h.eval(x),
                "wprime_in": self.input.wprime.eval(x),
                "wprime_out": self.output.wprime.eval(x),
                "scale_density_in": self.input.scale_density(x)?,
                "scale_density_out": self.output.scale_density(x)?,
                "speed_density_in": self.input.speed_density(x)?,
                "speed_density_out": self.output.speed_density(x)?,
            }));
        }
        Ok(json!({
            "kind": self.kind,
            "branch": self.branch,
            "h": self.h.to_string(),
            "h_log_derivative": self.h_log_derivative.to_string(),
            "input": self.input.to_json(),
            "output": self.output.to_json(),
            "samples": samples,
        }))
    }
}

/// A native h with derivative, for non-symbolic transforms.
pub fn native_h(label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> RealFunction {
    RealFunction::native(label, f, Some(Arc::new(df)))
}

pub(crate) fn endpoint_is_finite(spec: &DiffusionSpec, side: Side) -> bool {
    matches!(spec.endpoint(side), ExtReal::Finite(_))
}
