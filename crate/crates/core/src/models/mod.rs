//! Diffusion specifications, their scale and speed, endpoint classification
//! and the closed-form model zoo.

pub mod classify;
pub mod expr;
pub mod function;
pub mod spec;
pub mod zoo;

pub use classify::{boundary_integrals, classify_endpoint, scale_finite_at, BoundaryIntegrals};
pub use expr::Expr;
pub use function::RealFunction;
pub use spec::{BoundaryKind, DiffusionSpec, EndpointClass, ExtReal, Side};
pub use zoo::{zoo_log_phi0, zoo_phi0, zoo_riccati, Branch, ZeroBoundary, ZooModel};

use crate::error::{Error, Result};
use serde_json::Value;

pub fn scale_density(spec: &DiffusionSpec, x: f64) -> Result<f64> {
    spec.scale_density(x)
}

pub fn speed_density(spec: &DiffusionSpec, x: f64) -> Result<f64> {
    spec.speed_density(x)
}

/// A model document: either a zoo member or a custom diffusion.
#[derive(Debug, Clone)]
pub enum ModelDoc {
    Zoo(ZooModel),
    Custom(DiffusionSpec),
}

impl ModelDoc {
    pub fn spec(&self) -> Result<DiffusionSpec> {
        match self {
            ModelDoc::Zoo(m) => m.spec(),
            ModelDoc::Custom(s) => Ok(s.clone()),
        }
    }

    pub fn zoo(&self) -> Option<ZooModel> {
        match self {
            ModelDoc::Zoo(m) => Some(*m),
            ModelDoc::Custom(s) => ZooModel::recognize(s),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ModelDoc::Zoo(ZooModel::BrownianDrift { mu, x0 }) => {
                serde_json::json!({"family": "bm", "mu": mu, "x0": x0})
            }
            ModelDoc::Zoo(ZooModel::Bessel { p, zero, x0 }) => serde_json::json!({
                "family": "bessel",
                "p": p,
                "x0": x0,
                "zero_boundary": match zero {
                    ZeroBoundary::Killing => "killing",
                    ZeroBoundary::Reflecting => "reflecting",
                    ZeroBoundary::None => "none",
                },
            }),
            ModelDoc::Custom(s) => s.to_json(),
        }
    }

    pub fn from_json_str(src: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(src)
            .map_err(|e| Error::Validation(format!("model document is not JSON: {e}")))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| v.get(k);
        let num = |k: &str, default: Option<f64>| -> Result<f64> {
            match field(k) {
                Some(x) => x
                    .as_f64()
                    .ok_or_else(|| Error::Validation(format!("field '{k}' must be a number"))),
                None => default.ok_or_else(|| Error::Validation(format!("missing field '{k}'"))),
            }
        };
        let text = |k: &str| field(k).and_then(Value::as_str);
        let family = text("family").ok_or_else(|| Error::Validation("missing 'family'".into()))?;
        match family {
            "bm" | "brownian" | "brownian-drift" => Ok(ModelDoc::Zoo(ZooModel::BrownianDrift {
                mu: num("mu", None)?,
                x0: num("x0", Some(0.0))?,
            })),
            "bessel" => {
                let zero = match text("zero_boundary").unwrap_or("none") {
                    "none" => ZeroBoundary::None,
                    "killing" => ZeroBoundary::Killing,
                    "reflecting" => ZeroBoundary::Reflecting,
                    other => {
                        return Err(Error::Validation(format!("unknown zero_boundary '{other}'")))
                    }
                };
                Ok(ModelDoc::Zoo(ZooModel::Bessel {
                    p: num("p", None)?,
                    zero,
                    x0: num("x0", Some(1.0))?,
                }))
            }
            "custom" => {
                let a = RealFunction::parse(text("a").unwrap_or("1"))?;
                let wprime = RealFunction::parse(
                    text("wprime").ok_or_else(|| Error::Validation("missing 'wprime'".into()))?,
                )?;
                let l = field("l").map(ExtReal::from_json).transpose()?.unwrap_or(ExtReal::NegInf);
                let r = field("r").map(ExtReal::from_json).transpose()?.unwrap_or(ExtReal::PosInf);
                let x0 = num("x0", None)?;
                let label = text("label").unwrap_or("custom").to_string();
                let mut spec = DiffusionSpec {
                    l,
                    r,
                    a,
                    wprime,
                    x0,
                    left: BoundaryKind::Natural,
                    right: BoundaryKind::Natural,
                    label,
                };
                for side in [Side::Left, Side::Right] {
                    let key = if side == Side::Left { "left" } else { "right" };
                    let kind = match text(key) {
                        Some(s) if s != "auto" => {
                            let k = BoundaryKind::parse(s)?;
                            let class = classify_endpoint(&spec, side)?;
                            let ok = match class {
                                EndpointClass::NonSingular => !k.is_singular(),
                                c => c.singular_kind() == Some(k),
                            };
                            if !ok {
                                return Err(Error::Validation(format!(
                                    "{key} endpoint is {} but was declared {}",
                                    class.name(),
                                    k.name()
                                )));
                            }
                            k
                        }
                        _ => match classify_endpoint(&spec, side)? {
                            EndpointClass::NonSingular => {
                                return Err(Error::Validation(format!(
                                    "{key} endpoint is non-singular; declare killing or reflecting"
                                )))
                            }
                            c => c.singular_kind().expect("singular"),
                        },
                    };
                    match side {
                        Side::Left => spec.left = kind,
                        Side::Right => spec.right = kind,
                    }
                }
                spec.validate()?;
                Ok(ModelDoc::Custom(spec))
            }
            other => Err(Error::Validation(format!("unknown family '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_round_trip() {
        let d = ModelDoc::from_json_str(r#"{"family":"bessel","p":0.5,"x0":1.0,"zero_boundary":"none"}"#)
            .unwrap();
        assert_eq!(d.zoo(), Some(ZooModel::bessel(0.5)));
        let custom = ModelDoc::from_json_str(
            r#"{"family":"custom","a":"1","wprime":"2","l":"-inf","r":"inf","x0":0.5}"#,
        )
        .unwrap();
        let spec = custom.spec().unwrap();
        assert_eq!(spec.right, BoundaryKind::Natural);
        let again = ModelDoc::from_json(&custom.to_json()).unwrap().spec().unwrap();
        assert!(again.same_characteristics(&spec));
    }
}
