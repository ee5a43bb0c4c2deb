use super::expr::Expr;
use std::fmt;
use std::sync::Arc;

type Native = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of one variable with an optional derivative.
///
/// Symbolic functions carry their expression (and therefore an exact
/// derivative); native functions wrap closures such as grid interpolants.
#[derive(Clone)]
pub enum RealFunction {
    Symbolic { f: Expr, df: Expr },
    Native {
        label: String,
        f: Native,
        df: Option<Native>,
    },
}

impl RealFunction {
    pub fn expr(e: Expr) -> Self {
        let f = e.simplify();
        let df = f.deriv();
        RealFunction::Symbolic { f, df }
    }

    pub fn parse(src: &str) -> crate::Result<Self> {
        Ok(Self::expr(Expr::parse(src)?))
    }

    pub fn constant(c: f64) -> Self {
        Self::expr(Expr::num(c))
    }

    pub fn native(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    ) -> Self {
        RealFunction::Native {
            label: label.into(),
            f: Arc::new(f),
            df,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            RealFunction::Symbolic { f, .. } => f.eval(x),
            RealFunction::Native { f, .. } => f(x),
        }
    }

    /// Derivative at x, or `None` when declared unavailable.
    pub fn deriv(&self, x: f64) -> Option<f64> {
        match self {
            RealFunction::Symbolic { df, .. } => Some(df.eval(x)),
            RealFunction::Native { df, .. } => df.as_ref().map(|d| d(x)),
        }
    }

    pub fn has_deriv(&self) -> bool {
        matches!(
            self,
            RealFunction::Symbolic { .. } | RealFunction::Native { df: Some(_), .. }
        )
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            RealFunction::Symbolic { f, .. } => Some(f),
            RealFunction::Native { .. } => None,
        }
    }

    /// The derivative as a function in its own right.
    pub fn derivative(&self) -> Option<RealFunction> {
        match self {
            RealFunction::Symbolic { df, .. } => Some(RealFunction::expr(df.clone())),
            RealFunction::Native { label, df, .. } => df.as_ref().map(|d| {
                let d = d.clone();
                RealFunction::Native {
                    label: format!("d/dx {label}"),
                    f: d,
                    df: None,
                }
            }),
        }
    }

    /// Pointwise sum, kept symbolic when both terms are.
    pub fn plus(&self, other: &RealFunction) -> RealFunction {
        if let (Some(a), Some(b)) = (self.as_expr(), other.as_expr()) {
            return RealFunction::expr(Expr::add(a.clone(), b.clone()));
        }
        let (a, b) = (self.clone(), other.clone());
        let (da, db) = (self.clone(), other.clone());
        let df: Option<Native> = if self.has_deriv() && other.has_deriv() {
            Some(Arc::new(move |x| da.deriv(x).unwrap() + db.deriv(x).unwrap()))
        } else {
            None
        };
        RealFunction::Native {
            label: format!("({self}) + ({other})"),
            f: Arc::new(move |x| a.eval(x) + b.eval(x)),
            df,
        }
    }

    pub fn scaled(&self, c: f64) -> RealFunction {
        if let Some(a) = self.as_expr() {
            return RealFunction::expr(Expr::mul(Expr::num(c), a.clone()));
        }
        let a = self.clone();
        let da = self.clone();
        let df: Option<Native> = self
            .has_deriv()
            .then(|| Arc::new(move |x| c * da.deriv(x).unwrap()) as Native);
        RealFunction::Native {
            label: format!("{c} * ({self})"),
            f: Arc::new(move |x| c * a.eval(x)),
            df,
        }
    }

    /// a'/(2a) for a variance function a.
    pub fn half_log_derivative(&self) -> Option<RealFunction> {
        match self {
            RealFunction::Symbolic { f, df } => Some(RealFunction::expr(Expr::div(
                df.clone(),
                Expr::mul(Expr::num(2.0), f.clone()),
            ))),
            RealFunction::Native { .. } => {
                let a = self.clone();
                self.has_deriv().then(|| {
                    RealFunction::native("a'/2a", move |x| a.deriv(x).unwrap() / (2.0 * a.eval(x)), None)
                })
            }
        }
    }

    /// Structural equality of symbolic functions after simplification.
    pub fn same_as(&self, other: &RealFunction) -> bool {
        match (self.as_expr(), other.as_expr()) {
            (Some(a), Some(b)) => match (a.laurent(), b.laurent()) {
                (Some(la), Some(lb)) => la == lb,
                _ => a == b,
            },
            _ => false,
        }
    }
}

impl fmt::Display for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealFunction::Symbolic { f: e, .. } => write!(f, "{e}"),
            RealFunction::Native { label, .. } => write!(f, "<{label}>"),
        }
    }
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealFunction({self})")
    }
}
