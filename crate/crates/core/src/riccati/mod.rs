//! The expansion algorithm: U = u_0 + (2λ/a)/U_1 with U_1 the Riccati
//! variable of the environment W_1' = a'/2a − u_0 − W', iterated.

mod numeric;
mod panels;

use crate::cfrac::{eval_cf_closed, CFCoefficients};
use crate::error::{Error, Result};
use crate::models::{zoo_riccati, Branch, DiffusionSpec, Expr, RealFunction, ZeroBoundary, ZooModel};
use num_complex::Complex64;
use serde::Serialize;

/// Environments W_n' and homogeneous Riccati solutions u_n, n = 0..N, in the
/// unoriented convention U = u_0 + (2λ/a)/(u_1 + (2λ/a)/(u_2 + …)).
#[derive(Debug, Clone)]
pub struct EnvironmentChain {
    pub wprimes: Vec<RealFunction>,
    pub us: Vec<RealFunction>,
    pub branch: Branch,
    pub a: RealFunction,
    /// Sampling grid of the chain export.
    pub grid: Vec<f64>,
    /// u_n at the grid points, one row per level.
    pub u_samples: Vec<Vec<f64>>,
    /// W_n' at the grid points, one row per level.
    pub wprime_samples: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct ChainExport<'a> {
    branch: Branch,
    grid: &'a [f64],
    u: &'a [Vec<f64>],
    wprime: &'a [Vec<f64>],
}

impl EnvironmentChain {
    pub fn depth(&self) -> usize {
        self.us.len() - 1
    }

    /// Oriented continued-fraction coefficients at x.
    pub fn coefficients(&self, x: f64) -> CFCoefficients {
        let o = self.branch.sign();
        CFCoefficients {
            u0: self.us[0].eval(x),
            u: self.us[1..].iter().map(|u| o * u.eval(x)).collect(),
            scale: 2.0 / self.a.eval(x),
            branch: self.branch,
            x: Some(x),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ChainExport {
            branch: self.branch,
            grid: &self.grid,
            u: &self.u_samples,
            wprime: &self.wprime_samples,
        })
        .expect("chain serializes")
    }

    fn with_samples(mut self, grid: &[f64]) -> Self {
        self.grid = grid.to_vec();
        self.u_samples = self
            .us
            .iter()
            .map(|u| grid.iter().map(|&x| u.eval(x)).collect())
            .collect();
        self.wprime_samples = self
            .wprimes
            .iter()
            .map(|w| grid.iter().map(|&x| w.eval(x)).collect())
            .collect();
        self
    }
}

pub(crate) fn bessel_minus_order(p: f64, zero: ZeroBoundary) -> f64 {
    if p >= 0.0 || (p > -1.0 && zero == ZeroBoundary::Reflecting) {
        p
    } else {
        -p
    }
}

/// Coefficients of the closed-form expansions.
///
/// Brownian drift (μ ≠ 0): u_0 = |μ| − μ (minus) or −μ − |μ| (plus), and
/// u_n = 2|μ|. Bessel minus (p > −1): u_0 = (ν − p)/x, u_n = 2(ν + n)/x.
/// Bessel plus (p ≥ 0): u_0 = −2p/x, u_n = 2(p − n)/x, zeros included.
pub fn expand_symbolic_zoo(
    model: &ZooModel,
    branch: Branch,
    depth: usize,
    x: f64,
) -> Result<CFCoefficients> {
    let (u0, u): (f64, Vec<f64>) = match *model {
        ZooModel::BrownianDrift { mu, .. } => {
            if mu == 0.0 {
                return Err(Error::Domain("the expansion needs mu != 0".into()));
            }
            let u0 = match branch {
                Branch::Minus => mu.abs() - mu,
                Branch::Plus => -mu - mu.abs(),
            };
            (u0, vec![2.0 * mu.abs(); depth])
        }
        ZooModel::Bessel { p, zero, .. } => {
            if !(x > 0.0) {
                return Err(Error::Domain(format!("x must be positive, got {x}")));
            }
            match branch {
                Branch::Minus => {
                    if !(p > -1.0) {
                        return Err(Error::Domain(format!("minus expansion needs p > -1, got {p}")));
                    }
                    let nu = bessel_minus_order(p, zero);
                    (
                        (nu - p) / x,
                        (1..=depth).map(|n| 2.0 * (nu + n as f64) / x).collect(),
                    )
                }
                Branch::Plus => {
                    if !(p >= 0.0) {
                        return Err(Error::Domain(format!("plus expansion needs p >= 0, got {p}")));
                    }
                    (
                        -2.0 * p / x,
                        (1..=depth).map(|n| 2.0 * (p - n as f64) / x).collect(),
                    )
                }
            }
        }
    };
    Ok(CFCoefficients {
        u0,
        u,
        scale: 2.0,
        branch,
        x: Some(x),
    })
}

/// The closed-form chain of environments and solutions as expressions.
pub fn symbolic_chain(model: &ZooModel, branch: Branch, depth: usize) -> Result<EnvironmentChain> {
    let probe = match *model {
        ZooModel::BrownianDrift { .. } => 0.0,
        ZooModel::Bessel { .. } => 1.0,
    };
    let coeffs = expand_symbolic_zoo(model, branch, depth, probe)?;
    let o = branch.sign();
    // u_n is c_n (constant) for Brownian drift and c_n/x for Bessel.
    let power = if matches!(model, ZooModel::BrownianDrift { .. }) { 0 } else { -1 };
    let mut us = vec![RealFunction::expr(Expr::monomial(coeffs.u0, power))];
    for v in &coeffs.u {
        us.push(RealFunction::expr(Expr::monomial(o * v, power)));
    }
    let spec = model.spec()?;
    let half_la = spec.a.half_log_derivative().expect("symbolic a");
    let mut wprimes = vec![spec.wprime.clone()];
    for n in 1..=depth {
        let next = half_la
            .plus(&us[n - 1].scaled(-1.0))
            .plus(&wprimes[n - 1].scaled(-1.0));
        wprimes.push(next);
    }
    Ok(EnvironmentChain {
        wprimes,
        us,
        branch,
        a: spec.a.clone(),
        grid: vec![],
        u_samples: vec![],
        wprime_samples: vec![],
    }
    .with_samples(&spec.test_points(5)))
}

/// Numeric expansion of an arbitrary diffusion on a panel grid covering the
/// interval; see the module documentation of the numeric solver for the
/// choice of integration constants.
pub fn expand_numeric(
    spec: &DiffusionSpec,
    branch: Branch,
    depth: usize,
    grid: &[f64],
) -> Result<EnvironmentChain> {
    numeric::expand_numeric(spec, branch, depth, grid)
}

/// The level-(N+1) free-space remainder in the stored orientation:
/// sign(u_N) √(2λ/a).
pub fn free_space_tail(coeffs: &CFCoefficients, lambda: Complex64) -> Complex64 {
    let r = (lambda * coeffs.scale).sqrt();
    match coeffs.u.last() {
        Some(&v) if v < 0.0 => -r,
        _ => r,
    }
}

/// Maximum over λ of |closed truncated fraction − U(x, λ)| for zoo specs,
/// or of the Riccati residual of the truncated fraction otherwise.
pub fn check_expansion(
    spec: &DiffusionSpec,
    chain: &EnvironmentChain,
    lambda_grid: &[f64],
    x: f64,
) -> Result<f64> {
    let value_at = |y: f64, lam: f64| -> Result<f64> {
        let coeffs = chain.coefficients(y);
        let l = Complex64::new(lam, 0.0);
        let tail = free_space_tail(&coeffs, l);
        Ok(eval_cf_closed(&coeffs, l, coeffs.depth(), tail)?.re)
    };
    let zoo = ZooModel::recognize(spec);
    let mut worst = 0.0f64;
    for &lam in lambda_grid {
        let v = value_at(x, lam)?;
        let r = match &zoo {
            Some(m) => (v - zoo_riccati(m, chain.branch, x, Complex64::new(lam, 0.0))?.re).abs(),
            None => {
                let h = 1e-4 * x.abs().max(1.0);
                let d = (value_at(x + h, lam)? - value_at(x - h, lam)?) / (2.0 * h);
                (d + v * v + 2.0 * spec.wprime.eval(x) * v - 2.0 * lam / spec.a.eval(x)).abs()
            }
        };
        worst = worst.max(r);
    }
    Ok(worst)
}
