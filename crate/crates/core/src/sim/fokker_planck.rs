//! Discretized stationary Fokker–Planck operator of the hierarchy applied to
//! the product of gamma densities.

use crate::error::{Error, Result};
use crate::specialfn::ln_gamma;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct FokkerPlanckReport {
    pub mu: f64,
    pub depth: usize,
    pub points: usize,
    pub step: f64,
    pub max_relative: f64,
    pub max_abs: f64,
    pub worst_point: Vec<f64>,
}

fn gamma_density(mu: f64, y: f64) -> f64 {
    ((mu - 1.0) * y.ln() - 0.5 * y - ln_gamma(mu) - mu * std::f64::consts::LN_2).exp()
}

fn drift(mu: f64, y: &[f64], i: usize) -> f64 {
    let mut alt = 0.0;
    for (k, yk) in y.iter().enumerate().take(i) {
        alt += if k % 2 == 0 { -yk } else { *yk };
    }
    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
    2.0 * sign * y[i] * (mu + alt) - y[i] * y[i]
}

/// Fourth-order central difference of g along coordinate `i`.
fn partial(g: &dyn Fn(&[f64]) -> f64, y: &[f64], i: usize, h: f64) -> f64 {
    let mut p = y.to_vec();
    let mut at = |t: f64| {
        p[i] = y[i] + t;
        g(&p)
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

/// Evaluates Σ_i ∂_i{−a_i f + 2(−1)^{i−1} y_i Σ_j (−1)^{j−1} ∂_j(y_j f)} at
/// the points of a tensor grid on [lo, hi]^d with every derivative replaced
/// by a fourth-order central difference of step h.
///
/// The residual at a point is divided by the sum of the absolute values of
/// the 2d outer-derivative terms, so the report measures cancellation
/// relative to the size of the terms that cancel.
pub fn fokker_planck_residual(mu: f64, depth: usize, lo: f64, hi: f64, per_axis: usize, h: f64) -> Result<FokkerPlanckReport> {
    fokker_planck_residual_with(mu, mu, depth, lo, hi, per_axis, h)
}

/// The same operator, for drift `mu`, applied to the product of
/// Gamma(`shape`, 2) densities.
pub fn fokker_planck_residual_with(
    mu: f64,
    shape: f64,
    depth: usize,
    lo: f64,
    hi: f64,
    per_axis: usize,
    h: f64,
) -> Result<FokkerPlanckReport> {
    if !(mu > 0.0 && shape > 0.0) || depth == 0 || !(lo > 2.0 * h) || !(hi > lo) || per_axis < 2 {
        return Err(Error::Validation("grid must lie inside (0, ∞) with μ > 0".into()));
    }
    let f = move |y: &[f64]| y.iter().map(|&t| gamma_density(shape, t)).product::<f64>();
    let noise_flux = move |y: &[f64], i: usize| -> f64 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let mut s = 0.0;
        for j in 0..depth {
            let sj = if j % 2 == 0 { 1.0 } else { -1.0 };
            let yjf = move |p: &[f64]| p[j] * f(p);
            s += sj * partial(&yjf, y, j, h);
        }
        2.0 * sign * y[i] * s
    };
    let mut report = FokkerPlanckReport {
        mu,
        depth,
        points: 0,
        step: h,
        max_relative: 0.0,
        max_abs: 0.0,
        worst_point: vec![],
    };
    let total = per_axis.pow(depth as u32);
    let mut y = vec![0.0; depth];
    for idx in 0..total {
        let mut k = idx;
        for c in y.iter_mut() {
            *c = lo + (hi - lo) * (k % per_axis) as f64 / (per_axis - 1) as f64;
            k /= per_axis;
        }
        let (mut residual, mut scale) = (0.0, 0.0);
        for i in 0..depth {
            let drift_flux = move |p: &[f64]| -drift(mu, p, i) * f(p);
            let a = partial(&drift_flux, &y, i, h);
            let b = partial(&|p: &[f64]| noise_flux(p, i), &y, i, h);
            residual += a + b;
            scale += a.abs() + b.abs();
        }
        let rel = residual.abs() / scale;
        report.points += 1;
        report.max_abs = report.max_abs.max(residual.abs());
        if rel > report.max_relative || report.worst_point.is_empty() {
            report.max_relative = rel;
            report.worst_point = y.clone();
        }
    }
    Ok(report)
}
