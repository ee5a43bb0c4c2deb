use super::logtrap::{integrate, LogIntegral, TailFailure};
use super::{LevyMeasure, SpectralMeasure};
use crate::error::{Error, Result};

/// Relative size of the far-end closure tolerated by
/// [`levy_from_spectral`].
const TAIL_BUDGET: f64 = 1e-8;

/// Either kind of measure, for [`moment_n`].
#[derive(Debug, Clone, Copy)]
pub enum Measure<'a> {
    Spectral(&'a SpectralMeasure),
    Levy(&'a LevyMeasure),
}

fn density_integral(sigma: &SpectralMeasure, weight: impl Fn(f64) -> f64) -> std::result::Result<LogIntegral, TailFailure> {
    let d = sigma.offsets();
    let g: Vec<f64> = sigma
        .z
        .iter()
        .zip(&sigma.density)
        .map(|(&z, &rho)| weight(z) * rho)
        .collect();
    integrate(&d, &g)
}

/// ν(x, {∞}) = σ(x, {0}) and ν(dy)/dy = ∫ z e^{−yz} σ(dz) on `y_grid`.
pub fn levy_from_spectral(sigma: &SpectralMeasure, y_grid: &[f64]) -> Result<LevyMeasure> {
    if let Some(y) = y_grid.iter().find(|y| !(**y > 0.0) || !y.is_finite()) {
        return Err(Error::Validation(format!("duration {y} is not a positive real")));
    }
    if y_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Validation("the duration grid must be increasing".into()));
    }
    let mut density = Vec::with_capacity(y_grid.len());
    for &y in y_grid {
        let mut v: f64 = sigma.atoms.iter().map(|&(z, w)| w * z * (-y * z).exp()).sum();
        if let Some(t) = &sigma.atom_tail {
            v += t.levy_density(y);
        }
        if !sigma.z.is_empty() {
            let r = density_integral(sigma, |z| z * (-y * z).exp())
                .map_err(|_| Error::ExtendGrid { deficit: f64::INFINITY })?;
            v += r.total();
            // The closure below the first sample is part of the rule; the
            // one beyond the last sample is a truncation and must be small.
            if r.hi_tail.abs() > TAIL_BUDGET * v.abs() {
                return Err(Error::ExtendGrid { deficit: r.hi_tail.abs() });
            }
        }
        density.push(v);
    }
    Ok(LevyMeasure {
        atom_inf: sigma.atom0,
        y: y_grid.to_vec(),
        density,
        branch: sigma.branch,
        x: sigma.x,
    })
}

/// ψ(λ) = λ ∫ σ(dz)/(λ+z), the atom at 0 contributing σ({0}).
pub fn knight_exponent(sigma: &SpectralMeasure, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Validation(format!("lambda must be positive, got {lambda}")));
    }
    let mut v = sigma.atom0;
    v += sigma
        .atoms
        .iter()
        .map(|&(z, w)| lambda * w / (lambda + z))
        .sum::<f64>();
    if let Some(t) = &sigma.atom_tail {
        v += t.knight(lambda);
    }
    let r = density_integral(sigma, |z| lambda / (lambda + z))
        .map_err(|_| Error::ExtendGrid { deficit: f64::INFINITY })?;
    Ok(v + r.total())
}

/// ψ(λ) = ν({∞}) + ∫ (1 − e^{−λy}) ν(dy).
pub fn levy_khintchine_exponent(nu: &LevyMeasure, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Validation(format!("lambda must be positive, got {lambda}")));
    }
    let g: Vec<f64> = nu
        .y
        .iter()
        .zip(&nu.density)
        .map(|(&y, &d)| -(-lambda * y).exp_m1() * d)
        .collect();
    let r = integrate(&nu.y, &g).map_err(|_| Error::ExtendGrid { deficit: f64::INFINITY })?;
    Ok(nu.atom_inf + r.total())
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// ∫ y^n ν(dy) over finite durations, or equivalently n! ∫ z^{−n} σ(dz)
/// over z > 0. The atoms σ({0}) and ν({∞}) are excluded.
pub fn moment_n(m: Measure<'_>, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Validation("moment order must be at least 1".into()));
    }
    let divergent = Error::MomentDivergence { order: n as i32 };
    match m {
        Measure::Spectral(s) => {
            let mut v: f64 = s.atoms.iter().map(|&(z, w)| w * z.powi(-(n as i32))).sum();
            if let Some(t) = &s.atom_tail {
                v += t.inverse_moment(n as i32);
            }
            if !s.z.is_empty() {
                v += density_integral(s, |z| z.powi(-(n as i32)))
                    .map_err(|_| divergent)?
                    .total();
            }
            Ok(factorial(n) * v)
        }
        Measure::Levy(l) => {
            let g: Vec<f64> = l
                .y
                .iter()
                .zip(&l.density)
                .map(|(&y, &d)| y.powi(n as i32) * d)
                .collect();
            Ok(integrate(&l.y, &g).map_err(|_| divergent)?.total())
        }
    }
}

/// Mean duration of the finite excursions, ∫ y ν(dy).
pub fn excursion_mean_duration(nu: &LevyMeasure) -> Result<f64> {
    moment_n(Measure::Levy(nu), 1)
}
