use crate::error::{Error, Result};
use crate::models::Branch;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// ε ladder used when the caller has no better schedule.
pub const DEFAULT_EPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// A ladder for quantities that feel the measure close to the edge of its
/// support, where the smoothing error of the default ladder is O(√ε) over a
/// band of width ε. Grids used with it should start a few hundred ε inside
/// the support.
pub const FINE_EPS: [f64; 3] = [1e-6, 5e-7, 2.5e-7];

/// Negative extrapolated densities down to this value are clamped to zero.
pub const CLAMP: f64 = 1e-8;

/// Relative size of a non-monotone step in the ε ladder that is still
/// attributed to ordinary smoothing (for instance near a cut endpoint).
const LADDER_TOL: f64 = 0.05;

/// Density samples recovered by [`stieltjes_perron_invert`].
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub z: Vec<f64>,
    pub density: Vec<f64>,
    /// Raw smoothed values, one row per grid point, one column per ε.
    pub raw: Vec<Vec<f64>>,
    pub eps: Vec<f64>,
    /// Largest magnitude clamped to zero.
    pub clamped: f64,
}

/// Smoothed density (1/2π) Im[∓U(−z−iε)/(−z−iε)].
fn smoothed(u: &(dyn Fn(Complex64) -> Result<Complex64> + Sync), branch: Branch, z: f64, eps: f64) -> Result<f64> {
    let lam = Complex64::new(-z, -eps);
    let v = u(lam)?;
    // ∓ reads − on the plus branch, which is exactly Branch::sign.
    let f = branch.sign() * v / lam;
    Ok(f.im / (2.0 * PI))
}

fn check_ladder(z: f64, eps: &[f64], f: &[f64]) -> Result<()> {
    let scale = f.last().unwrap().abs();
    let tol = LADDER_TOL * scale + CLAMP;
    let d: Vec<f64> = f.windows(2).map(|w| w[1] - w[0]).collect();
    for i in 1..d.len() {
        if d[i] * d[i - 1] < 0.0 && d[i].abs().min(d[i - 1].abs()) > tol {
            return Err(Error::AtomSuspected { z });
        }
        // Under an O(ε) error the steps shrink with the ε steps; a growing
        // ladder means the smoothing kernel is resolving a point mass.
        let q = (eps[i] - eps[i + 1]) / (eps[i - 1] - eps[i]);
        if d[i].abs() > 2.0 * q * d[i - 1].abs() + tol {
            return Err(Error::AtomSuspected { z });
        }
    }
    Ok(())
}

/// Stieltjes–Perron inversion on `z_grid` with two-point Richardson
/// extrapolation in ε (assuming an O(ε) error) over the last two entries.
pub fn stieltjes_perron_invert(
    u: &(dyn Fn(Complex64) -> Result<Complex64> + Sync),
    branch: Branch,
    z_grid: &[f64],
    eps_schedule: &[f64],
) -> Result<Inversion> {
    if eps_schedule.len() < 3 {
        return Err(Error::Validation("the ε schedule needs at least three entries".into()));
    }
    if eps_schedule.windows(2).any(|w| !(w[1] < w[0])) || !(eps_schedule[eps_schedule.len() - 1] > 0.0) {
        return Err(Error::Validation("the ε schedule must be positive and strictly decreasing".into()));
    }
    if let Some(z) = z_grid.iter().find(|z| !(**z > 0.0) || !z.is_finite()) {
        return Err(Error::Validation(format!("grid point {z} is not a positive real")));
    }
    let rows: Vec<Result<(f64, Vec<f64>, f64)>> = z_grid
        .par_iter()
        .map(|&z| {
            let raw = eps_schedule
                .iter()
                .map(|&e| smoothed(u, branch, z, e))
                .collect::<Result<Vec<f64>>>()?;
            check_ladder(z, eps_schedule, &raw)?;
            let n = raw.len();
            let (e1, e2) = (eps_schedule[n - 2], eps_schedule[n - 1]);
            let value = (e1 * raw[n - 1] - e2 * raw[n - 2]) / (e1 - e2);
            if !value.is_finite() {
                return Err(Error::numerical(format!("inversion at z = {z}"), value));
            }
            if value < -CLAMP {
                return Err(Error::NegativeDensity { z, value });
            }
            let clamp = if value < 0.0 { -value } else { 0.0 };
            Ok((value.max(0.0), raw, clamp))
        })
        .collect();
    let mut out = Inversion {
        z: z_grid.to_vec(),
        density: Vec::with_capacity(z_grid.len()),
        raw: Vec::with_capacity(z_grid.len()),
        eps: eps_schedule.to_vec(),
        clamped: 0.0,
    };
    for r in rows {
        let (v, raw, c) = r?;
        out.density.push(v);
        out.raw.push(raw);
        out.clamped = out.clamped.max(c);
    }
    Ok(out)
}
