use crate::error::{Error, Result};
use crate::models::Branch;
use crate::specialfn::erfc;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Scan resolution of [`locate_atoms`].
pub const SCAN_POINTS: usize = 4096;
const CIRCLE_NODES: usize = 128;

/// Kind of a sign change of ∓U(x, −z) on the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Crossing {
    Pole,
    Zero,
}

fn g_real(u: &dyn Fn(Complex64) -> Result<Complex64>, branch: Branch, z: f64) -> Result<f64> {
    let v = u(Complex64::new(-z, 0.0))?;
    Ok(branch.sign() * v.re)
}

fn refine(
    g: &dyn Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    mut ga: f64,
    mut gb: f64,
) -> Result<(f64, Crossing)> {
    let start = ga.abs().min(gb.abs());
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            break;
        }
        let gm = g(m)?;
        if gm == 0.0 {
            return Ok((m, Crossing::Zero));
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }
    let kind = if ga.abs().min(gb.abs()) > start {
        Crossing::Pole
    } else {
        Crossing::Zero
    };
    Ok((0.5 * (a + b), kind))
}

/// Residue of f at λ0 from the trapezoid rule on a circle of radius r.
fn residue(f: &dyn Fn(Complex64) -> Result<Complex64>, lam0: f64, r: f64, n: usize) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let th = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        let w = Complex64::from_polar(r, th);
        acc += f(Complex64::new(lam0, 0.0) + w)? * w;
    }
    Ok(acc / n as f64)
}

/// Point masses of σ±(x) inside `window` as (z_k, w_k), in increasing order,
/// at most `k_max` of them.
///
/// Poles of ∓U(x, −z) are bracketed by sign changes on a grid uniform in √z
/// (eigenvalues of Sturm–Liouville problems grow quadratically), located by
/// bisection and weighed by the residue −2 z_k w_k.
pub fn locate_atoms(
    u: &dyn Fn(Complex64) -> Result<Complex64>,
    branch: Branch,
    window: (f64, f64),
    k_max: usize,
) -> Result<Vec<(f64, f64)>> {
    locate_atoms_with(u, branch, window, k_max, SCAN_POINTS)
}

pub fn locate_atoms_with(
    u: &dyn Fn(Complex64) -> Result<Complex64>,
    branch: Branch,
    window: (f64, f64),
    k_max: usize,
    scan_points: usize,
) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = window;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Validation(format!("bad search window ({lo}, {hi})")));
    }
    if scan_points < 2 {
        return Err(Error::Validation("scan needs at least two points".into()));
    }
    let g = |z: f64| g_real(u, branch, z);
    let (s_lo, s_hi) = (lo.sqrt(), hi.sqrt());
    let h = (s_hi - s_lo) / scan_points as f64;
    let mut crossings: Vec<(f64, Crossing)> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut poles = 0;
    for i in 0..scan_points {
        let s = s_lo + (i as f64 + 0.5) * h;
        let z = s * s;
        let gz = g(z)?;
        if !gz.is_finite() {
            return Err(Error::numerical(format!("Riccati variable at z = {z}"), gz));
        }
        if let Some((zp, gp)) = prev {
            // S(z) = ∓U(−z)/(−2z) = ∫σ(dz')/(z' − z) increases between poles
            // and drops across each one, so a drop without a sign change
            // hides poles inside the cell.
            let (sp, sz) = (gp / (-2.0 * zp), gz / (-2.0 * z));
            let drops = sz < sp - 1e-12 * (sp.abs() + sz.abs());
            let changes = gp == 0.0 || gz.signum() != gp.signum();
            if drops && !changes {
                return Err(Error::RefineGrid { z });
            }
            if changes {
                let c = refine(&g, zp, z, gp, gz)?;
                if c.1 == Crossing::Pole {
                    poles += 1;
                }
                crossings.push(c);
                if poles == k_max {
                    break;
                }
            }
        }
        prev = Some((z, gz));
    }
    // Between consecutive poles of a Stieltjes transform there is exactly
    // one zero; a missing zero means two crossings fell into one cell.
    let mut last_pole: Option<f64> = None;
    let mut zero_since = true;
    for &(z, kind) in &crossings {
        match kind {
            Crossing::Pole => {
                if last_pole.is_some() && !zero_since {
                    return Err(Error::RefineGrid { z });
                }
                last_pole = Some(z);
                zero_since = false;
            }
            Crossing::Zero => {
                if zero_since && last_pole.is_some() {
                    return Err(Error::RefineGrid { z });
                }
                zero_since = true;
            }
        }
    }
    let pole_z: Vec<f64> = crossings
        .iter()
        .filter(|c| c.1 == Crossing::Pole)
        .map(|c| c.0)
        .collect();
    let f = |lam: Complex64| -> Result<Complex64> { Ok(u(lam)? * branch.sign()) };
    let mut atoms = Vec::with_capacity(pole_z.len());
    for (k, &zk) in pole_z.iter().enumerate() {
        let mut r = zk.min(zk - lo).min(hi - zk);
        if k > 0 {
            r = r.min(zk - pole_z[k - 1]);
        }
        if k + 1 < pole_z.len() {
            r = r.min(pole_z[k + 1] - zk);
        }
        let r = 0.25 * r;
        let fine = residue(&f, -zk, r, CIRCLE_NODES)?;
        let coarse = residue(&f, -zk, r, CIRCLE_NODES / 2)?;
        let w = -fine.re / (2.0 * zk);
        if (fine - coarse).norm() > 1e-9 * fine.norm() || fine.im.abs() > 1e-8 * fine.norm() {
            return Err(Error::numerical(format!("residue at z = {zk}"), (fine - coarse).norm()));
        }
        if !(w > 0.0) {
            return Err(Error::numerical(format!("atom mass at z = {zk} is not positive"), w));
        }
        atoms.push((zk, w));
    }
    Ok(atoms)
}

/// Weyl-law continuation of a sequence of atoms: for k beyond the last
/// located atom, √z_k ≈ start + α(k − ½ − N) with constant weight, so that
/// sums over the missing atoms become integrals in t = √z from `start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomTail {
    pub alpha: f64,
    pub start: f64,
    pub weight: f64,
}

impl AtomTail {
    /// Fits the continuation to the last atoms, which must already be in the
    /// asymptotic regime (equal spacing in √z and equal weights to 5%).
    pub fn fit(atoms: &[(f64, f64)]) -> Result<AtomTail> {
        let n = atoms.len();
        if n < 6 {
            return Err(Error::Precondition(format!(
                "an atom tail needs at least 6 atoms, got {n}"
            )));
        }
        let s: Vec<f64> = atoms[n - 5..].iter().map(|a| a.0.sqrt()).collect();
        let gaps: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
        let alpha = gaps[gaps.len() - 1];
        let weight = atoms[n - 1].1;
        let spread = gaps.iter().map(|g| (g / alpha - 1.0).abs()).fold(0.0, f64::max);
        let wspread = atoms[n - 4..]
            .iter()
            .map(|a| (a.1 / weight - 1.0).abs())
            .fold(0.0, f64::max);
        if spread > 0.05 || wspread > 0.05 {
            return Err(Error::Precondition(format!(
                "atoms are not in the asymptotic regime (spacing spread {spread:.3}, weight spread {wspread:.3})"
            )));
        }
        Ok(AtomTail {
            alpha,
            start: s[s.len() - 1] + 0.5 * alpha,
            weight,
        })
    }

    /// Σ λ w/(λ + z_k) over the continued atoms.
    pub fn knight(&self, lambda: f64) -> f64 {
        let r = lambda.sqrt();
        self.weight * r / self.alpha * (0.5 * PI - (self.start / r).atan())
    }

    /// Σ w z_k e^{−y z_k} over the continued atoms.
    pub fn levy_density(&self, y: f64) -> f64 {
        let t = self.start;
        let e = (-y * t * t).exp();
        self.weight / self.alpha
            * (t * e / (2.0 * y) + PI.sqrt() * erfc(t * y.sqrt()) / (4.0 * y.powf(1.5)))
    }

    /// Σ w z_k^{−n} over the continued atoms, n ≥ 1.
    pub fn inverse_moment(&self, n: i32) -> f64 {
        let m = 2 * n - 1;
        self.weight / self.alpha * self.start.powi(-m) / m as f64
    }
}
