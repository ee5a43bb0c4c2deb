//! Continued fractions in λ of the form
//!
//! U = u0 ± (sλ)/(u1 + (sλ)/(u2 + …)),  s = 2/a(x),
//!
//! with the sign `+` on the minus branch and `−` on the plus branch. The
//! stored coefficients are thereby oriented so that positivity of every
//! u_n (n ≥ 1) is exactly the S-fraction condition on both branches.

mod series;

pub use series::PowerSeries;

use crate::error::{Error, Result};
use crate::models::Branch;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use series::{check_len, reciprocal};

/// Replacement for vanishing Lentz intermediates.
pub const LENTZ_FLOOR: f64 = 1e-30;
/// Default depth budget of the adaptive evaluator.
pub const MAX_DEPTH: usize = 10_000;
const BREAKDOWN: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CFCoefficients {
    pub u0: f64,
    pub u: Vec<f64>,
    /// s = 2/a(x).
    pub scale: f64,
    pub branch: Branch,
    pub x: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SFraction {
    pub masses: Vec<f64>,
    pub gaps: Vec<f64>,
}

/// Outcome of [`series_to_u`].
#[derive(Debug, Clone, PartialEq)]
pub enum Expansion {
    Complete(CFCoefficients),
    /// The leading coefficient broke down after `recovered` levels: the
    /// underlying measure has finitely many growth points.
    Terminated {
        coeffs: CFCoefficients,
        recovered: usize,
    },
}

impl Expansion {
    pub fn coeffs(&self) -> &CFCoefficients {
        match self {
            Expansion::Complete(c) => c,
            Expansion::Terminated { coeffs, .. } => coeffs,
        }
    }

    pub fn into_coeffs(self) -> CFCoefficients {
        match self {
            Expansion::Complete(c) => c,
            Expansion::Terminated { coeffs, .. } => coeffs,
        }
    }
}

impl CFCoefficients {
    pub fn depth(&self) -> usize {
        self.u.len()
    }

    fn orientation(&self) -> f64 {
        self.branch.sign()
    }

    /// Coefficients u_n in the unoriented form U = u0 + sλ/(ũ1 + sλ/(ũ2 + …)).
    pub fn standard(&self) -> Vec<f64> {
        let o = self.orientation();
        self.u.iter().map(|v| o * v).collect()
    }

    /// The same fraction relabelled to `branch`, flipping the stored signs.
    pub fn reoriented(&self, branch: Branch) -> CFCoefficients {
        if branch == self.branch {
            return self.clone();
        }
        CFCoefficients {
            u: self.u.iter().map(|v| -v).collect(),
            branch,
            ..self.clone()
        }
    }

    /// Partial sums Σ_{n≤k} u_n.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.u
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .collect()
    }

    /// Re-expands the depth-`n` convergent as a power series with `k`
    /// coefficients.
    pub fn convergent_series(&self, n: usize, k: usize) -> Result<PowerSeries> {
        // Work with F = U − u0 in standard orientation, backwards:
        // T_n = 0, T_{j-1} = sλ / (ũ_j + T_j).
        let ut = self.standard();
        let mut t = vec![0.0; k + 1];
        for j in (1..=n.min(ut.len())).rev() {
            let mut den = t.clone();
            den[0] += ut[j - 1];
            if den[0] == 0.0 {
                return Err(Error::ConvergentPole { level: j });
            }
            let r = reciprocal(&den, k);
            t = vec![0.0; k + 1];
            for i in 0..k {
                t[i + 1] = self.scale * r.c[i];
            }
        }
        Ok(PowerSeries::new(t[1..].to_vec()))
    }
}

/// Builds u_1..u_N from the series of F = U(x, λ) − U(x, 0) by repeated
/// reciprocation: u_k = s / [λ¹]F_{k−1} and F_k = sλ/F_{k−1} − u_k.
///
/// The result is tagged with the minus branch, whose orientation is the
/// unoriented one; use [`CFCoefficients::reoriented`] for the plus branch.
pub fn series_to_u(series: &PowerSeries, scale: f64, depth: usize) -> Result<Expansion> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Validation(format!("scale must be positive, got {scale}")));
    }
    check_len(series, depth)?;
    let mut f = series.coeffs.clone();
    let mut mag: Vec<f64> = f.iter().map(|c| c.abs()).collect();
    let mut u = Vec::with_capacity(depth);
    let series_scale = mag.iter().cloned().fold(0.0, f64::max);
    let mut terminated = None;
    for level in 0..depth {
        let lead = f[0];
        let bound = if level == 0 { series_scale } else { mag[0] };
        if lead.abs() < BREAKDOWN * bound || lead == 0.0 {
            terminated = Some(level);
            break;
        }
        let uk = scale / lead;
        u.push(uk);
        if level + 1 == depth {
            break;
        }
        // sλ/F = s / (c1 + c2 λ + …); subtract its constant term uk.
        let r = reciprocal(&f, f.len());
        f = r.c[1..].iter().map(|v| scale * v).collect();
        mag = r.mag[1..].iter().map(|v| scale * v).collect();
        if f.is_empty() {
            if level + 2 <= depth {
                return Err(Error::Validation(format!(
                    "series too short for depth {depth}"
                )));
            }
            break;
        }
    }
    let coeffs = CFCoefficients {
        u0: 0.0,
        u,
        scale,
        branch: Branch::Minus,
        x: None,
    };
    let n = coeffs.depth();
    // Re-expansion check through order λ^n.
    let back = coeffs.convergent_series(n, n)?;
    let worst = back
        .coeffs
        .iter()
        .zip(&series.coeffs)
        .map(|(b, c)| (b - c).abs() / c.abs().max(1e-300))
        .fold(0.0, f64::max);
    if worst > 1e-8 {
        return Err(Error::numerical("series_to_u re-expansion", worst));
    }
    Ok(match terminated {
        Some(recovered) => Expansion::Terminated { coeffs, recovered },
        None => Expansion::Complete(coeffs),
    })
}

/// m_n = a u_{2n+1}, ℓ_n = u_{2n}/2; every u_n must be positive.
pub fn u_to_sfraction(coeffs: &CFCoefficients) -> Result<SFraction> {
    for (i, &v) in coeffs.u.iter().enumerate() {
        if !(v > 0.0) {
            return Err(Error::NotAnSFraction {
                index: i + 1,
                value: v,
            });
        }
    }
    let a = 2.0 / coeffs.scale;
    let masses = coeffs.u.iter().step_by(2).map(|v| a * v).collect();
    let gaps = coeffs.u.iter().skip(1).step_by(2).map(|v| v / 2.0).collect();
    Ok(SFraction { masses, gaps })
}

pub fn sfraction_to_u(sf: &SFraction, a_at_x: f64, branch: Branch) -> Result<CFCoefficients> {
    if !(a_at_x > 0.0) {
        return Err(Error::Validation(format!("a(x) must be positive, got {a_at_x}")));
    }
    let n = sf.masses.len();
    if !(sf.gaps.len() == n || sf.gaps.len() + 1 == n) {
        return Err(Error::Validation("masses and gaps must interleave".into()));
    }
    if let Some((i, &v)) = sf
        .masses
        .iter()
        .chain(&sf.gaps)
        .enumerate()
        .find(|(_, v)| !(**v > 0.0))
    {
        return Err(Error::NotAnSFraction { index: i, value: v });
    }
    let mut u = Vec::with_capacity(n + sf.gaps.len());
    for i in 0..n {
        u.push(sf.masses[i] / a_at_x);
        if let Some(g) = sf.gaps.get(i) {
            u.push(2.0 * g);
        }
    }
    Ok(CFCoefficients {
        u0: 0.0,
        u,
        scale: 2.0 / a_at_x,
        branch,
        x: None,
    })
}

impl SFraction {
    /// 1/(m_0 ω + 1/(ℓ_1 + 1/(m_1 ω + …))).
    pub fn eval(&self, omega: Complex64) -> Complex64 {
        let mut t = Complex64::new(0.0, 0.0);
        let n = self.masses.len();
        for i in (0..n).rev() {
            if let Some(&g) = self.gaps.get(i) {
                t = (t + g).inv();
            }
            t = (omega * self.masses[i] + t).inv();
        }
        t
    }
}

/// Backward evaluation of the depth-N convergent.
pub fn eval_cf_fixed(coeffs: &CFCoefficients, lambda: Complex64, n: usize) -> Result<Complex64> {
    eval_cf_closed(coeffs, lambda, n, Complex64::new(0.0, 0.0))
}

/// Depth-N evaluation with the level-(N+1) remainder replaced by `tail`
/// (in the stored orientation).
pub fn eval_cf_closed(
    coeffs: &CFCoefficients,
    lambda: Complex64,
    n: usize,
    tail: Complex64,
) -> Result<Complex64> {
    if n > coeffs.depth() {
        return Err(Error::Validation(format!(
            "depth {n} exceeds the {} available coefficients",
            coeffs.depth()
        )));
    }
    if lambda == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(coeffs.u0, 0.0));
    }
    let sl = lambda * coeffs.scale;
    let mut t = tail;
    for k in (1..=n).rev() {
        let d = t + coeffs.u[k - 1];
        if d.norm() < 1e-300 {
            return Err(Error::ConvergentPole { level: k });
        }
        t = sl / d;
    }
    Ok(Complex64::new(coeffs.u0, 0.0) + t * coeffs.orientation())
}

/// Forward evaluation of g = sλ/(u_1 + sλ/(u_2 + …)) by the modified Lentz
/// scheme. Returns the value and the depth used.
pub fn eval_cf_adaptive(
    coeff: impl Fn(usize) -> f64,
    scale: f64,
    lambda: Complex64,
    rel_tol: f64,
) -> Result<(Complex64, usize)> {
    if !(rel_tol >= 1e-14) {
        return Err(Error::Validation(format!("rel_tol must be at least 1e-14, got {rel_tol}")));
    }
    let a = lambda * scale;
    if a == Complex64::new(0.0, 0.0) {
        return Ok((a, 0));
    }
    let floor = Complex64::new(LENTZ_FLOOR, 0.0);
    let mut f = floor;
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..=MAX_DEPTH {
        let b = coeff(k);
        d = d * a + b;
        if d.norm() < LENTZ_FLOOR {
            d = floor;
        }
        c = a / c + b;
        if c.norm() < LENTZ_FLOOR {
            c = floor;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < rel_tol {
            // The fraction starts with a/(b_1 + …): f holds b_0 + … with
            // b_0 = 0 replaced by the floor.
            return Ok((f - floor, k));
        }
    }
    Err(Error::NonConvergence { depth: MAX_DEPTH })
}

/// Adaptive evaluation of a stored fraction, continuing past its last
/// coefficient with `extend`.
pub fn eval_coefficients_adaptive(
    coeffs: &CFCoefficients,
    extend: impl Fn(usize) -> f64,
    lambda: Complex64,
    rel_tol: f64,
) -> Result<(Complex64, usize)> {
    let (g, n) = eval_cf_adaptive(
        |k| coeffs.u.get(k - 1).copied().unwrap_or_else(|| extend(k)),
        coeffs.scale,
        lambda,
        rel_tol,
    )?;
    Ok((Complex64::new(coeffs.u0, 0.0) + g * coeffs.orientation(), n))
}
