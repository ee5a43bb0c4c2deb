//! Ratios of Bessel-type functions at complex argument.
//!
//! Only ratios are needed by the Riccati closed forms, and ratios stay
//! bounded where the functions themselves overflow.

use super::gamma::temme_gammas;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAXIT: usize = 200_000;

/// ρ_b(w) = ₀F₁(;b+1;w) / ₀F₁(;b;w) for b > 0 by Gauss's continued fraction
/// ρ_b = 1 / (1 + (w/(b(b+1))) / (1 + (w/((b+1)(b+2))) / (1 + …))),
/// which converges for every complex w away from the poles of ρ_b.
pub fn hyp0f1_ratio(b: f64, w: Complex64) -> Result<Complex64> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("hyp0f1_ratio requires b > 0, got {b}")));
    }
    // Modified Lentz on T = 1 + a_1/(1 + a_2/(1 + ...)).
    let tiny = Complex64::new(TINY, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut f = one;
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..MAXIT {
        let bk = b + k as f64 - 1.0;
        let a = w / (bk * (bk + 1.0));
        d = one + a * d;
        if d.norm() < TINY {
            d = tiny;
        }
        c = one + a / c;
        if c.norm() < TINY {
            c = tiny;
        }
        d = one / d;
        let delta = c * d;
        f *= delta;
        if (delta - one).norm() < EPS && (k as f64) * (k as f64) > w.norm() {
            return Ok(one / f);
        }
    }
    Err(Error::NonConvergence { depth: MAXIT })
}

/// K_{μ+1}(z)/K_μ(z) for |μ| ≤ 1/2 and Re z ≥ 0, z ≠ 0.
fn k_ratio_base(mu: f64, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if z.norm() < 2.0 {
        // Temme's series, valid for complex argument.
        let mu2 = mu * mu;
        let x2 = z * 0.5;
        let pimu = PI * mu;
        let fct = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = d * mu;
        let fact2 = if e.norm() < EPS { one } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = (e.cosh() * gam1 + fact2 * d * gam2) * fct;
        let mut sum = ff;
        let ee = e.exp();
        let mut p = ee * (0.5 / gampl);
        let mut q = (ee * gammi).inv() * 0.5;
        let mut c = one;
        let d2 = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (ff * fi + p + q) / (fi * fi - mu2);
            c = c * d2 / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - ff * fi);
            if del.norm() < sum.norm() * EPS {
                return Ok(sum1 * 2.0 / (z * sum));
            }
        }
        Err(Error::numerical("complex K series", 1.0))
    } else {
        // Steed's continued fraction.
        let mut b = (one + z) * 2.0;
        let mut d = b.inv();
        let mut delh = d;
        let mut h = d;
        let mut q1 = Complex64::new(0.0, 0.0);
        let mut q2 = one;
        let a1 = 0.25 - mu * mu;
        let mut q = Complex64::new(a1, 0.0);
        let mut c = a1;
        let mut a = -a1;
        let mut s = one + q * delh;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += qnew * c;
            b += 2.0;
            d = (b + d * a).inv();
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).norm() < EPS && (delh / h).norm() < EPS {
                h *= a1;
                return Ok((z + mu + 0.5 - h) / z);
            }
        }
        Err(Error::numerical("complex K continued fraction", 1.0))
    }
}

/// K_{ν+1}(z)/K_ν(z) for real ν and complex z with Re z ≥ 0, z ≠ 0.
///
/// The fractional-order ratio is moved to order ν by the three-term
/// recurrence, run in the direction of increasing |ν| where it is stable.
pub fn k_ratio(nu: f64, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 || z.re < -1e-300 || !nu.is_finite() {
        return Err(Error::Domain(format!("k_ratio: bad arguments nu={nu}, z={z}")));
    }
    let n = nu.round();
    let mu = nu - n;
    let mut r = k_ratio_base(mu, z)?;
    let mut order = mu;
    let n = n as i64;
    if n >= 0 {
        for _ in 0..n {
            // r_{ν+1} = 1/r_ν + 2(ν+1)/z
            r = r.inv() + (2.0 * (order + 1.0)) / z;
            order += 1.0;
        }
    } else {
        for _ in 0..(-n) {
            // r_{ν-1} = 1/(r_ν − 2ν/z)
            r = (r - (2.0 * order) / z).inv();
            order -= 1.0;
        }
    }
    Ok(r)
}
