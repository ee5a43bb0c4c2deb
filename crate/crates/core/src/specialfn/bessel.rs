//! Bessel functions of real order and positive real argument.
//!
//! I and K follow Temme's series for small arguments and Steed's continued
//! fraction beyond z = 2, with the ratio I'/I from a Lentz continued fraction
//! and I recovered through the Wronskian. J and Y use the analogous scheme
//! with the complex continued fraction for large arguments. Every value is
//! carried as a mantissa together with a logarithmic scale so that the long
//! recurrences needed at high order cannot overflow internally.

use super::gamma::temme_gammas;
use crate::error::{Error, Result};
use std::f64::consts::PI;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;
const XMIN: f64 = 2.0;
const BIG: f64 = 1e250;
const MAX_ORDER: f64 = 50.0;
const MIN_ARG: f64 = 1e-300;
const MAX_ARG: f64 = 1e5;

/// A value represented as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn new(mantissa: f64, log_scale: f64) -> Self {
        Scaled {
            mantissa,
            log_scale,
        }
    }

    /// Converts to an `f64`, failing only when the magnitude overflows.
    pub fn value(self) -> Result<f64> {
        if self.mantissa == 0.0 {
            return Ok(0.0);
        }
        let lg = self.mantissa.abs().ln() + self.log_scale;
        if lg > 709.0 {
            return Err(Error::Overflow {
                log_scale: self.log_scale,
                mantissa: self.mantissa,
            });
        }
        Ok(self.mantissa * self.log_scale.exp())
    }

    /// Natural logarithm of the absolute value.
    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }

    fn combine(a: Scaled, ca: f64, b: Scaled, cb: f64) -> Scaled {
        let l = a.log_scale.max(b.log_scale);
        let ma = if ca == 0.0 {
            0.0
        } else {
            ca * a.mantissa * (a.log_scale - l).exp()
        };
        let mb = if cb == 0.0 {
            0.0
        } else {
            cb * b.mantissa * (b.log_scale - l).exp()
        };
        Scaled::new(ma + mb, l)
    }
}

/// sin(πx) with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r == 0.5 {
        return 1.0;
    }
    if r == 1.5 {
        return -1.0;
    }
    (PI * r).sin()
}

/// cos(πx) with exact zeros at the half-integers.
pub(crate) fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

fn check_args(p: f64, z: f64, name: &str) -> Result<()> {
    if !p.is_finite() || p.abs() > MAX_ORDER {
        return Err(Error::Domain(format!(
            "{name}: order {p} outside |p| <= {MAX_ORDER}"
        )));
    }
    if !(z > 0.0) || !z.is_finite() || z < MIN_ARG || z > MAX_ARG {
        return Err(Error::Domain(format!("{name}: argument {z} must be positive")));
    }
    Ok(())
}

/// I and K with derivatives for `nu >= 0`; each pair shares a scale.
#[derive(Debug, Clone, Copy)]
pub struct IkPair {
    pub i: Scaled,
    pub ip: Scaled,
    pub k: Scaled,
    pub kp: Scaled,
}

pub(crate) fn bessik(nu: f64, x: f64) -> Result<IkPair> {
    let nl = (nu + 0.5) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    // CF1 for I'_nu / I_nu.
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numerical("bessik CF1", (h).abs()));
    }

    // Downward recurrence from nu to the fractional order mu.
    let mut ril = FPMIN;
    let mut ripl = h * ril;
    let ril1 = ril;
    let rip1 = ripl;
    let mut log_r = 0.0;
    let mut fact = nu * xi;
    for _ in (1..=nl).rev() {
        let ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
        if ril.abs() > BIG {
            ril /= BIG;
            ripl /= BIG;
            log_r += BIG.ln();
        }
    }
    let f = ripl / ril;

    // K_mu and K_{mu+1}, scaled by exp(lk).
    let (rkmu, rk1, lk) = if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fct = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let dd = -x2.ln();
        let e = xmu * dd;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fct * (gam1 * e.cosh() + gam2 * fact2 * dd);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut cc = 1.0;
        let d2 = x2 * x2;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            cc *= d2 / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = cc * ff;
            sum += del;
            let del1 = cc * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::numerical("bessik series", 1.0));
        }
        (sum, sum1 * xi2, 0.0)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut ok = false;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS && (delh / h).abs() < EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::numerical("bessik CF2", 1.0));
        }
        h *= a1;
        let rkmu = (PI / (2.0 * x)).sqrt() / s;
        let rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
        (rkmu, rk1, -x)
    };

    let rkmup = xmu * xi * rkmu - rk1;
    let wr = xi / (f * rkmu - rkmup);
    let li = -lk - log_r;
    let i_nu = Scaled::new(wr * ril1 / ril, li);
    let ip_nu = Scaled::new(wr * rip1 / ril, li);

    let mut rkmu = rkmu;
    let mut rk1 = rk1;
    let mut lk = lk;
    for i in 1..=nl {
        let rktemp = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
        if rk1.abs() > BIG {
            rk1 /= BIG;
            rkmu /= BIG;
            lk += BIG.ln();
        }
    }
    let k_nu = Scaled::new(rkmu, lk);
    let kp_nu = Scaled::new(nu * xi * rkmu - rk1, lk);
    Ok(IkPair {
        i: i_nu,
        ip: ip_nu,
        k: k_nu,
        kp: kp_nu,
    })
}

/// J and Y with derivatives for `nu >= 0`.
#[derive(Debug, Clone, Copy)]
pub struct JyPair {
    pub j: Scaled,
    pub jp: Scaled,
    pub y: Scaled,
    pub yp: Scaled,
}

pub(crate) fn bessjy(nu: f64, x: f64) -> Result<JyPair> {
    let nl = if x < XMIN {
        (nu + 0.5) as usize
    } else {
        (nu - x + 1.5).max(0.0) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numerical("bessjy CF1", h.abs()));
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut log_r = 0.0;
    let mut fact = nu * xi;
    for _ in (1..=nl).rev() {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > BIG {
            rjl /= BIG;
            rjpl /= BIG;
            log_r += BIG.ln();
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, rymu, ry1) = if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fct = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let dd = -x2.ln();
        let e = xmu * dd;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fct * (gam1 * e.cosh() + gam2 * fact2 * dd);
        let ee = e.exp();
        let mut p = ee / (gampl * PI);
        let mut q = 1.0 / (ee * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS {
            1.0
        } else {
            pimu2.sin() / pimu2
        };
        let r = PI * pimu2 * fact3 * fact3;
        let mut cc = 1.0;
        let d2 = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            cc *= d2 / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = cc * (ff + r * q);
            sum += del;
            let del1 = cc * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::numerical("bessjy series", 1.0));
        }
        let rymu = -sum;
        let ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        let rjmu = w / (rymup - f * rymu);
        (rjmu, rymu, ry1)
    } else {
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fct = a * xi / (p * p + q * q);
        let mut cr = br + q * fct;
        let mut ci = bi + p * fct;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut ok = false;
        for i in 2..MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fct = a / (cr * cr + ci * ci);
            cr = br + cr * fct;
            ci = bi - ci * fct;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::numerical("bessjy CF2", 1.0));
        }
        let gam = (p - f) / q;
        let mut rjmu = (w / ((p - f) * gam + q)).sqrt();
        if rjl < 0.0 {
            rjmu = -rjmu;
        }
        let rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        let ry1 = xmu * xi * rymu - rymup;
        (rjmu, rymu, ry1)
    };

    let fct = rjmu / rjl;
    let j = Scaled::new(rjl1 * fct, -log_r);
    let jp = Scaled::new(rjp1 * fct, -log_r);
    let mut rymu = rymu;
    let mut ry1 = ry1;
    let mut ly = 0.0;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
        if ry1.abs() > BIG {
            ry1 /= BIG;
            rymu /= BIG;
            ly += BIG.ln();
        }
    }
    let y = Scaled::new(rymu, ly);
    let yp = Scaled::new(nu * xi * rymu - ry1, ly);
    Ok(JyPair { j, jp, y, yp })
}

/// I_p(z) as a scaled value, any real order with |p| ≤ 50.
pub fn bessel_i_scaled_log(p: f64, z: f64) -> Result<Scaled> {
    check_args(p, z, "bessel_i")?;
    let nu = p.abs();
    let ik = bessik(nu, z)?;
    if p >= 0.0 {
        return Ok(ik.i);
    }
    let s = sin_pi(nu);
    Ok(Scaled::combine(ik.i, 1.0, ik.k, 2.0 / PI * s))
}

/// K_p(z) as a scaled value.
pub fn bessel_k_scaled_log(p: f64, z: f64) -> Result<Scaled> {
    check_args(p, z, "bessel_k")?;
    Ok(bessik(p.abs(), z)?.k)
}

/// J_p(z) as a scaled value.
pub fn bessel_j_scaled_log(p: f64, z: f64) -> Result<Scaled> {
    check_args(p, z, "bessel_j")?;
    let nu = p.abs();
    let jy = bessjy(nu, z)?;
    if p >= 0.0 {
        return Ok(jy.j);
    }
    Ok(Scaled::combine(jy.j, cos_pi(nu), jy.y, -sin_pi(nu)))
}

/// Y_p(z) as a scaled value.
pub fn bessel_y_scaled_log(p: f64, z: f64) -> Result<Scaled> {
    check_args(p, z, "bessel_y")?;
    let nu = p.abs();
    let jy = bessjy(nu, z)?;
    if p >= 0.0 {
        return Ok(jy.y);
    }
    Ok(Scaled::combine(jy.j, sin_pi(nu), jy.y, cos_pi(nu)))
}

/// Modified Bessel function of the first kind.
pub fn bessel_i(p: f64, z: f64) -> Result<f64> {
    bessel_i_scaled_log(p, z)?.value()
}

/// Modified Bessel function of the second kind.
pub fn bessel_k(p: f64, z: f64) -> Result<f64> {
    bessel_k_scaled_log(p, z)?.value()
}

/// Bessel function of the first kind.
pub fn bessel_j(p: f64, z: f64) -> Result<f64> {
    bessel_j_scaled_log(p, z)?.value()
}

/// Bessel function of the second kind.
pub fn bessel_y(p: f64, z: f64) -> Result<f64> {
    bessel_y_scaled_log(p, z)?.value()
}

/// e^{-z} I_p(z).
pub fn bessel_i_scaled(p: f64, z: f64) -> Result<f64> {
    let s = bessel_i_scaled_log(p, z)?;
    Scaled::new(s.mantissa, s.log_scale - z).value()
}

/// e^{z} K_p(z).
pub fn bessel_k_scaled(p: f64, z: f64) -> Result<f64> {
    let s = bessel_k_scaled_log(p, z)?;
    Scaled::new(s.mantissa, s.log_scale + z).value()
}

/// I_ν, I_ν', K_ν and K_ν' at z for ν ≥ 0, as scaled values.
pub fn bessel_ik_pair(nu: f64, z: f64) -> Result<IkPair> {
    check_args(nu, z, "bessel_ik_pair")?;
    if nu < 0.0 {
        return Err(Error::Domain(format!("bessel_ik_pair needs nu >= 0, got {nu}")));
    }
    bessik(nu, z)
}

/// J_ν, J_ν', Y_ν and Y_ν' at z for ν ≥ 0, as scaled values.
pub fn bessel_jy_pair(nu: f64, z: f64) -> Result<JyPair> {
    check_args(nu, z, "bessel_jy_pair")?;
    if nu < 0.0 {
        return Err(Error::Domain(format!("bessel_jy_pair needs nu >= 0, got {nu}")));
    }
    bessjy(nu, z)
}

/// J_p(z) and J_p'(z) as plain values.
pub(crate) fn bessel_j_and_deriv(p: f64, z: f64) -> Result<(f64, f64)> {
    check_args(p, z, "bessel_j")?;
    if p < 0.0 {
        return Err(Error::Domain("derivative path needs p >= 0".into()));
    }
    let jy = bessjy(p, z)?;
    Ok((jy.j.value()?, jy.jp.value()?))
}

fn mcmahon(p: f64, k: usize) -> f64 {
    let mu = 4.0 * p * p;
    let beta = (k as f64 + 0.5 * p - 0.25) * PI;
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * e.powi(5))
}

/// k-th positive zero of J_p for p ≥ 0.
///
/// The zero is bracketed by a sign-change scan (which fixes its index),
/// seeded with McMahon's asymptotic guess when that guess falls inside the
/// bracket, and polished by Newton steps that fall back to bisection
/// whenever they leave the bracket.
pub fn bessel_j_zero(p: f64, k: usize) -> Result<f64> {
    if !(p >= 0.0) || p > MAX_ORDER || k == 0 {
        return Err(Error::Domain(format!(
            "bessel_j_zero requires p in [0, {MAX_ORDER}] and k >= 1"
        )));
    }
    let step = 0.25;
    let mut a = p.max(step * 0.5);
    let mut fa = bessel_j(p, a)?;
    let mut found = 0;
    let mut bracket = None;
    for _ in 0..10_000_000 {
        let b = a + step;
        let fb = bessel_j(p, b)?;
        if fb == 0.0 {
            found += 1;
            if found == k {
                return Ok(b);
            }
            a = b + 1e-9;
            fa = bessel_j(p, a)?;
            continue;
        }
        if fa.signum() != fb.signum() {
            found += 1;
            if found == k {
                bracket = Some((a, b, fa));
                break;
            }
        }
        a = b;
        fa = fb;
    }
    let (mut lo, mut hi, flo) = bracket.ok_or_else(|| Error::numerical("bessel_j_zero scan", 1.0))?;
    let guess = mcmahon(p, k);
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    let sign_lo = flo.signum();
    for _ in 0..200 {
        let (f, fp) = bessel_j_and_deriv(p, x)?;
        if f == 0.0 {
            return Ok(x);
        }
        if f.signum() == sign_lo {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - f / fp;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < 1e-15 * x.max(1.0) || hi - lo < 4e-16 * x.max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::numerical("bessel_j_zero Newton", hi - lo))
}
