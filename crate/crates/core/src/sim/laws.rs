//! Stationary laws: the gamma law of the coefficients and the generalized
//! inverse Gaussian law of the Riccati variable.

use crate::error::{Error, Result};
use crate::quad::{self, GaussLegendre};
use crate::specialfn::reg_inc_gamma_lower;

/// CDF of Gamma(shape μ, scale 2) at y.
pub fn gamma_cdf(mu: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    reg_inc_gamma_lower(mu, 0.5 * y).unwrap_or(f64::NAN)
}

/// The law with density c y^{−μ−1} e^{−y/2 − λ/y} on (0, ∞).
///
/// The constant c comes from adaptive quadrature. The CDF is tabulated on a
/// logarithmic grid by cell-wise Gauss–Legendre integration and interpolated
/// by cubic Hermite polynomials whose slopes are the density itself.
#[derive(Debug, Clone)]
pub struct GigLaw {
    pub mu: f64,
    pub lambda: f64,
    ln_c: f64,
    t: Vec<f64>,
    cdf: Vec<f64>,
    slope: Vec<f64>,
}

impl GigLaw {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !mu.is_finite() {
            return Err(Error::Validation(format!("GIG law needs λ > 0 and finite μ, got λ = {lambda}, μ = {mu}")));
        }
        // Work in t = ln y: the density of t is y f(y) = y^{−μ} e^{−y/2 − λ/y}.
        let ln_g = |t: f64| -mu * t - 0.5 * t.exp() - lambda * (-t).exp();
        let mode = {
            // g'(t) = 0 ⇔ −μ − y/2 + λ/y = 0.
            let y = -mu + (mu * mu + 2.0 * lambda).sqrt();
            y.ln()
        };
        let peak = ln_g(mode);
        let edge = |dir: f64| {
            let mut t = mode;
            let mut step = 0.5;
            while ln_g(t) - peak > -60.0 {
                t += dir * step;
                step *= 1.2;
            }
            t
        };
        let (lo, hi) = (edge(-1.0), edge(1.0));
        let z = quad::integrate(|t| (ln_g(t) - peak).exp(), lo, hi, 0.0, 1e-14)?.value;
        let ln_c = -(z.ln() + peak);
        let n = 6000;
        let h = (hi - lo) / n as f64;
        let gl = GaussLegendre::standard();
        let dens_t = |t: f64| (ln_g(t) + ln_c).exp();
        let mut t = Vec::with_capacity(n + 1);
        let mut cdf = Vec::with_capacity(n + 1);
        let mut slope = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        for i in 0..=n {
            let ti = lo + h * i as f64;
            if i > 0 {
                acc += gl.integrate(ti - h, ti, dens_t);
            }
            t.push(ti);
            cdf.push(acc);
            slope.push(dens_t(ti));
        }
        Ok(GigLaw { mu, lambda, ln_c, t, cdf, slope })
    }

    pub fn density(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        (self.ln_c - (self.mu + 1.0) * y.ln() - 0.5 * y - self.lambda / y).exp()
    }

    /// ln of the normalizing constant c.
    pub fn ln_normalizer(&self) -> f64 {
        self.ln_c
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if !(y > 0.0) {
            return 0.0;
        }
        let t = y.ln();
        let n = self.t.len() - 1;
        if t <= self.t[0] {
            return 0.0;
        }
        if t >= self.t[n] {
            return 1.0;
        }
        let h = self.t[1] - self.t[0];
        let i = (((t - self.t[0]) / h) as usize).min(n - 1);
        let s = (t - self.t[i]) / h;
        let (p0, p1, m0, m1) = (self.cdf[i], self.cdf[i + 1], self.slope[i] * h, self.slope[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * p0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * p1 + (s3 - s2) * m1;
        v.clamp(0.0, 1.0)
    }

    /// E[g(Y)] by quadrature in ln y.
    pub fn expectation(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        let (lo, hi) = (self.t[0], self.t[self.t.len() - 1]);
        let ln_c = self.ln_c;
        let (mu, lambda) = (self.mu, self.lambda);
        let q = quad::integrate(
            |t| {
                let y = t.exp();
                g(y) * (ln_c - mu * t - 0.5 * y - lambda / y).exp()
            },
            lo,
            hi,
            0.0,
            1e-12,
        )?;
        Ok(q.value)
    }
}
