use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// F(λ) = Σ_{k≥1} c_k λ^k, stored as `coeffs[k-1] = c_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    pub coeffs: Vec<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PowerSeries { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Taylor coefficients of √(μ² + 2λ) − |μ| (binomial series).
    pub fn sqrt_shift(mu: f64, k: usize) -> Self {
        // √(μ²+2λ) = |μ| Σ_j binom(1/2, j) (2λ/μ²)^j
        let m = mu.abs();
        let mut coeffs = Vec::with_capacity(k);
        let mut binom = 1.0;
        let mut pow = 1.0;
        for j in 1..=k {
            binom *= (0.5 - (j as f64 - 1.0)) / j as f64;
            pow *= 2.0 / (m * m);
            coeffs.push(m * binom * pow);
        }
        PowerSeries { coeffs }
    }
}

/// Coefficients of a dense power series starting at λ^0, together with a
/// bound on the magnitude of the terms that produced each entry.
#[derive(Debug, Clone)]
pub(crate) struct Tracked {
    pub c: Vec<f64>,
    pub mag: Vec<f64>,
}

/// 1/a as a series truncated to `n` terms; a[0] must be nonzero.
pub(crate) fn reciprocal(a: &[f64], n: usize) -> Tracked {
    let mut c = vec![0.0; n];
    let mut mag = vec![0.0; n];
    c[0] = 1.0 / a[0];
    mag[0] = c[0].abs();
    for k in 1..n {
        let mut s = 0.0;
        let mut m = 0.0;
        for j in 1..=k.min(a.len() - 1) {
            let t = a[j] * c[k - j];
            s += t;
            m += (a[j] * mag[k - j]).abs();
        }
        c[k] = -s / a[0];
        mag[k] = m / a[0].abs();
    }
    Tracked { c, mag }
}

pub(crate) fn check_len(series: &PowerSeries, depth: usize) -> Result<()> {
    if series.len() < depth {
        return Err(Error::Validation(format!(
            "series has {} coefficients but depth {} was requested",
            series.len(),
            depth
        )));
    }
    Ok(())
}
