//! The coefficient hierarchy and the Riccati variable of a Brownian
//! environment W(x) = μx + B_x, integrated in logarithmic coordinates.
//!
//! With v_i = ln u_i, the Stratonovich system for the coefficients becomes
//!
//!   dv_i = [2(−1)^{i−1}(μ + Σ_{k<i} (−1)^k u_k) − u_i] dx + 2(−1)^{i−1} dB,
//!
//! and dv = (2λe^{−v} − 2μ − e^v) dx − 2 dB for U. The noise is additive,
//! so the Euler increment of the noise is exact and no Itô correction is
//! involved. The stiff exponential terms are taken implicitly; each step
//! then solves a strictly increasing scalar equation, and positivity holds
//! by construction. All levels consume the same Brownian increment, and a
//! level uses the already updated values of the levels below it.

use super::rng::stream_rng;
use super::SamplePool;
use crate::error::{Error, Result};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SDEConfig {
    pub mu: f64,
    pub depth: usize,
    pub step: f64,
    pub burn_in: f64,
    pub n_samples: usize,
    pub thin: f64,
    pub seed: u64,
    /// Number of independent chains the samples are split across. Fixed by
    /// the configuration, never by the worker count.
    pub chains: usize,
}

impl Default for SDEConfig {
    fn default() -> Self {
        SDEConfig {
            mu: 1.0,
            depth: 1,
            step: 1e-3,
            burn_in: 1e3,
            n_samples: 10_000,
            thin: 1.0,
            seed: 0,
            chains: 8,
        }
    }
}

const MAX_DEPTH: usize = 8;
const LOG_LIMIT: f64 = 700.0;

impl SDEConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("drift μ = {} must be positive", self.mu));
        }
        if self.depth == 0 || self.depth > MAX_DEPTH {
            return bad(format!("depth {} outside 1..={MAX_DEPTH}", self.depth));
        }
        if !(self.step > 0.0 && self.thin > 0.0) {
            return bad("step and thin must be positive".into());
        }
        if self.step > self.thin / 10.0 {
            return bad(format!("step {} exceeds thin/10 = {}", self.step, self.thin / 10.0));
        }
        let min_burn = 100.0 * (1.0f64).max(1.0 / self.mu);
        if !(self.burn_in >= min_burn) {
            return bad(format!("burn_in {} is below 100·max(1, 1/μ) = {min_burn}", self.burn_in));
        }
        if self.n_samples == 0 || self.chains == 0 {
            return bad("n_samples and chains must be positive".into());
        }
        Ok(())
    }

    /// The same run with half the step.
    pub fn refine(&self) -> Self {
        SDEConfig { step: self.step / 2.0, ..*self }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain struct")
    }

    /// Steps per retained sample, with the step shrunk so that a whole
    /// number of steps spans `thin`.
    fn grid(&self) -> (f64, usize, usize) {
        let per_thin = (self.thin / self.step).ceil() as usize;
        let h = self.thin / per_thin as f64;
        let burn = (self.burn_in / h).ceil() as usize;
        (h, per_thin, burn)
    }

    fn chain_sizes(&self) -> Vec<usize> {
        let (q, r) = (self.n_samples / self.chains, self.n_samples % self.chains);
        (0..self.chains).map(|c| q + usize::from(c < r)).collect()
    }
}

/// Root of the strictly increasing g with derivative dg, starting from v0:
/// Newton steps, falling back to bisection whenever a step leaves the
/// current bracket.
fn solve_increasing(g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64, v0: f64) -> f64 {
    let g0 = g(v0);
    if g0 == 0.0 {
        return v0;
    }
    let (mut lo, mut hi) = (v0, v0);
    let mut width = 0.5;
    if g0 > 0.0 {
        loop {
            lo = v0 - width;
            if g(lo) <= 0.0 {
                break;
            }
            hi = lo;
            width *= 2.0;
        }
    } else {
        loop {
            hi = v0 + width;
            if g(hi) >= 0.0 {
                break;
            }
            lo = hi;
            width *= 2.0;
        }
    }
    let mut v = v0.clamp(lo, hi);
    for _ in 0..200 {
        let gv = g(v);
        if gv == 0.0 {
            return v;
        }
        if gv < 0.0 {
            lo = v;
        } else {
            hi = v;
        }
        let mut next = v - gv / dg(v);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let tol = 1e-15 * v.abs().max(1.0);
        if (next - v).abs() <= tol || hi - lo <= tol {
            return next;
        }
        v = next;
    }
    v
}

/// One implicit step v' + h e^{v'} = r of a coefficient level.
fn step_level(v: f64, r: f64, h: f64) -> f64 {
    solve_increasing(|w| w + h * w.exp() - r, |w| 1.0 + h * w.exp(), v)
}

/// One implicit step v' + h e^{v'} − 2λh e^{−v'} = r of ln U.
fn step_u(v: f64, r: f64, h: f64, lambda: f64) -> f64 {
    solve_increasing(
        |w| w + h * w.exp() - 2.0 * lambda * h * (-w).exp() - r,
        |w| 1.0 + h * w.exp() + 2.0 * lambda * h * (-w).exp(),
        v,
    )
}

fn run_chain(cfg: &SDEConfig, chain: usize, n: usize, mut advance: impl FnMut(&mut [f64], f64, f64), dim: usize, start: f64) -> Result<Vec<f64>> {
    let (h, per_thin, burn) = cfg.grid();
    let sqrt_h = h.sqrt();
    let mut rng = stream_rng(cfg.seed, chain as u64);
    let mut v = vec![start; dim];
    let mut out = Vec::with_capacity(n * dim);
    let total = burn + n * per_thin;
    for k in 1..=total {
        let db: f64 = sqrt_h * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        advance(&mut v, h, db);
        if v.iter().any(|x| !(x.abs() <= LOG_LIMIT)) {
            return Err(Error::BlowUp { x: k as f64 * h });
        }
        if k > burn && (k - burn) % per_thin == 0 {
            out.extend(v.iter().map(|x| x.exp()));
        }
    }
    Ok(out)
}

fn gather(chunks: Vec<Result<Vec<f64>>>) -> Result<Vec<f64>> {
    let mut all = Vec::new();
    for c in chunks {
        all.extend(c?);
    }
    Ok(all)
}

/// Stationary joint samples of (u_1, …, u_d).
pub fn simulate_hierarchy(cfg: &SDEConfig) -> Result<SamplePool> {
    cfg.validate()?;
    let (mu, d) = (cfg.mu, cfg.depth);
    let sizes = cfg.chain_sizes();
    let chunks: Vec<Result<Vec<f64>>> = sizes
        .par_iter()
        .enumerate()
        .map(|(c, &n)| {
            let advance = |v: &mut [f64], h: f64, db: f64| {
                // Σ_{k<i} (−1)^k u_k over the updated lower levels.
                let mut alt = 0.0;
                for i in 0..d {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    let c = 2.0 * sign * (mu + alt);
                    let r = v[i] + h * c + 2.0 * sign * db;
                    v[i] = step_level(v[i], r, h);
                    // Level i+1 in 1-based terms carries (−1)^{i+1}.
                    alt += -sign * v[i].exp();
                }
            };
            run_chain(cfg, c, n, advance, d, (2.0 * mu).ln())
        })
        .collect();
    let values = gather(chunks)?;
    let config = json!({"kind": "hierarchy", "sde": cfg.to_json()});
    Ok(SamplePool::new(format!("hierarchy mu={} d={}", mu, d), d, values, cfg.seed, &config))
}

/// Stationary samples of the Riccati variable U at spectral parameter λ.
pub fn simulate_u(cfg: &SDEConfig, lambda: f64) -> Result<SamplePool> {
    cfg.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Validation(format!("λ = {lambda} must be positive")));
    }
    let mu = cfg.mu;
    let sizes = cfg.chain_sizes();
    let chunks: Vec<Result<Vec<f64>>> = sizes
        .par_iter()
        .enumerate()
        .map(|(c, &n)| {
            let advance = |v: &mut [f64], h: f64, db: f64| {
                let r = v[0] - 2.0 * mu * h - 2.0 * db;
                v[0] = step_u(v[0], r, h, lambda);
            };
            let start = (-mu + (mu * mu + 2.0 * lambda).sqrt()).ln();
            run_chain(cfg, c, n, advance, 1, start)
        })
        .collect();
    let values = gather(chunks)?;
    let config = json!({"kind": "riccati", "lambda": lambda, "sde": cfg.to_json()});
    Ok(SamplePool::new(format!("U mu={mu} lambda={lambda}"), 1, values, cfg.seed, &config))
}
