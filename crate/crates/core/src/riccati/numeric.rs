//! Numeric expansion on a panel grid.
//!
//! Each level is represented by ln g_n with g_n = e^{−2W_n}. The solutions
//! of u' + u² + 2W_n'u = 0 are u = g_n/(c + ∫g_n); the constant is fixed by
//! anchoring the integral at an endpoint where g_n is integrable, which is
//! the only way to keep u single-signed on the whole interval:
//!
//! * u = g_n / ∫_l^x g_n  (positive) needs ∫_l g_n < ∞,
//! * u = −g_n / ∫_x^r g_n (negative) needs ∫^r g_n < ∞,
//! * u ≡ 0 is always available.
//!
//! The branch sign is preferred. At level 0 the fallback is u ≡ 0, since
//! U±(x, 0) never has the opposite sign; at deeper levels the opposite
//! sign comes next and u ≡ 0 last. The next environment follows from
//! W_{n+1}' = a'/2a − u_n − W_n', which in terms of g reads
//! g_{n+1} ∝ (∫g_n)² / (a g_n).

use super::panels::{log_cumulative, rule, PanelGrid, NODES};
use super::EnvironmentChain;
use crate::error::{Error, Result};
use crate::models::{Branch, DiffusionSpec, RealFunction};
use std::sync::Arc;

const ALPHA_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Choice {
    Positive,
    Negative,
    Zero,
}

/// A function sampled at the panel nodes.
struct Sampled {
    grid: Arc<PanelGrid>,
    values: Vec<f64>,
}

impl Sampled {
    fn at(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x).unwrap_or(f64::NAN)
    }

    /// Value extrapolated to the outer edge of the first or last panel.
    fn at_edge(&self, last: bool) -> f64 {
        let p = if last { self.grid.panels() - 1 } else { 0 };
        let t = if last { 1.0 } else { -1.0 };
        rule().bary.eval(&self.values[p * NODES..(p + 1) * NODES], t)
    }
}

fn sampled_function(label: String, s: Sampled) -> RealFunction {
    let s = Arc::new(s);
    RealFunction::native(label, move |x| s.at(x), None)
}

/// Signed sample of u stored as sign · exp(ln_abs).
fn u_function(label: String, grid: Arc<PanelGrid>, sign: f64, ln_abs: Vec<f64>) -> RealFunction {
    if sign == 0.0 {
        return RealFunction::constant(0.0);
    }
    let s = Sampled { grid, values: ln_abs };
    RealFunction::native(label, move |x| sign * s.at(x).exp(), None)
}

pub(crate) fn expand_numeric(
    spec: &DiffusionSpec,
    branch: Branch,
    depth: usize,
    grid_points: &[f64],
) -> Result<EnvironmentChain> {
    if depth > 20 {
        return Err(Error::Validation(format!("depth {depth} exceeds 20")));
    }
    if grid_points.iter().any(|&x| !spec.contains(x)) {
        return Err(Error::Domain("grid points must lie inside the interval".into()));
    }
    if !spec.a.has_deriv() {
        return Err(Error::Precondition("a'(x) must be available".into()));
    }
    let c = spec.anchor();
    let span = grid_points
        .iter()
        .map(|x| (x - c).abs())
        .fold(1.0f64, f64::max);
    let grid = PanelGrid::build(spec, span)?;
    let n = grid.x.len();
    let ln_a: Vec<f64> = grid.x.iter().map(|&x| spec.a.eval(x).ln()).collect();
    let half_la: Vec<f64> = grid
        .x
        .iter()
        .map(|&x| spec.a.deriv(x).unwrap() / (2.0 * spec.a.eval(x)))
        .collect();
    let mut wp: Vec<f64> = grid.x.iter().map(|&x| spec.wprime.eval(x)).collect();
    if wp.iter().chain(&ln_a).any(|v| !v.is_finite()) {
        return Err(Error::numerical("characteristics not finite on the grid", f64::NAN));
    }
    let w0 = grid.integral_from_anchor(&wp);
    let mut ln_g: Vec<f64> = w0.iter().map(|w| -2.0 * w).collect();

    let mut wprimes = vec![spec.wprime.clone()];
    let mut us = Vec::with_capacity(depth + 1);
    let mut chain_u_samples: Vec<Vec<f64>> = Vec::new();
    let mut chain_w_samples: Vec<Vec<f64>> = vec![grid_points.iter().map(|&x| spec.wprime.eval(x)).collect()];

    for level in 0..=depth {
        let (mut ln_left, mut ln_right) = log_cumulative(&grid, &ln_g);
        let g_s = Sampled {
            grid: grid.clone(),
            values: ln_g.clone(),
        };
        let w_s = Sampled {
            grid: grid.clone(),
            values: wp.clone(),
        };
        // Tails beyond the truncated grid, with the local power exponent α.
        let tail = |last: bool| -> (bool, f64) {
            let xe = if last {
                grid.edges[grid.edges.len() - 1]
            } else {
                grid.edges[0]
            };
            let lg = g_s.at_edge(last);
            let wpe = w_s.at_edge(last);
            let end = if last { spec.r.finite() } else { spec.l.finite() };
            match end {
                Some(e) => {
                    let alpha = -2.0 * (xe - e) * wpe;
                    let finite = alpha > -1.0 + ALPHA_MARGIN;
                    let d = (xe - e).abs();
                    (finite, lg + (d / (alpha + 1.0).abs()).ln())
                }
                None => {
                    let alpha = -2.0 * xe * wpe;
                    let finite = alpha < -1.0 - ALPHA_MARGIN;
                    (finite, lg + (xe.abs() / (alpha + 1.0).abs()).ln())
                }
            }
        };
        let (left_finite, left_tail) = tail(false);
        let (right_finite, right_tail) = tail(true);
        for v in ln_left.iter_mut() {
            *v = super::panels::log_add(*v, left_tail);
        }
        for v in ln_right.iter_mut() {
            *v = super::panels::log_add(*v, right_tail);
        }
        let preferred = match branch {
            Branch::Minus => [Choice::Positive, Choice::Negative, Choice::Zero],
            Branch::Plus => [Choice::Negative, Choice::Positive, Choice::Zero],
        };
        let available = |ch: Choice| match ch {
            Choice::Positive => left_finite,
            Choice::Negative => right_finite,
            Choice::Zero => true,
        };
        let choice = if level == 0 {
            if available(preferred[0]) {
                preferred[0]
            } else {
                Choice::Zero
            }
        } else {
            *preferred.iter().find(|&&ch| available(ch)).expect("zero always available")
        };
        let (sign, ln_int) = match choice {
            Choice::Positive => (1.0, &ln_left),
            Choice::Negative => (-1.0, &ln_right),
            Choice::Zero => (0.0, &ln_left),
        };
        let ln_abs_u: Vec<f64> = if sign == 0.0 {
            vec![f64::NEG_INFINITY; n]
        } else {
            (0..n).map(|i| ln_g[i] - ln_int[i]).collect()
        };
        if sign != 0.0 && ln_abs_u.iter().any(|v| !v.is_finite()) {
            return Err(Error::SignSelectionFailure {
                level,
                detail: "anchored integral vanished or overflowed on the grid".into(),
            });
        }
        let u_nodes: Vec<f64> = ln_abs_u.iter().map(|v| sign * v.exp()).collect();
        us.push(u_function(
            format!("u_{level}"),
            grid.clone(),
            sign,
            ln_abs_u.clone(),
        ));
        chain_u_samples.push(
            grid_points
                .iter()
                .map(|&x| {
                    if sign == 0.0 {
                        0.0
                    } else {
                        sign * grid.interpolate(&ln_abs_u, x).unwrap().exp()
                    }
                })
                .collect(),
        );
        if level == depth {
            break;
        }
        // Next environment.
        let next_wp: Vec<f64> = (0..n).map(|i| half_la[i] - u_nodes[i] - wp[i]).collect();
        let mut next_ln_g: Vec<f64> = (0..n)
            .map(|i| {
                let lint = if sign == 0.0 { 0.0 } else { 2.0 * ln_int[i] };
                lint - ln_a[i] - ln_g[i]
            })
            .collect();
        // Normalize g_{n+1} to 1 at the anchor.
        let c_val = grid.interpolate(&next_ln_g, c).unwrap_or(0.0);
        for v in next_ln_g.iter_mut() {
            *v -= c_val;
        }
        wp = next_wp;
        ln_g = next_ln_g;
        let w_s = Sampled {
            grid: grid.clone(),
            values: wp.clone(),
        };
        chain_w_samples.push(grid_points.iter().map(|&x| w_s.at(x)).collect());
        wprimes.push(sampled_function(format!("W_{}'", level + 1), w_s));
    }
    Ok(EnvironmentChain {
        wprimes,
        us,
        branch,
        a: spec.a.clone(),
        grid: grid_points.to_vec(),
        u_samples: chain_u_samples,
        wprime_samples: chain_w_samples,
    })
}
