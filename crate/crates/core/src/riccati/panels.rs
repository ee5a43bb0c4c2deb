use crate::error::{Error, Result};
use crate::models::{DiffusionSpec, ExtReal};
use crate::quad::{Barycentric, GaussLegendre};
use std::sync::{Arc, OnceLock};

pub(crate) struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub cumulative: Vec<Vec<f64>>,
    pub bary: Barycentric,
}

pub(crate) fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let gl = GaussLegendre::standard();
        let bary = Barycentric::new(&gl.nodes);
        Rule {
            nodes: gl.nodes.clone(),
            weights: gl.weights.clone(),
            cumulative: bary.cumulative_matrix(),
            bary,
        }
    })
}

pub(crate) const NODES: usize = 20;
const MAX_PANELS: usize = 40_000;

/// A partition of a truncated interval into panels carrying Gauss–Legendre
/// nodes. The anchor is always a panel boundary.
#[derive(Debug)]
pub(crate) struct PanelGrid {
    pub edges: Vec<f64>,
    pub x: Vec<f64>,
    /// Index of the panel whose left edge is the anchor.
    pub anchor_panel: usize,
}

impl PanelGrid {
    pub fn panels(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn half_width(&self, p: usize) -> f64 {
        0.5 * (self.edges[p + 1] - self.edges[p])
    }

    pub fn build(spec: &DiffusionSpec, span: f64) -> Result<Arc<PanelGrid>> {
        let c = spec.anchor();
        let far = 1e4 * span.max(1.0).max(c.abs());
        let lo = match spec.l {
            ExtReal::Finite(l) => l,
            _ => c - far,
        };
        let hi = match spec.r {
            ExtReal::Finite(r) => r,
            _ => c + far,
        };
        let finite_lo = spec.l.finite();
        let finite_hi = spec.r.finite();
        let width = |x: f64| -> f64 {
            let mut dist = (x - c).abs().max(1.0);
            if let Some(l) = finite_lo {
                dist = dist.min(x - l);
            }
            if let Some(r) = finite_hi {
                dist = dist.min(r - x);
            }
            let wp = spec.wprime.eval(x).abs();
            let la = spec
                .a
                .deriv(x)
                .map(|d| (d / spec.a.eval(x)).abs())
                .unwrap_or(0.0);
            let cap = 4.0 / (2.0 * wp + la + 1e-300);
            (0.2 * dist).min(cap)
        };
        let min_gap = |e: f64| 1e-8 * e.abs().max(1.0);
        let mut right = vec![c];
        let mut x = c;
        loop {
            let stop = match finite_hi {
                Some(r) => r - x <= min_gap(r),
                None => x >= hi,
            };
            if stop {
                break;
            }
            let w = width(x);
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::numerical(format!("panel width degenerate at {x}"), w));
            }
            x += w;
            right.push(x);
            if right.len() > MAX_PANELS {
                return Err(Error::numerical("panel budget exceeded", right.len() as f64));
            }
        }
        let mut left = vec![];
        let mut x = c;
        loop {
            let stop = match finite_lo {
                Some(l) => x - l <= min_gap(l),
                None => x <= lo,
            };
            if stop {
                break;
            }
            let w = width(x);
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::numerical(format!("panel width degenerate at {x}"), w));
            }
            x -= w;
            left.push(x);
            if left.len() > MAX_PANELS {
                return Err(Error::numerical("panel budget exceeded", left.len() as f64));
            }
        }
        let anchor_panel = left.len();
        let mut edges: Vec<f64> = left.into_iter().rev().collect();
        edges.extend(right);
        let r = rule();
        let mut xs = Vec::with_capacity((edges.len() - 1) * NODES);
        for p in 0..edges.len() - 1 {
            let (a, b) = (edges[p], edges[p + 1]);
            for t in &r.nodes {
                xs.push(0.5 * (a + b) + 0.5 * (b - a) * t);
            }
        }
        Ok(Arc::new(PanelGrid {
            edges,
            x: xs,
            anchor_panel,
        }))
    }

    pub fn locate(&self, x: f64) -> Option<usize> {
        let n = self.edges.len();
        if !(x >= self.edges[0] && x <= self.edges[n - 1]) {
            return None;
        }
        let p = self.edges.partition_point(|&e| e <= x);
        Some(p.saturating_sub(1).min(n - 2))
    }

    pub fn interpolate(&self, values: &[f64], x: f64) -> Option<f64> {
        let p = self.locate(x)?;
        let (a, b) = (self.edges[p], self.edges[p + 1]);
        let t = (2.0 * x - a - b) / (b - a);
        Some(rule().bary.eval(&values[p * NODES..(p + 1) * NODES], t))
    }

    /// ∫_anchor^x f at every node, from node values of f.
    pub fn integral_from_anchor(&self, f: &[f64]) -> Vec<f64> {
        let r = rule();
        let np = self.panels();
        let mut out = vec![0.0; f.len()];
        let total = |p: usize| -> f64 {
            self.half_width(p) * (0..NODES).map(|j| r.weights[j] * f[p * NODES + j]).sum::<f64>()
        };
        let mut base = 0.0;
        for p in self.anchor_panel..np {
            let h = self.half_width(p);
            for i in 0..NODES {
                out[p * NODES + i] = base
                    + h * (0..NODES)
                        .map(|j| r.cumulative[i][j] * f[p * NODES + j])
                        .sum::<f64>();
            }
            base += total(p);
        }
        let mut base = 0.0;
        for p in (0..self.anchor_panel).rev() {
            base -= total(p);
            let h = self.half_width(p);
            for i in 0..NODES {
                out[p * NODES + i] = base
                    + h * (0..NODES)
                        .map(|j| r.cumulative[i][j] * f[p * NODES + j])
                        .sum::<f64>();
            }
        }
        out
    }
}

pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// ln ∫_{lo}^{x} g and ln ∫_{x}^{hi} g at every node (both excluding any
/// tail beyond the grid), from ln g at the nodes.
pub(crate) fn log_cumulative(grid: &PanelGrid, ln_g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let r = rule();
    let np = grid.panels();
    let mut left = vec![f64::NEG_INFINITY; ln_g.len()];
    let mut right = vec![f64::NEG_INFINITY; ln_g.len()];
    let mut panel_total = vec![0.0; np];
    let mut e = vec![0.0; NODES];
    let mut partial_left = vec![0.0; ln_g.len()];
    let mut partial_right = vec![0.0; ln_g.len()];
    for p in 0..np {
        let s = &ln_g[p * NODES..(p + 1) * NODES];
        let m = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for j in 0..NODES {
            e[j] = (s[j] - m).exp();
        }
        let h = grid.half_width(p);
        let tot: f64 = h * (0..NODES).map(|j| r.weights[j] * e[j]).sum::<f64>();
        panel_total[p] = m + tot.ln();
        for i in 0..NODES {
            let part: f64 = h * (0..NODES).map(|j| r.cumulative[i][j] * e[j]).sum::<f64>();
            // ∫_{a}^{x_i} over the panel, and the complement ∫_{x_i}^{b}.
            let part = part.clamp(tot * 1e-300, tot);
            partial_left[p * NODES + i] = m + part.ln();
            let comp = (tot - part).max(tot * 1e-17);
            partial_right[p * NODES + i] = m + comp.ln();
        }
    }
    let mut acc = f64::NEG_INFINITY;
    for p in 0..np {
        for i in 0..NODES {
            left[p * NODES + i] = log_add(acc, partial_left[p * NODES + i]);
        }
        acc = log_add(acc, panel_total[p]);
    }
    let mut acc = f64::NEG_INFINITY;
    for p in (0..np).rev() {
        for i in 0..NODES {
            right[p * NODES + i] = log_add(acc, partial_right[p * NODES + i]);
        }
        acc = log_add(acc, panel_total[p]);
    }
    (left, right)
}
