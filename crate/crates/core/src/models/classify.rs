//! Feller classification of endpoints.
//!
//! Both defining integrals are accumulated over a geometric sequence of
//! segments marching from the anchor toward the endpoint. On every segment
//! W, the cumulative scale ∫ s' and the cumulative speed ∫ m are carried at
//! 20 Gauss–Legendre nodes by spectral integration matrices, in logarithmic
//! form so that exponentially large or small characteristics stay finite.

use super::spec::{DiffusionSpec, EndpointClass, ExtReal, Side};
use crate::error::{Error, Result};
use crate::quad::{Barycentric, GaussLegendre, TruncationSequence, Verdict};
use std::sync::OnceLock;

const MAX_SEGMENTS: usize = 1100;

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<Vec<f64>>,
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let gl = GaussLegendre::standard();
        let bary = Barycentric::new(&gl.nodes);
        Rule {
            nodes: gl.nodes.clone(),
            weights: gl.weights.clone(),
            cumulative: bary.cumulative_matrix(),
        }
    })
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

/// Node data of one segment of the march.
pub(crate) struct Segment {
    pub x: Vec<f64>,
    /// |dx| quadrature weights.
    pub weight: Vec<f64>,
    pub w: Vec<f64>,
    pub ln_a: Vec<f64>,
    /// ln ∫ s' between the anchor and each node.
    pub ln_s_cum: Vec<f64>,
    /// ln ∫ m between the anchor and each node.
    pub ln_m_cum: Vec<f64>,
    /// ln ∫ s' between the anchor and the outer end of the segment.
    pub ln_s_outer: f64,
}

pub(crate) struct EndpointMarch<'a> {
    spec: &'a DiffusionSpec,
    anchor: f64,
    end: ExtReal,
    dir: f64,
    k: usize,
    w_inner: f64,
    ln_s: f64,
    ln_m: f64,
    span: f64,
}

impl<'a> EndpointMarch<'a> {
    pub fn new(spec: &'a DiffusionSpec, side: Side) -> Self {
        let anchor = spec.anchor();
        let end = spec.endpoint(side);
        let dir = if side == Side::Right { 1.0 } else { -1.0 };
        let span = match end {
            ExtReal::Finite(e) => (e - anchor).abs(),
            _ => anchor.abs().max(1.0),
        };
        EndpointMarch {
            spec,
            anchor,
            end,
            dir,
            k: 0,
            w_inner: 0.0,
            ln_s: f64::NEG_INFINITY,
            ln_m: f64::NEG_INFINITY,
            span,
        }
    }

    fn bounds(&self, k: usize) -> Option<(f64, f64)> {
        match self.end {
            ExtReal::Finite(e) => {
                let d_in = self.span * 0.5f64.powi(k as i32);
                let d_out = d_in * 0.5;
                let inner = e - self.dir * d_in;
                let outer = e - self.dir * d_out;
                (d_out > 1e-300 && outer != e && outer != inner).then_some((inner, outer))
            }
            _ => {
                let inner = self.anchor + self.dir * self.span * (2f64.powi(k as i32) - 1.0);
                let outer = self.anchor + self.dir * self.span * (2f64.powi(k as i32 + 1) - 1.0);
                (outer.abs() < 1e300).then_some((inner, outer))
            }
        }
    }

    pub fn next_segment(&mut self) -> Result<Option<Segment>> {
        if self.k >= MAX_SEGMENTS {
            return Ok(None);
        }
        let Some((inner, outer)) = self.bounds(self.k) else {
            return Ok(None);
        };
        self.k += 1;
        let r = rule();
        let n = r.nodes.len();
        let h = 0.5 * (outer - inner);
        let x: Vec<f64> = r.nodes.iter().map(|t| inner + h * (t + 1.0)).collect();
        let wp: Vec<f64> = x.iter().map(|&xi| self.spec.wprime.eval(xi)).collect();
        let ln_a: Vec<f64> = x.iter().map(|&xi| self.spec.a.eval(xi).ln()).collect();
        if wp.iter().chain(&ln_a).any(|v| !v.is_finite()) {
            return Err(Error::numerical(
                format!("characteristics not finite on [{inner}, {outer}]"),
                f64::NAN,
            ));
        }
        let w: Vec<f64> = (0..n)
            .map(|i| self.w_inner + h * (0..n).map(|j| r.cumulative[i][j] * wp[j]).sum::<f64>())
            .collect();
        let w_outer = self.w_inner + h * (0..n).map(|j| r.weights[j] * wp[j]).sum::<f64>();
        let ln_sp: Vec<f64> = w.iter().map(|wi| -2.0 * wi).collect();
        let ln_mp: Vec<f64> = (0..n).map(|i| std::f64::consts::LN_2 - ln_a[i] + 2.0 * w[i]).collect();
        let habs = h.abs();
        let cum = |ln_f: &[f64], base: f64| -> (Vec<f64>, f64) {
            let m = ln_f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let e: Vec<f64> = ln_f.iter().map(|v| (v - m).exp()).collect();
            let nodes = (0..n)
                .map(|i| {
                    let part: f64 = (0..n).map(|j| r.cumulative[i][j] * e[j]).sum();
                    log_add(base, m + (habs * part.max(1e-300)).ln())
                })
                .collect();
            let total: f64 = (0..n).map(|j| r.weights[j] * e[j]).sum();
            (nodes, log_add(base, m + (habs * total).ln()))
        };
        let (ln_s_cum, ln_s_outer) = cum(&ln_sp, self.ln_s);
        let (ln_m_cum, ln_m_outer) = cum(&ln_mp, self.ln_m);
        self.w_inner = w_outer;
        self.ln_s = ln_s_outer;
        self.ln_m = ln_m_outer;
        Ok(Some(Segment {
            weight: r.weights.iter().map(|wj| wj * habs).collect(),
            x,
            w,
            ln_a,
            ln_s_cum,
            ln_m_cum,
            ln_s_outer,
        }))
    }
}

/// Outcome of the two boundary integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryIntegrals {
    /// ∫ m((c, x]) s'(x) dx: finite iff the endpoint is exit.
    pub exit: Verdict,
    /// ∫ |s(x) − s(c)| m(x) dx: finite iff the endpoint is entrance.
    pub entrance: Verdict,
}

pub fn boundary_integrals(spec: &DiffusionSpec, side: Side) -> Result<BoundaryIntegrals> {
    let mut march = EndpointMarch::new(spec, side);
    let mut exit_seq = TruncationSequence::new();
    let mut ent_seq = TruncationSequence::new();
    let (mut t_exit, mut t_ent) = (0.0f64, 0.0f64);
    let mut exit = Verdict::Undecided;
    let mut entrance = Verdict::Undecided;
    while let Some(seg) = march.next_segment()? {
        for i in 0..seg.x.len() {
            let ln_m = std::f64::consts::LN_2 - seg.ln_a[i] + 2.0 * seg.w[i];
            t_exit += seg.weight[i] * (seg.ln_m_cum[i] - 2.0 * seg.w[i]).exp();
            t_ent += seg.weight[i] * (seg.ln_s_cum[i] + ln_m).exp();
        }
        if exit == Verdict::Undecided {
            exit = exit_seq.push(t_exit);
        }
        if entrance == Verdict::Undecided {
            entrance = ent_seq.push(t_ent);
        }
        if exit != Verdict::Undecided && entrance != Verdict::Undecided {
            break;
        }
    }
    Ok(BoundaryIntegrals { exit, entrance })
}

/// Classifies an endpoint as non-singular, entrance-not-exit,
/// exit-not-entrance or natural.
pub fn classify_endpoint(spec: &DiffusionSpec, side: Side) -> Result<EndpointClass> {
    let b = boundary_integrals(spec, side)?;
    let finite = |v: Verdict| match v {
        Verdict::Convergent(_) => Some(true),
        Verdict::Divergent => Some(false),
        Verdict::Undecided => None,
    };
    match (finite(b.exit), finite(b.entrance)) {
        (Some(true), Some(true)) => Ok(EndpointClass::NonSingular),
        (Some(false), Some(true)) => Ok(EndpointClass::EntranceNotExit),
        (Some(true), Some(false)) => Ok(EndpointClass::ExitNotEntrance),
        (Some(false), Some(false)) => Ok(EndpointClass::Natural),
        _ => Err(Error::ClassificationUncertain {
            side: format!("{side:?}").to_lowercase(),
            detail: format!("exit integral {:?}, entrance integral {:?}", b.exit, b.entrance),
        }),
    }
}

/// Verdict on ∫ s' from the anchor to the endpoint, i.e. whether s is
/// finite there.
pub fn scale_finite_at(spec: &DiffusionSpec, side: Side) -> Result<Verdict> {
    let mut march = EndpointMarch::new(spec, side);
    let mut seq = TruncationSequence::new();
    while let Some(seg) = march.next_segment()? {
        let v = seq.push(seg.ln_s_outer.exp());
        if v != Verdict::Undecided {
            return Ok(v);
        }
    }
    Ok(Verdict::Undecided)
}
