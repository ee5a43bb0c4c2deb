//! Ciesielski–Taylor pairs: Z = 𝒯_h(X) with h = −s, so that the hitting
//! time of y by Z has the law of the time X spends below y.

use super::{endpoint_is_finite, native_h, t_h_with, TransformRecord};
use crate::error::{Error, Result};
use crate::models::classify::EndpointMarch;
use crate::models::{scale_finite_at, zoo_phi0, Branch, BoundaryKind, DiffusionSpec, RealFunction, Side, ZooModel};
use crate::quad::{self, TruncationSequence, Verdict};
use serde::Serialize;
use serde_json::Value;
use std::f64::consts::LN_2;

/// Outcome of one of the four hypotheses.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub index: u8,
    pub statement: &'static str,
    pub holds: bool,
    pub detail: String,
}

/// Machine-readable statement of the identity in law, for Monte Carlo.
#[derive(Debug, Clone, Serialize)]
pub struct CtNote {
    pub identity: &'static str,
    pub levels: &'static str,
    pub x: Value,
    pub z: Value,
    pub x_label: String,
    pub z_label: String,
    /// s(r) in the normalization s(x0) = 0. The pair is built from the
    /// shifted scale s − s(r), which vanishes at r.
    pub scale_shift: f64,
    pub h: String,
    pub hypotheses: Vec<HypothesisCheck>,
}

#[derive(Debug, Clone)]
pub struct CtPair {
    pub record: TransformRecord,
    pub z: DiffusionSpec,
    pub note: CtNote,
}

const STATEMENTS: [&str; 4] = [
    "s(l) = -inf",
    "s(r) is finite (and is shifted to 0)",
    "r is killing when finite",
    "s(y) m(y) -> 0 at a finite l, or the integral of s^2 m diverges at l = -inf",
];

/// ln(|s(y)| m(y)) at the outer node of each segment marching to l, and the
/// truncated integrals of s² m, with s shifted to vanish at r.
fn left_profile(spec: &DiffusionSpec, shift: f64, segments: usize) -> Result<(Vec<f64>, Verdict)> {
    let mut march = EndpointMarch::new(spec, Side::Left);
    let mut seq = TruncationSequence::new();
    let mut total = 0.0f64;
    let mut verdict = Verdict::Undecided;
    let mut profile = Vec::new();
    for _ in 0..segments {
        let Some(seg) = march.next_segment()? else { break };
        for i in 0..seg.x.len() {
            let ln_s = (shift + seg.ln_s_cum[i].exp()).ln();
            let ln_m = LN_2 - seg.ln_a[i] + 2.0 * seg.w[i];
            total += seg.weight[i] * (2.0 * ln_s + ln_m).exp();
        }
        let last = seg.x.len() - 1;
        // The nodes run from the inner to the outer end of the segment; the
        // outermost one is nearest the endpoint.
        profile.push((shift + seg.ln_s_cum[last].exp()).ln() + LN_2 - seg.ln_a[last] + 2.0 * seg.w[last]);
        if verdict == Verdict::Undecided {
            verdict = seq.push(total);
        }
    }
    Ok((profile, verdict))
}

fn check(index: u8, holds: bool, detail: String) -> HypothesisCheck {
    HypothesisCheck {
        index,
        statement: STATEMENTS[index as usize - 1],
        holds,
        detail,
    }
}

fn hypotheses(spec: &DiffusionSpec) -> Result<(Vec<HypothesisCheck>, Option<f64>)> {
    let mut out = Vec::with_capacity(4);
    let left = scale_finite_at(spec, Side::Left)?;
    out.push(check(1, left == Verdict::Divergent, format!("scale integral toward l: {left:?}")));
    let right = scale_finite_at(spec, Side::Right)?;
    let shift = match right {
        Verdict::Convergent(v) => Some(v),
        _ => None,
    };
    out.push(check(2, shift.is_some(), format!("scale integral toward r: {right:?}")));
    let killing = !endpoint_is_finite(spec, Side::Right) || spec.right == BoundaryKind::Killing;
    out.push(check(3, killing, format!("r = {} is {}", spec.r, spec.right.name())));
    if let Some(shift) = shift {
        if endpoint_is_finite(spec, Side::Left) {
            let (p, _) = left_profile(spec, shift, 120)?;
            let peak = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let n = p.len();
            let last = p[n - 1];
            let decaying = n > 12 && last < peak - 6.0 * std::f64::consts::LN_10 && last < p[n - 11];
            out.push(check(4, decaying, format!("ln |s m| near l: {last:.3} (peak {peak:.3})")));
        } else {
            let (_, v) = left_profile(spec, shift, 1100)?;
            out.push(check(4, v == Verdict::Divergent, format!("integral of s^2 m toward -inf: {v:?}")));
        }
    }
    Ok((out, shift))
}

/// The Ciesielski–Taylor partner Z = 𝒯_h(X) with h = φ+(·, 0) = −s.
///
/// The scale is anchored by s(x0) = 0, so hypothesis (2) is checked as
/// finiteness of s(r) and the pair is built from s − s(r); the shift is
/// recorded in the note.
pub fn ct_pair(spec: &DiffusionSpec) -> Result<CtPair> {
    let (checks, shift) = hypotheses(spec)?;
    let failed: Vec<u8> = checks.iter().filter(|c| !c.holds).map(|c| c.index).collect();
    if !failed.is_empty() || shift.is_none() {
        let detail = checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| format!("({}) {}: {}", c.index, c.statement, c.detail))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::HypothesisFailure { failed, detail });
    }
    let shift = shift.unwrap();
    let anchor = spec.anchor();
    let sp = spec.clone();
    let minus_s = move |x: f64| -> f64 {
        let tail = quad::integrate(|t| sp.scale_density(t).unwrap_or(f64::NAN), x, anchor, 1e-14, 1e-12);
        shift + tail.map(|q| q.value).unwrap_or(f64::NAN)
    };
    let h: RealFunction = match ZooModel::recognize(spec) {
        Some(m) => {
            let h = zoo_phi0(&m, Branch::Plus);
            let xs = spec.test_points(3);
            let ratios: Vec<f64> = xs.iter().map(|&x| minus_s(x) / h.eval(x)).collect();
            if ratios.iter().any(|r| (r / ratios[0] - 1.0).abs() > 1e-7) {
                return Err(Error::numerical("φ+(·,0) is not proportional to -s", ratios[0]));
            }
            h
        }
        None => {
            let sp = spec.clone();
            native_h("-s", minus_s, move |x| -sp.scale_density(x).unwrap_or(f64::NAN))
        }
    };
    let record = t_h_with(spec, h, Some(Branch::Plus))?;
    let z = record.output.clone();
    let note = CtNote {
        identity: "inf{t >= 0 : Z_t = y} =law= int_0^zeta 1{X_t <= y} dt",
        levels: "l < x <= y < r, both started at the left end",
        x: spec.to_json(),
        z: z.to_json(),
        x_label: spec.label.clone(),
        z_label: z.label.clone(),
        scale_shift: shift,
        h: "-(s - s(r))".into(),
        hypotheses: checks,
    };
    Ok(CtPair { record, z, note })
}
