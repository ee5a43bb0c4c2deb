//! Path simulation for first hitting times and occupation times.
//!
//! Brownian motion with drift and Bessel processes whose origin is not
//! killing are advanced with exact transitions (Gaussian increments, and
//! the Poisson–gamma mixture of the squared Bessel process with dimension
//! δ = 2p + 2). Everything else uses an Euler–Maruyama step for
//! dX = a W' dt + √a dB. Step lengths adapt to the distance d from the
//! nearest level of interest as clamp(d²/40, step, cap).
//!
//! Paths that wander far from a target they can only reach with
//! probability below [`ESCAPE_TOLERANCE`] are stopped and recorded as never
//! hitting, using the exact return probabilities of the scale function.

use super::rng::stream_rng;
use super::SamplePool;
use crate::error::{Error, Result};
use crate::models::{scale_finite_at, BoundaryKind, DiffusionSpec, ExtReal, Side, ZeroBoundary, ZooModel};
use crate::quad::{self, Verdict};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Return probability below which a path counts as escaped.
pub const ESCAPE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryRule {
    Absorb,
    ReflectFold,
}

#[derive(Debug, Clone)]
pub struct PathConfig {
    pub spec: DiffusionSpec,
    pub horizon: f64,
    pub step: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub boundary_rule: BoundaryRule,
}

impl PathConfig {
    pub fn new(spec: DiffusionSpec, horizon: f64, step: f64, n_paths: usize, seed: u64, boundary_rule: BoundaryRule) -> Result<Self> {
        let cfg = PathConfig { spec, horizon, step, n_paths, seed, boundary_rule };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite() && self.step > 0.0) {
            return Err(Error::Validation("horizon and step must be positive".into()));
        }
        if self.step > self.horizon / 1e3 {
            return Err(Error::Validation(format!(
                "step {} exceeds horizon/1000 = {}",
                self.step,
                self.horizon / 1e3
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::Validation("n_paths must be positive".into()));
        }
        self.spec.validate()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "spec": self.spec.to_json(),
            "horizon": self.horizon,
            "step": self.step,
            "n_paths": self.n_paths,
            "seed": self.seed,
            "boundary_rule": self.boundary_rule,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    Brownian { mu: f64 },
    SquaredBessel { delta: f64 },
    Euler,
}

/// What happens to an Euler path that leaves through a finite endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Exit {
    Absorb,
    Fold,
}

struct Stepper<'a> {
    spec: &'a DiffusionSpec,
    kernel: Kernel,
    base: f64,
    cap: f64,
    left: Option<(f64, Exit)>,
    right: Option<(f64, Exit)>,
}

impl<'a> Stepper<'a> {
    fn new(cfg: &'a PathConfig) -> Self {
        let spec = &cfg.spec;
        let kernel = match ZooModel::recognize(spec) {
            Some(ZooModel::BrownianDrift { mu, .. }) => Kernel::Brownian { mu },
            Some(ZooModel::Bessel { p, zero, .. }) if 2.0 * p + 2.0 > 0.0 && zero != ZeroBoundary::Killing => {
                Kernel::SquaredBessel { delta: 2.0 * p + 2.0 }
            }
            _ => Kernel::Euler,
        };
        let exit = |kind: BoundaryKind| match kind {
            BoundaryKind::Killing => Exit::Absorb,
            BoundaryKind::Reflecting => Exit::Fold,
            _ if cfg.boundary_rule == BoundaryRule::Absorb => Exit::Absorb,
            _ => Exit::Fold,
        };
        let cap = match kernel {
            Kernel::Euler => (16.0 * cfg.step).min(cfg.horizon / 1e3),
            _ => cfg.horizon / 1e3,
        };
        Stepper {
            spec,
            kernel,
            base: cfg.step,
            cap,
            left: spec.l.finite().map(|l| (l, exit(spec.left))),
            right: spec.r.finite().map(|r| (r, exit(spec.right))),
        }
    }

    fn is_exact(&self) -> bool {
        !matches!(self.kernel, Kernel::Euler)
    }

    fn step_for(&self, x: f64, levels: &[f64]) -> f64 {
        let mut d = levels.iter().map(|l| (x - l).abs()).fold(f64::INFINITY, f64::min);
        if !self.is_exact() {
            for (e, _) in self.left.iter().chain(&self.right) {
                d = d.min((x - e).abs());
            }
        }
        (d * d / 40.0).clamp(self.base, self.cap)
    }

    fn variance(&self, x: f64) -> f64 {
        match self.kernel {
            Kernel::Euler => self.spec.a.eval(x),
            _ => 1.0,
        }
    }

    /// The unconstrained proposal after time h.
    fn propose(&self, x: f64, h: f64, rng: &mut ChaCha8Rng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        match self.kernel {
            Kernel::Brownian { mu } => x + mu * h + h.sqrt() * z,
            Kernel::SquaredBessel { delta } => {
                let rate = x * x / (2.0 * h);
                let n = if rate > 0.0 {
                    Poisson::new(rate).map(|p| p.sample(rng)).unwrap_or(rate)
                } else {
                    0.0
                };
                let g: f64 = Gamma::new(0.5 * delta + n, 1.0).expect("positive shape").sample(rng);
                (2.0 * h * g).sqrt()
            }
            Kernel::Euler => {
                let a = self.spec.a.eval(x);
                x + a * self.spec.wprime.eval(x) * h + (a * h).sqrt() * z
            }
        }
    }

    /// Applies the endpoint rules to a proposal y reached from x, or None
    /// when the path is killed. With `bridge`, a path that stays inside is
    /// still killed with the Brownian-bridge probability of having touched
    /// an absorbing endpoint during the step. An endpoint equal to `target`
    /// is left to the caller.
    fn settle(&self, x: f64, y: f64, h: f64, bridge: bool, target: f64, rng: &mut ChaCha8Rng) -> Option<f64> {
        if self.is_exact() {
            return Some(y);
        }
        let mut y = y;
        for (e, rule, outside) in [
            self.left.map(|(l, r)| (l, r, y <= l)),
            self.right.map(|(r, rule)| (r, rule, y >= r)),
        ]
        .into_iter()
        .flatten()
        {
            match (rule, outside) {
                (Exit::Absorb, true) => return None,
                (Exit::Fold, true) => y = 2.0 * e - y,
                (Exit::Absorb, false) if bridge && e != target => {
                    let p = (-2.0 * (x - e).abs() * (y - e).abs() / (self.variance(x) * h)).exp();
                    if rng.random::<f64>() < p {
                        return None;
                    }
                }
                _ => {}
            }
        }
        let inside = self.left.is_none_or(|(l, _)| y > l) && self.right.is_none_or(|(r, _)| y < r);
        (inside && y.is_finite()).then_some(y)
    }
}

/// ∫ s' from x to the endpoint on `side`.
fn scale_tail(spec: &DiffusionSpec, side: Side, x: f64) -> Result<f64> {
    let s = |t: f64| spec.scale_density(t).unwrap_or(0.0);
    let q = match (side, spec.endpoint(side)) {
        (Side::Right, ExtReal::Finite(r)) => quad::integrate(s, x, r, 0.0, 1e-12)?,
        (Side::Right, _) => quad::integrate_to_infinity(s, x, 0.0, 1e-12)?,
        (Side::Left, ExtReal::Finite(l)) => quad::integrate(s, l, x, 0.0, 1e-12)?,
        (Side::Left, _) => quad::integrate_to_infinity(|t| s(-t), -x, 0.0, 1e-12)?,
    };
    Ok(q.value)
}

/// Exact probability that the diffusion started at x ever reaches y, when
/// the scale function is finite at the endpoint beyond x.
struct ReturnProbability<'a> {
    spec: &'a DiffusionSpec,
    side: Side,
    at_y: f64,
}

impl<'a> ReturnProbability<'a> {
    fn new(spec: &'a DiffusionSpec, side: Side, y: f64) -> Result<Option<Self>> {
        let finite = spec.endpoint(side).finite().is_some();
        if finite && matches!(spec.boundary(side), BoundaryKind::Reflecting | BoundaryKind::EntranceNotExit) {
            return Ok(None);
        }
        match scale_finite_at(spec, side)? {
            Verdict::Convergent(_) => {}
            _ => return Ok(None),
        }
        let at_y = scale_tail(spec, side, y)?;
        if !(at_y > 0.0 && at_y.is_finite()) {
            return Ok(None);
        }
        Ok(Some(ReturnProbability { spec, side, at_y }))
    }

    fn at(&self, x: f64) -> f64 {
        if !self.spec.contains(x) {
            return 0.0;
        }
        scale_tail(self.spec, self.side, x).map(|t| (t / self.at_y).clamp(0.0, 1.0)).unwrap_or(0.0)
    }

    /// A level beyond which the return probability is at most `p`.
    fn level(&self, y: f64, p: f64) -> Option<f64> {
        let dir = if self.side == Side::Right { 1.0 } else { -1.0 };
        let candidate = |k: i32| -> f64 {
            match self.spec.endpoint(self.side) {
                ExtReal::Finite(e) => e - (e - y) * 0.5f64.powi(k),
                _ => y + dir * 0.25 * 2f64.powi(k),
            }
        };
        let mut inner = y;
        let mut outer = None;
        for k in 1..80 {
            let c = candidate(k);
            if self.at(c) <= p {
                outer = Some(c);
                break;
            }
            inner = c;
        }
        let mut outer = outer?;
        for _ in 0..50 {
            let mid = 0.5 * (inner + outer);
            if self.at(mid) <= p {
                outer = mid;
            } else {
                inner = mid;
            }
        }
        Some(outer)
    }
}

fn admissible_start(cfg: &PathConfig, stepper: &Stepper, x: f64) -> Result<()> {
    let spec = &cfg.spec;
    if spec.contains(x) {
        return Ok(());
    }
    let at_open_end = |side: Side| {
        spec.endpoint(side).finite() == Some(x)
            && matches!(spec.boundary(side), BoundaryKind::Reflecting | BoundaryKind::EntranceNotExit)
    };
    if stepper.is_exact() && (at_open_end(Side::Left) || at_open_end(Side::Right)) {
        return Ok(());
    }
    Err(Error::Precondition(format!("start {x} is not a state of {}", spec.label)))
}

fn run_paths(cfg: &PathConfig, per_path: impl Fn(u64) -> f64 + Sync + Send) -> Vec<f64> {
    (0..cfg.n_paths as u64).into_par_iter().map(per_path).collect()
}

/// First hitting time of `target` from `start`, one value per path:
/// the time, `+inf` when the path was killed or escaped, `NaN` when it was
/// still running at the horizon.
pub fn hitting_time(cfg: &PathConfig, start: f64, target: f64) -> Result<SamplePool> {
    cfg.validate()?;
    let stepper = Stepper::new(cfg);
    admissible_start(cfg, &stepper, start)?;
    let config = json!({"kind": "hitting", "start": start, "target": target, "paths": cfg.to_json()});
    let tag = format!("hitting {} {start} -> {target}", cfg.spec.label);
    if start == target {
        return Ok(SamplePool::new(tag, 1, vec![0.0; cfg.n_paths], cfg.seed, &config));
    }
    let on_edge = cfg.spec.l.finite() == Some(target) || cfg.spec.r.finite() == Some(target);
    if !cfg.spec.contains(target) && !on_edge {
        return Err(Error::Precondition(format!("target {target} lies outside the interval")));
    }
    let up = target > start;
    // Escape goes away from the target.
    let escape_side = if up { Side::Left } else { Side::Right };
    let escape = match ReturnProbability::new(&cfg.spec, escape_side, target)? {
        Some(rp) => rp.level(target, ESCAPE_TOLERANCE),
        None => None,
    };
    let bridge = cfg.boundary_rule == BoundaryRule::Absorb;
    let stepper = &stepper;
    let values = run_paths(cfg, move |i| {
        let mut rng = stream_rng(cfg.seed, i);
        let (mut x, mut t) = (start, 0.0);
        let levels: Vec<f64> = std::iter::once(target).chain(escape).collect();
        while t < cfg.horizon {
            let h = stepper.step_for(x, &levels);
            let y = stepper.propose(x, h, &mut rng);
            if (y >= target) == up {
                return t + h * (target - x) / (y - x);
            }
            if bridge {
                let (d1, d2) = ((x - target).abs(), (y - target).abs());
                let p = (-2.0 * d1 * d2 / (stepper.variance(x) * h)).exp();
                if rng.random::<f64>() < p {
                    return t + 0.5 * h;
                }
            }
            let Some(y) = stepper.settle(x, y, h, bridge, target, &mut rng) else {
                return f64::INFINITY;
            };
            t += h;
            x = y;
            if let Some(lv) = escape {
                if (x <= lv) == up {
                    return f64::INFINITY;
                }
            }
        }
        f64::NAN
    });
    let censored = values.iter().filter(|v| v.is_nan()).count();
    if 2 * censored > values.len() {
        return Err(Error::HorizonTooShort { censored, total: values.len() });
    }
    let mut pool = SamplePool::new(tag, 1, values, cfg.seed, &config);
    pool.censored = censored;
    pool.escaped = pool.values.iter().filter(|v| v.is_infinite()).count();
    Ok(pool)
}

/// Total time spent at or below `level` over the lifetime, started at the
/// start point of the spec.
pub fn occupation_below(cfg: &PathConfig, level: f64) -> Result<SamplePool> {
    occupation_below_from(cfg, cfg.spec.x0, level)
}

/// As [`occupation_below`] from an explicit start, which may be a reflecting
/// or entrance endpoint when the transitions are exact.
///
/// The diffusion must be transient to the right. Once a path climbs to a
/// level L where the return probability q to `level` is one half, a coin
/// with the exact q decides whether it comes back (the path restarts at
/// `level` by the strong Markov property) or leaves for good.
pub fn occupation_below_from(cfg: &PathConfig, start: f64, level: f64) -> Result<SamplePool> {
    cfg.validate()?;
    let stepper = Stepper::new(cfg);
    admissible_start(cfg, &stepper, start)?;
    let config = json!({"kind": "occupation", "start": start, "level": level, "paths": cfg.to_json()});
    let tag = format!("occupation {} below {level}", cfg.spec.label);
    if cfg.spec.l.finite().is_some_and(|l| level <= l) {
        return Ok(SamplePool::new(tag, 1, vec![0.0; cfg.n_paths], cfg.seed, &config));
    }
    if !cfg.spec.contains(level) {
        return Err(Error::Precondition(format!("level {level} lies outside the interval")));
    }
    let rp = ReturnProbability::new(&cfg.spec, Side::Right, level)?
        .ok_or_else(|| Error::Precondition(format!("{} is not transient to the right", cfg.spec.label)))?;
    let lv = rp
        .level(level, 0.5)
        .ok_or_else(|| Error::Precondition("no level with return probability 1/2".into()))?;
    let bridge = cfg.boundary_rule == BoundaryRule::Absorb;
    let (stepper, rp) = (&stepper, &rp);
    let values = run_paths(cfg, move |i| {
        let mut rng = stream_rng(cfg.seed, i);
        let (mut x, mut t, mut occ) = (start, 0.0, 0.0);
        let levels = [level, lv];
        while t < cfg.horizon {
            if x >= lv {
                if rng.random::<f64>() < rp.at(x) {
                    x = level;
                } else {
                    return occ;
                }
            }
            let h = stepper.step_for(x, &levels);
            let y = stepper.propose(x, h, &mut rng);
            let Some(y) = stepper.settle(x, y, h, bridge, f64::NAN, &mut rng) else {
                return occ;
            };
            occ += h * match (x <= level, y <= level) {
                (true, true) => 1.0,
                (false, false) => 0.0,
                (true, false) => (level - x) / (y - x),
                (false, true) => (level - y) / (x - y),
            };
            t += h;
            x = y;
        }
        f64::NAN
    });
    let censored = values.iter().filter(|v| v.is_nan()).count();
    if censored > 0 && 100 * censored >= values.len() {
        return Err(Error::HorizonTooShort { censored, total: values.len() });
    }
    let mut pool = SamplePool::new(tag, 1, values, cfg.seed, &config);
    pool.censored = censored;
    Ok(pool)
}

/// E[e^{−λH(target)}] from `start` in closed form: φ(start)/φ(target) with
/// the increasing eigenfunction φ− for upward targets and the decreasing φ+
/// for downward ones.
pub fn hitting_laplace_exact(model: &ZooModel, start: f64, target: f64, lambda: f64) -> Result<f64> {
    use crate::specialfn::bessel::{bessel_i_scaled_log, bessel_k_scaled_log};
    use crate::specialfn::ln_gamma;
    if !(lambda >= 0.0) {
        return Err(Error::Validation(format!("λ = {lambda} must be nonnegative")));
    }
    if start == target {
        return Ok(1.0);
    }
    match *model {
        ZooModel::BrownianDrift { mu, .. } => {
            let r = (mu * mu + 2.0 * lambda).sqrt();
            Ok(if target > start {
                (-(target - start) * (r - mu)).exp()
            } else {
                (-(start - target) * (r + mu)).exp()
            })
        }
        ZooModel::Bessel { p, zero, .. } => {
            if !(target > 0.0 && start >= 0.0) {
                return Err(Error::Domain("Bessel levels must be positive".into()));
            }
            let c = (2.0 * lambda).sqrt();
            if c == 0.0 {
                return Err(Error::Domain("the Bessel closed form needs λ > 0".into()));
            }
            if target > start {
                let nu = crate::riccati::bessel_minus_order(p, zero);
                // ln φ−(x) = −p ln x + ln I_ν(cx), with its limit at x = 0.
                let ln_phi = |x: f64| -> Result<f64> {
                    if x == 0.0 {
                        if nu != p {
                            return Err(Error::Domain("φ− vanishes at 0".into()));
                        }
                        return Ok(p * (0.5 * c).ln() - ln_gamma(p + 1.0));
                    }
                    Ok(-p * x.ln() + bessel_i_scaled_log(nu, c * x)?.ln_abs())
                };
                Ok((ln_phi(start)? - ln_phi(target)?).exp())
            } else {
                let ln_phi = |x: f64| -> Result<f64> { Ok(-p * x.ln() + bessel_k_scaled_log(p, c * x)?.ln_abs()) };
                Ok((ln_phi(start)? - ln_phi(target)?).exp())
            }
        }
    }
}
