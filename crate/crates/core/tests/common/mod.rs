//! Property bodies and input strategies shared by the property suite and the
//! acceptance report.

#![allow(dead_code)]

use excursions::cfrac::{eval_cf_fixed, series_to_u, sfraction_to_u, u_to_sfraction, CFCoefficients};
use excursions::models::{zoo_riccati, Branch, ZooModel};
use excursions::riccati::expand_symbolic_zoo;
use excursions::sim::{hitting_time, simulate_hierarchy, BoundaryRule, PathConfig, SDEConfig};
use excursions::specialfn::{bessel_i, bessel_ik_pair, bessel_j, bessel_jy_pair, bessel_k, bessel_y, Scaled};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use std::f64::consts::PI;

pub type Outcome = Result<(), TestCaseError>;

fn minus_fraction(u0: f64, u: Vec<f64>, scale: f64) -> CFCoefficients {
    CFCoefficients { u0, u, scale, branch: Branch::Minus, x: None }
}

fn convergents(c: &CFCoefficients, lambda: f64) -> Vec<f64> {
    (0..=c.depth())
        .map(|n| eval_cf_fixed(c, Complex64::new(lambda, 0.0), n).unwrap().re)
        .collect()
}

/// Value of a·b for scaled operands.
fn product(a: Scaled, b: Scaled) -> f64 {
    a.mantissa * b.mantissa * (a.log_scale + b.log_scale).exp()
}

pub fn fraction_inputs() -> impl Strategy<Value = (f64, Vec<f64>, f64, f64)> {
    (0.0f64..3.0, prop::collection::vec(0.1f64..5.0, 2..12), 0.2f64..4.0, 1e-3f64..50.0)
}

/// Even convergents of a fraction with positive coefficients increase, odd
/// ones decrease, and every even one lies below every odd one.
pub fn bracketing(u0: f64, u: Vec<f64>, scale: f64, lambda: f64) -> Outcome {
    let f = convergents(&minus_fraction(u0, u, scale), lambda);
    let slack = 1e-12 * f.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for k in (2..f.len()).step_by(2) {
        prop_assert!(f[k] >= f[k - 2] - slack, "even: {f:?}");
    }
    for k in (3..f.len()).step_by(2) {
        prop_assert!(f[k] <= f[k - 2] + slack, "odd: {f:?}");
    }
    let max_even = f.iter().step_by(2).cloned().fold(f64::MIN, f64::max);
    let min_odd = f.iter().skip(1).step_by(2).cloned().fold(f64::MAX, f64::min);
    prop_assert!(max_even <= min_odd + slack, "{f:?}");
    Ok(())
}

pub fn bessel_fraction_inputs() -> impl Strategy<Value = (f64, f64, f64, usize)> {
    (-0.9f64..4.0, 0.2f64..3.0, 0.01f64..20.0, 1usize..25)
}

/// Convergents of the Bessel minus fraction sit alternately below and above
/// the closed-form Riccati variable.
pub fn bessel_bracketing(p: f64, x: f64, lambda: f64, depth: usize) -> Outcome {
    let model = ZooModel::bessel(p);
    let c = expand_symbolic_zoo(&model, Branch::Minus, depth, x).unwrap();
    let f = convergents(&c, lambda);
    let exact = zoo_riccati(&model, Branch::Minus, x, Complex64::new(lambda, 0.0)).unwrap().re;
    let slack = 1e-12 * exact.abs().max(1.0);
    for (n, v) in f.iter().enumerate() {
        if n % 2 == 0 {
            prop_assert!(*v <= exact + slack, "n={n}: {v} vs {exact}");
        } else {
            prop_assert!(*v >= exact - slack, "n={n}: {v} vs {exact}");
        }
    }
    Ok(())
}

pub fn wronskian_inputs() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..20.0, 0.01f64..80.0)
}

/// I K' − I' K = −1/z and J Y' − J' Y = 2/(πz).
pub fn wronskians(nu: f64, z: f64) -> Outcome {
    let ik = bessel_ik_pair(nu, z).unwrap();
    let w = product(ik.i, ik.kp) - product(ik.ip, ik.k);
    let scale = product(ik.i, ik.kp).abs() + product(ik.ip, ik.k).abs();
    prop_assert!((w + 1.0 / z).abs() <= 1e-12 * scale.max(1.0 / z), "IK: ν={nu} z={z}: {w}");

    let jy = bessel_jy_pair(nu, z).unwrap();
    let w = product(jy.j, jy.yp) - product(jy.jp, jy.y);
    let scale = product(jy.j, jy.yp).abs() + product(jy.jp, jy.y).abs();
    let want = 2.0 / (PI * z);
    prop_assert!((w - want).abs() <= 1e-12 * scale.max(want), "JY: ν={nu} z={z}: {w} vs {want}");
    Ok(())
}

pub fn recurrence_inputs() -> impl Strategy<Value = (f64, f64)> {
    (1.0f64..15.0, 0.05f64..60.0)
}

/// The three-term recurrences in the order for I, K, J and Y.
pub fn recurrences(nu: f64, z: f64) -> Outcome {
    let r = 2.0 * nu / z;
    let check = |lo: f64, mid: f64, hi: f64, lhs: f64| {
        let scale = lo.abs() + hi.abs() + (r * mid).abs();
        (lhs - r * mid).abs() <= 1e-11 * scale
    };
    let three = |f: fn(f64, f64) -> excursions::Result<f64>| {
        (f(nu - 1.0, z).unwrap(), f(nu, z).unwrap(), f(nu + 1.0, z).unwrap())
    };
    let (i0, i1, i2) = three(bessel_i);
    prop_assert!(check(i0, i1, i2, i0 - i2), "I: ν={nu} z={z}");
    let (k0, k1, k2) = three(bessel_k);
    prop_assert!(check(k0, k1, k2, k2 - k0), "K: ν={nu} z={z}");
    let (j0, j1, j2) = three(bessel_j);
    prop_assert!(check(j0, j1, j2, j0 + j2), "J: ν={nu} z={z}");
    let (y0, y1, y2) = three(bessel_y);
    prop_assert!(check(y0, y1, y2, y0 + y2), "Y: ν={nu} z={z}");
    Ok(())
}

pub fn round_trip_inputs() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (prop::collection::vec(0.5f64..4.0, 1..8), 0.5f64..4.0)
}

/// series_to_u recovers the coefficients whose convergent it is given.
pub fn series_round_trip(u: Vec<f64>, scale: f64) -> Outcome {
    let n = u.len();
    let c = minus_fraction(0.0, u.clone(), scale);
    let series = c.convergent_series(n, n).unwrap();
    let back = series_to_u(&series, scale, n).unwrap().into_coeffs();
    prop_assert_eq!(back.depth(), n);
    for (a, b) in back.u.iter().zip(&u) {
        prop_assert!((a / b - 1.0).abs() < 1e-9, "{:?} vs {:?}", back.u, u);
    }
    Ok(())
}

pub fn sfraction_inputs() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (prop::collection::vec(0.1f64..10.0, 1..16), 0.2f64..5.0)
}

pub fn sfraction_round_trip(u: Vec<f64>, a: f64) -> Outcome {
    let c = CFCoefficients { u0: 0.0, u, scale: 2.0 / a, branch: Branch::Minus, x: None };
    let sf = u_to_sfraction(&c).unwrap();
    let back = sfraction_to_u(&sf, a, Branch::Minus).unwrap();
    for (x, y) in back.u.iter().zip(&c.u) {
        prop_assert!((x / y - 1.0).abs() < 1e-14);
    }
    Ok(())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

pub fn determinism_inputs() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 2usize..6)
}

/// Chains and path pools are bit-identical on one worker and on several.
pub fn thread_count_invariance(seed: u64, threads: usize) -> Outcome {
    let cfg = SDEConfig { depth: 2, n_samples: 200, burn_in: 100.0, chains: 5, seed, ..SDEConfig::default() };
    let a = in_pool(1, || simulate_hierarchy(&cfg).unwrap());
    let b = in_pool(threads, || simulate_hierarchy(&cfg).unwrap());
    prop_assert_eq!(a, b);

    let spec = ZooModel::brownian(0.5).spec().unwrap();
    let pc = PathConfig::new(spec, 20.0, 1e-3, 300, seed, BoundaryRule::Absorb).unwrap();
    let a = in_pool(1, || hitting_time(&pc, 0.0, 1.0).unwrap());
    let b = in_pool(threads, || hitting_time(&pc, 0.0, 1.0).unwrap());
    prop_assert_eq!(a.values.len(), b.values.len());
    for (x, y) in a.values.iter().zip(&b.values) {
        prop_assert!(x.to_bits() == y.to_bits());
    }
    Ok(())
}
