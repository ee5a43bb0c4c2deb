use excursions::cfrac::*;
use excursions::models::Branch;
use excursions::Error;
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Series of √(2λ) I_{p+1}(√(2λ)x)/I_p(√(2λ)x) in powers of λ, i.e.
/// λx/(p+1) · ₀F₁(;p+2;w)/₀F₁(;p+1;w) with w = λx²/2, by direct
/// power-series division of the two hypergeometric series.
fn bessel_ratio_series(p: f64, x: f64, k: usize) -> PowerSeries {
    let hyp = |b: f64| -> Vec<f64> {
        let mut out = vec![1.0];
        let mut t = 1.0;
        for j in 1..=k {
            t *= (x * x / 2.0) / ((b + j as f64 - 1.0) * j as f64);
            out.push(t);
        }
        out
    };
    let num = hyp(p + 2.0);
    let den = hyp(p + 1.0);
    let mut q = vec![0.0; k];
    for i in 0..k {
        let mut s = num[i];
        for j in 1..=i {
            s -= den[j] * q[i - j];
        }
        q[i] = s / den[0];
    }
    PowerSeries::new(q.iter().map(|v| v * x / (p + 1.0)).collect())
}

#[test]
fn brownian_series_gives_constant_coefficients() {
    let s = PowerSeries::sqrt_shift(1.0, 5);
    let want = [1.0, -0.5, 0.5, -0.625, 0.875];
    for (a, b) in s.coeffs.iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
    let e = series_to_u(&s, 2.0, 4).unwrap();
    assert!(matches!(e, Expansion::Complete(_)));
    for v in &e.coeffs().u {
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }
    let one = series_to_u(&PowerSeries::new(vec![1.0]), 2.0, 1).unwrap();
    assert_eq!(one.coeffs().u, vec![2.0]);
}

#[test]
fn bessel_series_gives_odd_integers() {
    let s = bessel_ratio_series(0.5, 1.0, 8);
    assert!((s.coeffs[0] - 2.0 / 3.0).abs() < 1e-15);
    let e = series_to_u(&s, 2.0, 3).unwrap();
    for (v, w) in e.coeffs().u.iter().zip([3.0, 5.0, 7.0]) {
        assert!((v - w).abs() < 1e-10, "{v} vs {w}");
    }
}

#[test]
fn finite_measure_terminates() {
    // F(λ) = λ/(1+λ): a single atom, so the string has one mass and one gap.
    let coeffs: Vec<f64> = (1..=8).map(|k| if k % 2 == 1 { 1.0 } else { -1.0 }).collect();
    let e = series_to_u(&PowerSeries::new(coeffs), 2.0, 6).unwrap();
    match e {
        Expansion::Terminated { recovered, coeffs } => {
            assert_eq!(recovered, 2);
            assert!((coeffs.u[0] - 2.0).abs() < 1e-14 && (coeffs.u[1] - 1.0).abs() < 1e-13);
        }
        other => panic!("expected termination, got {other:?}"),
    }
}

#[test]
fn sfraction_maps() {
    let cf = CFCoefficients {
        u0: 0.0,
        u: vec![2.0; 4],
        scale: 2.0,
        branch: Branch::Minus,
        x: None,
    };
    let sf = u_to_sfraction(&cf).unwrap();
    assert_eq!(sf.masses, vec![2.0, 2.0]);
    assert_eq!(sf.gaps, vec![1.0, 1.0]);
    let back = sfraction_to_u(&sf, 1.0, Branch::Minus).unwrap();
    assert_eq!(back.u, cf.u);
    let single = sfraction_to_u(&SFraction { masses: vec![1.0], gaps: vec![] }, 1.0, Branch::Minus)
        .unwrap();
    assert_eq!(single.u, vec![1.0]);
    let plus = CFCoefficients {
        u0: -1.0,
        u: vec![-1.0, -3.0, -5.0],
        scale: 2.0,
        branch: Branch::Plus,
        x: Some(1.0),
    };
    assert!(matches!(u_to_sfraction(&plus), Err(Error::NotAnSFraction { index: 1, .. })));
}

#[test]
fn fixed_evaluation_examples() {
    let bm = CFCoefficients {
        u0: 0.0,
        u: vec![2.0; 60],
        scale: 2.0,
        branch: Branch::Minus,
        x: None,
    };
    let v = eval_cf_fixed(&bm, c(1.5), 60).unwrap();
    assert!((v.re - 1.0).abs() < 1e-10);
    assert_eq!(eval_cf_fixed(&bm, c(0.0), 60).unwrap().re, 0.0);
    let bes = CFCoefficients {
        u0: 0.0,
        u: (1..=40).map(|n| 2.0 * (0.5 + n as f64)).collect(),
        scale: 2.0,
        branch: Branch::Minus,
        x: Some(1.0),
    };
    let v = eval_cf_fixed(&bes, c(2.0), 40).unwrap();
    assert!((v.re - 1.074_629_441_5).abs() < 1e-9);
    let zero_den = CFCoefficients {
        u0: 0.0,
        u: vec![0.0],
        scale: 2.0,
        branch: Branch::Minus,
        x: None,
    };
    assert!(matches!(
        eval_cf_fixed(&zero_den, c(1.0), 1),
        Err(Error::ConvergentPole { level: 1 })
    ));
}

#[test]
fn adaptive_evaluation_examples() {
    let (v, n) = eval_cf_adaptive(|_| 2.0, 2.0, c(1.0), 1e-12).unwrap();
    assert!((v.re - (3f64.sqrt() - 1.0)).abs() < 1e-11, "{v}");
    let fixed = CFCoefficients {
        u0: 0.0,
        u: vec![2.0; n],
        scale: 2.0,
        branch: Branch::Minus,
        x: None,
    };
    let vf = eval_cf_fixed(&fixed, c(1.0), n).unwrap();
    assert!((vf - v).norm() < 1e-11);
    let (v, _) = eval_cf_adaptive(|_| 2.0, 2.0, c(-0.4), 1e-12).unwrap();
    assert!((v.re - (0.2f64.sqrt() - 1.0)).abs() < 1e-10);
    assert!(matches!(
        eval_cf_adaptive(|_| 2.0, 2.0, c(-1.0), 1e-12),
        Err(Error::NonConvergence { .. })
    ));
}

#[test]
fn plus_branch_orientation_reproduces_closed_form() {
    // U+ = −1 − √(1+2λ) for Brownian drift μ = 1.
    let cf = CFCoefficients {
        u0: -2.0,
        u: vec![2.0; 80],
        scale: 2.0,
        branch: Branch::Plus,
        x: None,
    };
    for lam in [0.1, 1.0, 10.0] {
        let v = eval_cf_fixed(&cf, c(lam), 80).unwrap().re;
        assert!((v + 1.0 + (1.0 + 2.0 * lam).sqrt()).abs() < 1e-10);
    }
}

#[test]
fn theorem_divergence_of_coefficient_sums() {
    let bm = CFCoefficients {
        u0: 0.0,
        u: vec![2.0; 100],
        scale: 2.0,
        branch: Branch::Minus,
        x: None,
    };
    assert!(*bm.partial_sums().last().unwrap() > 1e2);
    let bes: Vec<f64> = (1..=100).map(|n| 2.0 * (0.5 + n as f64)).collect();
    assert!(bes.iter().sum::<f64>() > 1e3);
}
