use excursions::cfrac::eval_cf_fixed;
use excursions::models::{zoo_riccati, Branch, RealFunction, ZooModel};
use excursions::riccati::*;
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Fourth-order central difference.
fn fd(f: &RealFunction, x: f64, h: f64) -> f64 {
    (-f.eval(x + 2.0 * h) + 8.0 * f.eval(x + h) - 8.0 * f.eval(x - h) + f.eval(x - 2.0 * h))
        / (12.0 * h)
}

#[test]
fn symbolic_coefficients() {
    let bm = expand_symbolic_zoo(&ZooModel::brownian(1.0), Branch::Minus, 5, 0.0).unwrap();
    assert_eq!(bm.u0, 0.0);
    assert_eq!(bm.u, vec![2.0; 5]);
    let bmp = expand_symbolic_zoo(&ZooModel::brownian(1.0), Branch::Plus, 3, 0.0).unwrap();
    assert_eq!(bmp.u0, -2.0);
    assert_eq!(bmp.u, vec![2.0; 3]);

    let bes = expand_symbolic_zoo(&ZooModel::bessel(0.5), Branch::Minus, 3, 1.0).unwrap();
    assert_eq!(bes.u0, 0.0);
    assert_eq!(bes.u, vec![3.0, 5.0, 7.0]);

    let plus = expand_symbolic_zoo(&ZooModel::bessel(2.0), Branch::Plus, 3, 1.0).unwrap();
    assert_eq!(plus.u0, -4.0);
    assert_eq!(plus.u, vec![2.0, 0.0, -2.0]);

    assert!(expand_symbolic_zoo(&ZooModel::brownian(0.0), Branch::Minus, 3, 0.0).is_err());
    assert!(expand_symbolic_zoo(&ZooModel::bessel(-1.5), Branch::Minus, 3, 1.0).is_err());
}

#[test]
fn numeric_reproduces_brownian_chain() {
    let spec = ZooModel::brownian(1.0).spec().unwrap();
    let grid = [-1.0, 0.0, 1.0];
    let chain = expand_numeric(&spec, Branch::Minus, 3, &grid).unwrap();
    assert_eq!(chain.depth(), 3);
    assert!(chain.u_samples[0].iter().all(|v| v.abs() < 1e-8), "{:?}", chain.u_samples[0]);
    for level in 1..=3 {
        for (i, v) in chain.u_samples[level].iter().enumerate() {
            assert!((v - 2.0).abs() < 1e-8, "level {level} point {}: {v}", grid[i]);
        }
    }
}

#[test]
fn numeric_reproduces_bessel_chain() {
    let model = ZooModel::bessel(0.5);
    let spec = model.spec().unwrap();
    let grid = [0.5, 1.0, 2.0];
    let chain = expand_numeric(&spec, Branch::Minus, 2, &grid).unwrap();
    for (i, &x) in grid.iter().enumerate() {
        let want = expand_symbolic_zoo(&model, Branch::Minus, 2, x).unwrap();
        let got = chain.coefficients(x);
        assert!((got.u0 - want.u0).abs() < 1e-8, "u0 at {x}: {}", got.u0);
        for n in 0..2 {
            assert!((got.u[n] - want.u[n]).abs() < 1e-8, "u{} at {x}: {} vs {}", n + 1, got.u[n], want.u[n]);
            assert!((chain.u_samples[n + 1][i] - want.u[n]).abs() < 1e-8);
        }
    }
}

#[test]
fn numeric_plus_branch_keeps_zero_coefficient() {
    let model = ZooModel::bessel(2.0);
    let spec = model.spec().unwrap();
    let grid = [0.5, 1.0, 2.0];
    let chain = expand_numeric(&spec, Branch::Plus, 3, &grid).unwrap();
    for &x in &grid {
        let want = expand_symbolic_zoo(&model, Branch::Plus, 3, x).unwrap();
        let got = chain.coefficients(x);
        assert!((got.u0 - want.u0).abs() < 1e-8, "u0 at {x}: {} vs {}", got.u0, want.u0);
        for n in 0..3 {
            assert!((got.u[n] - want.u[n]).abs() < 1e-8, "u{} at {x}: {} vs {}", n + 1, got.u[n], want.u[n]);
        }
    }
}

#[test]
fn depth_zero_chain() {
    let spec = ZooModel::brownian(1.0).spec().unwrap();
    let chain = expand_numeric(&spec, Branch::Minus, 0, &[0.0]).unwrap();
    assert_eq!(chain.us.len(), 1);
    assert_eq!(chain.wprimes.len(), 1);
    assert_eq!(chain.wprimes[0].eval(0.3), spec.wprime.eval(0.3));
    let r = check_expansion(&spec, &chain, &[0.0], 0.0).unwrap();
    assert!(r.abs() < 1e-12, "{r}");
}

#[test]
fn chain_invariants_hold() {
    for (model, branch, depth) in [
        (ZooModel::brownian(1.0), Branch::Minus, 3),
        (ZooModel::brownian(-0.7), Branch::Plus, 3),
        (ZooModel::bessel(0.5), Branch::Minus, 3),
        (ZooModel::bessel(1.5), Branch::Plus, 2),
    ] {
        let spec = model.spec().unwrap();
        let pts = spec.test_points(4);
        let chains = [
            symbolic_chain(&model, branch, depth).unwrap(),
            expand_numeric(&spec, branch, depth, &pts).unwrap(),
        ];
        for chain in &chains {
            for &x in &pts {
                let a = spec.a.eval(x);
                let half = spec.a.deriv(x).unwrap() / (2.0 * a);
                for n in 1..=depth {
                    let want = half - chain.us[n - 1].eval(x) - chain.wprimes[n - 1].eval(x);
                    let got = chain.wprimes[n].eval(x);
                    assert!((got - want).abs() < 1e-8, "{model:?} W_{n}' at {x}: {got} vs {want}");
                }
                for n in 0..=depth {
                    let u = &chain.us[n];
                    let res = fd(u, x, 1e-3) + u.eval(x).powi(2) + 2.0 * chain.wprimes[n].eval(x) * u.eval(x);
                    assert!(res.abs() < 1e-6, "{model:?} level {n} at {x}: residual {res}");
                }
            }
        }
    }
}

#[test]
fn environment_recurrence_is_an_involution_for_zero_u() {
    let spec = ZooModel::bessel(0.5).spec().unwrap();
    let half = spec.a.half_log_derivative().unwrap();
    let step = |w: &RealFunction| half.plus(&w.scaled(-1.0));
    let twice = step(&step(&spec.wprime));
    for x in [0.3, 1.0, 4.0] {
        assert!((twice.eval(x) - spec.wprime.eval(x)).abs() < 1e-14);
    }
}

#[test]
fn closed_fractions_match_oracles() {
    let bm = ZooModel::brownian(1.0);
    let spec = bm.spec().unwrap();
    let chain = symbolic_chain(&bm, Branch::Minus, 40).unwrap();
    let r = check_expansion(&spec, &chain, &[0.1, 1.0], 0.0).unwrap();
    assert!(r < 1e-9, "{r}");
    // At λ = 10 the free-space tail √20 misses the exact remainder
    // 1 + √21 and the fraction contracts errors only by ρ = g²/(2λ) with
    // g = √21 − 1 per level, so depth 40 leaves ≈ ρ⁴⁰·|tail error|.
    let r10 = check_expansion(&spec, &chain, &[10.0], 0.0).unwrap();
    let g = 21f64.sqrt() - 1.0;
    let mut t = 20f64.sqrt();
    for _ in 0..40 {
        t = 20.0 / (2.0 + t);
    }
    let predicted = (t - g).abs();
    assert!(predicted > 1e-9 && (r10 - predicted).abs() < 1e-2 * predicted, "{r10} vs {predicted}");

    let bes = ZooModel::bessel(0.5);
    let spec = bes.spec().unwrap();
    let chain = symbolic_chain(&bes, Branch::Minus, 40).unwrap();
    let r = check_expansion(&spec, &chain, &[0.1, 1.0, 10.0], 1.0).unwrap();
    assert!(r < 1e-8, "{r}");
}

#[test]
fn stieltjes_convergents_bracket_the_oracle() {
    for (model, x) in [(ZooModel::brownian(1.0), 0.0), (ZooModel::bessel(0.5), 1.0)] {
        for lam in [0.5, 2.0, 8.0] {
            let exact = zoo_riccati(&model, Branch::Minus, x, c(lam)).unwrap().re;
            let cf = expand_symbolic_zoo(&model, Branch::Minus, 12, x).unwrap();
            for n in 1..=10 {
                let a = eval_cf_fixed(&cf, c(lam), n).unwrap().re;
                let b = eval_cf_fixed(&cf, c(lam), n + 1).unwrap().re;
                let d = eval_cf_fixed(&cf, c(lam), n + 2).unwrap().re;
                let tol = 1e-12 * exact.abs().max(1.0);
                assert!(
                    a.min(b) <= exact + tol && exact <= a.max(b) + tol,
                    "{model:?} λ={lam} n={n}: {a} {b} vs {exact}"
                );
                // Same-parity convergents approach from one side.
                assert!((d - exact).abs() <= (a - exact).abs() + tol);
                assert!((d - exact) * (a - exact) >= -tol * tol);
            }
        }
    }
}
