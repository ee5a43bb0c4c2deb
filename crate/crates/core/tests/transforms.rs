use excursions::models::{BoundaryKind, Branch, DiffusionSpec, ExtReal, RealFunction, ZeroBoundary, ZooModel};
use excursions::transforms::*;
use excursions::Error;

const LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

fn xs(spec: &DiffusionSpec) -> Vec<f64> {
    spec.test_points(3)
}

fn same(a: &DiffusionSpec, b: &ZooModel) -> bool {
    same_characteristics(a, &b.spec().unwrap(), 1e-12)
}

#[test]
fn table_two_is_reproduced() {
    let checks = verify_table2().unwrap();
    assert_eq!(checks.len(), 3 * table2().len());
    for c in &checks {
        assert!(c.ok, "{} {} {}: expected {}, got {}", c.regime, c.x, c.column, c.expected, c.got);
    }
}

#[test]
fn h_transform_examples() {
    let x = ZooModel::brownian(1.0).spec().unwrap();
    let r = h_transform(&x, Branch::Plus).unwrap();
    assert!(same(&r.output, &ZooModel::brownian(-1.0)));
    assert!((r.h.eval(1.0) - (-2f64).exp()).abs() < 1e-15);
    assert!(r.riccati_residual(&xs(&x), &LAMBDAS).unwrap() < 1e-8);

    let r = h_transform(&x, Branch::Minus).unwrap();
    assert!(r.output.same_characteristics(&x));
    assert_eq!(r.h_log_derivative.eval(0.3), 0.0);

    let x = ZooModel::bessel(0.5).spec().unwrap();
    let r = h_transform(&x, Branch::Plus).unwrap();
    assert!(same(&r.output, &ZooModel::bessel(-0.5).with_zero(ZeroBoundary::Killing)));
    assert_eq!(r.output.left, BoundaryKind::Killing);
    assert!(r.riccati_residual(&xs(&x), &LAMBDAS).unwrap() < 1e-8);
}

#[test]
fn h_must_be_positive() {
    let x = ZooModel::brownian(1.0).spec().unwrap();
    let h = RealFunction::parse("x").unwrap();
    assert!(matches!(
        h_transform_with(&x, h, None),
        Err(Error::InvalidH { .. })
    ));
    let custom = DiffusionSpec::new(
        ExtReal::NegInf,
        ExtReal::PosInf,
        RealFunction::constant(1.0),
        RealFunction::constant(0.5),
        0.0,
        BoundaryKind::Natural,
        BoundaryKind::Natural,
        "custom",
    )
    .unwrap();
    assert!(matches!(h_transform(&custom, Branch::Plus), Ok(_)));
    let custom = DiffusionSpec::new(
        ExtReal::NegInf,
        ExtReal::PosInf,
        RealFunction::parse("1 + x^2").unwrap(),
        RealFunction::constant(0.5),
        0.0,
        BoundaryKind::Natural,
        BoundaryKind::Natural,
        "custom",
    )
    .unwrap();
    assert!(matches!(h_transform(&custom, Branch::Plus), Err(Error::Precondition(_))));
}

#[test]
fn krein_dual_examples_and_product_law() {
    for (x, want) in [
        (ZooModel::brownian(1.0), ZooModel::brownian(-1.0)),
        (ZooModel::bessel(0.5), ZooModel::bessel(-1.5)),
        (ZooModel::bessel(0.0), ZooModel::bessel(-1.0)),
        (ZooModel::bessel(2.0), ZooModel::bessel(-3.0)),
        (
            ZooModel::bessel(-0.5).with_zero(ZeroBoundary::Reflecting),
            ZooModel::bessel(-0.5).with_zero(ZeroBoundary::Killing),
        ),
    ] {
        let spec = x.spec().unwrap();
        let r = krein_dual(&spec).unwrap();
        assert!(same(&r.output, &want), "{} -> {}", spec, r.output);
        let res = r.riccati_residual(&xs(&spec), &LAMBDAS).unwrap();
        assert!(res < 1e-8, "{}: {res:e}", spec.label);
        let back = krein_dual(&r.output).unwrap();
        assert!(same_characteristics(&back.output, &spec, 1e-12), "involution fails for {}", spec.label);
    }
}

#[test]
fn krein_dual_rejects_unruled_regular_endpoint() {
    let spec = DiffusionSpec::new(
        ExtReal::Finite(0.0),
        ExtReal::Finite(1.0),
        RealFunction::constant(1.0),
        RealFunction::constant(0.0),
        0.5,
        BoundaryKind::Natural,
        BoundaryKind::Killing,
        "unruled",
    )
    .unwrap();
    match krein_dual(&spec) {
        Err(Error::Precondition(m)) => assert!(m.contains("left endpoint 0"), "{m}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn t_h_is_the_composition() {
    for (x, b) in [
        (ZooModel::brownian(1.0), Branch::Plus),
        (ZooModel::brownian(-0.5), Branch::Minus),
        (ZooModel::bessel(0.5), Branch::Minus),
        (ZooModel::bessel(0.5), Branch::Plus),
        (ZooModel::bessel(1.5), Branch::Plus),
        (ZooModel::bessel(-1.5), Branch::Minus),
    ] {
        let spec = x.spec().unwrap();
        let z = t_h(&spec, b).unwrap();
        let y = h_transform(&spec, b).unwrap();
        let composed = krein_dual(&y.output).unwrap();
        assert!(same_characteristics(&z.output, &composed.output, 0.0));
        // The h-transform drift rule: W'_Z = a'/2a − W' − h'/h.
        for t in spec.test_points(5) {
            let direct = -spec.wprime.eval(t) - z.h_log_derivative.eval(t);
            assert!((z.output.wprime.eval(t) - direct).abs() < 1e-12);
        }
        let res = z.riccati_residual(&xs(&spec), &LAMBDAS).unwrap();
        assert!(res < 1e-8, "{} {b:?}: {res:e}", spec.label);
    }
}

#[test]
fn t_h_chains() {
    let x = ZooModel::brownian(1.0).spec().unwrap();
    assert!(same(&t_h(&x, Branch::Plus).unwrap().output, &ZooModel::brownian(1.0)));

    let x = ZooModel::bessel(0.5).spec().unwrap();
    let z1 = t_h(&x, Branch::Minus).unwrap().output;
    assert!(same(&z1, &ZooModel::bessel(-1.5)));
    let z2 = t_h(&z1, Branch::Minus).unwrap().output;
    assert!(same(&z2, &ZooModel::bessel(-2.5)));

    for p in [0.5, 1.5, 2.0] {
        let x = ZooModel::bessel(p).spec().unwrap();
        let z = t_h(&x, Branch::Plus).unwrap().output;
        let want = if p - 1.0 > -1.0 && p - 1.0 < 0.0 {
            ZooModel::bessel(p - 1.0).with_zero(ZeroBoundary::Reflecting)
        } else {
            ZooModel::bessel(p - 1.0)
        };
        assert!(same(&z, &want), "BES({p}) -> {z}");
    }
}

#[test]
fn ciesielski_taylor_pairs() {
    let pair = ct_pair(&ZooModel::bessel(1.5).spec().unwrap()).unwrap();
    assert!(same(&pair.z, &ZooModel::bessel(0.5)));
    assert!((pair.note.scale_shift - 1.0 / 3.0).abs() < 1e-8);
    assert!(pair.note.hypotheses.iter().all(|h| h.holds));

    let pair = ct_pair(&ZooModel::bessel(0.5).spec().unwrap()).unwrap();
    assert!(same(&pair.z, &ZooModel::bessel(-0.5).with_zero(ZeroBoundary::Reflecting)));

    // Brownian motion with positive drift: s(∞) = 1/(2μ) under s(0) = 0;
    // after the shift the hypotheses hold and the partner is the process
    // itself.
    let pair = ct_pair(&ZooModel::brownian(1.0).spec().unwrap()).unwrap();
    assert!((pair.note.scale_shift - 0.5).abs() < 1e-8);
    assert!(same(&pair.z, &ZooModel::brownian(1.0)));

    for (m, failed) in [(ZooModel::brownian(0.0), vec![2u8]), (ZooModel::brownian(-1.0), vec![1u8, 2])] {
        match ct_pair(&m.spec().unwrap()) {
            Err(Error::HypothesisFailure { failed: f, .. }) => assert_eq!(f, failed),
            other => panic!("{}: unexpected {other:?}", m.label()),
        }
    }
    // A killed Brownian motion on (0, 1): s(0) is finite.
    let spec = DiffusionSpec::new(
        ExtReal::Finite(0.0),
        ExtReal::Finite(1.0),
        RealFunction::constant(1.0),
        RealFunction::constant(0.0),
        0.5,
        BoundaryKind::Killing,
        BoundaryKind::Killing,
        "killed BM",
    )
    .unwrap();
    match ct_pair(&spec) {
        Err(Error::HypothesisFailure { failed, .. }) => assert_eq!(failed, vec![1, 4]),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn records_serialize() {
    let x = ZooModel::bessel(0.5).spec().unwrap();
    let r = t_h(&x, Branch::Plus).unwrap();
    let v = r.to_json(5).unwrap();
    assert_eq!(v["kind"], "T_h");
    assert_eq!(v["samples"].as_array().unwrap().len(), 5);
    // The speed density of 𝒯_h(X) is h⁻² s' up to the normalization at x0.
    let ratio = |s: &serde_json::Value| {
        let h = r.h.eval(s["x"].as_f64().unwrap());
        s["speed_density_out"].as_f64().unwrap() * h * h / s["scale_density_in"].as_f64().unwrap()
    };
    let (first, last) = (ratio(&v["samples"][0]), ratio(&v["samples"][4]));
    assert!((first / last - 1.0).abs() < 1e-10, "{first} vs {last}");
    let _ = ZooModel::recognize(&r.output).unwrap();
}

#[test]
fn ciesielski_taylor_pair_without_closed_forms() {
    // a = 2 and W' = 2/x: s' = x^{-4} as for BES(3/2), with doubled noise.
    let spec = DiffusionSpec::new(
        ExtReal::Finite(0.0),
        ExtReal::PosInf,
        RealFunction::constant(2.0),
        RealFunction::parse("2/x").unwrap(),
        1.0,
        BoundaryKind::EntranceNotExit,
        BoundaryKind::Natural,
        "scaled BES(3/2)",
    )
    .unwrap();
    let pair = ct_pair(&spec).unwrap();
    assert!((pair.note.scale_shift - 1.0 / 3.0).abs() < 1e-8);
    for x in [0.3, 1.0, 4.0] {
        assert!((pair.z.wprime.eval(x) - 1.0 / x).abs() < 1e-8 / x, "x={x}");
    }
    assert_eq!(pair.z.left, BoundaryKind::EntranceNotExit);
    assert_eq!(pair.z.right, BoundaryKind::Natural);
}
