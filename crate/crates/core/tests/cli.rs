use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_excursion"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn expand_brownian_coefficients_are_all_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["expand", "--model", "bm", "--mu", "1", "--branch", "minus", "--depth", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let c = json(&dir.path().join("coefficients.json"));
    assert_eq!(c["u0"], 0.0);
    let u = floats(&c["u"]);
    assert_eq!(u.len(), 10);
    assert!(u.iter().all(|&v| v == 2.0), "{u:?}");

    let conv = json(&dir.path().join("convergents.json"));
    let cols = &conv["columns"];
    let (lam, depth, exact, value) = (floats(&cols["lambda"]), floats(&cols["depth"]), floats(&cols["exact"]), floats(&cols["value_closed"]));
    assert_eq!(lam.len(), 3 * 11);
    for i in 0..lam.len() {
        assert!((exact[i] - ((1.0 + 2.0 * lam[i]).sqrt() - 1.0)).abs() < 1e-14);
        if depth[i] == 10.0 && lam[i] < 1.5 {
            assert!((value[i] - exact[i]).abs() < 1e-3, "λ={} {} vs {}", lam[i], value[i], exact[i]);
        }
    }
}

#[test]
fn expand_bessel_plus_branch() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["expand", "--model", "bessel", "--p", "0.5", "--x", "1", "--branch", "plus", "--depth", "3"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let c = json(&dir.path().join("coefficients.json"));
    assert_eq!(c["u0"], -1.0);
    assert_eq!(floats(&c["u"]), vec![-1.0, -3.0, -5.0]);
    assert_eq!(c["sfraction"]["error"], "not-an-s-fraction");
}

#[test]
fn expand_at_depth_zero_gives_only_the_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["expand", "--depth", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let c = json(&dir.path().join("coefficients.json"));
    assert_eq!(c["u0"], 0.0);
    assert!(c["u"].as_array().unwrap().is_empty());
}

#[test]
fn every_output_references_its_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["invert", "--model", "bessel", "--p", "0.5", "--atoms", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["command"], "invert");
    assert_eq!(m["tool_version"], env!("CARGO_PKG_VERSION"));
    let hash = m["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 16);
    let outputs = m["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for name in outputs {
        let doc = json(&dir.path().join(name.as_str().unwrap()));
        assert_eq!(doc["run"]["manifest"], "manifest.json");
        assert_eq!(doc["run"]["config_hash"], hash);
    }
    let atoms = json(&dir.path().join("atoms.json"));
    let (z, ze) = (floats(&atoms["columns"]["z"]), floats(&atoms["columns"]["z_exact"]));
    assert_eq!(z.len(), 5);
    for (a, b) in z.iter().zip(&ze) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn csv_format_writes_tables_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--format", "csv", "invert", "--d-max", "100", "--points", "40", "--eps", "default"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("density.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("z,density,exact"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    // 17 significant digits in scientific notation.
    assert!(row[0].contains('e') && row[0].split('e').next().unwrap().len() == 18, "{}", row[0]);
    assert_eq!(csv.lines().count(), 41);
    let meta = json(&dir.path().join("density.meta.json"));
    assert_eq!(meta["meta"]["origin"], 0.5);
}

#[test]
fn json_outputs_are_byte_stable() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["expand", "--model", "bessel", "--p", "1.3", "--depth", "6", "--lambda-grid", "0.3,3"];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    for f in ["coefficients.json", "convergents.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    // Keys are sorted.
    let text = std::fs::read_to_string(a.path().join("coefficients.json")).unwrap();
    let keys: Vec<usize> = ["\"branch\"", "\"partial_sums\"", "\"u\"", "\"u0\"", "\"x\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "{keys:?}");
}

#[test]
fn seeded_runs_do_not_depend_on_threads() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let common = ["simulate-env", "--depth", "2", "--n-samples", "400", "--burn-in", "200", "--seed", "9"];
    let mut one = common.to_vec();
    one.extend(["--threads", "1"]);
    let mut three = common.to_vec();
    three.extend(["--threads", "3"]);
    assert!(run(a.path(), &one).status.success());
    assert!(run(b.path(), &three).status.success());
    for f in ["samples.csv", "summary.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let m = json(&a.path().join("manifest.json"));
    assert_eq!(m["seed"], 9);

    let c = tempfile::tempdir().unwrap();
    let mut other = common.to_vec();
    other[common.len() - 1] = "10";
    assert!(run(c.path(), &other).status.success());
    assert_ne!(std::fs::read(a.path().join("samples.csv")).unwrap(), std::fs::read(c.path().join("samples.csv")).unwrap());
}

#[test]
fn exit_codes_follow_the_error_family() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], i32, &str); 6] = [
        (&["simulate-env", "--depth", "0"], 2, "validation-error"),
        (&["expand", "--mu", "0"], 2, "domain-error"),
        (&["hitting", "--step", "1"], 2, "validation-error"),
        (&["levy", "--d-max", "50", "--points", "200", "--y-min", "1e-3", "--eps", "default"], 3, "extend-grid"),
        (&["verify-ct", "--model", "bm", "--mu", "-1", "--paths", "10"], 4, "hypothesis-failure"),
        (&["hitting", "--horizon", "0.5", "--to", "5", "--paths", "50"], 4, "horizon-too-short"),
    ];
    for (args, code, name) in cases {
        let o = run(dir.path(), args);
        assert_eq!(o.status.code(), Some(code), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with(name), "{args:?}: {}", stderr(&o));
    }
    let o = run(dir.path(), &["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn custom_model_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    std::fs::write(&model, r#"{"family":"custom","a":"1","wprime":"0.5","x0":0.0}"#).unwrap();
    let o = run(
        dir.path(),
        &["hitting", "--model", "file", "--model-file", model.to_str().unwrap(), "--paths", "2000", "--horizon", "50", "--step", "1e-3", "--to", "1"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let h = json(&dir.path().join("hitting.json"));
    // a = 1 with W' = 1/2 is Brownian motion with drift 1/2, so the
    // transform at λ = 1 is exp(μ − √(μ² + 2λ)) = e^{−1}.
    let (mean, se, exact) = (h["laplace_mean"].as_f64().unwrap(), h["laplace_se"].as_f64().unwrap(), h["exact"].as_f64().unwrap());
    assert!((exact - (-1f64).exp()).abs() < 1e-12);
    assert!((mean - exact).abs() < 4.0 * se, "{mean} ± {se} vs {exact}");
}

#[test]
fn transform_table_and_ct_pair() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["transform", "--kind", "table2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(json(&dir.path().join("table.json"))["failed"], 0);

    let o = run(dir.path(), &["transform", "--kind", "dual", "--model", "bessel", "--p", "1.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = json(&dir.path().join("transform.json"));
    assert!(t["riccati_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(t["output_zoo"]["p"], -2.5);

    let o = run(dir.path(), &["ct-pair", "--model", "bessel", "--p", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let c = json(&dir.path().join("ct_pair.json"));
    assert_eq!(c["partner_zoo"]["p"], -0.5);
    assert_eq!(c["partner_zoo"]["zero_boundary"], "reflecting");
}
