use super::output::{float, Sink};
use super::{parse_list, Cli, Command, EpsArg, InvertMode, PathArgs, SdeArgs, SpectralArgs, TransformArg};
use crate::cfrac::{eval_cf_closed, eval_cf_fixed, u_to_sfraction, CFCoefficients};
use crate::error::{Error, Result};
use crate::measures::{
    atom_at_zero, excursion_mean_duration, knight_exponent, laplace_exponent, levy_from_spectral, levy_khintchine_exponent,
    locate_atoms, log_grid, stieltjes_perron_invert, SpectralMeasure, DEFAULT_EPS, FINE_EPS,
};
use crate::models::{zoo_riccati, Branch, DiffusionSpec, ModelDoc, Side, ZooModel};
use crate::riccati::{bessel_minus_order, expand_numeric, expand_symbolic_zoo, free_space_tail};
use crate::sim::{
    batch_mean_and_se, correlation, gamma_cdf, hitting_laplace_exact, hitting_time, ks_one_sample, ks_two_sample,
    laplace_mean, mean_and_se, occupation_below_from, simulate_hierarchy, simulate_u, GigLaw, PathConfig, SDEConfig,
    SamplePool,
};
use crate::specialfn::{bessel_j, bessel_j_zero, bessel_y};
use crate::transforms::{ct_pair, h_transform, krein_dual, t_h, verify_table2, TransformRecord};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::PathBuf;

/// Number of batches used for standard errors of chain averages.
const BATCHES: usize = 50;

pub(crate) fn dispatch(cli: &Cli) -> Result<PathBuf> {
    let args = serde_json::to_value(&cli.command).map_err(|e| Error::Validation(e.to_string()))?;
    let name = cli.command.name();
    // Threads and the output directory do not change results and stay out of
    // the configuration hash.
    let config = |model: Option<&ModelDoc>| {
        json!({
            "command": name,
            "args": args,
            "seed": cli.global.seed,
            "format": cli.global.format,
            "model": model.map(ModelDoc::to_json),
        })
    };
    let sink = |model: Option<&ModelDoc>, seeded: bool| {
        Sink::new(
            &cli.global.out,
            cli.global.format,
            name,
            config(model),
            seeded.then_some(cli.global.seed),
        )
    };
    let seed = cli.global.seed;
    match &cli.command {
        Command::Expand { model, branch, depth, x, lambda_grid } => {
            let doc = model.resolve("bm")?;
            let mut out = sink(Some(&doc), false);
            expand(&mut out, &doc, (*branch).into(), *depth, *x, &parse_list(lambda_grid)?)?;
            out.finish()
        }
        Command::Invert { spectral } => {
            let doc = spectral.model.resolve("bm")?;
            let mut out = sink(Some(&doc), false);
            invert(&mut out, &doc, spectral)?;
            out.finish()
        }
        Command::Levy { spectral, y_min, y_max, y_points, lambda_grid } => {
            let doc = spectral.model.resolve("bm")?;
            let mut out = sink(Some(&doc), false);
            let ys = (*y_min, *y_max, *y_points);
            levy(&mut out, &doc, spectral, ys, &parse_list(lambda_grid)?)?;
            out.finish()
        }
        Command::Transform { model, kind, branch, samples } => {
            let doc = (*kind != TransformArg::Table2).then(|| model.resolve("bessel")).transpose()?;
            let mut out = sink(doc.as_ref(), false);
            transform(&mut out, doc.as_ref(), *kind, (*branch).into(), *samples)?;
            out.finish()
        }
        Command::CtPair { model } => {
            let doc = model.resolve("bessel")?;
            let mut out = sink(Some(&doc), false);
            let pair = ct_pair(&doc.spec()?)?;
            let z = ZooModel::recognize(&pair.z).map(|m| ModelDoc::Zoo(m).to_json());
            let note = serde_json::to_value(&pair.note).map_err(|e| Error::Io(e.to_string()))?;
            out.document("ct_pair", json!({"note": note, "partner_zoo": z, "record": pair.record.to_json(9)?}))?;
            out.finish()
        }
        Command::SimulateEnv { sde, depth } => {
            let cfg = sde_config(sde, *depth, seed);
            let mut out = sink(None, true);
            simulate_env(&mut out, &cfg)?;
            out.finish()
        }
        Command::SimulateU { sde, lambda } => {
            let cfg = sde_config(sde, 1, seed);
            let mut out = sink(None, true);
            simulate_riccati(&mut out, &cfg, *lambda)?;
            out.finish()
        }
        Command::VerifyCt { model, paths, level, start } => {
            let doc = model.resolve("bessel")?;
            let mut out = sink(Some(&doc), true);
            verify_ct(&mut out, &doc, paths, *level, *start, seed)?;
            out.finish()
        }
        Command::Hitting { model, paths, from, to, lambda } => {
            let doc = model.resolve("bm")?;
            let mut out = sink(Some(&doc), true);
            hitting(&mut out, &doc, paths, *from, *to, *lambda, seed)?;
            out.finish()
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

/// Continued-fraction coefficients of U±(x) for zoo models in closed form,
/// for other models by the numeric expansion.
fn coefficients(doc: &ModelDoc, spec: &DiffusionSpec, branch: Branch, depth: usize, x: f64) -> Result<CFCoefficients> {
    match doc.zoo() {
        Some(m) => expand_symbolic_zoo(&m, branch, depth, x),
        None => Ok(expand_numeric(spec, branch, depth, &[x])?.coefficients(x)),
    }
}

fn truncated(c: &CFCoefficients, n: usize) -> CFCoefficients {
    CFCoefficients { u: c.u[..n].to_vec(), ..c.clone() }
}

fn expand(out: &mut Sink, doc: &ModelDoc, branch: Branch, depth: usize, x: Option<f64>, lambdas: &[f64]) -> Result<()> {
    let spec = doc.spec()?;
    let x = x.unwrap_or(spec.x0);
    if !spec.contains(x) {
        return Err(Error::Validation(format!("x = {x} lies outside the state space")));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0)) {
        return Err(Error::Validation(format!("λ = {l} must be positive")));
    }
    let c = coefficients(doc, &spec, branch, depth, x)?;
    let sfraction = match u_to_sfraction(&c) {
        Ok(sf) => json!({"masses": sf.masses, "gaps": sf.gaps}),
        Err(e) => json!({"error": e.name(), "detail": e.to_string()}),
    };
    out.document(
        "coefficients",
        json!({
            "branch": branch,
            "x": x,
            "u0": c.u0,
            "u": c.u,
            "scale": c.scale,
            "partial_sums": c.partial_sums(),
            "sfraction": sfraction,
        }),
    )?;

    let zoo = doc.zoo();
    let mut rows = Vec::new();
    for &lam in lambdas {
        let l = Complex64::new(lam, 0.0);
        let exact = match &zoo {
            Some(m) => zoo_riccati(m, branch, x, l)?.re,
            None => f64::NAN,
        };
        for n in 0..=depth {
            let cn = truncated(&c, n);
            let plain = eval_cf_fixed(&cn, l, n).map(|v| v.re).unwrap_or(f64::NAN);
            let closed = eval_cf_closed(&cn, l, n, free_space_tail(&cn, l)).map(|v| v.re).unwrap_or(f64::NAN);
            rows.push(vec![lam, n as f64, plain, closed, exact]);
        }
    }
    out.table(
        "convergents",
        &["lambda", "depth", "value", "value_closed", "exact"],
        rows,
        json!({"branch": branch, "x": x, "exact_available": zoo.is_some()}),
    )
}

/// U±(x, ·) as a function on the complex plane.
type Riccati = Box<dyn Fn(Complex64) -> Result<Complex64> + Sync>;

fn riccati_function(doc: &ModelDoc, spec: &DiffusionSpec, branch: Branch, x: f64, depth: usize) -> Result<Riccati> {
    match doc.zoo() {
        Some(m) => Ok(Box::new(move |l| zoo_riccati(&m, branch, x, l))),
        None => {
            let c = coefficients(doc, spec, branch, depth, x)?;
            Ok(Box::new(move |l| eval_cf_closed(&c, l, c.depth(), free_space_tail(&c, l))))
        }
    }
}

struct Spectral {
    sigma: SpectralMeasure,
    u: Riccati,
    x: f64,
    branch: Branch,
    atoms_mode: bool,
}

fn spectral_measure(doc: &ModelDoc, s: &SpectralArgs) -> Result<Spectral> {
    let spec = doc.spec()?;
    let branch: Branch = s.branch.into();
    let x = s.x.unwrap_or(spec.x0);
    if !spec.contains(x) {
        return Err(Error::Validation(format!("x = {x} lies outside the state space")));
    }
    let zoo = doc.zoo();
    let u = riccati_function(doc, &spec, branch, x, s.depth)?;
    let atom0 = atom_at_zero(u(Complex64::new(0.0, 0.0))?.re, branch)?;
    let sigma = SpectralMeasure::new(atom0, branch, x)?;
    let atoms_mode = match s.mode {
        InvertMode::Atoms => true,
        InvertMode::Density => false,
        InvertMode::Auto => matches!(zoo, Some(ZooModel::Bessel { .. })) && branch == Branch::Minus,
    };
    let sigma = if atoms_mode {
        let hi = match zoo {
            Some(ZooModel::Bessel { p, zero, .. }) => {
                let nu = bessel_minus_order(p, zero);
                let mid = 0.5 * (bessel_j_zero(nu, s.atoms)? + bessel_j_zero(nu, s.atoms + 1)?);
                (mid / x).powi(2) / 2.0
            }
            _ => s.d_max,
        };
        let atoms = locate_atoms(&u, branch, (0.0, hi), s.atoms)?;
        let sigma = sigma.with_atoms(atoms)?;
        // Too few atoms for a tail fit leave the measure without a tail.
        match sigma.clone().with_atom_tail() {
            Ok(s) => s,
            Err(Error::Precondition(_)) => sigma,
            Err(e) => return Err(e),
        }
    } else {
        let origin = s.origin.unwrap_or(match zoo {
            Some(ZooModel::BrownianDrift { mu, .. }) => mu * mu / 2.0,
            _ => 0.0,
        });
        if !(s.d_min > 0.0 && s.d_max > s.d_min && s.points >= 2) {
            return Err(Error::Validation("density grid needs 0 < d_min < d_max and at least two points".into()));
        }
        let grid = log_grid(origin, s.d_min, s.d_max, s.points);
        let eps: &[f64] = match s.eps {
            EpsArg::Fine => &FINE_EPS,
            EpsArg::Default => &DEFAULT_EPS,
        };
        let inv = stieltjes_perron_invert(&u, branch, &grid, eps)?;
        sigma.with_density(inv, origin)?
    };
    Ok(Spectral { sigma, u, x, branch, atoms_mode })
}

/// Closed-form spectral density where one is known.
fn exact_density(zoo: Option<ZooModel>, branch: Branch, x: f64, z: f64) -> f64 {
    match zoo {
        Some(ZooModel::BrownianDrift { mu, .. }) => {
            if 2.0 * z <= mu * mu {
                0.0
            } else {
                (2.0 * z - mu * mu).sqrt() / (2.0 * PI * z)
            }
        }
        Some(ZooModel::Bessel { p, .. }) if branch == Branch::Plus && p >= 0.0 => {
            let w = (2.0 * z).sqrt() * x;
            match (bessel_j(p, w), bessel_y(p, w)) {
                (Ok(j), Ok(y)) => 1.0 / (PI * PI * z * x * (j * j + y * y)),
                _ => f64::NAN,
            }
        }
        _ => f64::NAN,
    }
}

fn invert(out: &mut Sink, doc: &ModelDoc, s: &SpectralArgs) -> Result<()> {
    let sp = spectral_measure(doc, s)?;
    let zoo = doc.zoo();
    let meta = sp.sigma.sidecar();
    if sp.atoms_mode {
        let exact: Vec<(f64, f64)> = match zoo {
            Some(ZooModel::Bessel { p, zero, .. }) => {
                let nu = bessel_minus_order(p, zero);
                (1..=sp.sigma.atoms.len())
                    .map(|k| bessel_j_zero(nu, k).map(|j| (j * j / (2.0 * sp.x * sp.x), 1.0 / sp.x)))
                    .collect::<Result<_>>()?
            }
            _ => vec![(f64::NAN, f64::NAN); sp.sigma.atoms.len()],
        };
        let rows = sp
            .sigma
            .atoms
            .iter()
            .zip(&exact)
            .enumerate()
            .map(|(k, (a, e))| vec![(k + 1) as f64, a.0, a.1, e.0, e.1])
            .collect();
        out.table("atoms", &["k", "z", "mass", "z_exact", "mass_exact"], rows, meta)
    } else {
        let rows = sp
            .sigma
            .z
            .iter()
            .zip(&sp.sigma.density)
            .map(|(&z, &d)| vec![z, d, exact_density(zoo, sp.branch, sp.x, z)])
            .collect();
        out.table("density", &["z", "density", "exact"], rows, meta)
    }
}

fn levy(out: &mut Sink, doc: &ModelDoc, s: &SpectralArgs, ys: (f64, f64, usize), lambdas: &[f64]) -> Result<()> {
    let sp = spectral_measure(doc, s)?;
    let (y_min, y_max, n) = ys;
    if !(y_min > 0.0 && y_max > y_min && n >= 2) {
        return Err(Error::Validation("y grid needs 0 < y_min < y_max and at least two points".into()));
    }
    let nu = levy_from_spectral(&sp.sigma, &log_grid(0.0, y_min, y_max, n))?;
    let mut triangle = Vec::new();
    for &lam in lambdas {
        if !(lam > 0.0) {
            return Err(Error::Validation(format!("λ = {lam} must be positive")));
        }
        let direct = laplace_exponent((sp.u)(Complex64::new(lam, 0.0))?, sp.branch).re;
        let knight = knight_exponent(&sp.sigma, lam)?;
        let lk = levy_khintchine_exponent(&nu, lam)?;
        triangle.push(json!({
            "lambda": lam,
            "direct": direct,
            "knight": knight,
            "levy_khintchine": lk,
            "max_relative_gap": ((knight / direct - 1.0).abs()).max((lk / direct - 1.0).abs()),
        }));
    }
    let mean = match excursion_mean_duration(&nu) {
        Ok(m) => json!(m),
        Err(e @ Error::MomentDivergence { .. }) => json!({"error": e.name()}),
        Err(e) => return Err(e),
    };
    let rows = nu.y.iter().zip(&nu.density).map(|(&y, &d)| vec![y, d]).collect();
    let mut meta = nu.sidecar();
    meta["atom0"] = json!(sp.sigma.atom0);
    out.table("levy", &["y", "density"], rows, meta)?;
    out.document(
        "exponents",
        json!({
            "branch": sp.branch,
            "x": sp.x,
            "atom0": sp.sigma.atom0,
            "atom_inf": nu.atom_inf,
            "mean_duration": mean,
            "triangle": triangle,
        }),
    )
}

fn record_json(rec: &TransformRecord, samples: usize) -> Result<Value> {
    let mut v = rec.to_json(samples)?;
    let xs = rec.input.test_points(samples);
    v["riccati_residual"] = match rec.riccati_residual(&xs, &[0.5, 1.0, 2.0]) {
        Ok(r) => json!(r),
        Err(Error::Precondition(_)) => Value::Null,
        Err(e) => return Err(e),
    };
    v["output_zoo"] = to_value(&ZooModel::recognize(&rec.output).map(|m| ModelDoc::Zoo(m).to_json()))?;
    Ok(v)
}

fn transform(out: &mut Sink, doc: Option<&ModelDoc>, kind: TransformArg, branch: Branch, samples: usize) -> Result<()> {
    let spec = || -> Result<DiffusionSpec> {
        doc.ok_or_else(|| Error::Validation("a model is required".into()))?.spec()
    };
    let rec = match kind {
        TransformArg::H => h_transform(&spec()?, branch)?,
        TransformArg::Dual => krein_dual(&spec()?)?,
        TransformArg::Th => t_h(&spec()?, branch)?,
        TransformArg::Table2 => {
            let checks = verify_table2()?;
            let failed = checks.iter().filter(|c| !c.ok).count();
            out.document("table", json!({"checks": to_value(&checks)?, "failed": failed}))?;
            if failed > 0 {
                return Err(Error::numerical(format!("{failed} transform table entries disagree"), failed as f64));
            }
            return Ok(());
        }
    };
    out.document("transform", record_json(&rec, samples)?)
}

fn sde_config(s: &SdeArgs, depth: usize, seed: u64) -> SDEConfig {
    SDEConfig {
        mu: s.mu,
        depth,
        step: s.step,
        burn_in: s.burn_in,
        n_samples: s.n_samples,
        thin: s.thin,
        seed,
        chains: s.chains,
    }
}

fn batch(values: &[f64]) -> (f64, f64) {
    batch_mean_and_se(values, (values.len() / BATCHES).max(1))
}

fn simulate_env(out: &mut Sink, cfg: &SDEConfig) -> Result<()> {
    let pool = simulate_hierarchy(cfg)?;
    let mut coords = Vec::new();
    let cols: Vec<Vec<f64>> = (0..cfg.depth).map(|i| pool.column(i)).collect();
    for (i, c) in cols.iter().enumerate() {
        let (m, se) = batch(c);
        coords.push(json!({
            "index": i + 1,
            "ks_gamma": ks_one_sample(c, |y| gamma_cdf(cfg.mu, y)),
            "mean": m,
            "mean_se": se,
            "mean_expected": 2.0 * cfg.mu,
        }));
    }
    let corr: Vec<Vec<f64>> = cols.iter().map(|a| cols.iter().map(|b| correlation(a, b)).collect()).collect();
    let edges: Vec<f64> = (0..=40).map(|k| k as f64 * cfg.mu / 2.0).collect();
    out.text("samples.csv", &pool.to_csv())?;
    out.document(
        "summary",
        json!({
            "pool": pool.summary(),
            "config": cfg.to_json(),
            "coordinates": coords,
            "correlation": corr,
            "histogram_v1": pool.histogram(0, &edges),
        }),
    )
}

fn simulate_riccati(out: &mut Sink, cfg: &SDEConfig, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Validation(format!("λ = {lambda} must be positive")));
    }
    let pool = simulate_u(cfg, lambda)?;
    let law = GigLaw::new(cfg.mu, lambda)?;
    let inv: Vec<f64> = pool.values.iter().map(|u| 1.0 / u).collect();
    let (m, se) = batch(&pool.values);
    let (mi, sei) = batch(&inv);
    out.text("samples.csv", &pool.to_csv())?;
    out.document(
        "summary",
        json!({
            "pool": pool.summary(),
            "config": cfg.to_json(),
            "lambda": lambda,
            "ks_gig": ks_one_sample(&pool.values, |y| law.cdf(y)),
            "mean": m,
            "mean_se": se,
            "mean_expected": law.expectation(|y| y)?,
            "inverse_mean": mi,
            "inverse_mean_se": sei,
            "inverse_mean_expected": law.expectation(|y| 1.0 / y)?,
            "ln_normalizer": law.ln_normalizer(),
        }),
    )
}

fn path_config(spec: DiffusionSpec, p: &PathArgs, seed: u64) -> Result<PathConfig> {
    PathConfig::new(spec, p.horizon, p.step, p.paths, seed, p.boundary_rule.into())
}

fn pool_stats(pool: &SamplePool) -> Value {
    let finite: Vec<f64> = pool.values.iter().copied().filter(|v| v.is_finite()).collect();
    let (m, se) = if finite.len() >= 2 { mean_and_se(&finite) } else { (f64::NAN, f64::NAN) };
    json!({"pool": pool.summary(), "finite": finite.len(), "mean_finite": float(m), "mean_finite_se": float(se)})
}

fn verify_ct(out: &mut Sink, doc: &ModelDoc, p: &PathArgs, level: f64, start: Option<f64>, seed: u64) -> Result<()> {
    let spec = doc.spec()?;
    let pair = ct_pair(&spec)?;
    let start = start.unwrap_or_else(|| spec.endpoint(Side::Left).finite().unwrap_or(spec.x0));
    let occ = occupation_below_from(&path_config(spec, p, seed)?, start, level)?;
    let hit = hitting_time(&path_config(pair.z.clone(), p, seed.wrapping_add(1))?, start, level)?;
    let ks = ks_two_sample(&occ.values, &hit.values);
    let (n, m) = (occ.resolved().len() as f64, hit.resolved().len() as f64);
    out.text("occupation.csv", &occ.to_csv())?;
    out.text("hitting.csv", &hit.to_csv())?;
    out.document(
        "ct_check",
        json!({
            "level": level,
            "start": start,
            "partner": pair.z.to_json(),
            "occupation": pool_stats(&occ),
            "hitting": pool_stats(&hit),
            "ks_two_sample": ks,
            // Asymptotic 5% critical value of the two-sample KS statistic.
            "ks_critical_5pct": 1.358 * ((n + m) / (n * m)).sqrt(),
        }),
    )
}

fn hitting(out: &mut Sink, doc: &ModelDoc, p: &PathArgs, from: Option<f64>, to: f64, lambda: f64, seed: u64) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(Error::Validation(format!("λ = {lambda} must be positive")));
    }
    let spec = doc.spec()?;
    let from = from.unwrap_or(spec.x0);
    let pool = hitting_time(&path_config(spec, p, seed)?, from, to)?;
    let (m, se) = laplace_mean(&pool.values, lambda);
    let exact = match doc.zoo() {
        Some(z) => float(hitting_laplace_exact(&z, from, to, lambda)?),
        None => Value::Null,
    };
    let z_score = exact.as_f64().map(|e| float((m - e) / se));
    out.text("hitting.csv", &pool.to_csv())?;
    out.document(
        "hitting",
        json!({
            "from": from,
            "to": to,
            "lambda": lambda,
            "laplace_mean": m,
            "laplace_se": se,
            "exact": exact,
            "z_score": z_score,
            "times": pool_stats(&pool),
        }),
    )
}
