//! Monte Carlo estimates of E[e^{−λH}] for first hitting times against
//! their closed forms, for Brownian motion with drift in both directions
//! and for a Bessel process.

use excursions::models::ZooModel;
use excursions::sim::{hitting_laplace_exact, hitting_time, laplace_mean, BoundaryRule, PathConfig};

fn main() -> excursions::Result<()> {
    let cases = [
        (ZooModel::brownian(1.0), 0.0, 1.0),
        (ZooModel::brownian(1.0), 1.0, 0.0),
        (ZooModel::bessel(0.5), 0.5, 2.0),
        (ZooModel::bessel(1.5), 1.0, 2.5),
    ];
    for (seed, (model, from, to)) in cases.into_iter().enumerate() {
        let cfg = PathConfig::new(model.spec()?, 100.0, 1e-4, 5_000, seed as u64, BoundaryRule::Absorb)?;
        let pool = hitting_time(&cfg, from, to)?;
        for lambda in [0.5, 2.0] {
            let (m, se) = laplace_mean(&pool.values, lambda);
            let exact = hitting_laplace_exact(&model, from, to, lambda)?;
            println!(
                "{:<22} {from} -> {to}, λ = {lambda}: {m:.5} ± {se:.5} vs {exact:.5} ({:+.2} SE); never hit: {}",
                model.label(),
                (m - exact) / se,
                pool.escaped
            );
        }
    }
    Ok(())
}
