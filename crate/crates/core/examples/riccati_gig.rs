//! The Riccati variable U−(x, λ) in a Brownian environment with drift μ is
//! stationary in x with the generalized inverse Gaussian law
//! ∝ y^{−μ−1} e^{−y/2 − λ/y}.

use excursions::sim::{batch_mean_and_se, ks_one_sample, simulate_u, GigLaw, SDEConfig};

fn main() -> excursions::Result<()> {
    for (mu, lambda) in [(1.0, 1.0), (0.5, 0.2), (2.0, 3.0)] {
        let cfg = SDEConfig { mu, n_samples: 20_000, seed: 11, ..SDEConfig::default() };
        let pool = simulate_u(&cfg, lambda)?;
        let law = GigLaw::new(mu, lambda)?;
        let (m, se) = batch_mean_and_se(&pool.values, 400);
        println!(
            "μ = {mu}, λ = {lambda}: mean {m:.4} ± {se:.4} (law {:.4}), KS {:.4}",
            law.expectation(|y| y)?,
            ks_one_sample(&pool.values, |y| law.cdf(y))
        );
    }
    Ok(())
}
