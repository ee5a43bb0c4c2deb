//! Brownian motion with drift μ: the Riccati variable U−(λ) = √(μ² + 2λ) − μ
//! expands into a continued fraction whose coefficients are all 2|μ|.
//!
//! Run with `cargo run --example brownian_fraction`.

use excursions::cfrac::{eval_cf_closed, eval_cf_fixed, series_to_u, PowerSeries};
use excursions::models::{zoo_riccati, Branch, ZooModel};
use excursions::riccati::{expand_symbolic_zoo, free_space_tail};
use num_complex::Complex64;

fn main() -> excursions::Result<()> {
    let mu = 1.0;
    // Taylor coefficients of √(μ² + 2λ) − μ, then reversion into a fraction.
    let series = PowerSeries::sqrt_shift(mu, 10);
    let expansion = series_to_u(&series, 2.0, 10)?;
    println!("coefficients from the Taylor series: {:?}", expansion.coeffs().u);

    let model = ZooModel::brownian(mu);
    let coeffs = expand_symbolic_zoo(&model, Branch::Minus, 40, 0.0)?;
    println!("\n{:>6} {:>6} {:>20} {:>20} {:>20}", "λ", "depth", "plain", "with tail", "exact");
    for lam in [0.1, 1.0, 10.0] {
        let l = Complex64::new(lam, 0.0);
        let exact = zoo_riccati(&model, Branch::Minus, 0.0, l)?.re;
        for n in [1, 5, 10, 20, 40] {
            let mut c = coeffs.clone();
            c.u.truncate(n);
            let plain = eval_cf_fixed(&c, l, n)?.re;
            let tail = eval_cf_closed(&c, l, n, free_space_tail(&c, l))?.re;
            println!("{lam:>6} {n:>6} {plain:>20.15} {tail:>20.15} {exact:>20.15}");
        }
    }
    Ok(())
}
