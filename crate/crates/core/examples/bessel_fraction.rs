//! Bessel processes: U−(x, λ) has coefficients 2(ν + n)/x and is an
//! S-fraction, i.e. a Krein string of point masses; U+ for p ≥ 0 has
//! coefficients 2(p − n)/x that change sign and is not.

use excursions::cfrac::{eval_cf_adaptive, eval_cf_fixed, u_to_sfraction};
use excursions::models::{zoo_riccati, Branch, ZooModel};
use excursions::riccati::expand_symbolic_zoo;
use num_complex::Complex64;

fn main() -> excursions::Result<()> {
    let (p, x) = (0.5, 1.0);
    let model = ZooModel::bessel(p);

    let minus = expand_symbolic_zoo(&model, Branch::Minus, 8, x)?;
    println!("{}: U− coefficients u0 = {}, u = {:?}", model.label(), minus.u0, minus.u);
    let string = u_to_sfraction(&minus)?;
    println!("  string masses {:?}", string.masses);
    println!("  string gaps   {:?}", string.gaps);

    let plus = expand_symbolic_zoo(&model, Branch::Plus, 3, x)?;
    println!("U+ coefficients u0 = {}, u = {:?}", plus.u0, plus.u);
    match u_to_sfraction(&plus) {
        Err(e) => println!("  as a string: {e}"),
        Ok(_) => unreachable!("negative coefficients cannot form a string"),
    }

    // The fraction against the Bessel-ratio closed form 2 coth 2 − 1 at λ = 2.
    let lam = Complex64::new(2.0, 0.0);
    let deep = expand_symbolic_zoo(&model, Branch::Minus, 60, x)?;
    println!("\nU−(1, 2): depth 60 gives {:.15}", eval_cf_fixed(&deep, lam, 60)?.re);
    println!("          closed form  {:.15}", zoo_riccati(&model, Branch::Minus, x, lam)?.re);
    println!("          2 coth 2 − 1 {:.15}", 2.0 / 2f64.tanh() - 1.0);

    // Adaptive evaluation straight from the coefficient law.
    let (v, depth) = eval_cf_adaptive(|n| 2.0 * (p + n as f64) / x, 2.0, lam, 1e-14)?;
    println!("adaptive Lentz: {:.15} after {depth} levels", v.re + minus.u0);
    Ok(())
}
