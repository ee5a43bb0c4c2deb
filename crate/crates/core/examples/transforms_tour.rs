//! h-transforms, Krein duality and their composition 𝒯_h, which performs one
//! step of the continued-fraction expansion at the level of diffusions.

use excursions::models::{Branch, ZooModel};
use excursions::transforms::{h_transform, krein_dual, t_h, table2, verify_table2};

fn main() -> excursions::Result<()> {
    let x = ZooModel::brownian(1.0).spec()?;
    let h = h_transform(&x, Branch::Plus)?;
    println!("h-transform of {} by φ+(·, 0) = {}: {}", x.label, h.h, h.output);
    let d = krein_dual(&x)?;
    println!("Krein dual: {}", d.output);
    println!("  U·U* = 2λ/a holds to {:.1e}", d.riccati_residual(&x.test_points(5), &[0.5, 1.0, 2.0])?);

    // Each 𝒯_h step on a Bessel process moves the index one unit further
    // from zero.
    let mut spec = ZooModel::bessel(2.5).spec()?;
    println!("\n𝒯_h chain on the minus branch from {}", spec.label);
    for _ in 0..4 {
        let step = t_h(&spec, Branch::Minus)?;
        let next = ZooModel::recognize(&step.output).map(|m| m.label()).unwrap_or_else(|| step.output.label.clone());
        println!("  -> {next}");
        spec = step.output;
    }

    println!("\ntransform table");
    for row in table2() {
        println!("  {:<28} X = {:<22} minus {:<22} plus {:<22} dual {}", row.regime, row.x.label(), row.minus.label(), row.plus.label(), row.dual.label());
    }
    let checks = verify_table2()?;
    println!("{} of {} entries verified", checks.iter().filter(|c| c.ok).count(), checks.len());
    Ok(())
}
