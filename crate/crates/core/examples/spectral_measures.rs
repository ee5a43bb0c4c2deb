//! Spectral measures σ± in the Stieltjes representation of U±: a
//! continuous density for Brownian motion with drift, recovered by
//! Stieltjes–Perron inversion, and point masses at (j_{ν,k}/x)²/2 for the
//! Bessel minus branch.

use excursions::measures::{locate_atoms, stieltjes_perron_invert, DEFAULT_EPS};
use excursions::models::{zoo_riccati, Branch, ZooModel};
use excursions::specialfn::bessel_j_zero;
use std::f64::consts::PI;

fn main() -> excursions::Result<()> {
    let bm = ZooModel::brownian(1.0);
    let u = move |l| zoo_riccati(&bm, Branch::Minus, 0.0, l);
    let zs = [0.6, 1.0, 2.0, 5.0, 20.0];
    let inv = stieltjes_perron_invert(&u, Branch::Minus, &zs, &DEFAULT_EPS)?;
    println!("BM(1) σ− density (support starts at μ²/2 = 0.5)");
    for (z, d) in zs.iter().zip(&inv.density) {
        let exact = (2.0 * z - 1.0).sqrt() / (2.0 * PI * z);
        println!("  z = {z:>5}: {d:.10}  exact {exact:.10}");
    }

    let (p, x) = (1.3, 0.8);
    let bes = ZooModel::bessel(p);
    let um = move |l| zoo_riccati(&bes, Branch::Minus, x, l);
    let atoms = locate_atoms(&um, Branch::Minus, (0.0, 400.0), 10)?;
    println!("\n{} at x = {x}: σ− atoms", bes.label());
    for (k, (z, w)) in atoms.iter().enumerate() {
        let j = bessel_j_zero(p, k + 1)?;
        println!("  z = {z:>12.8} (exact {:>12.8}), mass {w:.8} (exact {:.8})", j * j / (2.0 * x * x), 1.0 / x);
    }
    Ok(())
}
