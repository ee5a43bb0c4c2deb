//! The Laplace exponent ψ−(x, λ) of the occupation time below x, three ways:
//! directly from U−, as the Knight integral of σ−, and as the
//! Lévy–Khintchine integral of the excursion-duration measure ν−.

use excursions::measures::{
    atom_at_zero, excursion_mean_duration, knight_exponent, laplace_exponent, levy_from_spectral,
    levy_khintchine_exponent, locate_atoms, log_grid, SpectralMeasure,
};
use excursions::models::{zoo_riccati, Branch, ZooModel};
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() -> excursions::Result<()> {
    let (model, x) = (ZooModel::bessel(0.5), 1.0);
    let u = move |l| zoo_riccati(&model, Branch::Minus, x, l);
    let atoms = locate_atoms(&u, Branch::Minus, (0.0, (40.5 * PI).powi(2) / 2.0), 40)?;
    let atom0 = atom_at_zero(u(Complex64::new(0.0, 0.0))?.re, Branch::Minus)?;
    let sigma = SpectralMeasure::new(atom0, Branch::Minus, x)?.with_atoms(atoms)?.with_atom_tail()?;
    let nu = levy_from_spectral(&sigma, &log_grid(0.0, 1e-6, 400.0, 700))?;

    println!("{} at x = {x}", model.label());
    println!("{:>5} {:>16} {:>16} {:>16}", "λ", "ψ from U", "Knight", "Lévy–Khintchine");
    for lam in [0.25, 0.5, 1.0, 2.0, 8.0] {
        let direct = laplace_exponent(u(Complex64::new(lam, 0.0))?, Branch::Minus).re;
        let k = knight_exponent(&sigma, lam)?;
        let l = levy_khintchine_exponent(&nu, lam)?;
        println!("{lam:>5} {direct:>16.10} {k:>16.10} {l:>16.10}");
    }
    println!("mean excursion duration ∫ y ν(dy) = {:.8} (1/u_1 = 1/3)", excursion_mean_duration(&nu)?);
    println!("atom of ν at ∞ = {} = atom of σ at 0", nu.atom_inf);
    Ok(())
}
