//! The time a diffusion spends below a level has the law of the hitting time
//! of that level by its Ciesielski–Taylor partner. For BES(3) started at 0
//! the partner is reflected Brownian motion.

use excursions::models::ZooModel;
use excursions::sim::{hitting_time, ks_two_sample, mean_and_se, occupation_below_from, BoundaryRule, PathConfig};
use excursions::transforms::ct_pair;

fn main() -> excursions::Result<()> {
    let x = ZooModel::bessel(0.5).spec()?;
    let pair = ct_pair(&x)?;
    println!("X = {}\nZ = {}", pair.note.x_label, pair.note.z_label);
    for h in &pair.note.hypotheses {
        println!("  hypothesis {} holds: {} ({})", h.index, h.holds, h.statement);
    }

    let n = 4_000;
    let occ = occupation_below_from(&PathConfig::new(x, 50.0, 1e-4, n, 1, BoundaryRule::Absorb)?, 0.0, 1.0)?;
    let hit = hitting_time(&PathConfig::new(pair.z.clone(), 50.0, 1e-4, n, 2, BoundaryRule::Absorb)?, 0.0, 1.0)?;
    let (mo, so) = mean_and_se(&occ.values);
    let (mh, sh) = mean_and_se(&hit.values);
    println!("\noccupation of [0, 1) by X: mean {mo:.4} ± {so:.4}");
    println!("hitting time of 1 by Z:    mean {mh:.4} ± {sh:.4}");
    println!("two-sample KS distance {:.4} (5% critical value {:.4})", ks_two_sample(&occ.values, &hit.values), 1.358 * (2.0 / n as f64).sqrt());
    Ok(())
}
