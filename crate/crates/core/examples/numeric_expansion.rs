//! The numeric Riccati expansion works for diffusions outside the closed-form
//! families. Here a model document describes a custom diffusion; its first
//! coefficients are computed on a panel grid and checked against the
//! Riccati equation.

use excursions::cfrac::eval_cf_closed;
use excursions::models::{classify_endpoint, ModelDoc, Side};
use excursions::riccati::{check_expansion, expand_numeric, free_space_tail};
use num_complex::Complex64;

fn main() -> excursions::Result<()> {
    let doc = ModelDoc::from_json_str(
        r#"{"family": "custom", "label": "variable diffusivity", "a": "1 + x^2", "wprime": "1", "x0": 0.0}"#,
    )?;
    let spec = doc.spec()?;
    println!("{spec}");
    for side in [Side::Left, Side::Right] {
        println!("  {side:?} endpoint: {}", classify_endpoint(&spec, side)?.name());
    }

    for x in [-1.0, 0.0, 1.5] {
        let chain = expand_numeric(&spec, excursions::models::Branch::Minus, 4, &[x])?;
        let c = chain.coefficients(x);
        println!("\nx = {x}: u0 = {:.10}, u = {:?}", c.u0, c.u.iter().map(|v| format!("{v:.8}")).collect::<Vec<_>>());
        for lam in [0.5, 2.0] {
            let l = Complex64::new(lam, 0.0);
            let v = eval_cf_closed(&c, l, c.depth(), free_space_tail(&c, l))?.re;
            println!("  U−({x}, {lam}) ≈ {v:.10}");
        }
        let residual = check_expansion(&spec, &chain, &[0.5, 1.0, 2.0], x)?;
        println!("  Riccati residual of the truncated fraction: {residual:.2e}");
    }
    Ok(())
}
