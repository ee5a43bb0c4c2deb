//! Feller classification of endpoints (natural, entrance, exit or
//! non-singular) from the scale and speed integrals.

use excursions::models::{classify_endpoint, scale_finite_at, ModelDoc, Side, ZeroBoundary, ZooModel};

fn main() -> excursions::Result<()> {
    let mut models: Vec<ModelDoc> = [-1.5, 0.0, 0.5].into_iter().map(|p| ModelDoc::Zoo(ZooModel::bessel(p))).collect();
    // For −1 < p < 0 the origin is regular and needs a boundary condition.
    models.push(ModelDoc::Zoo(ZooModel::bessel(-0.5).with_zero(ZeroBoundary::Reflecting)));
    models.push(ModelDoc::Zoo(ZooModel::brownian(-0.3)));
    models.push(ModelDoc::from_json_str(
        r#"{"family": "custom", "label": "Feller square-root", "a": "x", "wprime": "0.75/x - 0.5", "l": 0, "x0": 1.0}"#,
    )?);
    for doc in models {
        let spec = doc.spec()?;
        print!("{:<26}", spec.label);
        for side in [Side::Left, Side::Right] {
            let class = classify_endpoint(&spec, side)?;
            let scale = scale_finite_at(&spec, side)?;
            print!("  {side:?}: {:<18} s finite: {:<5}", class.name(), matches!(scale, excursions::quad::Verdict::Convergent(_)));
        }
        println!();
    }
    Ok(())
}
