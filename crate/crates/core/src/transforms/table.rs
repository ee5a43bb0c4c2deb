use super::{h_transform, krein_dual, same_characteristics};
use crate::error::Result;
use crate::models::{Branch, ZeroBoundary, ZooModel};
use serde::Serialize;

/// A zoo diffusion with its φ−(·,0)-transform, φ+(·,0)-transform and Krein
/// dual.
#[derive(Debug, Clone, Copy)]
pub struct Table2Row {
    pub regime: &'static str,
    pub x: ZooModel,
    pub minus: ZooModel,
    pub plus: ZooModel,
    pub dual: ZooModel,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2Check {
    pub regime: &'static str,
    pub x: String,
    pub column: &'static str,
    pub expected: String,
    pub got: String,
    pub ok: bool,
}

fn bes(p: f64) -> ZooModel {
    ZooModel::bessel(p)
}

fn bes_k(p: f64) -> ZooModel {
    ZooModel::bessel(p).with_zero(ZeroBoundary::Killing)
}

fn bes_r(p: f64) -> ZooModel {
    ZooModel::bessel(p).with_zero(ZeroBoundary::Reflecting)
}

fn bm(mu: f64) -> ZooModel {
    ZooModel::brownian(mu)
}

/// Every regime of the table, each at one or two representative parameters.
pub fn table2() -> Vec<Table2Row> {
    let row = |regime, x, minus, plus, dual| Table2Row { regime, x, minus, plus, dual };
    vec![
        row("mu < 0", bm(-1.0), bm(1.0), bm(-1.0), bm(1.0)),
        row("mu < 0", bm(-0.25), bm(0.25), bm(-0.25), bm(0.25)),
        row("mu > 0", bm(1.0), bm(1.0), bm(-1.0), bm(-1.0)),
        row("mu > 0", bm(2.5), bm(2.5), bm(-2.5), bm(-2.5)),
        row("p <= -1", bes(-1.5), bes(1.5), bes(-1.5), bes(0.5)),
        row("p <= -1", bes(-1.0), bes(1.0), bes(-1.0), bes(0.0)),
        row("-1 < p < 0, 0 killing", bes_k(-0.5), bes(0.5), bes_k(-0.5), bes_r(-0.5)),
        row("-1 < p < 0, 0 killing", bes_k(-0.25), bes(0.25), bes_k(-0.25), bes_r(-0.75)),
        row("-1 < p < 0, 0 reflecting", bes_r(-0.5), bes_r(-0.5), bes_r(-0.5), bes_k(-0.5)),
        row("-1 < p < 0, 0 reflecting", bes_r(-0.75), bes_r(-0.75), bes_r(-0.75), bes_k(-0.25)),
        row("p = 0", bes(0.0), bes(0.0), bes(0.0), bes(-1.0)),
        row("0 < p < 1", bes(0.5), bes(0.5), bes_k(-0.5), bes(-1.5)),
        row("0 < p < 1", bes(0.25), bes(0.25), bes_k(-0.25), bes(-1.25)),
        row("p >= 1", bes(1.0), bes(1.0), bes(-1.0), bes(-2.0)),
        row("p >= 1", bes(1.5), bes(1.5), bes(-1.5), bes(-2.5)),
    ]
}

/// Recomputes every entry of [`table2`] from the maps and compares
/// characteristics (interval, boundary kinds, a and W').
pub fn verify_table2() -> Result<Vec<Table2Check>> {
    let mut out = Vec::new();
    for row in table2() {
        let x = row.x.spec()?;
        let computed = [
            ("X-", h_transform(&x, Branch::Minus).map(|r| r.output), row.minus),
            ("X+", h_transform(&x, Branch::Plus).map(|r| r.output), row.plus),
            ("X*", krein_dual(&x).map(|r| r.output), row.dual),
        ];
        for (column, got, want) in computed {
            let expected = want.spec()?;
            let (got, ok) = match got {
                Ok(g) => {
                    let ok = same_characteristics(&g, &expected, 1e-12);
                    (g.to_string(), ok)
                }
                Err(e) => (format!("error: {e}"), false),
            };
            out.push(Table2Check {
                regime: row.regime,
                x: row.x.label(),
                column,
                expected: expected.to_string(),
                got,
                ok,
            });
        }
    }
    Ok(out)
}
