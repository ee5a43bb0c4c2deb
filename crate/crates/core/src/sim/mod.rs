//! Monte Carlo engines: the coefficient hierarchy and the Riccati variable in
//! a Brownian environment with drift, diffusion paths for hitting and
//! occupation times, and the statistics used to test them.

mod fokker_planck;
mod hierarchy;
mod laws;
mod paths;
mod rng;
mod stats;

pub use fokker_planck::{fokker_planck_residual, fokker_planck_residual_with, FokkerPlanckReport};
pub use hierarchy::{simulate_hierarchy, simulate_u, SDEConfig};
pub use laws::{gamma_cdf, GigLaw};
pub use paths::{hitting_laplace_exact, hitting_time, occupation_below, occupation_below_from, BoundaryRule, PathConfig};
pub use rng::{stream_rng, GENERATOR_ID};
pub use stats::{batch_mean_and_se, correlation, ecdf, ks_one_sample, ks_two_sample, laplace_mean, mean_and_se, Ecdf};

use crate::io::{config_hash, fmt_f64};
use serde::Serialize;
use serde_json::{json, Value};

/// Samples produced by one seeded run.
///
/// Joint samples are stored row-major with `dim` coordinates per row. Path
/// pools use two non-finite codes: `+inf` for a path that provably never
/// reaches its target and `NaN` for one still running at the horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePool {
    pub tag: String,
    pub dim: usize,
    pub values: Vec<f64>,
    pub seed: u64,
    pub generator_id: String,
    pub config_hash: String,
    pub censored: usize,
    pub escaped: usize,
}

impl SamplePool {
    pub(crate) fn new(tag: impl Into<String>, dim: usize, values: Vec<f64>, seed: u64, config: &Value) -> Self {
        SamplePool {
            tag: tag.into(),
            dim,
            values,
            seed,
            generator_id: GENERATOR_ID.into(),
            config_hash: config_hash(config),
            censored: 0,
            escaped: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        assert!(i < self.dim, "column {i} of a {}-dimensional pool", self.dim);
        self.values.iter().skip(i).step_by(self.dim).copied().collect()
    }

    /// Values that are not censored.
    pub fn resolved(&self) -> Vec<f64> {
        self.values.iter().copied().filter(|v| !v.is_nan()).collect()
    }

    /// Comment lines carrying the tag, the seed and the configuration hash,
    /// then one row per sample.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# tag={}\n# seed={}\n# config_hash={}\n# generator={}\n",
            self.tag, self.seed, self.config_hash, self.generator_id
        );
        let header: Vec<String> = (1..=self.dim).map(|i| format!("v{i}")).collect();
        s.push_str(&header.join(","));
        s.push('\n');
        for row in self.values.chunks(self.dim.max(1)) {
            let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Counts of column `col` in the bins `[edges[k], edges[k+1])`, the last
    /// bin closed; values outside the edges are reported separately.
    pub fn histogram(&self, col: usize, edges: &[f64]) -> Value {
        let mut counts = vec![0usize; edges.len().saturating_sub(1)];
        let (mut below, mut above) = (0usize, 0usize);
        for v in self.column(col) {
            if v.is_nan() {
                continue;
            }
            if v < edges[0] {
                below += 1;
            } else if v > edges[edges.len() - 1] {
                above += 1;
            } else {
                let last = counts.len() - 1;
                let k = edges.partition_point(|&e| e <= v).saturating_sub(1);
                counts[k.min(last)] += 1;
            }
        }
        json!({
            "tag": self.tag,
            "config_hash": self.config_hash,
            "edges": edges,
            "counts": counts,
            "below": below,
            "above": above,
        })
    }

    pub fn summary(&self) -> Value {
        json!({
            "tag": self.tag,
            "dim": self.dim,
            "n": self.len(),
            "seed": self.seed,
            "generator_id": self.generator_id,
            "config_hash": self.config_hash,
            "censored": self.censored,
            "escaped": self.escaped,
        })
    }
}
