//! The `excursion` command-line tool.
//!
//! Every command validates its arguments, runs one pipeline, writes its
//! outputs under `--out` and finishes with a `manifest.json` recording the
//! command, the full configuration, its hash and the files written.

mod commands;
mod output;

use crate::error::{Error, Result};
use crate::models::{Branch, ModelDoc, ZeroBoundary, ZooModel};
use crate::sim::BoundaryRule;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

pub use output::Format;

#[derive(Parser, Debug, Serialize)]
#[command(name = "excursion", version, about = "Excursion theory of one-dimensional diffusions by continued fractions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Seed of every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads, defaulting to the available parallelism. Results do
    /// not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Which diffusion to work with.
#[derive(Args, Debug, Clone, Serialize)]
pub struct ModelArgs {
    /// Model family: bm, bessel or file.
    #[arg(long)]
    pub model: Option<String>,
    /// Drift of Brownian motion.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Bessel index p = δ/2 − 1.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Rule at 0 for Bessel processes with a non-singular origin.
    #[arg(long, value_enum)]
    pub zero: Option<ZeroArg>,
    /// Start point.
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    /// Model document (JSON) for `--model file`.
    #[arg(long)]
    pub model_file: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroArg {
    None,
    Killing,
    Reflecting,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Branch {
        match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    Absorb,
    ReflectFold,
}

impl From<RuleArg> for BoundaryRule {
    fn from(r: RuleArg) -> BoundaryRule {
        match r {
            RuleArg::Absorb => BoundaryRule::Absorb,
            RuleArg::ReflectFold => BoundaryRule::ReflectFold,
        }
    }
}

impl ModelArgs {
    /// The model, with `family` used when `--model` is absent.
    pub fn resolve(&self, family: &str) -> Result<ModelDoc> {
        let family = self.model.as_deref().unwrap_or(family);
        match family {
            "bm" | "brownian" => {
                let m = ZooModel::brownian(self.mu.unwrap_or(1.0)).with_start(self.x0.unwrap_or(0.0));
                m.spec()?;
                Ok(ModelDoc::Zoo(m))
            }
            "bessel" => {
                let zero = match self.zero.unwrap_or(ZeroArg::None) {
                    ZeroArg::None => ZeroBoundary::None,
                    ZeroArg::Killing => ZeroBoundary::Killing,
                    ZeroArg::Reflecting => ZeroBoundary::Reflecting,
                };
                let m = ZooModel::bessel(self.p.unwrap_or(0.5))
                    .with_zero(zero)
                    .with_start(self.x0.unwrap_or(1.0));
                m.spec()?;
                Ok(ModelDoc::Zoo(m))
            }
            "file" => {
                let path = self
                    .model_file
                    .as_ref()
                    .ok_or_else(|| Error::Validation("--model file needs --model-file PATH".into()))?;
                let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                ModelDoc::from_json_str(&src)
            }
            other => Err(Error::Validation(format!("unknown model family '{other}'"))),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SdeArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub step: f64,
    #[arg(long, default_value_t = 1e3, allow_negative_numbers = true)]
    pub burn_in: f64,
    #[arg(long, default_value_t = 10_000)]
    pub n_samples: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub thin: f64,
    #[arg(long, default_value_t = 8)]
    pub chains: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PathArgs {
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    pub step: f64,
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub horizon: f64,
    #[arg(long, value_enum, default_value_t = RuleArg::Absorb)]
    pub boundary_rule: RuleArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsArg {
    Default,
    Fine,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvertMode {
    /// Atoms for discrete spectra (Bessel minus branch), densities otherwise.
    Auto,
    Density,
    Atoms,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = BranchArg::Minus)]
    pub branch: BranchArg,
    /// Point x of U±(x, λ); defaults to the start point.
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    #[arg(long, value_enum, default_value_t = InvertMode::Auto)]
    pub mode: InvertMode,
    /// Lower edge of the continuous spectrum; defaults to μ²/2 for Brownian
    /// motion and 0 otherwise.
    #[arg(long, allow_negative_numbers = true)]
    pub origin: Option<f64>,
    /// Smallest and largest offsets of the density grid from the origin.
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    pub d_min: f64,
    #[arg(long, default_value_t = 3e8, allow_negative_numbers = true)]
    pub d_max: f64,
    #[arg(long, default_value_t = 1400)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = EpsArg::Fine)]
    pub eps: EpsArg,
    /// Number of atoms to locate in atom mode.
    #[arg(long, default_value_t = 40)]
    pub atoms: usize,
    /// Depth of the numeric expansion used for models outside the zoo.
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformArg {
    H,
    Dual,
    Th,
    Table2,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Continued-fraction coefficients of U± and a table of convergents.
    Expand {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = BranchArg::Minus)]
        branch: BranchArg,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long)]
        x: Option<f64>,
        /// Comma-separated values of λ for the convergent table.
        #[arg(long, default_value = "0.1,1,10")]
        lambda_grid: String,
    },
    /// Spectral measure σ± by Stieltjes–Perron inversion or atom location.
    Invert {
        #[command(flatten)]
        spectral: SpectralArgs,
    },
    /// Lévy measure ν± of excursion durations and the exponent triangle.
    Levy {
        #[command(flatten)]
        spectral: SpectralArgs,
        #[arg(long, default_value_t = 1e-6)]
        y_min: f64,
        #[arg(long, default_value_t = 400.0)]
        y_max: f64,
        #[arg(long, default_value_t = 700)]
        y_points: usize,
        #[arg(long, default_value = "0.5,1,2")]
        lambda_grid: String,
    },
    /// h-transform, Krein dual, their composition, or the transform table.
    Transform {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = TransformArg::Th)]
        kind: TransformArg,
        #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
        branch: BranchArg,
        #[arg(long, default_value_t = 9)]
        samples: usize,
    },
    /// The Ciesielski–Taylor partner of a diffusion.
    CtPair {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Stationary law of the coefficient hierarchy in a Brownian environment.
    SimulateEnv {
        #[command(flatten)]
        sde: SdeArgs,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Stationary law of the Riccati variable in a Brownian environment.
    SimulateU {
        #[command(flatten)]
        sde: SdeArgs,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Occupation below a level against hitting of the level by the partner.
    VerifyCt {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        paths: PathArgs,
        #[arg(long, default_value_t = 1.0)]
        level: f64,
        /// Start of both processes; defaults to a finite left endpoint.
        #[arg(long)]
        start: Option<f64>,
    },
    /// Monte Carlo E[exp(−λH)] against the closed form.
    Hitting {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        paths: PathArgs,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Expand { .. } => "expand",
            Command::Invert { .. } => "invert",
            Command::Levy { .. } => "levy",
            Command::Transform { .. } => "transform",
            Command::CtPair { .. } => "ct-pair",
            Command::SimulateEnv { .. } => "simulate-env",
            Command::SimulateU { .. } => "simulate-u",
            Command::VerifyCt { .. } => "verify-ct",
            Command::Hitting { .. } => "hitting",
        }
    }
}

pub(crate) fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Validation(format!("'{t}' is not a number"))))
        .collect()
}

/// Runs a parsed command line; returns the path of the manifest.
pub fn run(cli: &Cli) -> Result<PathBuf> {
    let work = || commands::dispatch(cli);
    match cli.global.threads {
        Some(n) => {
            if n == 0 {
                return Err(Error::Validation("--threads must be positive".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Validation(e.to_string()))?;
            pool.install(work)
        }
        None => work(),
    }
}

/// Entry point of the binary: parses the arguments, runs the command and
/// maps failures to exit codes (2 validation, 3 numerical, 4 precondition
/// or hypothesis), printing the error name on stderr.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            0
        }
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            e.exit_code()
        }
    }
}
