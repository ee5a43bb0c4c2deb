//! Spectral measures σ±(x) of the Riccati variables and Lévy measures ν±(x)
//! of excursion durations.
//!
//! With the Knight representation U± = ∓2λ ∫ σ±(dz)/(λ+z), the Laplace
//! exponent ψ± = ∓U±/2 = λ ∫ σ±(dz)/(λ+z) and ν±(dy) = ∫ z e^{−yz} σ±(dz) dy,
//! with the atom of σ at 0 reappearing as the atom of ν at ∞.
//!
//! Sampled densities are integrated by the trapezoid rule in ln(z − origin)
//! (respectively ln y), with power-law closures beyond the outermost
//! samples. Geometric grids therefore give spectrally accurate quadrature
//! for integrands with algebraic behaviour at the ends of their support.

mod atoms;
mod inversion;
mod levy;
mod logtrap;

pub use atoms::{locate_atoms, locate_atoms_with, AtomTail, SCAN_POINTS};
pub use inversion::{stieltjes_perron_invert, Inversion, CLAMP, DEFAULT_EPS, FINE_EPS};
pub use levy::{
    excursion_mean_duration, knight_exponent, levy_from_spectral, levy_khintchine_exponent, moment_n,
    Measure,
};

use crate::error::{Error, Result};
use crate::models::Branch;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// ψ± = ∓U±/2.
pub fn laplace_exponent(u: Complex64, branch: Branch) -> Complex64 {
    u * (0.5 * branch.sign())
}

/// σ±(x, {0}) = ∓U±(x, 0)/2; negative values beyond rounding mean the
/// Riccati value belongs to the other branch.
pub fn atom_at_zero(u_at_zero: f64, branch: Branch) -> Result<f64> {
    let v = 0.5 * branch.sign() * u_at_zero;
    if v < -1e-12 * u_at_zero.abs().max(1.0) {
        return Err(Error::InconsistentBranch { value: v });
    }
    Ok(v.max(0.0))
}

/// Geometric grid origin + d_i with d running from `d_min` to `d_max`.
pub fn log_grid(origin: f64, d_min: f64, d_max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && d_min > 0.0 && d_max > d_min);
    let r = (d_max / d_min).ln() / (n - 1) as f64;
    (0..n).map(|i| origin + d_min * (r * i as f64).exp()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub atom0: f64,
    pub atoms: Vec<(f64, f64)>,
    pub atom_tail: Option<AtomTail>,
    /// Density sample points, all strictly greater than `origin`.
    pub z: Vec<f64>,
    pub density: Vec<f64>,
    /// Lower edge of the absolutely continuous part.
    pub origin: f64,
    pub branch: Branch,
    pub x: f64,
    /// Largest negative value clamped during inversion.
    pub clamped: f64,
}

impl SpectralMeasure {
    pub fn new(atom0: f64, branch: Branch, x: f64) -> Result<Self> {
        if !(atom0 >= 0.0) {
            return Err(Error::Validation(format!("atom0 = {atom0} is negative")));
        }
        Ok(SpectralMeasure {
            atom0,
            atoms: vec![],
            atom_tail: None,
            z: vec![],
            density: vec![],
            origin: 0.0,
            branch,
            x,
            clamped: 0.0,
        })
    }

    pub fn with_density(mut self, inv: Inversion, origin: f64) -> Result<Self> {
        if inv.z.iter().any(|&z| !(z > origin)) || inv.z.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation(
                "density grid must be increasing and lie above its origin".into(),
            ));
        }
        self.z = inv.z;
        self.density = inv.density;
        self.origin = origin;
        self.clamped = inv.clamped;
        Ok(self)
    }

    pub fn with_atoms(mut self, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| !(a.0 > 0.0 && a.1 > 0.0)) {
            return Err(Error::Validation(format!("atom {a:?} is not positive")));
        }
        self.atoms = atoms;
        Ok(self)
    }

    /// Continues the located atoms by their Weyl asymptotics.
    pub fn with_atom_tail(mut self) -> Result<Self> {
        self.atom_tail = Some(AtomTail::fit(&self.atoms)?);
        Ok(self)
    }

    pub(crate) fn offsets(&self) -> Vec<f64> {
        self.z.iter().map(|z| z - self.origin).collect()
    }

    /// "z,density" rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("z,density\n");
        for (z, d) in self.z.iter().zip(&self.density) {
            s.push_str(&format!("{:.16e},{:.16e}\n", z, d));
        }
        s
    }

    /// Atoms and metadata; the density itself goes to the CSV.
    pub fn sidecar(&self) -> Value {
        json!({
            "atom0": self.atom0,
            "atoms": self.atoms.iter().map(|(z, w)| json!({"z": z, "mass": w})).collect::<Vec<_>>(),
            "atom_tail": self.atom_tail,
            "origin": self.origin,
            "branch": self.branch,
            "x": self.x,
            "clamped": self.clamped,
            "points": self.z.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyMeasure {
    pub atom_inf: f64,
    pub y: Vec<f64>,
    pub density: Vec<f64>,
    pub branch: Branch,
    pub x: f64,
}

impl LevyMeasure {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("y,density\n");
        for (y, d) in self.y.iter().zip(&self.density) {
            s.push_str(&format!("{:.16e},{:.16e}\n", y, d));
        }
        s
    }

    pub fn sidecar(&self) -> Value {
        json!({
            "atom_inf": self.atom_inf,
            "branch": self.branch,
            "x": self.x,
            "points": self.y.len(),
        })
    }
}
