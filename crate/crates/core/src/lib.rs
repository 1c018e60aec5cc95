//! Mean-field dynamics of driven-dissipative spin-cavity models, their
//! effective oscillator reductions, and the machinery to map out their
//! dynamical phase diagrams.
//!
//! The crate covers:
//!
//! - [`dynamics`]: fixed-step RK4 integration, parameter drives, trajectories;
//! - [`dicke`]: the open Dicke model in intensive mean-field variables plus
//!   its linear (LOM) and nonlinear (NOM) oscillator reductions;
//! - [`spectral`]: closed-form polariton frequencies, eigenmodes, critical
//!   dissipation strengths, and resonance predictions, with an independent
//!   eigenvalue oracle;
//! - [`lmg`]: the open anisotropic Lipkin-Meshkov-Glick model, its steady
//!   states, critical coupling, and isotropic-limit analytic solutions;
//! - [`classifier`]: boundedness thresholds, decorrelator, envelope
//!   statistics, and subharmonic detection combined into a dynamical-phase
//!   label;
//! - [`sweep`]: parallel phase-diagram sweeps over parameter grids;
//! - [`io`]: CSV trajectory and phase-diagram files with config echoes.

pub mod classifier;
pub mod dicke;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod lmg;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Which dynamical model a trajectory or sweep refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Mean-field open Dicke model (cavity amplitude + intensive spin).
    DickeMf,
    /// Linear oscillator model (zeroth-order bosonic reduction).
    Lom,
    /// Nonlinear oscillator model (first-order bosonic reduction).
    Nom,
    /// Semiclassical open Lipkin-Meshkov-Glick model.
    Lmg,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::DickeMf => "dicke_mf",
            ModelKind::Lom => "lom",
            ModelKind::Nom => "nom",
            ModelKind::Lmg => "lmg",
        }
    }

    /// State components recorded in trajectory files for this model.
    pub fn component_names(&self) -> &'static [&'static str] {
        match self {
            ModelKind::DickeMf => &["alpha_re", "alpha_im", "sx", "sy", "sz"],
            ModelKind::Lom | ModelKind::Nom => {
                &["alpha_re", "alpha_im", "beta_re", "beta_im"]
            }
            ModelKind::Lmg => &["X", "Y", "Z"],
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dicke_mf" | "dicke" => Ok(ModelKind::DickeMf),
            "lom" => Ok(ModelKind::Lom),
            "nom" => Ok(ModelKind::Nom),
            "lmg" => Ok(ModelKind::Lmg),
            other => Err(Error::Config(format!(
                "unknown model '{other}' (expected dicke_mf, lom, nom, or lmg)"
            ))),
        }
    }
}
