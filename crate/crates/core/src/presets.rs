//! Parameter sets of the published spectra and population curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::observables::Mode;

/// Couplings `y/y_c` of the spectrum figures.
pub const SPECTRUM_RATIOS: [f64; 6] = [0.0, 0.5, 0.7, 0.8, 0.9, 0.95];

/// Bath coefficients `ϱ` of the population figure.
pub const POPULATION_VARRHOS: [f64; 3] = [0.01, 0.1, 1.0];

/// Detuning shared by every figure (the cavity sits 100 ω_R above the pump).
pub const FIGURE_DETUNING: f64 = -100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    Fig3a,
    Fig3b,
    Fig3c,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig3c,
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig4c,
        Figure::Fig5,
    ];

    /// The six spectrum figures.
    pub const SPECTRA: [Figure; 6] = [
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig3c,
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig4c,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig3c => "fig3c",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig4c => "fig4c",
            Figure::Fig5 => "fig5",
        }
    }

    /// `(κ, ϱ)` of a spectrum figure. The population figure does not state
    /// κ; it uses the weak-loss value of panel (a).
    pub fn kappa_varrho(self) -> (f64, f64) {
        match self {
            Figure::Fig3a | Figure::Fig4a => (0.1, 0.01),
            Figure::Fig3b | Figure::Fig4b => (0.1, 0.1),
            Figure::Fig3c | Figure::Fig4c => (10.0, 0.1),
            Figure::Fig5 => (0.1, 0.01),
        }
    }

    /// Mode plotted in a spectrum figure; `None` for the population figure,
    /// which shows both.
    pub fn mode(self) -> Option<Mode> {
        match self {
            Figure::Fig3a | Figure::Fig3b | Figure::Fig3c => Some(Mode::Quasiparticle),
            Figure::Fig4a | Figure::Fig4b | Figure::Fig4c => Some(Mode::Photon),
            Figure::Fig5 => None,
        }
    }

    /// Base parameters at `y = 0`.
    pub fn params(self) -> ModelParams {
        let (kappa, varrho) = self.kappa_varrho();
        ModelParams::new(FIGURE_DETUNING, kappa, varrho)
    }

    /// One parameter set per plotted curve: the six couplings of a spectrum
    /// figure, or the three bath strengths of the population figure at
    /// `y = 0`.
    pub fn curves(self) -> Vec<ModelParams> {
        let base = self.params();
        match self {
            Figure::Fig5 => POPULATION_VARRHOS
                .iter()
                .map(|&varrho| ModelParams { varrho, ..base })
                .collect(),
            _ => SPECTRUM_RATIOS
                .iter()
                .map(|&r| base.with_y_over_yc(r).expect("figure detuning is valid"))
                .collect(),
        }
    }
}

impl std::str::FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::invalid("figure", format!("unknown figure `{s}`")))
    }
}

impl std::fmt::Display for Figure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
