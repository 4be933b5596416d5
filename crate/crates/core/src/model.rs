//! Physical and reduced-model parameters.
//!
//! Everything downstream of this module works in units of the recoil
//! frequency `ω_R = ħk²/2m`: frequencies, rates, the coupling `y` and the
//! bath coefficient `ϱ` are plain `f64`s measured in `ω_R`, and temperature
//! enters as the ratio `k_B T / ħω_R`. Conversion to SI happens only through
//! [`PhysicalParams`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

pub const DEFAULT_EPSILON: f64 = 1e-9;
pub const DEFAULT_CUTOFF: f64 = 20.0;
pub const DEFAULT_GAMMA_B: f64 = 1e-3;

/// Laboratory-unit description of the condensate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Number of condensed atoms `N_c`.
    pub atom_number: f64,
    /// Geometric-mean trap frequency `ω̄` (rad/s).
    pub mean_trap_frequency: f64,
    /// s-wave scattering length `a` (m).
    pub scattering_length: f64,
    /// Cavity/pump wavelength `λ` (m).
    pub wavelength: f64,
    /// Atomic mass `m` (kg).
    pub atomic_mass: f64,
    /// Temperature (K).
    pub temperature: f64,
}

impl PhysicalParams {
    /// ⁸⁷Rb, 10⁵ atoms at T = 0 in a 142 Hz trap, λ = 780 nm.
    pub fn rubidium_87() -> Self {
        PhysicalParams {
            atom_number: 1e5,
            mean_trap_frequency: 2.0 * std::f64::consts::PI * 142.0,
            scattering_length: 5.29e-9,
            wavelength: 780e-9,
            atomic_mass: 1.443e-25,
            temperature: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("atom_number", self.atom_number),
            ("mean_trap_frequency", self.mean_trap_frequency),
            ("scattering_length", self.scattering_length),
            ("wavelength", self.wavelength),
            ("atomic_mass", self.atomic_mass),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::invalid("temperature", "must be non-negative"));
        }
        Ok(())
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// `ω_R = ħk²/2m` in rad/s.
    pub fn recoil_frequency(&self) -> f64 {
        let k = self.wavenumber();
        HBAR * k * k / (2.0 * self.atomic_mass)
    }

    /// `k_B T / ħω_R`.
    pub fn temperature_ratio(&self) -> f64 {
        K_B * self.temperature / (HBAR * self.recoil_frequency())
    }

    /// Harmonic-oscillator length `√(ħ/mω̄)`.
    pub fn oscillator_length(&self) -> f64 {
        (HBAR / (self.atomic_mass * self.mean_trap_frequency)).sqrt()
    }

    /// Thomas–Fermi radius `a_ho (15 N a / a_ho)^{1/5}`.
    pub fn thomas_fermi_radius(&self) -> f64 {
        let a_ho = self.oscillator_length();
        a_ho * (15.0 * self.atom_number * self.scattering_length / a_ho).powf(0.2)
    }

    pub fn density(&self, convention: DensityConvention) -> Result<f64> {
        match convention {
            DensityConvention::Peak => Ok(peak_tf_density(self)),
            DensityConvention::Mean => Ok(peak_tf_density(self) * 4.0 / 7.0),
            DensityConvention::Fixed(n) if n >= 0.0 && n.is_finite() => Ok(n),
            DensityConvention::Fixed(n) => Err(Error::invalid("density", format!("must be non-negative, got {n}"))),
        }
    }
}

/// How the density `N_c/V` entering `ϱ` is estimated from a trapped cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[derive(Default)]
pub enum DensityConvention {
    /// Central Thomas–Fermi density.
    #[default]
    Peak,
    /// Density-weighted mean of the Thomas–Fermi profile, `4/7` of the peak.
    Mean,
    /// A density supplied directly (m⁻³).
    Fixed(f64),
}


/// Peak density `15N / (8π R_TF³)` of a Thomas–Fermi cloud (m⁻³).
pub fn peak_tf_density(phys: &PhysicalParams) -> f64 {
    if phys.atom_number <= 0.0 {
        return 0.0;
    }
    let r = phys.thomas_fermi_radius();
    15.0 * phys.atom_number / (8.0 * std::f64::consts::PI * r.powi(3))
}

/// Bath coefficient `ϱ/ω_R = (4√2/π)·n·a²·λ` for density `n` (m⁻³),
/// scattering length `a` (m) and wavelength `λ` (m).
pub fn coupling_coefficient_varrho(density: f64, scattering_length: f64, wavelength: f64) -> f64 {
    4.0 * std::f64::consts::SQRT_2 / std::f64::consts::PI
        * density
        * scattering_length
        * scattering_length
        * wavelength
}

/// Critical pump coupling `y_c = √((Δ_C² + κ²) ω_R / |Δ_C|)`.
pub fn critical_coupling(detuning: f64, kappa: f64, recoil: f64) -> Result<f64> {
    if detuning == 0.0 || !detuning.is_finite() {
        return Err(Error::invalid("detuning", "critical coupling needs a non-zero detuning"));
    }
    Ok(((detuning * detuning + kappa * kappa) * recoil / detuning.abs()).sqrt())
}

/// Bose occupation `1/(e^{ω/T} − 1)`; `temperature` is in the units of `omega`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", format!("occupation needs a positive frequency, got {omega}")));
    }
    if temperature < 0.0 {
        return Err(Error::invalid("temperature", "must be non-negative"));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Treatment of the cutoff-dependent real part of the bath self-energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LambShift {
    /// Keep the full principal-value shift.
    Bare,
    /// Subtract `Re Σ^R(0)`: the static polariton frequency stays `ω_R`,
    /// so the critical coupling is the closed-form `y_c`.
    #[default]
    Renormalized,
    /// Subtract `Re Σ^R(ω_R)`: the undamped resonance stays at `ω_R`.
    Resonance,
}

impl std::str::FromStr for LambShift {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bare" => Ok(LambShift::Bare),
            "renormalized" | "renormalised" | "static" => Ok(LambShift::Renormalized),
            "resonance" => Ok(LambShift::Resonance),
            other => Err(Error::invalid("lamb_shift", format!("unknown mode `{other}`"))),
        }
    }
}

impl LambShift {
    /// Frequency at which the real part of `Σ^R` is pinned to zero.
    pub fn reference_frequency(self) -> Option<f64> {
        match self {
            LambShift::Bare => None,
            LambShift::Renormalized => Some(0.0),
            LambShift::Resonance => Some(1.0),
        }
    }
}

/// Dimensionless parameters of the two-mode model, all in units of `ω_R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Pump–cavity detuning `Δ_C = ω_L − ω_C`.
    pub detuning: f64,
    /// Cavity field half-width `κ`.
    pub kappa: f64,
    /// Pump coupling `y`.
    pub coupling: f64,
    /// Coefficient `ϱ` of the square-root coupling density.
    pub varrho: f64,
    /// Beliaev quasiparticle linewidth `γ^(B)`.
    pub gamma_b: f64,
    /// Regulator `ε` of the bare quasiparticle propagator.
    pub epsilon: f64,
    /// Ultraviolet cutoff `Λ` of the coupling density.
    pub cutoff: f64,
    /// `k_B T / ħω_R`.
    pub temperature: f64,
    pub lamb_shift: LambShift,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            detuning: -100.0,
            kappa: 0.1,
            coupling: 0.0,
            varrho: 0.01,
            gamma_b: DEFAULT_GAMMA_B,
            epsilon: DEFAULT_EPSILON,
            cutoff: DEFAULT_CUTOFF,
            temperature: 0.0,
            lamb_shift: LambShift::default(),
        }
    }
}

impl ModelParams {
    pub fn new(detuning: f64, kappa: f64, varrho: f64) -> Self {
        ModelParams {
            detuning,
            kappa,
            varrho,
            ..ModelParams::default()
        }
    }

    pub fn with_coupling(mut self, y: f64) -> Self {
        self.coupling = y;
        self
    }

    /// Sets `y = ratio · y_c`.
    pub fn with_y_over_yc(mut self, ratio: f64) -> Result<Self> {
        self.coupling = ratio * self.critical_coupling()?;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_lamb_shift(mut self, mode: LambShift) -> Self {
        self.lamb_shift = mode;
        self
    }

    pub fn critical_coupling(&self) -> Result<f64> {
        critical_coupling(self.detuning, self.kappa, 1.0)
    }

    pub fn y_over_yc(&self) -> Result<f64> {
        Ok(self.coupling / self.critical_coupling()?)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("detuning", self.detuning),
            ("kappa", self.kappa),
            ("coupling", self.coupling),
            ("varrho", self.varrho),
            ("gamma_b", self.gamma_b),
            ("epsilon", self.epsilon),
            ("cutoff", self.cutoff),
            ("temperature", self.temperature),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        for (name, v) in [
            ("kappa", self.kappa),
            ("varrho", self.varrho),
            ("gamma_b", self.gamma_b),
            ("coupling", self.coupling),
            ("temperature", self.temperature),
        ] {
            if v < 0.0 {
                return Err(Error::invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid("epsilon", "must be positive"));
        }
        if !(self.cutoff > 0.5) {
            return Err(Error::invalid("cutoff", "must exceed the threshold ω_R/2"));
        }
        Ok(())
    }
}

/// Optional dimensionless settings applied on top of a physical parameter set.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ModelOverrides {
    pub detuning: Option<f64>,
    pub kappa: Option<f64>,
    pub coupling: Option<f64>,
    pub y_over_yc: Option<f64>,
    pub gamma_b: Option<f64>,
    pub epsilon: Option<f64>,
    pub cutoff: Option<f64>,
    pub lamb_shift: Option<LambShift>,
    pub density: DensityConvention,
}

/// Builds dimensionless model parameters from a laboratory description.
pub fn derive_model_params(phys: &PhysicalParams, overrides: &ModelOverrides) -> Result<ModelParams> {
    phys.validate()?;
    let density = phys.density(overrides.density)?;
    let defaults = ModelParams::default();
    let mut params = ModelParams {
        detuning: overrides.detuning.unwrap_or(defaults.detuning),
        kappa: overrides.kappa.unwrap_or(defaults.kappa),
        coupling: overrides.coupling.unwrap_or(0.0),
        varrho: coupling_coefficient_varrho(density, phys.scattering_length, phys.wavelength),
        gamma_b: overrides.gamma_b.unwrap_or(defaults.gamma_b),
        epsilon: overrides.epsilon.unwrap_or(defaults.epsilon),
        cutoff: overrides.cutoff.unwrap_or(defaults.cutoff),
        temperature: phys.temperature_ratio(),
        lamb_shift: overrides.lamb_shift.unwrap_or_default(),
    };
    if let Some(r) = overrides.y_over_yc {
        params = params.with_y_over_yc(r)?;
    }
    params.validate()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn rubidium_peak_density_and_varrho() {
        let phys = PhysicalParams::rubidium_87();
        let n = peak_tf_density(&phys);
        assert!(rel(n, 3.5e20) < 0.02, "n_peak = {n:e}");
        let varrho = coupling_coefficient_varrho(n, phys.scattering_length, phys.wavelength);
        assert!((varrho - 1.36e-2).abs() < 0.01e-2, "varrho = {varrho}");
        let params = derive_model_params(&phys, &ModelOverrides::default()).unwrap();
        assert_eq!(params.varrho, varrho);
        assert_eq!(params.temperature, 0.0);
    }

    #[test]
    fn mean_density_undershoots() {
        let phys = PhysicalParams::rubidium_87();
        let o = ModelOverrides {
            density: DensityConvention::Mean,
            ..Default::default()
        };
        let p = derive_model_params(&phys, &o).unwrap();
        assert!(p.varrho < 1.0e-2);
    }

    #[test]
    fn varrho_scaling() {
        let base = coupling_coefficient_varrho(3e20, 5e-9, 780e-9);
        assert_eq!(coupling_coefficient_varrho(0.0, 5e-9, 780e-9), 0.0);
        assert!(rel(coupling_coefficient_varrho(6e20, 5e-9, 780e-9), 2.0 * base) < 1e-15);
        assert!(rel(coupling_coefficient_varrho(3e20, 10e-9, 780e-9), 4.0 * base) < 1e-15);
        assert!(rel(coupling_coefficient_varrho(3e20, 5e-9 / 2f64.sqrt(), 780e-9), 0.5 * base) < 1e-15);
        assert!(rel(coupling_coefficient_varrho(3e20, 5e-9, 2.0 * 780e-9), 2.0 * base) < 1e-15);
    }

    #[test]
    fn doubling_scattering_length_at_fixed_density_quadruples_varrho() {
        let phys = PhysicalParams::rubidium_87();
        let n = DensityConvention::Fixed(3.5e20);
        let o = ModelOverrides {
            density: n,
            ..Default::default()
        };
        let p1 = derive_model_params(&phys, &o).unwrap();
        let phys2 = PhysicalParams {
            scattering_length: 2.0 * phys.scattering_length,
            ..phys
        };
        let p2 = derive_model_params(&phys2, &o).unwrap();
        assert!(rel(p2.varrho, 4.0 * p1.varrho) < 1e-14);
    }

    #[test]
    fn vanishing_atom_number_gives_zero_density() {
        let phys = PhysicalParams {
            atom_number: 0.0,
            ..PhysicalParams::rubidium_87()
        };
        assert_eq!(peak_tf_density(&phys), 0.0);
        assert!(derive_model_params(&phys, &ModelOverrides::default()).is_err());
    }

    #[test]
    fn thomas_fermi_radius_fifth_root_scaling() {
        let phys = PhysicalParams::rubidium_87();
        let big = PhysicalParams {
            atom_number: 32.0 * phys.atom_number,
            ..phys
        };
        assert!(rel(big.thomas_fermi_radius(), 2.0 * phys.thomas_fermi_radius()) < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        let mut phys = PhysicalParams::rubidium_87();
        phys.wavelength = -1.0;
        assert!(phys.validate().is_err());
        let mut phys = PhysicalParams::rubidium_87();
        phys.temperature = -1.0;
        assert!(phys.validate().is_err());
    }

    #[test]
    fn recoil_frequency_of_rubidium() {
        let wr = PhysicalParams::rubidium_87().recoil_frequency();
        assert!(rel(wr, 2.371e4) < 1e-3, "{wr}");
    }

    #[test]
    fn critical_coupling_examples() {
        let yc = critical_coupling(100.0, 0.1, 1.0).unwrap();
        // √(100.0001)
        assert!((yc - 10.000_004_999_998_75).abs() < 1e-12, "{yc}");
        assert_eq!(critical_coupling(-1.0, 0.0, 1.0).unwrap(), 1.0);
        assert!((critical_coupling(2.0, 0.0, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(critical_coupling(0.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn critical_coupling_grows_with_kappa() {
        let mut last = 0.0;
        for k in 0..50 {
            let yc = critical_coupling(-3.0, k as f64 * 0.2, 1.0).unwrap();
            assert!(yc > last);
            last = yc;
        }
        assert_eq!(critical_coupling(-3.0, 0.0, 1.0).unwrap(), 3f64.sqrt());
    }

    #[test]
    fn thermal_occupation_examples() {
        assert_eq!(thermal_occupation(1.3, 0.0).unwrap(), 0.0);
        let t = 0.7;
        assert!((thermal_occupation(t * 2f64.ln(), t).unwrap() - 1.0).abs() < 1e-14);
        let x = 1e-3;
        assert!(rel(thermal_occupation(x, 1.0).unwrap(), 1.0 / x) < 0.01);
        assert!(thermal_occupation(0.0, 1.0).is_err());
        assert!(thermal_occupation(-1.0, 1.0).is_err());
    }

    #[test]
    fn thermal_occupation_decreases_with_frequency() {
        let mut last = f64::INFINITY;
        for i in 1..200 {
            let n = thermal_occupation(i as f64 * 0.05, 0.8).unwrap();
            assert!(n >= 0.0 && n < last);
            last = n;
        }
    }

    #[test]
    fn model_validation() {
        assert!(ModelParams::default().validate().is_ok());
        let mut p = ModelParams::default();
        p.epsilon = 0.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::default();
        p.cutoff = 0.4;
        assert!(p.validate().is_err());
        let mut p = ModelParams::default();
        p.kappa = -0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn lamb_shift_parsing() {
        assert_eq!("bare".parse::<LambShift>().unwrap(), LambShift::Bare);
        assert_eq!("Renormalized".parse::<LambShift>().unwrap(), LambShift::Renormalized);
        assert!("sideways".parse::<LambShift>().is_err());
    }
}
