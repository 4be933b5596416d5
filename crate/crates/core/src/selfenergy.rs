//! Retarded, advanced and Keldysh self-energies of the cosine mode.
//!
//! Three interchangeable evaluations are provided:
//!
//! * [`sigma_discrete`] sums the pole contributions of a finite oscillator
//!   list,
//! * [`sigma_lorentzian`] integrates a continuous density against a
//!   Lorentzian kernel of width `γ^(B)`,
//! * [`sigma_sharp`] is the `γ^(B) → 0` limit for the square-root density,
//!   with the principal-value part in closed form ([`hilbert_sqrt_pv`]).
//!
//! The continuous density is truncated at the ultraviolet cutoff `Λ` in
//! both the real and the imaginary part, so that `Σ^R` stays a proper
//! Hilbert pair and the spectral sum rule holds exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{rho_3d, CouplingDensity, DiscreteBath, THRESHOLD};
use crate::error::{Error, Result};
use crate::model::{LambShift, ModelParams};
use crate::quadrature::{break_points, integrate, peak_ladder, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `Σ^R`, `Σ^A`, `Σ^K` at one real frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfEnergyTriple {
    pub retarded: Complex64,
    pub advanced: Complex64,
    pub keldysh: Complex64,
}

impl SelfEnergyTriple {
    pub fn zero() -> Self {
        Self::from_retarded(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// Builds the triple with `Σ^A = (Σ^R)*`.
    pub fn from_retarded(retarded: Complex64, keldysh: Complex64) -> Self {
        SelfEnergyTriple {
            retarded,
            advanced: retarded.conj(),
            keldysh,
        }
    }

    /// Shifts the real part of `Σ^R` and `Σ^A` by `-shift`.
    pub fn shifted(self, shift: f64) -> Self {
        SelfEnergyTriple {
            retarded: self.retarded - shift,
            advanced: self.advanced - shift,
            keldysh: self.keldysh,
        }
    }
}

/// Bose factor `2n̄(ω) + 1 = coth(ω/2T)`; one at zero temperature or for
/// non-positive frequencies.
fn bose_factor(omega: f64, temperature: f64) -> f64 {
    if temperature > 0.0 && omega > 0.0 {
        1.0 + 2.0 / (omega / temperature).exp_m1()
    } else {
        1.0
    }
}

/// `x − atan x`, accurate for small `x`.
fn x_minus_atan(x: f64) -> f64 {
    if x < 1e-2 {
        let x2 = x * x;
        x * x2 * (1.0 / 3.0 - x2 * (1.0 / 5.0 - x2 * (1.0 / 7.0 - x2 / 9.0)))
    } else {
        x - x.atan()
    }
}

/// `atanh x − x`, accurate for small `x`.
fn atanh_minus_x(x: f64) -> f64 {
    if x < 1e-2 {
        let x2 = x * x;
        x * x2 * (1.0 / 3.0 + x2 * (1.0 / 5.0 + x2 * (1.0 / 7.0 + x2 / 9.0)))
    } else {
        x.atanh() - x
    }
}

/// Principal value `P∫_{1/2}^{Λ} ϱ√(ω' − 1/2) / (ω − ω') dω'`.
///
/// With `u² = ω' − 1/2`, `U = √(Λ − 1/2)` and `s² = |ω − 1/2|` the integral
/// is `ϱ(−2U + 2s·atan(U/s))` below threshold and
/// `ϱ(−2U + s·ln|(U + s)/(U − s)|)` above it; both tend to `−2ϱU` at
/// `ω = 1/2`. The value diverges logarithmically at `ω = Λ`.
pub fn hilbert_sqrt_pv(omega: f64, varrho: f64, cutoff: f64) -> f64 {
    if varrho == 0.0 {
        return 0.0;
    }
    let u = (cutoff - THRESHOLD).sqrt();
    let a = omega - THRESHOLD;
    if a < 0.0 {
        let s = (-a).sqrt();
        -2.0 * varrho * s * x_minus_atan(u / s)
    } else if a == 0.0 {
        -2.0 * varrho * u
    } else {
        let s = a.sqrt();
        if s < u {
            varrho * (-2.0 * u + 2.0 * s * (s / u).atanh())
        } else if s > u {
            2.0 * varrho * s * atanh_minus_x(u / s)
        } else {
            f64::INFINITY
        }
    }
}

/// Sharp-limit self-energies of the square-root density truncated at `Λ`:
/// `Σ^{R/A} = H(ω) ∓ iπρ(ω)`, `Σ^K = −2πiρ(ω)(2n̄(ω) + 1)`.
///
/// The real part is shifted according to `lamb_shift`.
pub fn sigma_sharp(omega: f64, varrho: f64, cutoff: f64, lamb_shift: LambShift, temperature: f64) -> SelfEnergyTriple {
    let shift = lamb_shift
        .reference_frequency()
        .map_or(0.0, |w| hilbert_sqrt_pv(w, varrho, cutoff));
    sharp_unshifted(omega, varrho, cutoff, temperature).shifted(shift)
}

fn sharp_unshifted(omega: f64, varrho: f64, cutoff: f64, temperature: f64) -> SelfEnergyTriple {
    let rho = if omega < cutoff { rho_3d(omega, varrho) } else { 0.0 };
    let pi = std::f64::consts::PI;
    SelfEnergyTriple::from_retarded(
        Complex64::new(hilbert_sqrt_pv(omega, varrho, cutoff), -pi * rho),
        Complex64::new(0.0, -2.0 * pi * rho * bose_factor(omega, temperature)),
    )
}

/// Pole sum over a finite bath:
/// `Σ^{R/A} = Σ_p w_p / (ω − ω_p ± iγ_p)`,
/// `Σ^K = −2i Σ_p w_p (2n̄_p + 1) γ_p / ((ω − ω_p)² + γ_p²)`.
pub fn sigma_discrete(omega: f64, bath: &DiscreteBath, temperature: f64) -> Result<SelfEnergyTriple> {
    let mut retarded = Complex64::new(0.0, 0.0);
    let mut keldysh = 0.0;
    for m in bath.modes() {
        let d = omega - m.frequency;
        if m.linewidth == 0.0 && d == 0.0 {
            if m.weight == 0.0 {
                continue;
            }
            return Err(Error::ResonantZeroLinewidth { omega });
        }
        let den = d * d + m.linewidth * m.linewidth;
        retarded += m.weight * Complex64::new(d, -m.linewidth) / den;
        keldysh -= 2.0 * m.weight * bose_factor(m.frequency, temperature) * m.linewidth / den;
    }
    Ok(SelfEnergyTriple::from_retarded(retarded, I * keldysh))
}

/// Lorentzian-kernel self-energies of a continuous density, integrated
/// adaptively over its support up to `cutoff`:
/// `Σ^{R/A} = ∫ρ(ω')/(ω − ω' ± iγ) dω'`,
/// `Σ^K = −2i ∫ρ(ω')(2n̄(ω') + 1) γ/((ω − ω')² + γ²) dω'`.
pub fn sigma_lorentzian(
    omega: f64,
    density: &CouplingDensity,
    gamma: f64,
    cutoff: f64,
    temperature: f64,
    tol: Tolerance,
) -> Result<SelfEnergyTriple> {
    if !(gamma > 0.0) {
        return Err(Error::invalid("gamma_b", "Lorentzian kernel needs a positive linewidth"));
    }
    if let CouplingDensity::Discrete(bath) = density {
        return sigma_discrete(omega, bath, temperature);
    }
    if let CouplingDensity::Analytic3D { varrho } = density {
        if *varrho == 0.0 {
            return Ok(SelfEnergyTriple::zero());
        }
    }
    let (lo, hi) = density.support();
    let hi = hi.min(cutoff);
    if !(hi > lo) {
        return Ok(SelfEnergyTriple::zero());
    }
    let mut candidates = density.kinks();
    candidates.extend(peak_ladder(omega, gamma, hi - lo));
    let pts = break_points(lo, hi, candidates);

    let g2 = gamma * gamma;
    let r = integrate(
        |w: f64| {
            let rho = density.value(w);
            let d = omega - w;
            let den = d * d + g2;
            [
                rho * d / den,
                -rho * gamma / den,
                -2.0 * rho * bose_factor(w, temperature) * gamma / den,
            ]
        },
        &pts,
        tol,
    )?;
    let [re, im, k] = r.value;
    Ok(SelfEnergyTriple::from_retarded(Complex64::new(re, im), I * k))
}

/// Flat (Markovian) bath: `Σ^R = −iγ`, `Σ^K = −2iγ`.
pub fn sigma_flat(rate: f64) -> SelfEnergyTriple {
    SelfEnergyTriple::from_retarded(Complex64::new(0.0, -rate), Complex64::new(0.0, -2.0 * rate))
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Sharp { varrho: f64, cutoff: f64 },
    Lorentzian { density: CouplingDensity, gamma: f64, cutoff: f64, tol: Tolerance },
    Discrete(DiscreteBath),
    Flat { rate: f64 },
}

/// A self-energy evaluator for the pipeline, including the Lamb-shift
/// subtraction.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfEnergyModel {
    kind: Kind,
    temperature: f64,
    shift: f64,
}

impl SelfEnergyModel {
    /// Sharp limit of the square-root density described by `params`.
    pub fn sharp(params: &ModelParams) -> Self {
        Self::build(
            Kind::Sharp {
                varrho: params.varrho,
                cutoff: params.cutoff,
            },
            params.temperature,
            params.lamb_shift,
        )
        .expect("closed-form self-energy cannot fail")
    }

    /// Lorentzian kernel of width `params.gamma_b` over `density`.
    pub fn lorentzian(params: &ModelParams, density: CouplingDensity) -> Result<Self> {
        Self::build(
            Kind::Lorentzian {
                density,
                gamma: params.gamma_b,
                cutoff: params.cutoff,
                tol: Tolerance::new(1e-14, 1e-8),
            },
            params.temperature,
            params.lamb_shift,
        )
    }

    pub fn discrete(params: &ModelParams, bath: DiscreteBath) -> Result<Self> {
        Self::build(Kind::Discrete(bath), params.temperature, params.lamb_shift)
    }

    /// Memoryless bath with constant rate.
    pub fn flat(rate: f64) -> Self {
        SelfEnergyModel {
            kind: Kind::Flat { rate },
            temperature: 0.0,
            shift: 0.0,
        }
    }

    fn build(kind: Kind, temperature: f64, lamb_shift: LambShift) -> Result<Self> {
        let mut model = SelfEnergyModel {
            kind,
            temperature,
            shift: 0.0,
        };
        if let Some(w) = lamb_shift.reference_frequency() {
            model.shift = model.unshifted(w)?.retarded.re;
        }
        Ok(model)
    }

    fn unshifted(&self, omega: f64) -> Result<SelfEnergyTriple> {
        match &self.kind {
            Kind::Sharp { varrho, cutoff } => Ok(sharp_unshifted(omega, *varrho, *cutoff, self.temperature)),
            Kind::Lorentzian {
                density,
                gamma,
                cutoff,
                tol,
            } => sigma_lorentzian(omega, density, *gamma, *cutoff, self.temperature, *tol),
            Kind::Discrete(bath) => sigma_discrete(omega, bath, self.temperature),
            Kind::Flat { rate } => Ok(sigma_flat(*rate)),
        }
    }

    pub fn evaluate(&self, omega: f64) -> Result<SelfEnergyTriple> {
        Ok(self.unshifted(omega)?.shifted(self.shift))
    }

    /// Constant subtracted from `Re Σ^R`.
    pub fn lamb_shift(&self) -> f64 {
        self.shift
    }

    /// Non-negative frequencies at which `Σ` is non-analytic (threshold and
    /// cutoff).
    pub fn singular_points(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Sharp { cutoff, .. } => vec![THRESHOLD, *cutoff],
            Kind::Lorentzian { density, cutoff, .. } => {
                let (lo, hi) = density.support();
                vec![lo, hi.min(*cutoff)]
            }
            Kind::Discrete(_) | Kind::Flat { .. } => Vec::new(),
        }
    }

    pub fn is_sharp(&self) -> bool {
        matches!(self.kind, Kind::Sharp { .. })
    }

    /// `Σ^R` continued from the real axis to complex `z`. In the lower half
    /// plane the continuation passes through the branch cut of the
    /// square-root density onto the second sheet, which is where the
    /// damped polariton poles live. Kernel-broadened tabulated densities
    /// have no closed form and are frozen at `Re z`.
    pub fn retarded_continued(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            return Ok(self.evaluate(z.re)?.retarded);
        }
        let value = match &self.kind {
            Kind::Sharp { varrho, cutoff } => sharp_continued(z, *varrho, *cutoff),
            Kind::Lorentzian {
                density: CouplingDensity::Analytic3D { varrho },
                gamma,
                cutoff,
                ..
            } if z.im + gamma > 0.0 => sharp_physical(z + I * gamma, *varrho, *cutoff),
            Kind::Lorentzian { .. } => return Ok(self.evaluate(z.re)?.retarded),
            Kind::Discrete(bath) => bath
                .modes()
                .iter()
                .map(|m| m.weight / (z - m.frequency + I * m.linewidth))
                .sum(),
            Kind::Flat { rate } => Complex64::new(0.0, -rate),
        };
        Ok(value - self.shift)
    }

    /// The function equal to `Σ^A(−ω)` on the real axis, continued to `z`.
    pub fn advanced_reflected(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.retarded_continued(-z.conj())?.conj())
    }
}

/// `ϱ∫_{1/2}^{Λ} √(ω' − 1/2)/(z − ω') dω' = 2ϱ(−U + s·atanh(U/s))` with
/// `s² = z − 1/2`, off the real axis.
fn sharp_physical(z: Complex64, varrho: f64, cutoff: f64) -> Complex64 {
    let u = (cutoff - THRESHOLD).sqrt();
    let s = (z - THRESHOLD).sqrt();
    2.0 * varrho * (-u + s * (u / s).atanh())
}

fn sharp_continued(z: Complex64, varrho: f64, cutoff: f64) -> Complex64 {
    let physical = sharp_physical(z, varrho, cutoff);
    if z.im < 0.0 && z.re > THRESHOLD && z.re < cutoff {
        physical - 2.0 * std::f64::consts::PI * I * varrho * (z - THRESHOLD).sqrt()
    } else {
        physical
    }
}
