//! The phonon bath seen by the cosine mode: Beliaev pair dispersion,
//! effective couplings, occupations and the coupling density `ρ(ω)`.
//!
//! Momenta are measured in units of the cavity wavenumber `k` and
//! frequencies in `ω_R`, so a free phonon of momentum `p` has frequency `p²`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::thermal_occupation;

/// Onset `ω_R/2` of Beliaev decay: the minimum pair energy.
pub const THRESHOLD: f64 = 0.5;

/// Square-root coupling density of a three-dimensional condensate,
/// `ϱ √(ω − 1/2) θ(ω − 1/2)`.
pub fn rho_3d(omega: f64, varrho: f64) -> f64 {
    if omega > THRESHOLD {
        varrho * (omega - THRESHOLD).sqrt()
    } else {
        0.0
    }
}

/// Pair frequency `p_x² + (1 − p_x)² + 2 p_⊥²` of the Beliaev quasiparticle
/// made of phonons with momenta `p` and `k − p`.
pub fn beliaev_dispersion(p_x: f64, p_perp_sq: f64) -> f64 {
    beliaev_dispersion_1d(p_x) + 2.0 * p_perp_sq
}

/// One-dimensional pair frequency `p² + (1 − p)²`.
pub fn beliaev_dispersion_1d(p: f64) -> f64 {
    p * p + (1.0 - p) * (1.0 - p)
}

/// `g_p² = 2 g̃² (n̄_p + n̄_{k−p} + 1)` for phonon frequencies `omega_p`,
/// `omega_kp`.
pub fn effective_coupling_sq(omega_p: f64, omega_kp: f64, temperature: f64, g_tilde: f64) -> Result<f64> {
    if g_tilde < 0.0 {
        return Err(Error::invalid("g_tilde", "must be non-negative"));
    }
    if temperature == 0.0 {
        return Ok(2.0 * g_tilde * g_tilde);
    }
    let n_p = thermal_occupation(omega_p, temperature)?;
    let n_kp = thermal_occupation(omega_kp, temperature)?;
    Ok(2.0 * g_tilde * g_tilde * (n_p + n_kp + 1.0))
}

/// Occupation of the fictitious Beliaev quasiparticle,
/// `1/(e^{(ω_p + ω_{k−p})/T} − 1)`.
pub fn beliaev_occupation(omega_p: f64, omega_kp: f64, temperature: f64) -> Result<f64> {
    thermal_occupation(omega_p + omega_kp, temperature)
}

/// One bath oscillator of a discrete coupling density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMode {
    /// `ω^(B)_p`
    pub frequency: f64,
    /// `g_p² / N_c`
    pub weight: f64,
    /// `γ^(B)_p`
    pub linewidth: f64,
}

/// A finite list of bath oscillators.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscreteBath {
    modes: Vec<BathMode>,
}

impl DiscreteBath {
    pub fn new(modes: Vec<BathMode>) -> Result<Self> {
        for m in &modes {
            if !(m.frequency.is_finite() && m.weight >= 0.0 && m.linewidth >= 0.0) {
                return Err(Error::invalid("modes", format!("invalid bath mode {m:?}")));
            }
        }
        Ok(DiscreteBath { modes })
    }

    pub fn modes(&self) -> &[BathMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Midpoint discretisation of a continuous density. Each `(lo, hi, n)`
    /// segment contributes `n` equally spaced oscillators carrying
    /// `ρ(ω_i)·Δω` each.
    pub fn from_density(
        density: impl Fn(f64) -> f64,
        segments: &[(f64, f64, usize)],
        linewidth: f64,
    ) -> Result<Self> {
        let mut modes = Vec::with_capacity(segments.iter().map(|s| s.2).sum());
        for &(lo, hi, n) in segments {
            if !(hi > lo) || n == 0 {
                return Err(Error::invalid("segments", format!("bad segment ({lo}, {hi}, {n})")));
            }
            let dw = (hi - lo) / n as f64;
            modes.extend((0..n).map(|i| {
                let w = lo + (i as f64 + 0.5) * dw;
                BathMode {
                    frequency: w,
                    weight: density(w) * dw,
                    linewidth,
                }
            }));
        }
        DiscreteBath::new(modes)
    }

    /// Pairs `(p, 1 − p)` on a uniform momentum grid `p ∈ (0, 1/2)` of a
    /// one-dimensional condensate. `coupling_sq` is `g̃²/N_c`; each phonon
    /// has linewidth `phonon_linewidth`.
    pub fn beliaev_1d(n_modes: usize, coupling_sq: f64, phonon_linewidth: f64, temperature: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::invalid("n_modes", "must be positive"));
        }
        let g_tilde = coupling_sq.sqrt();
        let dp = 0.5 / n_modes as f64;
        let modes = (0..n_modes)
            .map(|i| {
                let p = (i as f64 + 0.5) * dp;
                let (wp, wkp) = (p * p, (1.0 - p) * (1.0 - p));
                Ok(BathMode {
                    frequency: wp + wkp,
                    weight: effective_coupling_sq(wp, wkp, temperature, g_tilde)?,
                    linewidth: 2.0 * phonon_linewidth,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteBath::new(modes)
    }

    /// Lorentzian-broadened density `Σ w_p γ_p / π((ω − ω_p)² + γ_p²)`.
    pub fn broadened_density(&self, omega: f64) -> f64 {
        self.modes
            .iter()
            .filter(|m| m.linewidth > 0.0)
            .map(|m| {
                let d = omega - m.frequency;
                m.weight * m.linewidth / (std::f64::consts::PI * (d * d + m.linewidth * m.linewidth))
            })
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.modes.iter().map(|m| m.weight).sum()
    }
}

/// Piecewise-linear density on `[ω_min, ω_max]`, zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedDensity {
    omega: Vec<f64>,
    rho: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(omega: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if omega.len() != rho.len() {
            return Err(Error::Table("column lengths differ".into()));
        }
        if omega.len() < 2 {
            return Err(Error::Table("need at least two samples".into()));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Table("frequencies must be strictly increasing".into()));
        }
        if let Some(r) = rho.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(Error::Table(format!("density must be non-negative, got {r}")));
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::Table("frequencies must be finite".into()));
        }
        Ok(TabulatedDensity { omega, rho })
    }

    /// Parses two whitespace- or comma-separated columns `ω/ω_R  ρ/ω_R`;
    /// blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut omega = Vec::new();
        let mut rho = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Table(format!("line {}: expected two columns", i + 1)));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Table(format!("line {}: {e}", i + 1)))
            };
            omega.push(parse(cols[0])?);
            rho.push(parse(cols[1])?);
        }
        TabulatedDensity::new(omega, rho)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Table(format!("{}: {e}", path.as_ref().display())))?;
        TabulatedDensity::parse(&text)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.omega[0], *self.omega.last().expect("non-empty"))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[f64] {
        &self.rho
    }

    pub fn value(&self, w: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(w >= lo && w <= hi) {
            return 0.0;
        }
        let j = self.omega.partition_point(|x| *x <= w).clamp(1, self.omega.len() - 1);
        let (x0, x1) = (self.omega[j - 1], self.omega[j]);
        let t = (w - x0) / (x1 - x0);
        self.rho[j - 1] * (1.0 - t) + self.rho[j] * t
    }
}

/// Spectral weight of the effective linear bath coupled to the cosine mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingDensity {
    /// `ϱ √(ω − 1/2) θ(ω − 1/2)`.
    Analytic3D { varrho: f64 },
    Tabulated(TabulatedDensity),
    /// Finite oscillator list; its pointwise value is the broadened density.
    Discrete(DiscreteBath),
}

impl CouplingDensity {
    pub fn analytic(varrho: f64) -> Result<Self> {
        if !(varrho >= 0.0 && varrho.is_finite()) {
            return Err(Error::invalid("varrho", "must be non-negative"));
        }
        Ok(CouplingDensity::Analytic3D { varrho })
    }

    pub fn value(&self, omega: f64) -> f64 {
        match self {
            CouplingDensity::Analytic3D { varrho } => rho_3d(omega, *varrho),
            CouplingDensity::Tabulated(t) => t.value(omega),
            CouplingDensity::Discrete(b) => b.broadened_density(omega),
        }
    }

    /// Interval outside of which the density vanishes (or, for discrete
    /// baths, the span of the oscillator frequencies).
    pub fn support(&self) -> (f64, f64) {
        match self {
            CouplingDensity::Analytic3D { .. } => (THRESHOLD, f64::INFINITY),
            CouplingDensity::Tabulated(t) => t.support(),
            CouplingDensity::Discrete(b) => b.modes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| {
                (lo.min(m.frequency), hi.max(m.frequency))
            }),
        }
    }

    /// Interior points where the density has a kink.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            CouplingDensity::Analytic3D { .. } => vec![THRESHOLD],
            CouplingDensity::Tabulated(t) => t.nodes().to_vec(),
            CouplingDensity::Discrete(_) => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rho_3d_examples() {
        assert_eq!(rho_3d(0.5, 0.3), 0.0);
        assert_eq!(rho_3d(0.2, 0.3), 0.0);
        assert!((rho_3d(1.5, 0.3) - 0.3).abs() < 1e-15);
        assert!((rho_3d(0.75, 0.01) - 0.005).abs() < 1e-15);
    }

    #[test]
    fn rho_3d_square_root_onset() {
        let varrho = 0.37;
        for k in 1..40 {
            let d = 2f64.powi(-k);
            let r = rho_3d(THRESHOLD + d, varrho) / d.sqrt();
            assert!((r - varrho).abs() < 1e-12 * varrho.max(1.0));
        }
    }

    #[test]
    fn dispersion_examples() {
        assert!((beliaev_dispersion(0.5, 0.0) - 0.5).abs() < 1e-15);
        assert!((beliaev_dispersion(0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((beliaev_dispersion(0.25, 0.0) - 0.625).abs() < 1e-15);
        assert!((beliaev_dispersion(0.25, 0.1) - 0.825).abs() < 1e-15);
    }

    #[test]
    fn dispersion_minimum_is_threshold() {
        let mut min = f64::INFINITY;
        let mut arg = (0.0, 0.0);
        for i in 0..=2000 {
            let px = -2.0 + 2.5 * i as f64 / 2000.0;
            for j in 0..=40 {
                let pp = 0.05 * j as f64;
                let w = beliaev_dispersion(px, pp * pp);
                if w < min {
                    min = w;
                    arg = (px, pp);
                }
            }
        }
        assert!((min - THRESHOLD).abs() < 1e-15);
        assert_eq!(arg, (0.5, 0.0));
    }

    #[test]
    fn effective_coupling_examples() {
        assert_eq!(effective_coupling_sq(0.3, 0.8, 0.0, 1.5).unwrap(), 4.5);
        assert_eq!(effective_coupling_sq(0.3, 0.8, 0.0, 0.0).unwrap(), 0.0);
        let t = 0.4;
        let w = t * 2f64.ln();
        let g = effective_coupling_sq(w, w, t, 0.5).unwrap();
        assert!((g - 6.0 * 0.25).abs() < 1e-14);
        assert!(effective_coupling_sq(0.3, 0.8, 0.0, -1.0).is_err());
    }

    #[test]
    fn beliaev_occupation_examples() {
        assert_eq!(beliaev_occupation(0.2, 0.9, 0.0).unwrap(), 0.0);
        let t = 0.9;
        let n = beliaev_occupation(0.25 * t * 2f64.ln(), 0.75 * t * 2f64.ln(), t).unwrap();
        assert!((n - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn occupation_product_identity(wp in 0.01f64..5.0, wkp in 0.01f64..5.0, t in 0.05f64..5.0) {
            let np = thermal_occupation(wp, t).unwrap();
            let nkp = thermal_occupation(wkp, t).unwrap();
            let nb = beliaev_occupation(wp, wkp, t).unwrap();
            let lhs = 1.0 + 1.0 / nb;
            let rhs = (1.0 + 1.0 / np) * (1.0 + 1.0 / nkp);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }

        #[test]
        fn tabulated_interpolation_is_nonnegative(w in -1.0f64..4.0) {
            let t = TabulatedDensity::new(vec![0.5, 1.0, 2.0, 3.0], vec![0.0, 0.2, 0.1, 0.0]).unwrap();
            prop_assert!(t.value(w) >= 0.0);
        }
    }

    #[test]
    fn tabulated_linear_interpolation_and_zero_extrapolation() {
        let t = TabulatedDensity::new(vec![1.0, 2.0, 4.0], vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(t.value(0.99), 0.0);
        assert_eq!(t.value(4.01), 0.0);
        assert_eq!(t.value(1.5), 0.5);
        assert_eq!(t.value(3.0), 2.0);
        assert_eq!(t.value(4.0), 3.0);
        assert_eq!(t.value(1.0), 0.0);
    }

    #[test]
    fn tabulated_parse() {
        let text = "# omega rho\n0.5 0\n\n1.0, 0.25\n  2.0\t0.5 \n";
        let t = TabulatedDensity::parse(text).unwrap();
        assert_eq!(t.nodes(), &[0.5, 1.0, 2.0]);
        assert_eq!(t.values(), &[0.0, 0.25, 0.5]);
        let err = TabulatedDensity::parse("0.5 0\n1.0 x\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        assert!(TabulatedDensity::parse("0.5 0 1\n1 2\n").is_err());
        assert!(TabulatedDensity::parse("1 0\n0.5 1\n").is_err());
        assert!(TabulatedDensity::parse("0.5 0\n1 -1\n").is_err());
    }

    #[test]
    fn discrete_from_density_preserves_weight() {
        let b = DiscreteBath::from_density(|w| rho_3d(w, 0.1), &[(0.5, 3.0, 5000)], 1e-3).unwrap();
        let exact = 0.1 * 2.0 / 3.0 * 2.5f64.powf(1.5);
        assert!((b.total_weight() - exact).abs() < 1e-6);
    }

    #[test]
    fn beliaev_1d_grid() {
        let b = DiscreteBath::beliaev_1d(100, 0.5, 1e-3, 0.0).unwrap();
        assert_eq!(b.len(), 100);
        for m in b.modes() {
            assert!(m.frequency > 0.5 && m.frequency < 1.0);
            assert!((m.weight - 1.0).abs() < 1e-15);
            assert_eq!(m.linewidth, 2e-3);
        }
    }
}
