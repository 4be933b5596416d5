//! Brute-force reference calculations for validating the main pipeline.
//!
//! These trade speed for directness: each one evaluates a defining integral
//! numerically instead of using the closed forms in [`crate::bath`] and
//! [`crate::selfenergy`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::CouplingDensity;
use crate::error::{Error, Result};
use crate::keldysh::TwoModeSystem;
use crate::model::{thermal_occupation, ModelParams, PhysicalParams, HBAR};
use crate::observables::{spectrum, SpectrumTable};
use crate::quadrature::{break_points, integrate, integrate_real_line, peak_ladder, Integral, Tolerance};
use crate::selfenergy::SelfEnergyModel;

/// `ρ(ω)/ω_R` from the momentum sum over Beliaev pairs in the continuum,
/// for a homogeneous condensate of density `density` (m⁻³).
///
/// The pair energy is `ħ(p_x² + (k − p_x)² + 2p_⊥²)/2m` with coupling
/// `g_p² = 2g̃²`, `g̃ = 4πħ a n/m`. The δ-function fixes `p_⊥²`, which leaves
/// a factor `πm/ħ` on the allowed `p_x` range; that range is found by
/// bisection and integrated numerically. Both pump directions `±k` feed the
/// same cosine mode, so the pair sum is counted twice.
pub fn rho_momentum_quadrature(omega: f64, phys: &PhysicalParams, density: f64) -> Result<f64> {
    phys.validate()?;
    if !(density >= 0.0 && density.is_finite()) {
        return Err(Error::invalid("density", "must be non-negative"));
    }
    if !omega.is_finite() {
        return Err(Error::invalid("omega", "must be finite"));
    }
    let m = phys.atomic_mass;
    let k = phys.wavenumber();
    let recoil = phys.recoil_frequency();
    let w = omega * recoil;
    let e_x = |p: f64| HBAR * (p * p + (k - p) * (k - p)) / (2.0 * m);

    let half = 0.5 * k;
    if !(w > e_x(half)) || density == 0.0 {
        return Ok(0.0);
    }

    let mut lo = half - k;
    while e_x(lo) <= w {
        lo = half - 2.0 * (half - lo);
    }
    let mut hi = half;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if e_x(mid) > w {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let edge = 0.5 * (lo + hi);

    let g_tilde = 4.0 * std::f64::consts::PI * HBAR * phys.scattering_length * density / m;
    let transverse = std::f64::consts::PI * m / HBAR;
    let pi3 = (2.0 * std::f64::consts::PI).powi(3);
    // (1/N_c)·V/(2π)³ = 1/(n (2π)³)
    let prefactor = 2.0 * 2.0 * g_tilde * g_tilde / (density * pi3);
    let longitudinal = integrate(|_p: f64| transverse, &[edge, half], Tolerance::default())?;
    Ok(prefactor * longitudinal.value / recoil)
}

/// A free phonon with retarded function `1/(ν − ω + iγ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phonon {
    pub frequency: f64,
    pub linewidth: f64,
}

/// Phonon pairs `(p, k − p)` of a one-dimensional condensate on the same
/// momentum grid as [`crate::bath::DiscreteBath::beliaev_1d`].
pub fn beliaev_1d_pairs(n_modes: usize, phonon_linewidth: f64) -> Vec<(Phonon, Phonon)> {
    let dp = 0.5 / n_modes.max(1) as f64;
    (0..n_modes)
        .map(|i| {
            let p = (i as f64 + 0.5) * dp;
            let ph = |frequency| Phonon {
                frequency,
                linewidth: phonon_linewidth,
            };
            (ph(p * p), ph((1.0 - p) * (1.0 - p)))
        })
        .collect()
}

/// One-loop bubble `Σ^R(ω) = i(g̃²/N_c) Σ_pairs ∫dν/2π [G^K_1(ν) G^R_2(ω − ν)
/// + G^R_1(ν) G^K_2(ω − ν)]`, with the convolution done by quadrature.
///
/// `coupling_sq` is `g̃²/N_c`. Free phonons carry
/// `G^K = −2iγ(2n̄ + 1)/((ν − ω_p)² + γ²)`.
pub fn sigma_convolution_bubble(
    omega: f64,
    pairs: &[(Phonon, Phonon)],
    coupling_sq: f64,
    temperature: f64,
) -> Result<Complex64> {
    if coupling_sq < 0.0 {
        return Err(Error::invalid("coupling_sq", "must be non-negative"));
    }
    let mut total = Complex64::new(0.0, 0.0);
    if coupling_sq == 0.0 {
        return Ok(total);
    }
    let i = Complex64::i();
    for (p1, p2) in pairs {
        if !(p1.linewidth > 0.0 && p2.linewidth > 0.0) {
            return Err(Error::invalid("pairs", "phonon linewidths must be positive"));
        }
        let f1 = 2.0 * thermal_occupation(p1.frequency, temperature)? + 1.0;
        let f2 = 2.0 * thermal_occupation(p2.frequency, temperature)? + 1.0;
        let retarded = |nu: f64, p: &Phonon| 1.0 / Complex64::new(nu - p.frequency, p.linewidth);
        let keldysh = |nu: f64, p: &Phonon, f: f64| {
            let d = nu - p.frequency;
            Complex64::new(0.0, -2.0 * p.linewidth * f / (d * d + p.linewidth * p.linewidth))
        };
        let integrand = |nu: f64| {
            let nu2 = omega - nu;
            keldysh(nu, p1, f1) * retarded(nu2, p2) + retarded(nu, p1) * keldysh(nu2, p2, f2)
        };
        let second = omega - p2.frequency;
        let width = p1.linewidth.min(p2.linewidth);
        let mut interior = peak_ladder(p1.frequency, p1.linewidth, 1e3);
        interior.extend(peak_ladder(second, p2.linewidth, 1e3));
        let scale = (p1.frequency - second).abs().max(width).max(1.0);
        let tol = Tolerance::new(1e-14, 1e-11).with_max_intervals(20_000);
        let conv: Integral<Complex64> = integrate_real_line(integrand, p1.frequency, scale, &interior, tol)?;
        total += i * coupling_sq * conv.value / (2.0 * std::f64::consts::PI);
    }
    Ok(total)
}

/// `2κ₀/((ω − ω₀)² + κ₀²)`, the spectrum of a single damped mode.
pub fn single_mode_analytic_spectrum(omega: f64, omega0: f64, kappa0: f64) -> Result<f64> {
    if !(kappa0 > 0.0) {
        return Err(Error::invalid("kappa0", "must be positive"));
    }
    let d = omega - omega0;
    Ok(2.0 * kappa0 / (d * d + kappa0 * kappa0))
}

/// The full pipeline with a frequency-independent bath,
/// `Σ^R = −iγ`, `Σ^K = −2iγ`.
pub fn markovian_baseline(params: &ModelParams, gamma: f64, grid: &[f64]) -> Result<SpectrumTable> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", "must be positive"));
    }
    let system = TwoModeSystem::with_self_energy(*params, SelfEnergyModel::flat(gamma))?;
    spectrum(&system, grid)
}

/// `P∫ρ(ω')/(ω − ω') dω'` over the support of `density` truncated at
/// `cutoff`.
///
/// Around `ω` the largest symmetric interval `[ω − δ, ω + δ]` inside the
/// support is folded onto `∫_0^δ (ρ(ω − t) − ρ(ω + t))/t dt`, which is
/// regular; the remainder is an ordinary integral.
pub fn pv_quadrature(density: &CouplingDensity, omega: f64, cutoff: f64, tol: Tolerance) -> Result<Integral<f64>> {
    let (lo, support_hi) = density.support();
    let hi = support_hi.min(cutoff);
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::invalid("cutoff", "support must be a finite non-empty interval"));
    }
    if !omega.is_finite() {
        return Err(Error::invalid("omega", "must be finite"));
    }
    let kinks = density.kinks();
    let rho = |w: f64| density.value(w);
    let outer = |a: f64, b: f64| -> Result<Integral<f64>> {
        if b <= a {
            return Ok(Integral {
                value: 0.0,
                error: 0.0,
                evaluations: 0,
                intervals: 0,
            });
        }
        let points = break_points(a, b, kinks.iter().copied());
        if a > lo {
            return integrate(|w: f64| rho(w) / (omega - w), &points, tol);
        }
        // w = lo + u² absorbs a square-root onset at the lower edge, where
        // the pole may also sit.
        let u_points: Vec<f64> = points.iter().map(|w| (w - lo).sqrt()).collect();
        integrate(
            |u: f64| {
                let w = lo + u * u;
                let r = rho(w);
                if r == 0.0 {
                    0.0
                } else {
                    2.0 * u * r / (omega - w)
                }
            },
            &u_points,
            tol,
        )
    };

    if !(omega > lo && omega < hi) {
        return outer(lo, hi);
    }
    let delta = (omega - lo).min(hi - omega);
    let folded_points = break_points(0.0, delta, kinks.iter().map(|k| (k - omega).abs()));
    let folded = integrate(|t: f64| (rho(omega - t) - rho(omega + t)) / t, &folded_points, tol)?;
    let left = outer(lo, omega - delta)?;
    let right = outer(omega + delta, hi)?;
    Ok(Integral {
        value: folded.value + left.value + right.value,
        error: folded.error + left.error + right.error,
        evaluations: folded.evaluations + left.evaluations + right.evaluations,
        intervals: folded.intervals + left.intervals + right.intervals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{rho_3d, DiscreteBath, TabulatedDensity};
    use crate::model::{coupling_coefficient_varrho, DensityConvention};
    use crate::selfenergy::{hilbert_sqrt_pv, sigma_discrete};

    fn constant_density() -> CouplingDensity {
        CouplingDensity::Tabulated(TabulatedDensity::new(vec![1.0, 2.0], vec![0.7, 0.7]).unwrap())
    }

    #[test]
    fn momentum_quadrature_matches_closed_form() {
        let phys = PhysicalParams::rubidium_87();
        let n = phys.density(DensityConvention::Peak).unwrap();
        let varrho = coupling_coefficient_varrho(n, phys.scattering_length, phys.wavelength);
        assert_eq!(rho_momentum_quadrature(0.3, &phys, n).unwrap(), 0.0);
        assert_eq!(rho_momentum_quadrature(0.5, &phys, n).unwrap(), 0.0);
        let at = rho_momentum_quadrature(1.5, &phys, n).unwrap();
        assert!((at / varrho - 1.0).abs() < 1e-9, "{at} vs {varrho}");
        for i in 1..=20 {
            let w = 0.5 + 0.2 * i as f64;
            let oracle = rho_momentum_quadrature(w, &phys, n).unwrap();
            let closed = rho_3d(w, varrho);
            assert!((oracle / closed - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bubble_single_pair_is_a_pole() {
        let pair = (
            Phonon {
                frequency: 0.04,
                linewidth: 2e-3,
            },
            Phonon {
                frequency: 0.64,
                linewidth: 3e-3,
            },
        );
        let g2 = 0.02;
        for &w in &[0.0, 0.3, 0.68, 0.7, 1.5] {
            let oracle = sigma_convolution_bubble(w, &[pair], g2, 0.0).unwrap();
            let pole = 2.0 * g2 / Complex64::new(w - 0.68, 5e-3);
            assert!((oracle - pole).norm() < 1e-8 * pole.norm().max(1.0), "{w}: {oracle} vs {pole}");
        }
        assert_eq!(sigma_convolution_bubble(0.7, &[pair], 0.0, 0.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn bubble_thermal_factor() {
        let pair = (
            Phonon {
                frequency: 0.3,
                linewidth: 1e-2,
            },
            Phonon {
                frequency: 0.5,
                linewidth: 1e-2,
            },
        );
        let t = 0.4;
        let n = |w: f64| 1.0 / (w / t).exp_m1();
        let oracle = sigma_convolution_bubble(1.0, &[pair], 1.0, t).unwrap();
        let pole = 2.0 * (n(0.3) + n(0.5) + 1.0) / Complex64::new(0.2, 2e-2);
        assert!((oracle - pole).norm() < 1e-8 * pole.norm());
    }

    #[test]
    fn bubble_reproduces_discrete_bath() {
        let (n, g2, gamma) = (100, 1e-3, 5e-3);
        let bath = DiscreteBath::beliaev_1d(n, g2, gamma, 0.0).unwrap();
        let pairs = beliaev_1d_pairs(n, gamma);
        for i in 0..=12 {
            let w = 0.25 * i as f64;
            let oracle = sigma_convolution_bubble(w, &pairs, g2, 0.0).unwrap();
            let direct = sigma_discrete(w, &bath, 0.0).unwrap().retarded;
            assert!((oracle - direct).norm() < 1e-6, "{w}: {oracle} vs {direct}");
        }
    }

    #[test]
    fn single_mode_spectrum_normalised() {
        assert_eq!(single_mode_analytic_spectrum(3.0, 3.0, 0.5).unwrap(), 4.0);
        assert!(single_mode_analytic_spectrum(0.0, 0.0, 0.0).is_err());
        let total = integrate_real_line(
            |w: f64| single_mode_analytic_spectrum(w, 1.0, 0.2).unwrap(),
            1.0,
            0.2,
            &[],
            Tolerance::default(),
        )
        .unwrap();
        assert!((total.value / (2.0 * std::f64::consts::PI) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pv_of_constant_density() {
        let rho = constant_density();
        let tol = Tolerance::default();
        let at_zero = pv_quadrature(&rho, 0.0, 10.0, tol).unwrap().value;
        assert!((at_zero + 0.7 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!(pv_quadrature(&rho, 1.5, 10.0, tol).unwrap().value.abs() < 1e-12);
        // ln|(ω − 1)/(ω − 2)| off-centre
        let w: f64 = 1.2;
        let expected = 0.7 * ((w - 1.0) / (2.0 - w)).ln();
        assert!((pv_quadrature(&rho, w, 10.0, tol).unwrap().value - expected).abs() < 1e-11);
    }

    #[test]
    fn pv_certifies_closed_form() {
        let rho = CouplingDensity::analytic(0.1).unwrap();
        let tol = Tolerance::new(1e-13, 1e-11).with_max_intervals(10_000);
        for &w in &[0.0, 0.3, 0.5, 0.51, 0.9, 1.7, 5.0, 19.0, 25.0] {
            let oracle = pv_quadrature(&rho, w, 20.0, tol).map_err(|e| format!("{w}: {e}")).unwrap().value;
            let closed = hilbert_sqrt_pv(w, 0.1, 20.0);
            assert!((oracle - closed).abs() < 1e-7 * closed.abs(), "{w}: {oracle} vs {closed}");
        }
        assert!(hilbert_sqrt_pv(0.0, 0.1, 20.0) < 0.0);
    }

    #[test]
    fn markovian_baseline_has_no_threshold_dip() {
        let params = ModelParams::new(-100.0, 0.1, 0.0).with_y_over_yc(0.9).unwrap();
        let grid: Vec<f64> = (0..=40).map(|i| 0.4 + 0.005 * i as f64).collect();
        let table = markovian_baseline(&params, 0.05, &grid).unwrap();
        let c = table.values(crate::observables::Mode::Quasiparticle);
        assert!(c.iter().all(|v| *v > 0.0));
        // featureless: no interior local minimum near ω_R/2
        let mid = table.omega.iter().position(|w| (*w - 0.5).abs() < 1e-12).unwrap();
        assert!(!(c[mid] < c[mid - 1] && c[mid] < c[mid + 1]));
        assert!(markovian_baseline(&params, 0.0, &grid).is_err());
    }
}
