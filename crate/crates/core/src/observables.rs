//! Spectra on frequency grids, steady-state populations from the spectral
//! sum rule, coupling sweeps and the threshold-dip metric.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::THRESHOLD;
use crate::error::{Error, Result};
use crate::keldysh::{Resonance, TwoModeSystem};
use crate::model::ModelParams;
use crate::quadrature::{integrate, peak_ladder, Integral, Tolerance};
use crate::selfenergy::SelfEnergyModel;

/// Populations below this are reported as [`Error::NegativePopulation`].
pub const NEGATIVE_POPULATION_LIMIT: f64 = -1e-6;

/// Sweeps refuse `y/y_c` above this unless told otherwise.
pub const DEFAULT_MAX_Y_OVER_YC: f64 = 0.99;

const TAIL_SAMPLES: usize = 32;

/// The photon (`a`) or the condensate quasiparticle (`c`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Photon,
    Quasiparticle,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" | "photon" => Ok(Mode::Photon),
            "c" | "quasiparticle" | "atom" => Ok(Mode::Quasiparticle),
            other => Err(Error::invalid("mode", format!("expected `a` or `c`, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    /// Points added to the requested grid: `±ω_R/2` and resonance centres.
    pub split_points: Vec<f64>,
    /// Largest condition number of `D^R` met on the grid.
    pub max_condition: f64,
}

/// `C_a(ω)` and `C_c(ω)` on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub omega: Vec<f64>,
    pub c_a: Vec<f64>,
    pub c_c: Vec<f64>,
    pub refinement: Refinement,
    pub params: ModelParams,
}

impl SpectrumTable {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn values(&self, mode: Mode) -> &[f64] {
        match mode {
            Mode::Photon => &self.c_a,
            Mode::Quasiparticle => &self.c_c,
        }
    }
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::invalid("grid", format!("bad bounds [{lo}, {hi}]")));
    }
    if n < 2 {
        return Err(Error::invalid("grid", "need at least two points"));
    }
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * h }).collect())
}

/// Evaluates both spectra on `grid`, adding `±ω_R/2` and every resonance
/// centre that falls inside it.
pub fn spectrum(system: &TwoModeSystem, grid: &[f64]) -> Result<SpectrumTable> {
    system.ensure_below_threshold()?;
    if grid.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("grid", "frequencies must be finite"));
    }
    let mut omega = grid.to_vec();
    omega.sort_by(f64::total_cmp);
    omega.dedup();
    let (lo, hi) = match (omega.first(), omega.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::invalid("grid", "empty frequency grid")),
    };
    let mut split_points: Vec<f64> = [-THRESHOLD, THRESHOLD]
        .into_iter()
        .chain(system.resonances()?.iter().map(|r| r.center))
        .filter(|w| *w >= lo && *w <= hi && omega.binary_search_by(|x| x.total_cmp(w)).is_err())
        .collect();
    split_points.sort_by(f64::total_cmp);
    split_points.dedup();
    omega.extend(&split_points);
    omega.sort_by(f64::total_cmp);

    let values = omega
        .par_iter()
        .map(|&w| {
            let g = system.green(w)?;
            Ok((g.correlation(w, crate::keldysh::A)?, g.correlation(w, crate::keldysh::C)?, g.condition))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_condition = values.iter().map(|v| v.2).fold(0.0, f64::max);
    Ok(SpectrumTable {
        c_a: values.iter().map(|v| v.0).collect(),
        c_c: values.iter().map(|v| v.1).collect(),
        omega,
        refinement: Refinement {
            split_points,
            max_condition,
        },
        params: *system.params(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationOptions {
    /// Integration half-range `Ω`; `None` picks `100·max(|Δ_C|, Λ, 1)`.
    pub omega_max: Option<f64>,
    pub tolerance: Tolerance,
    /// Used when `tolerance` cannot be met. A bound state below the
    /// threshold with linewidth of order `ε` is resolved only to about
    /// `10⁻¹⁶/linewidth` because `ω − ω_R − Σ(ω)` cancels there.
    pub fallback: Option<Tolerance>,
}

impl Default for PopulationOptions {
    fn default() -> Self {
        PopulationOptions {
            omega_max: None,
            tolerance: Tolerance::new(1e-12, 1e-9).with_max_intervals(5_000),
            fallback: Some(Tolerance::new(1e-10, 1e-6).with_max_intervals(20_000)),
        }
    }
}

/// `⟨x†x⟩ = (∫dω/2π C_x − 1)/2` with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub value: f64,
    /// `∫dω/2π C_x` over `[−Ω, Ω]`.
    pub core: f64,
    /// Analytic `A/ω²` tail beyond `±Ω`, divided by `2π`.
    pub tail: f64,
    /// Quadrature error estimate of `core`.
    pub error: f64,
    pub omega_max: f64,
}

/// Photon and quasiparticle populations from one quadrature pass.
pub fn populations(system: &TwoModeSystem, opts: &PopulationOptions) -> Result<(Population, Population)> {
    system.ensure_below_threshold()?;
    let p = system.params();
    let omega_max = opts
        .omega_max
        .unwrap_or(100.0 * p.detuning.abs().max(p.cutoff).max(1.0));
    if !(omega_max >= 2.0 * p.detuning.abs() + 10.0) {
        return Err(Error::invalid(
            "omega_max",
            format!("must be at least 2|Δ_C| + 10, got {omega_max}"),
        ));
    }
    let points = integration_points(system, omega_max)?;
    let spectrum = |w: f64| -> Result<[f64; 2]> {
        let (a, c) = system.correlation(w)?;
        Ok([a, c])
    };

    let core = match sum_rule_integral(&spectrum, &points, opts.tolerance) {
        Err(Error::QuadratureNonConvergence { .. }) if opts.fallback.is_some() => {
            sum_rule_integral(&spectrum, &points, opts.fallback.unwrap())?
        }
        r => r?,
    };

    let mut tail = [0.0; 2];
    for side in [-1.0, 1.0] {
        let samples = (0..TAIL_SAMPLES)
            .map(|i| {
                let w = omega_max * 10f64.powf(-(i as f64) / (TAIL_SAMPLES - 1) as f64);
                Ok((w, spectrum(side * w)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let norm: f64 = samples.iter().map(|(w, _)| w.powi(-4)).sum();
        for k in 0..2 {
            let amplitude = samples.iter().map(|(w, c)| c[k] * w.powi(-2)).sum::<f64>() / norm;
            tail[k] += amplitude / omega_max;
        }
    }

    let two_pi = 2.0 * std::f64::consts::PI;
    let build = |k: usize| {
        let core_k = core.value[k] / two_pi;
        let tail_k = tail[k] / two_pi;
        let value = 0.5 * (core_k + tail_k - 1.0);
        if value < NEGATIVE_POPULATION_LIMIT {
            return Err(Error::NegativePopulation { value });
        }
        Ok(Population {
            value,
            core: core_k,
            tail: tail_k,
            error: core.error / two_pi,
            omega_max,
        })
    };
    Ok((build(0)?, build(1)?))
}

pub fn population(system: &TwoModeSystem, mode: Mode, opts: &PopulationOptions) -> Result<Population> {
    let (a, c) = populations(system, opts)?;
    Ok(match mode {
        Mode::Photon => a,
        Mode::Quasiparticle => c,
    })
}

fn sum_rule_integral(
    spectrum: &impl Fn(f64) -> Result<[f64; 2]>,
    points: &[f64],
    tol: Tolerance,
) -> Result<Integral<[f64; 2]>> {
    // The quadrature cannot propagate errors, so the first failure is kept
    // aside and reported after the pass.
    let mut failure = None;
    let core = integrate(
        |w: f64| match spectrum(w) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                [0.0; 2]
            }
        },
        points,
        tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(core),
    }
}

/// Break points for the sum-rule integral: the self-energy kinks, and a
/// geometric ladder around every resonance on both sides of the spectrum.
fn integration_points(system: &TwoModeSystem, omega_max: f64) -> Result<Vec<f64>> {
    let mut pts = vec![-omega_max, omega_max, 0.0];
    for w in system.self_energy().singular_points() {
        pts.extend([-w, w]);
    }
    for Resonance { center, width } in system.resonances()? {
        pts.extend(peak_ladder(center, width, omega_max));
    }
    pts.retain(|w| w.abs() <= omega_max);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Ok(pts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub population: PopulationOptions,
    /// Points with `y/y_c` above this are refused.
    pub max_y_over_yc: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            population: PopulationOptions::default(),
            max_y_over_yc: DEFAULT_MAX_Y_OVER_YC,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub y_over_yc: f64,
    pub coupling: f64,
    pub photon: Option<f64>,
    pub quasiparticle: Option<f64>,
    pub soft_mode: Option<f64>,
    /// First error met at this point, if any.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub params: ModelParams,
    /// Sorted by `y/y_c`.
    pub points: Vec<SweepPoint>,
    /// Populations non-decreasing along the sweep (failed points skipped).
    pub photon_monotone: bool,
    pub quasiparticle_monotone: bool,
    pub soft_mode_decreasing: bool,
}

/// Populations and soft mode for each `y/y_c` in `ratios`, computed in
/// parallel. A failing point records its error and the sweep goes on.
pub fn sweep(
    params: &ModelParams,
    sigma: &SelfEnergyModel,
    ratios: &[f64],
    opts: &SweepOptions,
) -> Result<SweepTable> {
    params.validate()?;
    let y_c = params.critical_coupling()?;
    let mut ratios = ratios.to_vec();
    if let Some(r) = ratios.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::invalid("y_over_yc", format!("must be non-negative, got {r}")));
    }
    if let Some(r) = ratios.iter().find(|r| **r > opts.max_y_over_yc) {
        return Err(Error::invalid(
            "y_over_yc",
            format!("{r} exceeds the sweep limit {}", opts.max_y_over_yc),
        ));
    }
    ratios.sort_by(f64::total_cmp);
    ratios.dedup();

    let points: Vec<SweepPoint> = ratios
        .par_iter()
        .map(|&r| {
            let point_params = params.with_coupling(r * y_c);
            let mut point = SweepPoint {
                y_over_yc: r,
                coupling: r * y_c,
                photon: None,
                quasiparticle: None,
                soft_mode: None,
                error: None,
            };
            let system = match TwoModeSystem::with_self_energy(point_params, sigma.clone()) {
                Ok(s) => s,
                Err(e) => {
                    point.error = Some(e.to_string());
                    return point;
                }
            };
            match populations(&system, &opts.population) {
                Ok((a, c)) => {
                    point.photon = Some(a.value);
                    point.quasiparticle = Some(c.value);
                }
                Err(e) => point.error = Some(e.to_string()),
            }
            match system.soft_mode() {
                Ok(w) => point.soft_mode = Some(w),
                Err(e) => {
                    point.error.get_or_insert(e.to_string());
                }
            }
            point
        })
        .collect();

    let column = |f: fn(&SweepPoint) -> Option<f64>| points.iter().filter_map(f).collect::<Vec<_>>();
    let non_decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0]);
    let soft = column(|p| p.soft_mode);
    Ok(SweepTable {
        params: *params,
        photon_monotone: non_decreasing(&column(|p| p.photon)),
        quasiparticle_monotone: non_decreasing(&column(|p| p.quasiparticle)),
        soft_mode_decreasing: soft.windows(2).all(|w| w[1] < w[0]),
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipMetric {
    /// Local minimum nearest `ω_R/2` within `[0.3, 0.7]`.
    pub location: Option<f64>,
    /// `min/max` of the spectrum over `[0.4, 0.6]`; one when no minimum.
    pub contrast: f64,
}

/// Locates the hole burnt into `mode`'s spectrum at the Beliaev threshold.
pub fn dip_metric(table: &SpectrumTable, mode: Mode) -> DipMetric {
    let (w, v) = (&table.omega, table.values(mode));
    let no_dip = DipMetric {
        location: None,
        contrast: 1.0,
    };
    let location = (1..w.len().saturating_sub(1))
        .filter(|&i| (0.3..=0.7).contains(&w[i]) && v[i] < v[i - 1] && v[i] <= v[i + 1])
        .map(|i| w[i])
        .min_by(|a, b| (a - THRESHOLD).abs().total_cmp(&(b - THRESHOLD).abs()));
    let Some(location) = location else {
        return no_dip;
    };
    let window: Vec<f64> = w
        .iter()
        .zip(v)
        .filter(|(w, _)| (0.4..=0.6).contains(*w))
        .map(|(_, v)| *v)
        .collect();
    let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = window.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) {
        return no_dip;
    }
    DipMetric {
        location: Some(location),
        contrast: min / max,
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("samples", "need at least two paired samples"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("samples", "log-log fit needs positive values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}
