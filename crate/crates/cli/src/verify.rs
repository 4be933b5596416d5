//! The reference-calculation suite behind `verify` / `--verify`.

use polariton_core::bath::{rho_3d, CouplingDensity, DiscreteBath};
use polariton_core::keldysh::TwoModeSystem;
use polariton_core::model::{coupling_coefficient_varrho, DensityConvention, LambShift, ModelParams, PhysicalParams};
use polariton_core::observables::{populations, uniform_grid, PopulationOptions};
use polariton_core::oracle::{
    beliaev_1d_pairs, pv_quadrature, rho_momentum_quadrature, sigma_convolution_bubble, single_mode_analytic_spectrum,
};
use polariton_core::quadrature::Tolerance;
use polariton_core::selfenergy::{hilbert_sqrt_pv, sigma_discrete, sigma_sharp};
use serde_json::{json, Value};

use crate::output::{Artifact, Table};
use crate::CliError;

struct Check {
    name: &'static str,
    deviation: f64,
    limit: f64,
}

fn density_oracle() -> Result<Check, CliError> {
    let phys = PhysicalParams::rubidium_87();
    let n = phys.density(DensityConvention::Peak)?;
    let varrho = coupling_coefficient_varrho(n, phys.scattering_length, phys.wavelength);
    let mut worst: f64 = 0.0;
    for w in uniform_grid(0.5, 5.0, 200)? {
        let oracle = rho_momentum_quadrature(w, &phys, n)?;
        let closed = rho_3d(w, varrho);
        worst = worst.max(if closed == 0.0 { oracle.abs() } else { (oracle / closed - 1.0).abs() });
    }
    Ok(Check {
        name: "coupling density vs momentum quadrature (relative)",
        deviation: worst,
        limit: 1e-3,
    })
}

fn principal_value() -> Result<Check, CliError> {
    let density = CouplingDensity::analytic(0.1)?;
    let tol = Tolerance::new(1e-13, 1e-11).with_max_intervals(10_000);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let w = -5.0 + 1.2 * i as f64 + 0.037;
        let oracle = pv_quadrature(&density, w, 20.0, tol)?.value;
        let closed = hilbert_sqrt_pv(w, 0.1, 20.0);
        worst = worst.max((oracle / closed - 1.0).abs());
    }
    Ok(Check {
        name: "principal value closed form vs quadrature (relative)",
        deviation: worst,
        limit: 1e-6,
    })
}

fn bubble() -> Result<Check, CliError> {
    let (n, g2, gamma) = (100, 1e-3, 5e-3);
    let bath = DiscreteBath::beliaev_1d(n, g2, gamma, 0.0)?;
    let pairs = beliaev_1d_pairs(n, gamma);
    let mut worst: f64 = 0.0;
    for w in uniform_grid(0.0, 3.0, 31)? {
        let oracle = sigma_convolution_bubble(w, &pairs, g2, 0.0)?;
        let direct = sigma_discrete(w, &bath, 0.0)?.retarded;
        worst = worst.max((oracle - direct).norm());
    }
    Ok(Check {
        name: "phonon bubble vs pole sum, 100 pairs (sup-norm)",
        deviation: worst,
        limit: 1e-6,
    })
}

fn discrete_vs_sharp() -> Result<Check, CliError> {
    let (varrho, cutoff) = (0.1, 5.0);
    let bath = DiscreteBath::from_density(|w| rho_3d(w, varrho), &[(0.5, cutoff, 10_000)], 1e-3)?;
    let (mut diff, mut scale): (f64, f64) = (0.0, 0.0);
    for w in uniform_grid(0.6, 3.0, 121)? {
        let d = sigma_discrete(w, &bath, 0.0)?.retarded;
        let s = sigma_sharp(w, varrho, cutoff, LambShift::Bare, 0.0).retarded;
        diff = diff.max((d - s).norm());
        scale = scale.max(s.norm());
    }
    Ok(Check {
        name: "10^4-mode bath vs sharp self-energy (relative sup-norm)",
        deviation: diff / scale,
        limit: 1e-2,
    })
}

fn decoupled_cavity() -> Result<Check, CliError> {
    let system = TwoModeSystem::new(ModelParams::new(-100.0, 0.1, 0.0))?;
    let mut worst: f64 = 0.0;
    for w in uniform_grid(99.0, 101.0, 201)? {
        let (ca, _) = system.correlation(w)?;
        let expected = single_mode_analytic_spectrum(w, 100.0, 0.1)?;
        worst = worst.max((ca / expected - 1.0).abs());
    }
    Ok(Check {
        name: "decoupled cavity vs single damped mode (relative)",
        deviation: worst,
        limit: 1e-10,
    })
}

fn calibration() -> Result<Check, CliError> {
    let system = TwoModeSystem::new(ModelParams::new(-100.0, 0.1, 0.01))?;
    let (a, c) = populations(&system, &PopulationOptions::default())?;
    Ok(Check {
        name: "vacuum sum rule ∫C dω/2π = 1",
        deviation: (a.core + a.tail - 1.0).abs().max((c.core + c.tail - 1.0).abs()),
        limit: 1e-6,
    })
}

/// Runs every check; numerical failures inside a check count as mismatches.
pub fn suite() -> Result<Artifact, CliError> {
    let checks: [fn() -> Result<Check, CliError>; 6] =
        [density_oracle, principal_value, bubble, discrete_vs_sharp, decoupled_cavity, calibration];
    let mut table = Table::new("verify", &["check", "deviation", "limit", "pass"]);
    let mut entries = Vec::new();
    let mut failed = Vec::new();
    for (i, f) in checks.iter().enumerate() {
        match f() {
            Ok(c) => {
                let pass = c.deviation <= c.limit;
                table.push(vec![i as f64, c.deviation, c.limit, if pass { 1.0 } else { 0.0 }]);
                entries.push(json!({ "check": i, "name": c.name, "deviation": c.deviation, "limit": c.limit, "pass": pass }));
                if !pass {
                    failed.push(c.name.to_string());
                }
            }
            Err(e) => {
                table.push(vec![i as f64, f64::NAN, f64::NAN, 0.0]);
                entries.push(json!({ "check": i, "error": e.to_string(), "pass": false }));
                failed.push(format!("check {i}: {e}"));
            }
        }
    }
    Ok(Artifact {
        command: "verify".into(),
        params: json!({}),
        summary: json!({ "checks": entries, "failed": failed }),
        tables: vec![table],
    })
}

/// Failure message of a verification artifact, if any check failed.
pub fn mismatch(artifact: &Artifact) -> Option<String> {
    let failed = artifact.summary.get("failed")?.as_array()?;
    if failed.is_empty() {
        return None;
    }
    Some(failed.iter().filter_map(Value::as_str).collect::<Vec<_>>().join("; "))
}
