//! Subcommand implementations. Each returns an [`Artifact`] of tables plus
//! a JSON summary; nothing is written here.

use polariton_core::keldysh::TwoModeSystem;
use polariton_core::model::ModelParams;
use polariton_core::observables::{
    dip_metric, populations, spectrum, sweep, Mode, PopulationOptions, SpectrumTable, SweepOptions, SweepTable,
};
use polariton_core::presets::{Figure, POPULATION_VARRHOS};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{Artifact, Table};
use crate::{verify, CliError, Command};

/// Columns holding frequencies (or densities per unit frequency squared,
/// which scale the same way).
const FREQUENCY_COLUMNS: &[&str] = &[
    "omega",
    "minus_omega",
    "omega_soft",
    "width",
    "rho",
    "re_sigma_r",
    "im_sigma_r",
    "im_sigma_k",
];

fn params_json(params: &ModelParams, cfg: &RunConfig) -> Value {
    json!({ "model": params, "config": cfg })
}

fn system(cfg: &RunConfig, params: ModelParams) -> Result<TwoModeSystem, CliError> {
    let sigma = cfg.self_energy(&params)?;
    Ok(TwoModeSystem::with_self_energy(params, sigma)?)
}

fn default_ratios() -> Vec<f64> {
    (50..100).map(|i| i as f64 / 100.0).collect()
}

fn ratio_label(r: f64) -> String {
    format!("{r:.2}")
}

pub fn run_subcommand(command: &Command, cfg: &RunConfig) -> Result<Artifact, CliError> {
    match command {
        Command::Cdf => cdf(cfg),
        Command::Selfenergy => self_energy(cfg),
        Command::Spectrum => spectrum_command(cfg),
        Command::Softmode => soft_mode(cfg),
        Command::Populations => populations_command(cfg),
        Command::Sweep => sweep_command(cfg),
        Command::Reproduce { figure } => reproduce(cfg, figure.parse()?),
        Command::Verify => verify::suite(),
    }
}

fn cdf(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let params = cfg.model_params()?;
    let density = cfg.density(&params)?;
    let mut t = Table::new("cdf", &["omega", "rho"]);
    for w in cfg.grid.resolve(0.0, 5.0, 501)? {
        t.push(vec![w, density.value(w)]);
    }
    Ok(Artifact {
        command: "cdf".into(),
        params: params_json(&params, cfg),
        summary: json!({ "varrho": params.varrho, "support": density.support() }),
        tables: vec![t],
    })
}

fn self_energy(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let params = cfg.model_params()?;
    let sigma = cfg.self_energy(&params)?;
    let mut t = Table::new("selfenergy", &["omega", "re_sigma_r", "im_sigma_r", "im_sigma_k"]);
    for w in cfg.grid.resolve(-2.0, 5.0, 701)? {
        let s = sigma.evaluate(w)?;
        t.push(vec![w, s.retarded.re, s.retarded.im, s.keldysh.im]);
    }
    Ok(Artifact {
        command: "selfenergy".into(),
        params: params_json(&params, cfg),
        summary: json!({ "lamb_shift_subtracted": sigma.lamb_shift() }),
        tables: vec![t],
    })
}

/// Rows at the requested grid points only; refinement points added around
/// resonances are listed in the summary.
fn spectrum_table(name: &str, table: &SpectrumTable, grid: &[f64]) -> Table {
    let mut t = Table::new(name, &["omega", "C_a", "C_c"]);
    for &w in grid {
        let i = table.omega.binary_search_by(|x| x.total_cmp(&w)).expect("requested points are kept");
        t.push(vec![w, table.c_a[i], table.c_c[i]]);
    }
    t
}

fn spectrum_command(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let params = cfg.model_params()?;
    let sys = system(cfg, params)?;
    let grid = cfg.grid.resolve(-2.0, 2.0, 801)?;
    let table = spectrum(&sys, &grid)?;
    let dip = dip_metric(&table, Mode::Quasiparticle);
    Ok(Artifact {
        command: "spectrum".into(),
        params: params_json(&params, cfg),
        summary: json!({
            "y_c": params.critical_coupling()?,
            "y_over_yc": params.y_over_yc()?,
            "soft_mode": sys.soft_mode().ok(),
            "max_condition": table.refinement.max_condition,
            "split_points": table.refinement.split_points,
            "threshold_dip": dip,
        }),
        tables: vec![spectrum_table("spectrum", &table, &grid)],
    })
}

fn soft_mode(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let params = cfg.model_params()?;
    let sys = system(cfg, params)?;
    let root = sys.soft_root()?;
    let mut t = Table::new("softmode", &["y_over_yc", "omega_soft", "width"]);
    t.push(vec![params.y_over_yc()?, root.re, -root.im]);
    Ok(Artifact {
        command: "softmode".into(),
        params: params_json(&params, cfg),
        summary: json!({
            "y_c": params.critical_coupling()?,
            "omega_soft": root.re,
            "width": -root.im,
        }),
        tables: vec![t],
    })
}

fn populations_command(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let params = cfg.model_params()?;
    let sys = system(cfg, params)?;
    let (a, c) = populations(&sys, &PopulationOptions::default())?;
    let mut t = Table::new("populations", &["y_over_yc", "n_a", "n_c", "error_a", "error_c"]);
    t.push(vec![params.y_over_yc()?, a.value, c.value, a.error, c.error]);
    Ok(Artifact {
        command: "populations".into(),
        params: params_json(&params, cfg),
        summary: json!({ "y_c": params.critical_coupling()?, "photon": a, "quasiparticle": c }),
        tables: vec![t],
    })
}

fn sweep_rows(name: &str, table: &SweepTable) -> Table {
    let mut t = Table::new(name, &["y_over_yc", "coupling", "n_a", "n_c", "omega_soft"]);
    for p in &table.points {
        let nan = f64::NAN;
        t.push(vec![
            p.y_over_yc,
            p.coupling,
            p.photon.unwrap_or(nan),
            p.quasiparticle.unwrap_or(nan),
            p.soft_mode.unwrap_or(nan),
        ]);
    }
    t
}

fn sweep_summary(table: &SweepTable) -> Value {
    let errors: Vec<Value> = table
        .points
        .iter()
        .filter_map(|p| p.error.as_ref().map(|e| json!({ "y_over_yc": p.y_over_yc, "error": e })))
        .collect();
    json!({
        "photon_monotone": table.photon_monotone,
        "quasiparticle_monotone": table.quasiparticle_monotone,
        "soft_mode_decreasing": table.soft_mode_decreasing,
        "errors": errors,
    })
}

fn sweep_command(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let params = cfg.model_params()?;
    let ratios = cfg.ratios.clone().unwrap_or_else(default_ratios);
    let table = sweep(&params, &cfg.self_energy(&params)?, &ratios, &SweepOptions::default())?;
    let mut summary = sweep_summary(&table);
    summary["y_c"] = json!(params.critical_coupling()?);
    Ok(Artifact {
        command: "sweep".into(),
        params: params_json(&params, cfg),
        summary,
        tables: vec![sweep_rows("sweep", &table)],
    })
}

/// Parameters of a preset curve, with numerical settings (ε, Λ, γ_B, Lamb
/// shift) taken from the configuration.
fn preset_params(cfg: &RunConfig, curve: ModelParams) -> Result<ModelParams, CliError> {
    let base = cfg.model_params()?;
    Ok(ModelParams {
        detuning: curve.detuning,
        kappa: curve.kappa,
        varrho: curve.varrho,
        coupling: curve.coupling,
        ..base
    })
}

fn reproduce(cfg: &RunConfig, figure: Figure) -> Result<Artifact, CliError> {
    let name = figure.name();
    let base = preset_params(cfg, figure.params())?;
    let Some(mode) = figure.mode() else {
        return reproduce_populations(cfg, base);
    };
    let curves = figure
        .curves()
        .into_iter()
        .map(|c| preset_params(cfg, c))
        .collect::<Result<Vec<_>, _>>()?;
    let mirrored = mode == Mode::Photon;
    let (lo, hi) = if mirrored { (-2.0, 2.0) } else { (0.0, 2.0) };
    let grid = cfg.grid.resolve(lo, hi, 801)?;

    let mut windows = vec![(name.to_string(), grid)];
    if figure == Figure::Fig4a {
        let cavity = -base.detuning;
        windows.push((format!("{name}_cavity"), polariton_core::observables::uniform_grid(cavity - 2.0, cavity + 2.0, 801)?));
    }

    let prefix = if mirrored { "C_a" } else { "C_c" };
    let mut tables = Vec::new();
    let mut dips = Vec::new();
    for (table_name, grid) in windows {
        let mut columns = vec!["omega".to_string()];
        if mirrored {
            columns.push("minus_omega".to_string());
        }
        columns.extend(curves.iter().map(|p| format!("{prefix}_r{}", ratio_label(p.y_over_yc().unwrap_or(0.0)))));
        let mut t = Table::with_columns(table_name, columns);
        let spectra = curves
            .iter()
            .map(|p| Ok(spectrum(&system(cfg, *p)?, &grid)?))
            .collect::<Result<Vec<_>, CliError>>()?;
        if dips.is_empty() {
            dips = spectra
                .iter()
                .map(|s| json!({ "y_over_yc": s.params.y_over_yc().ok(), "dip": dip_metric(s, mode) }))
                .collect();
        }
        // Resonance refinement differs between curves; report the
        // requested grid only.
        for &w in &grid {
            let mut row = vec![w];
            if mirrored {
                row.push(-w);
            }
            for s in &spectra {
                let i = s.omega.binary_search_by(|x| x.total_cmp(&w)).expect("requested points are kept");
                row.push(s.values(mode)[i]);
            }
            t.push(row);
        }
        tables.push(t);
    }
    let soft: Vec<Option<f64>> = curves
        .iter()
        .map(|p| system(cfg, *p).ok().and_then(|s| s.soft_mode().ok()))
        .collect();
    Ok(Artifact {
        command: format!("reproduce {name}"),
        params: json!({ "curves": curves, "config": cfg }),
        summary: json!({
            "figure": name,
            "y_c": base.critical_coupling()?,
            "soft_modes": soft,
            "threshold_dips": dips,
        }),
        tables,
    })
}

fn reproduce_populations(cfg: &RunConfig, base: ModelParams) -> Result<Artifact, CliError> {
    let ratios = cfg.ratios.clone().unwrap_or_else(default_ratios);
    let mut sweeps = Vec::new();
    for varrho in POPULATION_VARRHOS {
        let params = ModelParams { varrho, ..base };
        sweeps.push(sweep(&params, &cfg.self_energy(&params)?, &ratios, &SweepOptions::default())?);
    }
    let mut columns = vec!["y_over_yc".to_string()];
    for label in ["n_c", "n_a"] {
        columns.extend(POPULATION_VARRHOS.iter().map(|v| format!("{label}_rho{v}")));
    }
    let mut t = Table::with_columns("fig5", columns);
    let n = sweeps[0].points.len();
    for i in 0..n {
        let mut row = vec![sweeps[0].points[i].y_over_yc];
        row.extend(sweeps.iter().map(|s| s.points[i].quasiparticle.unwrap_or(f64::NAN)));
        row.extend(sweeps.iter().map(|s| s.points[i].photon.unwrap_or(f64::NAN)));
        t.push(row);
    }
    let summaries: Vec<Value> = POPULATION_VARRHOS
        .iter()
        .zip(&sweeps)
        .map(|(v, s)| {
            let mut m = sweep_summary(s);
            m["varrho"] = json!(v);
            m
        })
        .collect();
    Ok(Artifact {
        command: "reproduce fig5".into(),
        params: json!({ "base": base, "varrho": POPULATION_VARRHOS, "config": cfg }),
        summary: json!({ "figure": "fig5", "y_c": base.critical_coupling()?, "curves": summaries }),
        tables: vec![t],
    })
}

/// Rescales frequency columns by `ω_R` (rad/s) and spectra by `1/ω_R`.
pub fn convert_to_si(artifact: &mut Artifact, recoil: f64) {
    for t in &mut artifact.tables {
        t.scale_columns(FREQUENCY_COLUMNS, recoil);
        let spectra: Vec<String> = t.columns.iter().filter(|c| c.starts_with("C_")).cloned().collect();
        let names: Vec<&str> = spectra.iter().map(String::as_str).collect();
        t.scale_columns(&names, 1.0 / recoil);
    }
    artifact.summary["frequency_unit"] = json!("rad/s");
    artifact.summary["recoil_frequency"] = json!(recoil);
}
