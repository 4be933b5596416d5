//! Command-line driver: configuration, subcommand dispatch and output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{load_config, parse_ratios, BathKind, Format, ParameterBlock, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification mismatch: {0}")]
    Verify(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Verify(_) => 4,
        }
    }
}

impl From<polariton_core::Error> for CliError {
    fn from(e: polariton_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polariton", version, about = "Keldysh spectra of a cavity polariton with Beliaev damping")]
pub struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Run the reference-calculation suite (after the subcommand, if any).
    #[arg(long, global = true)]
    pub verify: bool,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega_max: Option<f64>,
    #[arg(long, global = true)]
    pub omega_points: Option<usize>,
    #[arg(long, global = true)]
    pub y_over_yc: Option<f64>,
    /// Pump coupling `y` in units of ω_R.
    #[arg(long = "y", global = true)]
    pub coupling: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub detuning: Option<f64>,
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    #[arg(long, global = true)]
    pub varrho: Option<f64>,
    #[arg(long, global = true)]
    pub gamma_b: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub cutoff: Option<f64>,
    /// `k_B T/ħω_R`.
    #[arg(long, global = true)]
    pub temperature: Option<f64>,
    /// bare, renormalized or resonance.
    #[arg(long, global = true)]
    pub lamb_shift: Option<String>,
    /// sharp or lorentzian.
    #[arg(long, global = true)]
    pub bath: Option<String>,
    /// Comma-separated `y/y_c` values for sweeps.
    #[arg(long, global = true)]
    pub ratios: Option<String>,
    /// Report frequencies in rad/s (needs a physical parameter block).
    #[arg(long, global = true)]
    pub si: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Coupling density ρ(ω).
    Cdf,
    /// Self-energy triple Σ^R, Σ^K.
    Selfenergy,
    /// Correlation spectra C_a(ω), C_c(ω).
    Spectrum,
    /// Soft polariton frequency.
    Softmode,
    /// Steady-state populations.
    Populations,
    /// Populations and soft mode over a range of y/y_c.
    Sweep,
    /// Parameter presets of the published figures.
    Reproduce {
        /// fig3a, fig3b, fig3c, fig4a, fig4b, fig4c or fig5.
        figure: String,
    },
    /// Reference-calculation suite.
    Verify,
}

/// Builds the run configuration from the optional file and the flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &cli.out {
        cfg.out = v.clone();
    }
    if let Some(v) = cli.format {
        cfg.format = v;
    }
    cfg.verify |= cli.verify;
    cfg.si |= cli.si;
    cfg.grid.min = cli.omega_min.or(cfg.grid.min);
    cfg.grid.max = cli.omega_max.or(cfg.grid.max);
    cfg.grid.points = cli.omega_points.or(cfg.grid.points);
    if let Some(v) = cli.detuning {
        cfg.detuning = v;
    }
    if let Some(v) = cli.kappa {
        cfg.kappa = v;
    }
    if let Some(v) = cli.coupling {
        cfg.coupling = Some(v);
        cfg.y_over_yc = None;
    }
    if let Some(v) = cli.y_over_yc {
        cfg.y_over_yc = Some(v);
        cfg.coupling = None;
    }
    cfg.gamma_b = cli.gamma_b.or(cfg.gamma_b);
    cfg.epsilon = cli.epsilon.or(cfg.epsilon);
    cfg.cutoff = cli.cutoff.or(cfg.cutoff);
    if let Some(s) = &cli.lamb_shift {
        cfg.lamb_shift = Some(s.parse()?);
    }
    if let Some(s) = &cli.bath {
        cfg.bath = match s.as_str() {
            "sharp" => BathKind::Sharp,
            "lorentzian" => BathKind::Lorentzian,
            other => return Err(CliError::Config(format!("unknown bath `{other}` (sharp, lorentzian)"))),
        };
    }
    if let Some(s) = &cli.ratios {
        cfg.ratios = Some(parse_ratios(s).map_err(CliError::Config)?);
    }
    if cli.varrho.is_some() || cli.temperature.is_some() {
        match &mut cfg.block {
            ParameterBlock::Dimensionless { varrho, temperature } => {
                *varrho = cli.varrho.unwrap_or(*varrho);
                *temperature = cli.temperature.unwrap_or(*temperature);
            }
            ParameterBlock::Physical(_) => {
                return Err(CliError::Config(
                    "--varrho/--temperature conflict with the physical parameter block".into(),
                ))
            }
        }
    }
    if cfg.si && cfg.recoil_frequency().is_none() {
        return Err(CliError::Config("--si needs a physical parameter block for ω_R".into()));
    }
    Ok(cfg)
}

/// Runs the parsed command line and returns the written files.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = resolve_config(cli)?;
    let mut written = Vec::new();
    let command = match (&cli.command, cfg.verify) {
        (None, false) => return Err(CliError::Config("no subcommand given (see --help)".into())),
        (None, true) => Command::Verify,
        (Some(c), _) => c.clone(),
    };
    let mut artifact = commands::run_subcommand(&command, &cfg)?;
    let mismatch = verify::mismatch(&artifact);
    if cfg.si {
        commands::convert_to_si(&mut artifact, cfg.recoil_frequency().expect("checked in resolve_config"));
    }
    written.extend(output::write_outputs(&artifact, &cfg.out, cfg.format)?);

    let mut failed = mismatch;
    if cfg.verify && !matches!(command, Command::Verify) {
        let report = commands::run_subcommand(&Command::Verify, &cfg)?;
        written.extend(output::write_outputs(&report, &cfg.out, cfg.format)?);
        failed = failed.or(verify::mismatch(&report));
    }
    match failed {
        Some(msg) => Err(CliError::Verify(msg)),
        None => Ok(written),
    }
}
