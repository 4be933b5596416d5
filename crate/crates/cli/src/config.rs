//! Plain-text run configuration: one `key = value` per line, `#` starts a
//! comment.

use std::path::{Path, PathBuf};

use polariton_core::bath::{CouplingDensity, TabulatedDensity};
use polariton_core::model::{derive_model_params, DensityConvention, LambShift, ModelOverrides, ModelParams, PhysicalParams};
use polariton_core::selfenergy::SelfEnergyModel;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}` (csv, json, svg)")),
        }
    }
}

/// How the quasiparticle self-energy is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BathKind {
    /// Closed-form sharp limit of the square-root density.
    Sharp,
    /// Lorentzian kernel of width `gamma_b` over the square-root density.
    Lorentzian,
    /// Lorentzian kernel over a tabulated density read from a file.
    Table(PathBuf),
}

/// Laboratory parameters from which `ϱ` and `T` are derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalBlock {
    pub params: PhysicalParams,
    pub density: DensityConvention,
}

/// Source of `ϱ` and the temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterBlock {
    Dimensionless { varrho: f64, temperature: f64 },
    Physical(PhysicalBlock),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct GridSpec {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
}

impl GridSpec {
    /// Resolves unset bounds against command-specific defaults.
    pub fn resolve(&self, min: f64, max: f64, points: usize) -> Result<Vec<f64>, CliError> {
        let (lo, hi, n) = (self.min.unwrap_or(min), self.max.unwrap_or(max), self.points.unwrap_or(points));
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(CliError::Config("grid bounds must be finite".into()));
        }
        if !(hi > lo) || n < 2 {
            return Err(CliError::Config(format!("empty frequency grid [{lo}, {hi}] with {n} points")));
        }
        Ok(polariton_core::observables::uniform_grid(lo, hi, n)?)
    }
}

/// Everything a run needs besides the subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub block: ParameterBlock,
    pub detuning: f64,
    pub kappa: f64,
    pub coupling: Option<f64>,
    pub y_over_yc: Option<f64>,
    pub gamma_b: Option<f64>,
    pub epsilon: Option<f64>,
    pub cutoff: Option<f64>,
    pub lamb_shift: Option<LambShift>,
    pub bath: BathKind,
    pub grid: GridSpec,
    pub ratios: Option<Vec<f64>>,
    #[serde(skip)]
    pub out: PathBuf,
    pub format: Format,
    pub si: bool,
    pub verify: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ModelParams::default();
        RunConfig {
            block: ParameterBlock::Dimensionless {
                varrho: p.varrho,
                temperature: p.temperature,
            },
            detuning: p.detuning,
            kappa: p.kappa,
            coupling: None,
            y_over_yc: None,
            gamma_b: None,
            epsilon: None,
            cutoff: None,
            lamb_shift: None,
            bath: BathKind::Sharp,
            grid: GridSpec::default(),
            ratios: None,
            out: PathBuf::from("."),
            format: Format::Csv,
            si: false,
            verify: false,
        }
    }
}

impl RunConfig {
    /// Dimensionless model parameters; `ϱ` and `T` come from the parameter
    /// block.
    pub fn model_params(&self) -> Result<ModelParams, CliError> {
        if self.coupling.is_some() && self.y_over_yc.is_some() {
            return Err(CliError::Config("set either `y` or `y_over_yc`, not both".into()));
        }
        let defaults = ModelParams::default();
        let mut params = match self.block {
            ParameterBlock::Dimensionless { varrho, temperature } => ModelParams {
                detuning: self.detuning,
                kappa: self.kappa,
                coupling: self.coupling.unwrap_or(0.0),
                varrho,
                gamma_b: self.gamma_b.unwrap_or(defaults.gamma_b),
                epsilon: self.epsilon.unwrap_or(defaults.epsilon),
                cutoff: self.cutoff.unwrap_or(defaults.cutoff),
                temperature,
                lamb_shift: self.lamb_shift.unwrap_or_default(),
            },
            ParameterBlock::Physical(block) => derive_model_params(
                &block.params,
                &ModelOverrides {
                    detuning: Some(self.detuning),
                    kappa: Some(self.kappa),
                    coupling: self.coupling,
                    y_over_yc: None,
                    gamma_b: self.gamma_b,
                    epsilon: self.epsilon,
                    cutoff: self.cutoff,
                    lamb_shift: self.lamb_shift,
                    density: block.density,
                },
            )?,
        };
        if let Some(r) = self.y_over_yc {
            params = params.with_y_over_yc(r)?;
        }
        params.validate()?;
        Ok(params)
    }

    pub fn self_energy(&self, params: &ModelParams) -> Result<SelfEnergyModel, CliError> {
        Ok(match &self.bath {
            BathKind::Sharp => SelfEnergyModel::sharp(params),
            BathKind::Lorentzian => SelfEnergyModel::lorentzian(params, CouplingDensity::analytic(params.varrho)?)?,
            BathKind::Table(path) => {
                let table = TabulatedDensity::from_file(path)?;
                SelfEnergyModel::lorentzian(params, CouplingDensity::Tabulated(table))?
            }
        })
    }

    /// Coupling density matching [`RunConfig::self_energy`].
    pub fn density(&self, params: &ModelParams) -> Result<CouplingDensity, CliError> {
        Ok(match &self.bath {
            BathKind::Table(path) => CouplingDensity::Tabulated(TabulatedDensity::from_file(path)?),
            _ => CouplingDensity::analytic(params.varrho)?,
        })
    }

    /// `ω_R` in rad/s, available only with a physical block.
    pub fn recoil_frequency(&self) -> Option<f64> {
        match self.block {
            ParameterBlock::Physical(b) => Some(b.params.recoil_frequency()),
            ParameterBlock::Dimensionless { .. } => None,
        }
    }
}

const DIMENSIONLESS_KEYS: &[&str] = &["varrho", "temperature"];
const PHYSICAL_KEYS: &[&str] = &[
    "atom_number",
    "trap_frequency_hz",
    "scattering_length_m",
    "wavelength_m",
    "atomic_mass_kg",
    "temperature_k",
    "density",
];
const COMMON_KEYS: &[&str] = &[
    "detuning",
    "kappa",
    "y",
    "y_over_yc",
    "gamma_b",
    "epsilon",
    "cutoff",
    "lamb_shift",
    "bath",
    "density_table",
    "omega_min",
    "omega_max",
    "omega_points",
    "ratios",
    "out",
    "format",
    "si",
];

struct Entry {
    line: usize,
    key: String,
    value: String,
}

fn parse_lines(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::Config(format!("line {line}: expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim().to_ascii_lowercase(), value.trim().to_string());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Config(format!("line {line}: empty key or value")));
        }
        if ![DIMENSIONLESS_KEYS, PHYSICAL_KEYS, COMMON_KEYS].iter().any(|set| set.contains(&key.as_str())) {
            return Err(CliError::Config(format!("line {line}: unknown key `{key}`")));
        }
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(CliError::Config(format!(
                "line {line}: `{key}` already set on line {}",
                prev.line
            )));
        }
        entries.push(Entry { line, key, value });
    }
    Ok(entries)
}

fn number(e: &Entry) -> Result<f64, CliError> {
    e.value
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("line {}: `{}` is not a number: `{}`", e.line, e.key, e.value)))
}

/// Parses the text of a configuration file.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
    let entries = parse_lines(text)?;
    let get = |k: &str| entries.iter().find(|e| e.key == k);
    let has_any = |keys: &[&str]| entries.iter().find(|e| keys.contains(&e.key.as_str()));

    let dimless = has_any(DIMENSIONLESS_KEYS);
    let physical = has_any(PHYSICAL_KEYS);
    if let (Some(d), Some(p)) = (dimless, physical) {
        return Err(CliError::Config(format!(
            "line {}: `{}` belongs to the physical block but line {} sets dimensionless `{}`; use one block",
            p.line, p.key, d.line, d.key
        )));
    }
    let required = |k: &str| {
        get(k).ok_or_else(|| CliError::Config(format!("missing required key `{k}`")))
    };

    let block = if physical.is_some() {
        let params = PhysicalParams {
            atom_number: number(required("atom_number")?)?,
            mean_trap_frequency: 2.0 * std::f64::consts::PI * number(required("trap_frequency_hz")?)?,
            scattering_length: number(required("scattering_length_m")?)?,
            wavelength: number(required("wavelength_m")?)?,
            atomic_mass: number(required("atomic_mass_kg")?)?,
            temperature: get("temperature_k").map(number).transpose()?.unwrap_or(0.0),
        };
        let density = match get("density") {
            None => DensityConvention::Peak,
            Some(e) => match e.value.as_str() {
                "peak" => DensityConvention::Peak,
                "mean" => DensityConvention::Mean,
                _ => DensityConvention::Fixed(number(e)?),
            },
        };
        ParameterBlock::Physical(PhysicalBlock { params, density })
    } else {
        ParameterBlock::Dimensionless {
            varrho: number(required("varrho")?)?,
            temperature: get("temperature").map(number).transpose()?.unwrap_or(0.0),
        }
    };

    let opt = |k: &str| get(k).map(number).transpose();
    let mut cfg = RunConfig {
        block,
        detuning: number(required("detuning")?)?,
        kappa: number(required("kappa")?)?,
        coupling: opt("y")?,
        y_over_yc: opt("y_over_yc")?,
        gamma_b: opt("gamma_b")?,
        epsilon: opt("epsilon")?,
        cutoff: opt("cutoff")?,
        ..RunConfig::default()
    };
    if let Some(e) = get("lamb_shift") {
        cfg.lamb_shift = Some(
            e.value
                .parse()
                .map_err(|err| CliError::Config(format!("line {}: {err}", e.line)))?,
        );
    }
    if let Some(e) = get("bath") {
        cfg.bath = match e.value.as_str() {
            "sharp" => BathKind::Sharp,
            "lorentzian" => BathKind::Lorentzian,
            other => {
                return Err(CliError::Config(format!(
                    "line {}: unknown bath `{other}` (sharp, lorentzian)",
                    e.line
                )))
            }
        };
    }
    if let Some(e) = get("density_table") {
        cfg.bath = BathKind::Table(base_dir.join(&e.value));
    }
    cfg.grid = GridSpec {
        min: opt("omega_min")?,
        max: opt("omega_max")?,
        points: match get("omega_points") {
            Some(e) => Some(
                e.value
                    .parse()
                    .map_err(|_| CliError::Config(format!("line {}: `omega_points` must be a positive integer", e.line)))?,
            ),
            None => None,
        },
    };
    if let Some(e) = get("ratios") {
        cfg.ratios = Some(parse_ratios(&e.value).map_err(|err| CliError::Config(format!("line {}: {err}", e.line)))?);
    }
    if let Some(e) = get("out") {
        cfg.out = base_dir.join(&e.value);
    }
    if let Some(e) = get("format") {
        cfg.format = e.value.parse().map_err(|err| CliError::Config(format!("line {}: {err}", e.line)))?;
    }
    if let Some(e) = get("si") {
        cfg.si = match e.value.as_str() {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            _ => return Err(CliError::Config(format!("line {}: `si` must be true or false", e.line))),
        };
    }
    Ok(cfg)
}

/// Reads and validates a configuration file. Relative paths inside it are
/// resolved against the file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let cfg = parse_config(&text, base)?;
    cfg.model_params()?;
    Ok(cfg)
}

/// Comma-separated list of `y/y_c` values.
pub fn parse_ratios(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad ratio `{}`", t.trim())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, CliError> {
        parse_config(text, Path::new("."))
    }

    #[test]
    fn minimal_file_takes_defaults() {
        let cfg = parse("detuning = -100\nkappa = 0.1 # cavity\nvarrho = 0.01\ny = 3\n").unwrap();
        let p = cfg.model_params().unwrap();
        let d = ModelParams::default();
        assert_eq!((p.detuning, p.kappa, p.varrho, p.coupling), (-100.0, 0.1, 0.01, 3.0));
        assert_eq!((p.epsilon, p.cutoff, p.gamma_b), (d.epsilon, d.cutoff, d.gamma_b));
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse("detuning = -100\n\n# comment\nkapa = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        assert!(err.to_string().contains("kapa"));
    }

    #[test]
    fn conflicting_blocks_rejected() {
        let err = parse("detuning = -100\nkappa = 0.1\nvarrho = 0.01\natom_number = 1e5\n").unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("line 4"));
    }

    #[test]
    fn missing_and_malformed_values() {
        assert!(parse("kappa = 0.1\nvarrho = 0.01\n").unwrap_err().to_string().contains("detuning"));
        assert!(parse("detuning = abc\nkappa = 0.1\nvarrho = 0.01\n").unwrap_err().to_string().contains("line 1"));
        assert!(parse("detuning\n").unwrap_err().to_string().contains("line 1"));
        assert!(parse("detuning = 1\ndetuning = 2\n").unwrap_err().to_string().contains("line 2"));
        let both = parse("detuning = -100\nkappa = 0.1\nvarrho = 0.01\ny = 1\ny_over_yc = 0.5\n").unwrap();
        assert!(both.model_params().is_err());
    }

    #[test]
    fn physical_block_derives_varrho() {
        let text = "detuning = -100\nkappa = 0.1\natom_number = 1e5\ntrap_frequency_hz = 142\n\
                    scattering_length_m = 5.29e-9\nwavelength_m = 780e-9\natomic_mass_kg = 1.443e-25\n";
        let cfg = parse(text).unwrap();
        let p = cfg.model_params().unwrap();
        assert!((p.varrho - 1.36e-2).abs() < 0.01e-2, "{}", p.varrho);
        assert!(cfg.recoil_frequency().unwrap() > 2.0e4);
    }

    #[test]
    fn ratios_and_grid() {
        let cfg = parse("detuning = -100\nkappa = 0.1\nvarrho = 0.01\nratios = 0.5, 0.9\nomega_points = 11\n").unwrap();
        assert_eq!(cfg.ratios, Some(vec![0.5, 0.9]));
        assert_eq!(cfg.grid.resolve(0.0, 1.0, 3).unwrap().len(), 11);
        assert!(GridSpec { min: Some(1.0), max: Some(0.0), points: None }.resolve(0.0, 1.0, 5).is_err());
    }
}
