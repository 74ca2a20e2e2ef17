//! Run configuration (TOML). Unknown keys are rejected and every dimensional value carries a unit.

use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;
use crate::units::{Capacitance, Frequency, Inductance, Resistance, Temperature, Time};

pub const SCHEMA: &str = "spinbath/1";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub output: Option<OutputBlock>,
    pub transmon: Option<TransmonBlock>,
    pub circuit: Option<CircuitBlock>,
    pub grid: Option<GridBlock>,
    pub drive: Option<DriveBlock>,
    pub budget: Option<BudgetBlock>,
    pub synthesis: Option<SynthesisBlock>,
    pub simulation: Option<SimulationBlock>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: String,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonBlock {
    pub z_j: Resistance,
    pub beta: f64,
    pub delta: Frequency,
    pub c_int: Capacitance,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitBlock {
    pub c_shunt: Capacitance,
    /// Uniform nearest-neighbour ring capacitance.
    pub parasitic: Option<Capacitance>,
    pub ladder: Option<LadderBlock>,
    #[serde(default)]
    pub resonator: Vec<ResonatorBlock>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderBlock {
    pub n: usize,
    pub omega1: Frequency,
    pub span: Frequency,
    pub z_lc: Resistance,
    pub quality: f64,
    pub c_c_max: Capacitance,
    #[serde(default)]
    pub taper: Taper,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Taper {
    #[default]
    Residual,
    ExactZero,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonatorBlock {
    pub inductance: Inductance,
    pub capacitance: Capacitance,
    pub resistance: Resistance,
    pub coupling: Capacitance,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub start: Frequency,
    pub stop: Frequency,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveBlock {
    pub omega1: Frequency,
    pub rabi1: Frequency,
    pub rabi2: Frequency,
    /// Defaults to omega1 - rabi1.
    pub omega2: Option<Frequency>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetBlock {
    #[serde(default = "zero_frequency")]
    pub gamma_internal: Frequency,
    pub alpha_bar_warn: Option<f64>,
    pub p_error_cap: Option<f64>,
    pub occupation_warn: Option<f64>,
}

fn zero_frequency() -> Frequency {
    Frequency(0.0)
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisBlock {
    pub alpha_eff: f64,
    pub omega_c: Frequency,
    #[serde(default = "one")]
    pub exponent: f64,
    pub n: Option<usize>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitState {
    #[default]
    PlusX,
    MinusX,
    Ground,
    Excited,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathState {
    #[default]
    Vacuum,
    Displaced,
    Equilibrated,
    Thermal,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSource {
    #[default]
    Table,
    /// `synthesis_modes.csv` written by `synthesize` into the output directory.
    Synthesis,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationBlock {
    /// Defaults to rabi2/2 from the drive block.
    pub delta_eff: Option<Frequency>,
    #[serde(default)]
    pub qubit: QubitState,
    #[serde(default)]
    pub bath: BathState,
    pub temperature: Option<Temperature>,
    pub displacement: Option<Frequency>,
    pub displacement_time: Option<Time>,
    pub t_final: Time,
    pub points: usize,
    #[serde(default)]
    pub source: ModeSource,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub mode: Vec<ModeBlock>,
}

fn default_n_max() -> usize {
    4
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeBlock {
    /// Effective-frame frequency.
    pub omega: Frequency,
    pub coupling: Frequency,
    #[serde(default = "zero_frequency")]
    pub gamma: Frequency,
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub eps_trunc: Option<f64>,
    pub dim_cap: Option<usize>,
    pub density_dim_cap: Option<usize>,
    pub seed: Option<u64>,
    pub thermal_samples: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::new(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config { key: path, message: e.into_inner().to_string() }
        })?;
        if cfg.schema != SCHEMA {
            return Err(CliError::Config { key: "schema".into(), message: format!("expected '{SCHEMA}', found '{}'", cfg.schema) });
        }
        Ok(cfg)
    }

    /// Reads a TOML config, or the config embedded in a run manifest (JSON).
    pub fn load(path: &Path) -> Result<(Self, String), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let toml_text = if path.extension().is_some_and(|e| e == "json") {
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::Config { key: "manifest".into(), message: e.to_string() })?;
            v.get("config_toml")
                .and_then(|c| c.as_str())
                .ok_or_else(|| CliError::Config { key: "config_toml".into(), message: "manifest has no embedded config".into() })?
                .to_string()
        } else {
            text
        };
        Ok((Self::parse(&toml_text)?, toml_text))
    }

    pub fn require<'a, T>(block: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        block.as_ref().ok_or_else(|| CliError::Config { key: name.into(), message: "block is required by this subcommand".into() })
    }
}
