//! Scenario configuration files (TOML).
//!
//! Physics parameters have no defaults. The grid, witness selection,
//! sample counts and output paths do:
//!
//! | key | default |
//! |-----|---------|
//! | `grid.t_max` | 5.0 |
//! | `grid.points` | 501 |
//! | `witnesses.select` | every deterministic witness |
//! | `witnesses.blp_orders` | `[1]` |
//! | `witnesses.blp_samples` | 200 |
//! | `witnesses.hs_samples` | 100 |
//! | `output.csv` | `<name>.csv` |
//! | `output.report` | `<name>.json` |
//! | `output.plot_columns` | `["f", "vol"]` |

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Required when a sampled witness (`blp`, `hs_norm`) is selected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub witnesses: WitnessConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    DephasingQubit,
    DephasingWeyl,
    DephasingGellmann,
    PerfectDecoherence,
    Pauli,
    Weyl,
    GeneralizedPauli,
    AmplitudeDamping,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 8] = [
        FamilyTag::DephasingQubit,
        FamilyTag::DephasingWeyl,
        FamilyTag::DephasingGellmann,
        FamilyTag::PerfectDecoherence,
        FamilyTag::Pauli,
        FamilyTag::Weyl,
        FamilyTag::GeneralizedPauli,
        FamilyTag::AmplitudeDamping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::DephasingQubit => "dephasing_qubit",
            FamilyTag::DephasingWeyl => "dephasing_weyl",
            FamilyTag::DephasingGellmann => "dephasing_gellmann",
            FamilyTag::PerfectDecoherence => "perfect_decoherence",
            FamilyTag::Pauli => "pauli",
            FamilyTag::Weyl => "weyl",
            FamilyTag::GeneralizedPauli => "generalized_pauli",
            FamilyTag::AmplitudeDamping => "amplitude_damping",
        }
    }

    /// Number of rates for dimension `d`, or `None` if the family takes no rates.
    pub fn rate_count(self, d: usize) -> Option<usize> {
        match self {
            FamilyTag::DephasingQubit => Some(1),
            FamilyTag::DephasingWeyl | FamilyTag::DephasingGellmann => Some(d.saturating_sub(1)),
            FamilyTag::Pauli => Some(3),
            FamilyTag::Weyl => Some(d * d - 1),
            FamilyTag::GeneralizedPauli => Some(d + 1),
            FamilyTag::PerfectDecoherence | FamilyTag::AmplitudeDamping => None,
        }
    }

    fn fixed_dim(self) -> Option<usize> {
        match self {
            FamilyTag::DephasingQubit | FamilyTag::Pauli | FamilyTag::AmplitudeDamping => Some(2),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagation {
    /// Commutative route for generator families, sampled maps otherwise.
    #[default]
    Auto,
    Commutative,
    Ode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: FamilyTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<RateSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<EnvironmentConfig>,
    #[serde(default)]
    pub propagation: Propagation,
}

/// A rate `γ(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RateSpec {
    Constant(f64),
    /// `amplitude · sin(frequency · t + phase)`.
    Sine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amplitude · tanh(scale · t)`.
    Tanh { amplitude: f64, scale: f64 },
    /// `amplitude · exp(-decay · t)`.
    Exponential { amplitude: f64, decay: f64 },
    /// Two-column CSV `t,value` with a header row, linearly interpolated.
    /// Relative paths resolve against the config file's directory.
    Csv(PathBuf),
    Sum(Vec<RateSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub gamma_m: f64,
    pub lambda: f64,
    #[serde(default)]
    pub omega_c: f64,
    #[serde(default)]
    pub detuning: f64,
}

/// Matrix entry: a real number or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

pub type MatrixSpec = Vec<Vec<Entry>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    /// System energies `ε_k`; their count is the system dimension.
    pub eps: Vec<f64>,
    pub h_b: MatrixSpec,
    /// One coupling operator `B_k` per system level.
    pub couplings: Vec<MatrixSpec>,
    pub rho_b: MatrixSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_t_max() -> f64 {
    5.0
}

fn default_points() -> usize {
    501
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { t_max: default_t_max(), points: default_points() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessName {
    Volume,
    EigenModuli,
    FMonotone,
    EwFunctional,
    HsNorm,
    BodyContainment,
    CpDivisibility,
    Blp,
}

impl WitnessName {
    pub fn is_sampled(self) -> bool {
        matches!(self, WitnessName::HsNorm | WitnessName::Blp)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    #[serde(default = "default_selection")]
    pub select: Vec<WitnessName>,
    #[serde(default = "default_blp_orders")]
    pub blp_orders: Vec<usize>,
    #[serde(default = "default_blp_samples")]
    pub blp_samples: usize,
    #[serde(default = "default_hs_samples")]
    pub hs_samples: usize,
}

fn default_selection() -> Vec<WitnessName> {
    vec![
        WitnessName::Volume,
        WitnessName::EigenModuli,
        WitnessName::FMonotone,
        WitnessName::EwFunctional,
        WitnessName::BodyContainment,
        WitnessName::CpDivisibility,
    ]
}

fn default_blp_orders() -> Vec<usize> {
    vec![1]
}

fn default_blp_samples() -> usize {
    200
}

fn default_hs_samples() -> usize {
    100
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            select: default_selection(),
            blp_orders: default_blp_orders(),
            blp_samples: default_blp_samples(),
            hs_samples: default_hs_samples(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
    #[serde(default = "default_plot_columns")]
    pub plot_columns: Vec<String>,
}

fn default_plot_columns() -> Vec<String> {
    vec!["f".to_string(), "vol".to_string()]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { csv: None, report: None, plot: None, plot_columns: default_plot_columns() }
    }
}

/// A validated configuration and the directory its relative inputs resolve against.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let value = read_value(path)?;
        Scenario::from_value(value, base_dir_of(path))
    }

    pub fn from_value(value: toml::Value, base_dir: PathBuf) -> CliResult<Self> {
        let config: ScenarioConfig = value.try_into().map_err(|e: toml::de::Error| CliError::config(e.to_string()))?;
        config.validate()?;
        Ok(Scenario { config, base_dir })
    }

    pub fn resolve_input(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

pub fn base_dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Parses a config file into a TOML tree without validating it.
pub fn read_value(path: &Path) -> CliResult<toml::Value> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::config(e.to_string()))?;
    Ok(toml::Value::Table(table))
}

impl ScenarioConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.name.trim().is_empty() {
            return Err(CliError::config("name must not be empty"));
        }
        if self.grid.points == 0 {
            return Err(CliError::config("grid is empty"));
        }
        if self.grid.points < 3 {
            return Err(CliError::config("grid needs at least 3 points"));
        }
        if !(self.grid.t_max.is_finite() && self.grid.t_max > 0.0) {
            return Err(CliError::config("grid.t_max must be positive"));
        }
        let w = &self.witnesses;
        if w.select.iter().any(|n| n.is_sampled()) && self.seed.is_none() {
            return Err(CliError::config("seed is required when blp or hs_norm is selected"));
        }
        if w.select.contains(&WitnessName::Blp) {
            if w.blp_orders.is_empty() || w.blp_samples == 0 {
                return Err(CliError::config("blp needs at least one order and one sample"));
            }
            let d = self.model.dimension()?;
            if let Some(&k) = w.blp_orders.iter().find(|&&k| k == 0 || k > d) {
                return Err(CliError::config(format!("blp order {k} outside 1..={d}")));
            }
        }
        if w.select.contains(&WitnessName::HsNorm) && w.hs_samples == 0 {
            return Err(CliError::config("hs_samples must be positive"));
        }
        if self.output.plot.is_some() && self.output.plot_columns.is_empty() {
            return Err(CliError::config("plot_columns must not be empty"));
        }
        self.model.validate()
    }
}

impl ModelConfig {
    /// System dimension implied by the model section.
    pub fn dimension(&self) -> CliResult<usize> {
        if let Some(d) = self.family.fixed_dim() {
            return Ok(d);
        }
        if self.family == FamilyTag::PerfectDecoherence {
            return self
                .environment
                .as_ref()
                .map(|e| e.eps.len())
                .ok_or_else(|| CliError::config("perfect_decoherence requires [model.environment]"));
        }
        self.dim.ok_or_else(|| CliError::config(format!("{} requires model.dim", self.family.name())))
    }

    fn validate(&self) -> CliResult<()> {
        let family = self.family.name();
        let d = self.dimension()?;
        if let Some(given) = self.dim {
            if given != d {
                return Err(CliError::config(format!("{family}: dim {given} does not match {d}")));
            }
        }
        if d < 2 {
            return Err(CliError::config(format!("{family}: dimension must be at least 2")));
        }
        match self.family.rate_count(d) {
            Some(n) => {
                let rates = self.rates.as_ref().ok_or_else(|| CliError::config(format!("{family} requires model.rates")))?;
                if rates.len() != n {
                    return Err(CliError::config(format!("{family} with d = {d} takes {n} rates, found {}", rates.len())));
                }
                rates.iter().try_for_each(RateSpec::validate)?;
            }
            None if self.rates.is_some() => {
                return Err(CliError::config(format!("{family} takes no model.rates")));
            }
            None => {}
        }
        let wants_bath = self.family == FamilyTag::AmplitudeDamping;
        match (&self.bath, wants_bath) {
            (None, true) => return Err(CliError::config("amplitude_damping requires [model.bath]")),
            (Some(_), false) => return Err(CliError::config(format!("{family} takes no model.bath"))),
            (Some(b), true) if !(b.gamma_m >= 0.0 && b.lambda > 0.0) => {
                return Err(CliError::config("bath needs gamma_m >= 0 and lambda > 0"));
            }
            _ => {}
        }
        let wants_env = self.family == FamilyTag::PerfectDecoherence;
        if self.environment.is_some() && !wants_env {
            return Err(CliError::config(format!("{family} takes no model.environment")));
        }
        if wants_env && self.propagation != Propagation::Auto {
            return Err(CliError::config("perfect_decoherence has no generator; use propagation = \"auto\""));
        }
        if self.family == FamilyTag::GeneralizedPauli && !is_prime(d) {
            return Err(CliError::config("generalized_pauli needs a prime dimension"));
        }
        Ok(())
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

impl RateSpec {
    fn validate(&self) -> CliResult<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let ok = match self {
            RateSpec::Constant(c) => c.is_finite(),
            RateSpec::Sine { amplitude, frequency, phase } => finite(&[*amplitude, *frequency, *phase]),
            RateSpec::Tanh { amplitude, scale } => finite(&[*amplitude, *scale]),
            RateSpec::Exponential { amplitude, decay } => finite(&[*amplitude, *decay]),
            RateSpec::Csv(_) => true,
            RateSpec::Sum(parts) => {
                parts.iter().try_for_each(RateSpec::validate)?;
                !parts.is_empty()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::config(format!("invalid rate {self:?}")))
        }
    }
}

/// Looks up a dotted path (`model.bath.gamma_m`); numeric segments index arrays.
pub fn get_path<'a>(root: &'a toml::Value, path: &str) -> CliResult<&'a toml::Value> {
    let not_found = || CliError::config(format!("parameter path not found: {path}"));
    let mut cur = root;
    for seg in path.split('.') {
        cur = match cur {
            toml::Value::Table(t) => t.get(seg).ok_or_else(not_found)?,
            toml::Value::Array(a) => a.get(seg.parse::<usize>().map_err(|_| not_found())?).ok_or_else(not_found)?,
            _ => return Err(not_found()),
        };
    }
    Ok(cur)
}

/// Replaces the value at a dotted path (`model.rates.2.tanh.amplitude`);
/// numeric segments index arrays. The path must already exist.
pub fn set_path(root: &mut toml::Value, path: &str, value: toml::Value) -> CliResult<()> {
    let not_found = || CliError::config(format!("parameter path not found: {path}"));
    let mut cur = root;
    for seg in path.split('.') {
        cur = match cur {
            toml::Value::Table(t) => t.get_mut(seg).ok_or_else(not_found)?,
            toml::Value::Array(a) => {
                let i: usize = seg.parse().map_err(|_| not_found())?;
                a.get_mut(i).ok_or_else(not_found)?
            }
            _ => return Err(not_found()),
        };
    }
    *cur = value;
    Ok(())
}

/// Parses a sweep value: integer, float, boolean, otherwise string.
pub fn parse_scalar(s: &str) -> toml::Value {
    let s = s.trim();
    if let Ok(i) = s.parse::<i64>() {
        toml::Value::Integer(i)
    } else if let Ok(f) = s.parse::<f64>() {
        toml::Value::Float(f)
    } else if let Ok(b) = s.parse::<bool>() {
        toml::Value::Boolean(b)
    } else {
        toml::Value::String(s.to_string())
    }
}
