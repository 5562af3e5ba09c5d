//! Run configuration: a TOML file whose every key has a default.
//!
//! An empty file selects the total-energy optimizer on the NF preset with
//! a 30 s horizon split into 0.1 s slots. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use uavmon::baselines::{BaselineKind, DEFAULT_WAYPOINT};
use uavmon::energy_opt::EnergySettings;
use uavmon::jamming_opt::{NonOutageConfig, TwoLinkParams};
use uavmon::model::{NLoSParams, Point, PresetName, PropulsionParams, Scenario, SolarParams, SystemParams};
use uavmon::{BaselineError, ModelError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("invalid configuration: {0}")]
    Model(#[from] ModelError),
    #[error("invalid configuration: {0}")]
    Baseline(#[from] BaselineError),
}

/// Which pipeline a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Algorithm {
    /// Jamming minimization over trajectory and jamming power.
    Alg1,
    /// [`Algorithm::Alg1`] under the urban channel model.
    Alg1Nlos,
    /// [`Algorithm::Alg1`] monitoring two suspicious links.
    Alg1TwoLink,
    /// [`Algorithm::Alg1`] followed by dropping jamming in the costliest
    /// slots the non-outage requirement allows.
    Alg1NonOutage,
    /// Jamming plus propulsion minimization with solar harvesting.
    #[default]
    Alg2,
    /// A reference scheme; `two-lines` takes its waypoint from the
    /// `[baseline]` section.
    Baseline(BaselineKind),
}

impl Algorithm {
    /// Label written to the `scheme` column of every output.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Alg1 => f.write_str("alg1"),
            Algorithm::Alg1Nlos => f.write_str("alg1-nlos"),
            Algorithm::Alg1TwoLink => f.write_str("alg1-two-link"),
            Algorithm::Alg1NonOutage => f.write_str("alg1-non-outage"),
            Algorithm::Alg2 => f.write_str("alg2"),
            Algorithm::Baseline(kind) => write!(f, "baseline:{}", kind.name()),
        }
    }
}

impl FromStr for Algorithm {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "alg1" => Algorithm::Alg1,
            "alg1-nlos" => Algorithm::Alg1Nlos,
            "alg1-two-link" => Algorithm::Alg1TwoLink,
            "alg1-non-outage" => Algorithm::Alg1NonOutage,
            "alg2" => Algorithm::Alg2,
            other => match other.strip_prefix("baseline:") {
                Some(name) => Algorithm::Baseline(BaselineKind::from_name(name)?),
                None => {
                    return Err(ConfigError::Invalid(format!(
                        "unknown algorithm `{other}`; expected alg1, alg1-nlos, alg1-two-link, \
                         alg1-non-outage, alg2 or baseline:<scheme>"
                    )))
                }
            },
        })
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A preset name or explicit endpoints (m); NF when neither is given.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub preset: Option<PresetName>,
    pub start: Option<Point>,
    pub end: Option<Point>,
}

impl ScenarioConfig {
    pub fn resolve(&self) -> Result<Scenario, ConfigError> {
        match (self.preset, self.start, self.end) {
            (None, None, None) => Ok(Scenario::preset(PresetName::Nf)),
            (Some(p), None, None) => Ok(Scenario::preset(p)),
            (None, Some(start), Some(end)) => Ok(Scenario::new("custom", start, end)),
            _ => Err(ConfigError::Invalid(
                "scenario needs either `preset` or both `start` and `end`".into(),
            )),
        }
    }
}

/// System parameters with the slot length in place of the slot count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub sd_distance: f64,
    pub altitude: f64,
    pub beta0: f64,
    pub noise_psd_dbm_hz: f64,
    pub bandwidth_hz: f64,
    /// Noise power (W) replacing the PSD-times-bandwidth value.
    pub sigma2: Option<f64>,
    pub horizon: f64,
    pub delta: f64,
    pub max_speed: f64,
    pub circuit_power: f64,
    pub usable_fraction: f64,
    pub initial_energy: f64,
    pub source_power: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        Self {
            sd_distance: p.sd_distance,
            altitude: p.altitude,
            beta0: p.beta0,
            noise_psd_dbm_hz: p.noise_psd_dbm_hz,
            bandwidth_hz: p.bandwidth_hz,
            sigma2: p.sigma2_override,
            horizon: p.horizon,
            delta: p.delta(),
            max_speed: p.max_speed,
            circuit_power: p.circuit_power,
            usable_fraction: p.usable_fraction,
            initial_energy: p.initial_energy,
            source_power: p.source_power,
        }
    }
}

impl SystemConfig {
    pub fn params(&self) -> Result<SystemParams, ModelError> {
        let params = SystemParams {
            sd_distance: self.sd_distance,
            altitude: self.altitude,
            beta0: self.beta0,
            noise_psd_dbm_hz: self.noise_psd_dbm_hz,
            bandwidth_hz: self.bandwidth_hz,
            sigma2_override: self.sigma2,
            max_speed: self.max_speed,
            circuit_power: self.circuit_power,
            usable_fraction: self.usable_fraction,
            initial_energy: self.initial_energy,
            source_power: self.source_power,
            ..SystemParams::default()
        }
        .with_timing(self.horizon, self.delta)?;
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// Waypoint of the two-line scheme (m).
    pub waypoint: Point,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            waypoint: DEFAULT_WAYPOINT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Seeds the Rayleigh draws of the urban channel model.
    pub seed: u64,
    /// Where artifacts are written; `UAVMON_OUTPUT_DIR` takes precedence.
    pub output_dir: Option<PathBuf>,
    pub scenario: ScenarioConfig,
    pub system: SystemConfig,
    pub propulsion: PropulsionParams,
    pub solar: SolarParams,
    pub nlos: Option<NLoSParams>,
    pub two_link: Option<TwoLinkParams>,
    pub non_outage: Option<NonOutageConfig>,
    pub baseline: BaselineConfig,
    pub optimizer: EnergySettings,
}

/// Environment variable overriding the output directory of every run.
pub const OUTPUT_DIR_ENV: &str = "UAVMON_OUTPUT_DIR";

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable in TOML")
    }

    /// Re-checks every section and that the selected algorithm has the
    /// sections it needs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let params = self.system.params()?;
        let scenario = self.scenario.resolve()?;
        scenario.check_feasible(&params)?;
        self.propulsion.validate()?;
        self.solar.validate()?;
        if let Some(np) = &self.nlos {
            np.validate()?;
        }
        if let Some(no) = &self.non_outage {
            no.validate()?;
        }
        if let Some(tl) = &self.two_link {
            if !tl.s2.is_finite() {
                return Err(ConfigError::Invalid("two_link.s2 must be finite".into()));
            }
        }
        self.optimizer
            .ao
            .solver
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.optimizer.ao.max_iterations == 0
            || self.optimizer.ao.relative_tolerance.is_nan()
            || self.optimizer.ao.relative_tolerance <= 0.0
        {
            return Err(ConfigError::Invalid(
                "optimizer needs a positive iteration cap and relative tolerance".into(),
            ));
        }
        let missing = |section: &str| {
            Err(ConfigError::Invalid(format!(
                "algorithm `{}` needs a [{section}] section",
                self.algorithm
            )))
        };
        match self.algorithm {
            Algorithm::Alg1Nlos if self.nlos.is_none() => missing("nlos"),
            Algorithm::Alg1TwoLink if self.two_link.is_none() => missing("two_link"),
            Algorithm::Alg1NonOutage if self.non_outage.is_none() => missing("non_outage"),
            _ => Ok(()),
        }
    }

    pub fn params(&self) -> Result<SystemParams, ConfigError> {
        Ok(self.system.params()?)
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        self.scenario.resolve()
    }

    /// The selected baseline with the configured two-line waypoint.
    pub fn baseline_kind(&self) -> Option<BaselineKind> {
        match self.algorithm {
            Algorithm::Baseline(BaselineKind::TwoLines { .. }) => Some(BaselineKind::TwoLines {
                waypoint: self.baseline.waypoint,
            }),
            Algorithm::Baseline(kind) => Some(kind),
            _ => None,
        }
    }

    /// Output directory after the environment override, defaulting to
    /// `output`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("output"))
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RunConfig::from_toml(&text, path)
}
