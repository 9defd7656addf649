//! TOML scenario files.
//!
//! ```toml
//! [domain]
//! x = [-1.0, 1.0]
//! y = [-1.0, 1.0]
//!
//! [mesh]
//! nx = 32
//! ny = 32
//!
//! [time]
//! final_time = 0.03
//! steps = 60
//!
//! [scheme]
//! kind = "gc3"
//!
//! [coefficient]
//! kind = "jump"
//! threshold = 0.2
//! below = 1.0
//! above = 9.0
//!
//! [initial]
//! kind = "gaussian-bump"
//!
//! [forcing]
//! kind = "zero"
//!
//! [sensor]
//! center = [0.75, 0.0]
//! half_width = 0.03125
//!
//! [output]
//! snapshots = [0.0, 0.01]
//! ```
//!
//! Analytic data come from a fixed registry so that every derivative the
//! solver needs is exact.

use std::path::{Path, PathBuf};

use biharmonic_core::bfs::CoefficientField;
use biharmonic_core::cases::{BumpScenario, DampedGaussian, ProductField, SinSquaredCase};
use biharmonic_core::mesh::{Rect, TensorMesh};
use biharmonic_core::sensor::SensorRegion;
use biharmonic_core::time::{DataSlope, Forcing, InitialData, SchemeKind, TimePartition, ZeroForcing};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub domain: DomainConfig,
    pub mesh: MeshConfig,
    pub time: TimeConfig,
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub coefficient: CoefficientConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub forcing: ForcingConfig,
    pub sensor: Option<SensorConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub nx: usize,
    pub ny: usize,
}

/// Exactly one of `steps` and `step` must be given.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub final_time: f64,
    pub steps: Option<usize>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    #[serde(deserialize_with = "scheme_kind")]
    pub kind: SchemeKind,
    #[serde(default)]
    pub initial_slope: SlopeConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeConfig {
    #[default]
    Interpolated,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientConfig {
    Constant { value: f64 },
    /// `below` for `y < threshold`, `above` otherwise.
    Jump { threshold: f64, below: f64, above: f64 },
}

impl Default for CoefficientConfig {
    fn default() -> Self {
        CoefficientConfig::Constant { value: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    #[default]
    Zero,
    /// `amplitude · p(x) p(y)`, `p(s) = e^{-α (s - s₀)²} (1 - s²)²`, at rest.
    GaussianBump {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// Initial data of the manufactured solution `sin(2πt) sin²(πx) sin²(πy)`.
    Fct2,
}

fn default_amplitude() -> f64 {
    0.2
}

fn default_alpha() -> f64 {
    100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ForcingConfig {
    #[default]
    Zero,
    Fct2,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfig {
    pub center: [f64; 2],
    pub half_width: f64,
    /// Evaluations per interval; values above 1 add interior samples.
    #[serde(default = "one")]
    pub samples_per_step: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_sensor_file")]
    pub sensor: PathBuf,
    #[serde(default = "default_report_file")]
    pub report: PathBuf,
    /// Snapshot `k` goes to `<prefix>_<k>.txt`.
    #[serde(default = "default_prefix")]
    pub snapshot_prefix: String,
    #[serde(default)]
    pub snapshots: Vec<f64>,
}

fn default_sensor_file() -> PathBuf {
    "sensor.csv".into()
}

fn default_report_file() -> PathBuf {
    "report.txt".into()
}

fn default_prefix() -> String {
    "snapshot".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            sensor: default_sensor_file(),
            report: default_report_file(),
            snapshot_prefix: default_prefix(),
            snapshots: Vec::new(),
        }
    }
}

fn scheme_kind<'de, D: serde::Deserializer<'de>>(d: D) -> Result<SchemeKind, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Parses and validates; errors carry the offending field.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: &str| Err(CliError::Input(msg.to_string()));
        let [x0, x1] = self.domain.x;
        let [y0, y1] = self.domain.y;
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return bad("domain: bounds must be finite and increasing");
        }
        if self.mesh.nx == 0 || self.mesh.ny == 0 {
            return bad("mesh: nx and ny must be positive");
        }
        let t = &self.time;
        if !(t.final_time > 0.0 && t.final_time.is_finite()) {
            return bad("time.final_time must be positive");
        }
        match (t.steps, t.step) {
            (Some(0), _) => return bad("time.steps must be positive"),
            (Some(_), None) => {}
            (None, Some(tau)) => {
                let n = t.final_time / tau;
                if !(tau > 0.0) || (n - n.round()).abs() > 1e-9 * n.max(1.0) {
                    return bad("time.step must divide time.final_time");
                }
            }
            _ => return bad("time: give exactly one of steps and step"),
        }
        match self.coefficient {
            CoefficientConfig::Constant { value } if !(value > 0.0) => return bad("coefficient.value must be positive"),
            CoefficientConfig::Jump { below, above, .. } if !(below > 0.0 && above > 0.0) => {
                return bad("coefficient: below and above must be positive")
            }
            _ => {}
        }
        if let Some(s) = &self.sensor {
            if s.samples_per_step == 0 {
                return bad("sensor.samples_per_step must be positive");
            }
            let r = self.sensor_region().expect("sensor present").rect();
            if !(s.half_width > 0.0) || !self.rect().contains(&r) {
                return bad("sensor: region must have positive size and lie inside the domain");
            }
        }
        if self.output.snapshots.iter().any(|&s| !(s >= 0.0 && s <= t.final_time)) {
            return bad("output.snapshots must lie in [0, final_time]");
        }
        Ok(())
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.domain.x[0], self.domain.x[1], self.domain.y[0], self.domain.y[1])
    }

    pub fn mesh(&self) -> Result<TensorMesh, CliError> {
        Ok(TensorMesh::new(self.rect(), self.mesh.nx, self.mesh.ny)?)
    }

    pub fn partition(&self) -> Result<TimePartition, CliError> {
        let t = &self.time;
        let steps = t.steps.unwrap_or_else(|| (t.final_time / t.step.unwrap_or(t.final_time)).round() as usize);
        Ok(TimePartition::uniform(t.final_time, steps)?)
    }

    pub fn coefficient_field(&self) -> CoefficientField {
        match self.coefficient {
            CoefficientConfig::Constant { value } => CoefficientField::Constant(value),
            CoefficientConfig::Jump { threshold, below, above } => CoefficientField::jump_in_y(threshold, below, above),
        }
    }

    pub fn slope(&self) -> DataSlope {
        match self.scheme.initial_slope {
            SlopeConfig::Interpolated => DataSlope::Interpolated,
            SlopeConfig::Discrete => DataSlope::Discrete,
        }
    }

    pub fn sensor_region(&self) -> Option<SensorRegion> {
        self.sensor.as_ref().map(|s| SensorRegion::centered(s.center[0], s.center[1], s.half_width))
    }

    pub fn initial_data(&self) -> Box<dyn InitialData> {
        match self.initial {
            InitialConfig::Zero => Box::new(ZeroData),
            InitialConfig::GaussianBump { amplitude, alpha, center } => Box::new(BumpScenario {
                domain: self.rect(),
                final_time: self.time.final_time,
                displacement: ProductField {
                    amplitude,
                    px: DampedGaussian { center: center[0], alpha },
                    qy: DampedGaussian { center: center[1], alpha },
                },
                coefficient: self.coefficient_field(),
                sensor: self.sensor_region().unwrap_or_else(|| SensorRegion::centered(0.75, 0.0, 1.0 / 32.0)),
            }),
            InitialConfig::Fct2 => Box::new(SinSquaredCase::default()),
        }
    }

    pub fn forcing(&self) -> Box<dyn Forcing> {
        match self.forcing {
            ForcingConfig::Zero => Box::new(ZeroForcing),
            ForcingConfig::Fct2 => Box::new(SinSquaredCase::default()),
        }
    }
}

struct ZeroData;

impl InitialData for ZeroData {
    fn displacement(&self, _: f64, _: f64) -> [f64; 4] {
        [0.0; 4]
    }

    fn velocity(&self, _: f64, _: f64) -> [f64; 4] {
        [0.0; 4]
    }

    fn acceleration(&self, _: f64, _: f64) -> [f64; 4] {
        [0.0; 4]
    }
}
