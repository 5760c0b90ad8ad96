//! Run configuration: TOML file, flag overrides, and the echo embedded in
//! every output.

use std::path::Path;

use drivecontext_core::context::CorrelationConfig;
use drivecontext_core::eval::{AnnotationRegime, ALGORITHM_NAMES, DEFAULT_THRESHOLDS};
use drivecontext_core::events::CongestionConfig;
use drivecontext_core::markov::ModelConfig;
use drivecontext_core::segment::SegmentConfig;
use drivecontext_core::synth::{EventSynthSpec, SynthSpec};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::ColumnMap;
use crate::tz::Zone;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub algorithms: Vec<String>,
    pub regime: AnnotationRegime,
    pub thresholds: Vec<f64>,
    pub include_final_cut: bool,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        Self {
            algorithms: ALGORITHM_NAMES.iter().map(|s| s.to_string()).collect(),
            regime: AnnotationRegime::Easy,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            include_final_cut: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub trajectories: usize,
    pub spec: SynthSpec,
    pub events: EventSynthSpec,
}

impl Default for SynthSection {
    fn default() -> Self {
        Self {
            trajectories: 100,
            spec: SynthSpec::default(),
            events: EventSynthSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Every random choice derives from this seed.
    pub seed: u64,
    /// IANA name, `UTC` or `+HH:MM`; needed for context and congestion
    /// time keys.
    pub timezone: Option<String>,
    pub columns: ColumnMap,
    pub model: ModelConfig,
    pub segment: SegmentConfig,
    pub congestion: CongestionConfig,
    pub describe: CorrelationConfig,
    pub evaluate: EvaluateSection,
    pub synth: SynthSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn zone(&self) -> Result<Option<Zone>> {
        self.timezone
            .as_deref()
            .map(|s| s.parse::<Zone>().map_err(Error::Config))
            .transpose()
    }

    /// The timezone, which is mandatory for time-keyed analysis.
    pub fn required_zone(&self) -> Result<Zone> {
        self.zone()?.ok_or_else(|| {
            Error::Config("a timezone is required: set `timezone` in the config or pass --timezone".into())
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.segment.validate()?;
        self.describe.validate()?;
        let c = &self.congestion;
        if !(c.radius_m.is_finite() && c.radius_m > 0.0 && c.max_speed_kmh > 0.0) {
            return Err(Error::Config("congestion radius and speed must be positive".into()));
        }
        if c.min_run == 0 || c.min_support == 0 {
            return Err(Error::Config("congestion min_run and min_support must be positive".into()));
        }
        if self.evaluate.thresholds.is_empty()
            || self.evaluate.thresholds.iter().any(|t| !(t.is_finite() && *t >= 0.0))
        {
            return Err(Error::Config("evaluation thresholds must be non-negative meters".into()));
        }
        self.synth.spec.validate()?;
        self.zone()?;
        Ok(())
    }

    /// Compact JSON of the resolved configuration.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("configuration serializes")
    }

    /// Comment lines for CSV outputs: tool, command, configuration.
    pub fn echo_lines(&self, command: &str) -> Vec<String> {
        vec![
            format!("drivecontext {} {command}", env!("CARGO_PKG_VERSION")),
            format!("config {}", self.to_json()),
        ]
    }
}
