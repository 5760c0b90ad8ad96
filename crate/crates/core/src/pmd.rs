//! Probabilistic Movement Dissimilarity (PMD) signal.
//!
//! For every consecutive pair of points `(p_i, p_{i+1})`, the source state
//! `phi` is looked up in the model (with level back-off) and the step value
//! is
//!
//! ```text
//! v = ( sum over r in R(phi) of dist(phi', r) * P(phi -> r) ) / |R(phi)|
//! ```
//!
//! where `phi'` is the state of `p_{i+1}` re-quantized to the level that
//! answered the lookup. The division by `|R|` is part of the definition; the
//! value is not a probability-normalized expectation.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::markov::{lookup_transitions, MarkovModel, Transition};
use crate::trajectory::PreprocessedPoint;
use crate::{Error, Result};

/// What to do when a source state is unknown at every level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownStatePolicy {
    #[default]
    Error,
    /// Emit the running maximum of the signal so far (0 at the start).
    Sentinel,
}

/// Distance between state triples.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Plain Euclidean distance over (km/h, m/s², degrees).
    #[default]
    Raw,
    /// Each dimension divided by a scale first.
    Standardized { scale: [f64; 3] },
}

impl DistanceMode {
    pub fn distance(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        let scale = match self {
            DistanceMode::Raw => [1.0; 3],
            DistanceMode::Standardized { scale } => *scale,
        };
        let mut sum = 0.0;
        for d in 0..3 {
            let x = (a[d] - b[d]) / scale[d];
            sum += x * x;
        }
        libm::sqrt(sum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformConfig {
    pub unknown_state: UnknownStatePolicy,
    pub distance: DistanceMode,
}

/// Where a step value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSource {
    Level(u8),
    Sentinel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmdSignal {
    pub trajectory_id: String,
    /// One value per consecutive point pair.
    pub values: Vec<f64>,
    pub level_trace: Vec<StepSource>,
}

impl PmdSignal {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One step of the transform: the weighted distance sum over `R` divided
/// by `|R|`. `grid_values` maps a state of the answering level to numbers.
pub fn step_value(
    next: [f64; 3],
    transitions: &[Transition],
    grid_values: impl Fn(&Transition) -> [f64; 3],
    distance: &DistanceMode,
) -> f64 {
    if transitions.is_empty() {
        return 0.0;
    }
    let mut v = 0.0;
    for r in transitions {
        v += distance.distance(next, grid_values(r)) * r.prob;
    }
    v / transitions.len() as f64
}

/// Transforms a preprocessed trajectory into its PMD signal.
pub fn transform(
    trajectory_id: &str,
    points: &[PreprocessedPoint],
    model: &MarkovModel,
    cfg: &TransformConfig,
) -> Result<PmdSignal> {
    if points.len() < 2 {
        return Err(Error::DegenerateTrajectory {
            trajectory: trajectory_id.to_string(),
            remaining: points.len(),
        });
    }
    let mcfg = model.config();
    let base = mcfg.preprocess.quantization;
    let mut values = Vec::with_capacity(points.len() - 1);
    let mut trace = Vec::with_capacity(points.len() - 1);
    let mut running_max = 0.0f64;

    for (step, w) in points.windows(2).enumerate() {
        let phi = w[0].state;
        let v = match lookup_transitions(model, phi) {
            Ok(hit) => {
                let grid = mcfg.grid(hit.level);
                let next = w[1]
                    .state
                    .coarsen(mcfg.level_multipliers[hit.level], &base)
                    .values(&grid);
                trace.push(StepSource::Level(hit.level as u8));
                step_value(next, hit.transitions, |r| r.to.values(&grid), &cfg.distance)
            }
            Err(Error::UnknownState { state }) => match cfg.unknown_state {
                UnknownStatePolicy::Error => {
                    return Err(Error::UnknownStateInTrajectory {
                        trajectory: trajectory_id.to_string(),
                        step,
                        state,
                    })
                }
                UnknownStatePolicy::Sentinel => {
                    trace.push(StepSource::Sentinel);
                    running_max
                }
            },
            Err(e) => return Err(e),
        };
        running_max = running_max.max(v);
        values.push(v);
    }

    Ok(PmdSignal {
        trajectory_id: trajectory_id.to_string(),
        values,
        level_trace: trace,
    })
}
