//! Population Markov model over quantized driving states.
//!
//! The model keeps one transition table per regularization level. Level 0
//! uses the base quantization grid; every coarser level multiplies the grid
//! steps by an integer factor. Queries back off from the finest level at
//! which the source state has been observed to coarser ones, which keeps
//! sparse corners of the state space answerable.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::trajectory::{preprocess, PreprocessConfig, PreprocessedPoint, QuantizationConfig};
use crate::{Error, Result, Trajectory};

/// Grid coordinates of a quantized (speed, acceleration, change-of-heading)
/// triple. The numeric value of a coordinate is `coordinate * step`, with the
/// step of whichever level the state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DrivingState {
    pub speed: i32,
    pub accel: i32,
    pub dheading: i32,
}

impl fmt::Display for DrivingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.speed, self.accel, self.dheading)
    }
}

/// Rounds to the nearest integer; exact halves go toward zero.
pub fn round_half_toward_zero(x: f64) -> f64 {
    let t = libm::trunc(x);
    if (x - t).abs() == 0.5 {
        t
    } else {
        libm::round(x)
    }
}

fn div_round_half_toward_zero(n: i64, d: i64) -> i64 {
    debug_assert!(d > 0);
    let q = n / d;
    let r = n % d;
    if 2 * r.abs() > d {
        q + n.signum()
    } else {
        q
    }
}

/// Keeps a change-of-heading grid coordinate inside [-180, 180) degrees.
fn wrap_heading(coord: i64, step: f64) -> i64 {
    let per_turn = 360.0 / step;
    let whole_turn = libm::trunc(per_turn) == per_turn;
    let v = coord as f64 * step;
    if v >= 180.0 {
        if whole_turn {
            coord - per_turn as i64
        } else {
            coord - 1
        }
    } else if v < -180.0 {
        if whole_turn {
            coord + per_turn as i64
        } else {
            coord + 1
        }
    } else {
        coord
    }
}

fn saturate(v: f64) -> i32 {
    v.clamp(i32::MIN as f64, i32::MAX as f64) as i32
}

impl DrivingState {
    /// Quantizes raw values onto `grid`.
    pub fn quantize(speed: f64, accel: f64, dheading: f64, grid: &QuantizationConfig) -> Self {
        let h = round_half_toward_zero(dheading / grid.dheading_step) as i64;
        Self {
            speed: saturate(round_half_toward_zero(speed / grid.speed_step)),
            accel: saturate(round_half_toward_zero(accel / grid.accel_step)),
            dheading: wrap_heading(h, grid.dheading_step) as i32,
        }
    }

    /// Re-quantizes a level-0 state onto a grid `factor` times coarser.
    pub fn coarsen(&self, factor: u32, base: &QuantizationConfig) -> Self {
        if factor == 1 {
            return *self;
        }
        let f = factor as i64;
        let h = div_round_half_toward_zero(self.dheading as i64, f);
        Self {
            speed: div_round_half_toward_zero(self.speed as i64, f) as i32,
            accel: div_round_half_toward_zero(self.accel as i64, f) as i32,
            dheading: wrap_heading(h, base.dheading_step * factor as f64) as i32,
        }
    }

    /// Numeric (km/h, m/s², degrees) triple on `grid`.
    pub fn values(&self, grid: &QuantizationConfig) -> [f64; 3] {
        [
            self.speed as f64 * grid.speed_step,
            self.accel as f64 * grid.accel_step,
            self.dheading as f64 * grid.dheading_step,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub preprocess: PreprocessConfig,
    /// Grid multiplier of each level relative to level 0, finest first.
    /// The first entry must be 1 and each entry must divide the next.
    pub level_multipliers: Vec<u32>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::with_levels(3)
    }
}

impl ModelConfig {
    /// `levels` levels where level `l` multiplies every step by `2^l`.
    pub fn with_levels(levels: u32) -> Self {
        Self {
            preprocess: PreprocessConfig::default(),
            level_multipliers: (0..levels).map(|l| 1u32 << l).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.preprocess.validate()?;
        match self.level_multipliers.first() {
            None => return Err(Error::InvalidConfig("at least one level is required".to_string())),
            Some(&m) if m != 1 => {
                return Err(Error::InvalidConfig(
                    "the finest level must use multiplier 1".to_string(),
                ))
            }
            _ => {}
        }
        for w in self.level_multipliers.windows(2) {
            if w[1] <= w[0] || w[1] % w[0] != 0 {
                return Err(Error::InvalidConfig(format!(
                    "level multiplier {} is not a larger integer multiple of {}",
                    w[1], w[0]
                )));
            }
        }
        Ok(())
    }

    pub fn level_count(&self) -> usize {
        self.level_multipliers.len()
    }

    /// Quantization grid of `level`.
    pub fn grid(&self, level: usize) -> QuantizationConfig {
        self.preprocess.quantization.scaled(self.level_multipliers[level])
    }
}

/// State of a preprocessed point at `level`.
pub fn state_of(point: &PreprocessedPoint, level: usize, cfg: &ModelConfig) -> DrivingState {
    point
        .state
        .coarsen(cfg.level_multipliers[level], &cfg.preprocess.quantization)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub to: DrivingState,
    pub count: u64,
    pub prob: f64,
}

/// Outgoing edges of one source state, sorted by destination.
#[derive(Debug, Clone, PartialEq)]
pub struct Outgoing {
    pub total: u64,
    pub transitions: Vec<Transition>,
}

/// Sparse transition table of one level.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransitionTable {
    outgoing: BTreeMap<DrivingState, Outgoing>,
}

impl TransitionTable {
    fn from_counts(counts: &BTreeMap<DrivingState, BTreeMap<DrivingState, u64>>) -> Self {
        let outgoing = counts
            .iter()
            .filter_map(|(from, dests)| {
                let total: u64 = dests.values().sum();
                if total == 0 {
                    return None;
                }
                let transitions = dests
                    .iter()
                    .filter(|(_, &c)| c > 0)
                    .map(|(&to, &count)| Transition {
                        to,
                        count,
                        prob: count as f64 / total as f64,
                    })
                    .collect();
                Some((*from, Outgoing { total, transitions }))
            })
            .collect();
        Self { outgoing }
    }

    pub fn outgoing(&self, from: &DrivingState) -> Option<&Outgoing> {
        self.outgoing.get(from)
    }

    pub fn probability(&self, from: &DrivingState, to: &DrivingState) -> Option<f64> {
        let out = self.outgoing.get(from)?;
        out.transitions
            .binary_search_by(|t| t.to.cmp(to))
            .ok()
            .map(|i| out.transitions[i].prob)
    }

    /// Source states in ascending order with their edges.
    pub fn iter(&self) -> impl Iterator<Item = (&DrivingState, &Outgoing)> {
        self.outgoing.iter()
    }

    /// Every `(from, to, prob)` triple.
    pub fn pairs(&self) -> impl Iterator<Item = (DrivingState, DrivingState, f64)> + '_ {
        self.outgoing
            .iter()
            .flat_map(|(from, out)| out.transitions.iter().map(move |t| (*from, t.to, t.prob)))
    }

    pub fn source_count(&self) -> usize {
        self.outgoing.len()
    }

    /// Distinct states seen as either source or destination.
    pub fn state_count(&self) -> usize {
        let mut states: Vec<DrivingState> = self.outgoing.keys().copied().collect();
        states.extend(self.pairs().map(|(_, to, _)| to));
        states.sort_unstable();
        states.dedup();
        states.len()
    }

    /// Distinct (from, to) pairs.
    pub fn transition_count(&self) -> usize {
        self.outgoing.values().map(|o| o.transitions.len()).sum()
    }

    /// Observed consecutive-state pairs.
    pub fn observation_count(&self) -> u64 {
        self.outgoing.values().map(|o| o.total).sum()
    }
}

/// Mergeable transition counts; [`TransitionCounts::finish`] normalizes them
/// into a [`MarkovModel`]. Merging is commutative, so corpora can be counted
/// in parallel chunks.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCounts {
    config: ModelConfig,
    levels: Vec<BTreeMap<DrivingState, BTreeMap<DrivingState, u64>>>,
    trajectories: usize,
    skipped: usize,
}

impl TransitionCounts {
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let levels = vec![BTreeMap::new(); config.level_count()];
        Ok(Self {
            config,
            levels,
            trajectories: 0,
            skipped: 0,
        })
    }

    /// Preprocesses and counts one trajectory. Trajectories with fewer than
    /// two clean points are skipped and tallied.
    pub fn add_trajectory(&mut self, traj: &Trajectory) -> Result<()> {
        match preprocess(traj, &self.config.preprocess) {
            Ok(points) => {
                self.add_preprocessed(&points);
                Ok(())
            }
            Err(Error::DegenerateTrajectory { .. }) => {
                self.skipped += 1;
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    pub fn add_preprocessed(&mut self, points: &[PreprocessedPoint]) {
        if points.len() < 2 {
            self.skipped += 1;
            return;
        }
        let base = self.config.preprocess.quantization;
        for (level, table) in self.levels.iter_mut().enumerate() {
            let factor = self.config.level_multipliers[level];
            for w in points.windows(2) {
                let from = w[0].state.coarsen(factor, &base);
                let to = w[1].state.coarsen(factor, &base);
                *table.entry(from).or_default().entry(to).or_insert(0) += 1;
            }
        }
        self.trajectories += 1;
    }

    pub fn merge(&mut self, other: TransitionCounts) -> Result<()> {
        if other.config != self.config {
            return Err(Error::InvalidConfig(
                "cannot merge counts built with different configurations".to_string(),
            ));
        }
        for (mine, theirs) in self.levels.iter_mut().zip(other.levels) {
            for (from, dests) in theirs {
                let row = mine.entry(from).or_default();
                for (to, c) in dests {
                    *row.entry(to).or_insert(0) += c;
                }
            }
        }
        self.trajectories += other.trajectories;
        self.skipped += other.skipped;
        Ok(())
    }

    pub fn finish(self) -> Result<MarkovModel> {
        if self.trajectories == 0 {
            return Err(Error::EmptyCorpus);
        }
        let tables = self.levels.iter().map(TransitionTable::from_counts).collect();
        Ok(MarkovModel {
            config: self.config,
            tables,
            trajectories: self.trajectories,
            skipped: self.skipped,
        })
    }
}

/// The population model: one transition table per level, finest first.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModel {
    config: ModelConfig,
    tables: Vec<TransitionTable>,
    trajectories: usize,
    skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub multiplier: u32,
    pub states: usize,
    pub transitions: usize,
    pub observations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelStats {
    pub trajectories: usize,
    pub skipped_trajectories: usize,
    pub levels: Vec<LevelStats>,
}

/// Answer to a transition query: the level that answered, the source
/// state re-quantized to that level, and its outgoing edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lookup<'a> {
    pub level: usize,
    pub state: DrivingState,
    pub transitions: &'a [Transition],
}

impl MarkovModel {
    /// Rebuilds a model from raw per-level counts, as stored on disk.
    pub fn from_counts(
        config: ModelConfig,
        levels: Vec<BTreeMap<DrivingState, BTreeMap<DrivingState, u64>>>,
        trajectories: usize,
        skipped: usize,
    ) -> Result<Self> {
        config.validate()?;
        if levels.len() != config.level_count() {
            return Err(Error::InvalidModel(format!(
                "{} tables for {} configured levels",
                levels.len(),
                config.level_count()
            )));
        }
        let tables = levels.iter().map(TransitionTable::from_counts).collect();
        Ok(Self {
            config,
            tables,
            trajectories,
            skipped,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn levels(&self) -> &[TransitionTable] {
        &self.tables
    }

    pub fn level(&self, level: usize) -> Option<&TransitionTable> {
        self.tables.get(level)
    }

    pub fn trajectories(&self) -> usize {
        self.trajectories
    }

    pub fn skipped_trajectories(&self) -> usize {
        self.skipped
    }

    pub fn stats(&self) -> ModelStats {
        ModelStats {
            trajectories: self.trajectories,
            skipped_trajectories: self.skipped,
            levels: self
                .tables
                .iter()
                .enumerate()
                .map(|(level, t)| LevelStats {
                    level,
                    multiplier: self.config.level_multipliers[level],
                    states: t.state_count(),
                    transitions: t.transition_count(),
                    observations: t.observation_count(),
                })
                .collect(),
        }
    }

    /// Observation-weighted standard deviation of level-0 source states per
    /// dimension; dimensions without spread report 1.
    pub fn state_spread(&self) -> [f64; 3] {
        let grid = self.config.grid(0);
        let mut n = 0.0;
        let mut sum = [0.0; 3];
        let mut sq = [0.0; 3];
        for (state, out) in self.tables[0].iter() {
            let w = out.total as f64;
            let v = state.values(&grid);
            n += w;
            for d in 0..3 {
                sum[d] += w * v[d];
                sq[d] += w * v[d] * v[d];
            }
        }
        let mut spread = [1.0; 3];
        if n > 0.0 {
            for d in 0..3 {
                let mean = sum[d] / n;
                let var = (sq[d] / n - mean * mean).max(0.0);
                if var > 0.0 {
                    spread[d] = libm::sqrt(var);
                }
            }
        }
        spread
    }

    /// Raw per-level counts, finest first.
    pub fn counts(&self) -> Vec<BTreeMap<DrivingState, BTreeMap<DrivingState, u64>>> {
        self.tables
            .iter()
            .map(|t| {
                t.iter()
                    .map(|(from, out)| {
                        (
                            *from,
                            out.transitions.iter().map(|tr| (tr.to, tr.count)).collect(),
                        )
                    })
                    .collect()
            })
            .collect()
    }
}

/// Counts consecutive state pairs over a corpus and normalizes per source.
pub fn build_model(trajs: &[Trajectory], cfg: &ModelConfig) -> Result<MarkovModel> {
    let mut counts = TransitionCounts::new(cfg.clone())?;
    for t in trajs {
        counts.add_trajectory(t)?;
    }
    counts.finish()
}

/// Outgoing transitions of a level-0 state, backing off to coarser levels
/// until one has seen the (re-quantized) state as a source.
pub fn lookup_transitions(model: &MarkovModel, state: DrivingState) -> Result<Lookup<'_>> {
    let base = model.config.preprocess.quantization;
    for (level, table) in model.tables.iter().enumerate() {
        let s = state.coarsen(model.config.level_multipliers[level], &base);
        if let Some(out) = table.outgoing(&s) {
            if !out.transitions.is_empty() {
                return Ok(Lookup {
                    level,
                    state: s,
                    transitions: &out.transitions,
                });
            }
        }
    }
    Err(Error::UnknownState { state })
}
