//! Precision/recall of cutting points against annotated boundaries.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::geo::{haversine, LatLng};
use crate::markov::MarkovModel;
use crate::segment::{
    baseline_equal_length, baseline_random, baseline_stable_criteria, segment_trajectory, CutPoint,
    SegmentConfig, StableCriteria,
};
use crate::{Error, Result, Trajectory};

/// Distance thresholds (meters) of the standard evaluation grid.
pub const DEFAULT_THRESHOLDS: [f64; 8] = [0.0, 25.0, 50.0, 75.0, 100.0, 150.0, 200.0, 250.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationRegime {
    Easy,
    Strict,
}

impl AnnotationRegime {
    /// Default segment count for the fixed-count baselines.
    pub fn default_eta(self) -> usize {
        match self {
            AnnotationRegime::Easy => 30,
            AnnotationRegime::Strict => 50,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "easy" => Some(Self::Easy),
            "strict" => Some(Self::Strict),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    /// 1-based point index.
    pub index: usize,
    pub location: LatLng,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub trajectory_id: String,
    pub regime: AnnotationRegime,
    pub annotations: Vec<Annotation>,
}

impl AnnotationSet {
    pub fn new(
        trajectory_id: impl Into<String>,
        regime: AnnotationRegime,
        annotations: Vec<Annotation>,
    ) -> Result<Self> {
        let set = Self {
            trajectory_id: trajectory_id.into(),
            regime,
            annotations,
        };
        if set.annotations.first().is_some_and(|a| a.index == 0)
            || set.annotations.windows(2).any(|w| w[1].index <= w[0].index)
        {
            return Err(Error::InvalidAnnotations(format!(
                "`{}`: indexes must be 1-based and strictly increasing",
                set.trajectory_id
            )));
        }
        Ok(set)
    }

    /// Checks that every index falls inside a trajectory of `n_points`.
    pub fn check_bounds(&self, n_points: usize) -> Result<()> {
        match self.annotations.last() {
            Some(a) if a.index > n_points => Err(Error::InvalidAnnotations(format!(
                "`{}`: index {} exceeds trajectory length {n_points}",
                self.trajectory_id, a.index
            ))),
            _ => Ok(()),
        }
    }

    pub fn locations(&self) -> Vec<LatLng> {
        self.annotations.iter().map(|a| a.location).collect()
    }

    /// Number of annotated segments.
    pub fn segment_count(&self) -> usize {
        self.annotations.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchScore {
    pub precision: f64,
    pub recall: f64,
    /// (cut position, annotation position) pairs, 0-based into the inputs.
    pub matched: Vec<(usize, usize)>,
    pub n_cuts: usize,
    pub n_annotations: usize,
}

impl MatchScore {
    /// Precision was defined as 0 because there were no cuts.
    pub fn no_cuts(&self) -> bool {
        self.n_cuts == 0
    }

    /// Recall was defined as 0 because there were no annotations.
    pub fn no_annotations(&self) -> bool {
        self.n_annotations == 0
    }
}

/// Greedy matching: cuts are taken in order and each claims the nearest
/// unclaimed annotation within `th` meters (ties go to the earlier
/// annotation).
pub fn match_and_score(cuts: &[LatLng], annotations: &[LatLng], th: f64) -> MatchScore {
    let mut taken = vec![false; annotations.len()];
    let mut matched = Vec::new();
    for (ci, &c) in cuts.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (ai, &a) in annotations.iter().enumerate() {
            if taken[ai] {
                continue;
            }
            let d = haversine(c, a);
            if d <= th && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((ai, d));
            }
        }
        if let Some((ai, _)) = best {
            taken[ai] = true;
            matched.push((ci, ai));
        }
    }
    let ratio = |n: usize| if n == 0 { 0.0 } else { matched.len() as f64 / n as f64 };
    MatchScore {
        precision: ratio(cuts.len()),
        recall: ratio(annotations.len()),
        n_cuts: cuts.len(),
        n_annotations: annotations.len(),
        matched,
    }
}

/// Segment count for the fixed-count baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eta {
    /// 30 for easy annotations, 50 for strict.
    Regime,
    /// The annotated segment count of each trajectory.
    TrueCount,
    Fixed(usize),
}

impl Eta {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "regime" => Some(Eta::Regime),
            "true" => Some(Eta::TrueCount),
            n => n.parse().ok().filter(|&n| n > 0).map(Eta::Fixed),
        }
    }

    /// Resolved count, capped at the trajectory length.
    pub fn resolve(self, ants: &AnnotationSet, n_points: usize) -> usize {
        let eta = match self {
            Eta::Regime => ants.regime.default_eta(),
            Eta::TrueCount => ants.segment_count(),
            Eta::Fixed(n) => n,
        };
        eta.min(n_points).max(1)
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eta::Regime => f.write_str("regime"),
            Eta::TrueCount => f.write_str("true"),
            Eta::Fixed(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Algorithm {
    DSegment,
    EqualLength(Eta),
    Random(Eta),
    StableCriteria(StableCriteria),
}

pub const ALGORITHM_NAMES: [&str; 4] = ["dsegment", "equal_length", "random", "stable_criteria"];

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::DSegment => "dsegment",
            Algorithm::EqualLength(_) => "equal_length",
            Algorithm::Random(_) => "random",
            Algorithm::StableCriteria(_) => "stable_criteria",
        }
    }

    /// Parses `name` or `name:eta` where eta is `regime`, `true` or a
    /// positive count (fixed-count baselines only).
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let unknown = || Error::UnknownAlgorithm { name: spec.to_string() };
        let eta = || match arg {
            None => Ok(Eta::Regime),
            Some(a) => Eta::parse(a).ok_or_else(unknown),
        };
        match (name.to_ascii_lowercase().as_str(), arg) {
            ("dsegment", None) => Ok(Algorithm::DSegment),
            ("equal_length", _) => Ok(Algorithm::EqualLength(eta()?)),
            ("random", _) => Ok(Algorithm::Random(eta()?)),
            ("stable_criteria", None) => Ok(Algorithm::StableCriteria(StableCriteria::default())),
            _ => Err(unknown()),
        }
    }

    /// Label used in reports, e.g. `random:true`.
    pub fn label(&self) -> String {
        match self {
            Algorithm::EqualLength(e) | Algorithm::Random(e) if *e != Eta::Regime => {
                format!("{}:{e}", self.name())
            }
            _ => self.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub thresholds: Vec<f64>,
    /// Score the trip end as a cutting point.
    pub include_final_cut: bool,
    /// Run seed; per-trajectory seeds derive from it.
    pub seed: u64,
    pub segment: SegmentConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            include_final_cut: false,
            seed: 0,
            segment: SegmentConfig::default(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thresholds.is_empty() || self.thresholds.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::InvalidConfig(
                "thresholds must be a non-empty list of non-negative meters".to_string(),
            ));
        }
        self.segment.validate()
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for one trajectory, independent of processing order.
pub fn derive_seed(run_seed: u64, trajectory_id: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in trajectory_id.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01B3);
    }
    splitmix64(run_seed ^ splitmix64(h))
}

/// Cutting points an algorithm places on one trajectory.
pub fn algorithm_cuts(
    algo: &Algorithm,
    traj: &Trajectory,
    ants: &AnnotationSet,
    model: Option<&MarkovModel>,
    cfg: &EvalConfig,
) -> Result<Vec<CutPoint>> {
    let n = traj.len();
    let cuts = match algo {
        Algorithm::DSegment => {
            let model = model.ok_or_else(|| {
                Error::InvalidConfig("dsegment needs a Markov model".to_string())
            })?;
            segment_trajectory(traj, model, &cfg.segment)?.cut_points()
        }
        Algorithm::EqualLength(eta) => {
            baseline_equal_length(traj, eta.resolve(ants, n))?.cut_points(traj.points())
        }
        Algorithm::Random(eta) => {
            let seed = derive_seed(cfg.seed, traj.id());
            baseline_random(traj, eta.resolve(ants, n), seed)?.cut_points(traj.points())
        }
        Algorithm::StableCriteria(c) => baseline_stable_criteria(traj, c).cut_points(traj.points()),
    };
    Ok(cuts)
}

/// Scores of one algorithm on one trajectory, one per threshold.
pub fn score_trajectory(
    algo: &Algorithm,
    traj: &Trajectory,
    ants: &AnnotationSet,
    model: Option<&MarkovModel>,
    cfg: &EvalConfig,
) -> Result<Vec<MatchScore>> {
    ants.check_bounds(traj.len())?;
    let cuts: Vec<LatLng> = algorithm_cuts(algo, traj, ants, model, cfg)?
        .into_iter()
        .filter(|c| cfg.include_final_cut || !c.is_final)
        .map(|c| c.location)
        .collect();
    let targets = ants.locations();
    Ok(cfg
        .thresholds
        .iter()
        .map(|&th| match_and_score(&cuts, &targets, th))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold_m: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub algorithm: String,
    pub points: Vec<PrPoint>,
}

impl PrCurve {
    pub fn at(&self, threshold_m: f64) -> Option<&PrPoint> {
        self.points.iter().find(|p| p.threshold_m == threshold_m)
    }
}

/// Unweighted mean over trajectories of per-trajectory precision and
/// recall. `per_trajectory[i][j]` is trajectory `i` at threshold `j`.
pub fn average_curve(algorithm: &str, thresholds: &[f64], per_trajectory: &[Vec<MatchScore>]) -> PrCurve {
    let n = per_trajectory.len().max(1) as f64;
    let points = thresholds
        .iter()
        .enumerate()
        .map(|(j, &th)| {
            let (p, r) = per_trajectory
                .iter()
                .fold((0.0, 0.0), |(p, r), s| (p + s[j].precision, r + s[j].recall));
            PrPoint {
                threshold_m: th,
                precision: p / n,
                recall: r / n,
            }
        })
        .collect();
    PrCurve {
        algorithm: algorithm.to_string(),
        points,
    }
}

/// One curve per algorithm over all (trajectory, annotation) cases.
pub fn evaluate(
    algorithms: &[Algorithm],
    cases: &[(Trajectory, AnnotationSet)],
    model: Option<&MarkovModel>,
    cfg: &EvalConfig,
) -> Result<Vec<PrCurve>> {
    cfg.validate()?;
    algorithms
        .iter()
        .map(|algo| {
            let scores = cases
                .iter()
                .map(|(t, a)| score_trajectory(algo, t, a, model, cfg))
                .collect::<Result<Vec<_>>>()?;
            Ok(average_curve(&algo.label(), &cfg.thresholds, &scores))
        })
        .collect()
}
