//! Optimal piecewise-constant segmentation of PMD signals, segment-count
//! selection, and the comparison baselines.
//!
//! Index conventions: a signal of a trajectory with `n` points has `n - 1`
//! values, value `j` (0-based) belonging to the step from point `j` to point
//! `j + 1`. A signal segment ending after `e` values maps to cutting index
//! `e + 1`. Cutting indexes are 1-based point positions, and the last one is
//! always `n`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geo::{rem_euclid, LatLng};
use crate::markov::MarkovModel;
use crate::pmd::{transform, PmdSignal, TransformConfig};
use crate::trajectory::{preprocess, PreprocessedPoint, TrajectoryPoint};
use crate::{Error, Result, Trajectory};

/// Ordered cutting indexes of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    pub trajectory_id: String,
    /// Strictly increasing 1-based point indexes; the last equals the
    /// trajectory length.
    pub cutting_indexes: Vec<usize>,
    /// Objective value for segmentations produced by the dynamic program.
    pub total_cost: Option<f64>,
}

/// A cutting point located in space and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutPoint {
    /// 1-based point index.
    pub index: usize,
    pub location: LatLng,
    pub t: f64,
    /// The trip end `I_k = |T|`.
    pub is_final: bool,
}

impl Segmentation {
    pub fn k(&self) -> usize {
        self.cutting_indexes.len()
    }

    /// Point lengths of the segments.
    pub fn segment_lengths(&self) -> Vec<usize> {
        let mut prev = 0;
        self.cutting_indexes
            .iter()
            .map(|&c| {
                let len = c - prev;
                prev = c;
                len
            })
            .collect()
    }

    /// Checks ordering, the final index, and (when `min_len` is given) the
    /// minimum segment length.
    pub fn validate(&self, n_points: usize, min_len: Option<usize>) -> Result<()> {
        let bad = |msg: &str| {
            Err(Error::InvalidConfig(alloc::format!(
                "segmentation of `{}`: {msg}",
                self.trajectory_id
            )))
        };
        if self.cutting_indexes.last() != Some(&n_points) {
            return bad("last cutting index must equal the trajectory length");
        }
        if self.cutting_indexes[0] == 0
            || self.cutting_indexes.windows(2).any(|w| w[1] <= w[0])
        {
            return bad("cutting indexes must be strictly increasing and 1-based");
        }
        if let Some(m) = min_len {
            if n_points >= m && self.segment_lengths().iter().any(|&l| l < m) {
                return bad("segment shorter than the minimum length");
            }
        }
        Ok(())
    }

    pub fn cut_points(&self, points: &[TrajectoryPoint]) -> Vec<CutPoint> {
        let n = points.len();
        self.cutting_indexes
            .iter()
            .filter(|&&i| i >= 1 && i <= n)
            .map(|&i| {
                let p = &points[i - 1];
                CutPoint {
                    index: i,
                    location: p.location(),
                    t: p.t,
                    is_final: i == n,
                }
            })
            .collect()
    }
}

/// Sum of squared deviations from the mean, accumulated with Welford's
/// update so that constant runs cost exactly zero.
pub fn sse(values: &[f64]) -> f64 {
    let mut n = 0.0;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for &x in values {
        n += 1.0;
        let delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
    }
    m2
}

/// Objective of a partition given by exclusive segment ends, summed
/// segment by segment from the left.
pub fn partition_cost(values: &[f64], ends: &[usize]) -> f64 {
    let mut start = 0;
    let mut total = 0.0;
    for &e in ends {
        total += sse(&values[start..e]);
        start = e;
    }
    total
}

/// A partition of a signal into contiguous segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Exclusive segment ends; the last equals the signal length.
    pub ends: Vec<usize>,
    pub cost: f64,
}

/// Suffix dynamic program: `best[j][t]` is the least cost of splitting
/// `values[t..]` into `j` segments of at least `min_len` values.
///
/// Segment costs come from Welford updates while a segment grows to the
/// right, so constant runs cost exactly zero. Candidate ends are tried in
/// increasing order with a strict improvement test, and the partition is
/// rebuilt from the left; among equal-cost partitions the one with the
/// lexicographically smallest ends wins.
struct SuffixDp {
    len: usize,
    k_max: usize,
    best: Vec<f64>,
    next: Vec<u32>,
}

impl SuffixDp {
    fn solve(values: &[f64], k_max: usize, min_len: usize) -> Self {
        let len = values.len();
        let width = len + 1;
        let mut best = vec![f64::INFINITY; (k_max + 1) * width];
        let mut next = vec![u32::MAX; (k_max + 1) * width];
        best[len] = 0.0;

        for t in (0..len).rev() {
            let j_cap = k_max.min((len - t) / min_len);
            if j_cap == 0 {
                continue;
            }
            let mut n = 0.0;
            let mut mean = 0.0;
            let mut m2 = 0.0;
            for e in (t + 1)..=len {
                let x = values[e - 1];
                n += 1.0;
                let delta = x - mean;
                mean += delta / n;
                m2 += delta * (x - mean);
                if e - t < min_len {
                    continue;
                }
                for j in 1..=j_cap {
                    let rest = best[(j - 1) * width + e];
                    if rest == f64::INFINITY {
                        continue;
                    }
                    let cand = m2 + rest;
                    let slot = j * width + t;
                    if cand < best[slot] {
                        best[slot] = cand;
                        next[slot] = e as u32;
                    }
                }
            }
        }
        Self {
            len,
            k_max,
            best,
            next,
        }
    }

    fn cost(&self, k: usize) -> f64 {
        self.best[k * (self.len + 1)]
    }

    /// Optimal costs for k = 1..=k_max, infinite where infeasible.
    fn costs(&self) -> Vec<f64> {
        (1..=self.k_max).map(|k| self.cost(k)).collect()
    }

    fn ends(&self, k: usize) -> Option<Vec<usize>> {
        if k == 0 || k > self.k_max || !self.cost(k).is_finite() {
            return None;
        }
        let width = self.len + 1;
        let mut ends = Vec::with_capacity(k);
        let mut t = 0;
        for j in (1..=k).rev() {
            let e = self.next[j * width + t] as usize;
            ends.push(e);
            t = e;
        }
        Some(ends)
    }
}

fn check_feasible(len: usize, k: usize, min_len: usize) -> Result<()> {
    if k == 0 || min_len == 0 || k * min_len > len {
        return Err(Error::Infeasible {
            segments: k,
            min_len,
            length: len,
        });
    }
    Ok(())
}

/// Least-squares optimal split of `values` into exactly `k` segments.
pub fn optimal_partition(values: &[f64], k: usize, min_len: usize) -> Result<Partition> {
    check_feasible(values.len(), k, min_len)?;
    let dp = SuffixDp::solve(values, k, min_len);
    let ends = dp.ends(k).ok_or(Error::Infeasible {
        segments: k,
        min_len,
        length: values.len(),
    })?;
    let cost = partition_cost(values, &ends);
    Ok(Partition { ends, cost })
}

/// Optimal objective for every k in 1..=k_max that is feasible.
pub fn cost_profile(values: &[f64], k_max: usize, min_len: usize) -> Result<Vec<f64>> {
    check_feasible(values.len(), 1, min_len)?;
    let k_cap = k_max.min(values.len() / min_len);
    Ok(SuffixDp::solve(values, k_cap, min_len).costs())
}

/// Elbow rule over a cost profile (`costs[k - 1]` is the cost of k
/// segments): the smallest k whose improvement to k + 1 falls below
/// `theta * cost(1)`; the largest k when every step still improves.
pub fn elbow(costs: &[f64], theta: f64) -> usize {
    let Some(&first) = costs.first() else {
        return 1;
    };
    if !(first > 0.0) {
        return 1;
    }
    for k in 1..costs.len() {
        if costs[k - 1] - costs[k] < theta * first {
            return k;
        }
    }
    costs.len()
}

/// Segment count in [1, k_max] picked by [`elbow`].
pub fn choose_k(values: &[f64], min_len: usize, k_max: usize, theta: f64) -> usize {
    if k_max <= 1 || min_len == 0 || values.len() < min_len {
        return 1;
    }
    match cost_profile(values, k_max, min_len) {
        Ok(costs) => elbow(&costs, theta),
        Err(_) => 1,
    }
}

fn ends_to_cuts(ends: &[usize]) -> Vec<usize> {
    ends.iter().map(|e| e + 1).collect()
}

/// Splits a PMD signal into exactly `k` segments and maps the result onto
/// the trajectory's point indexes.
pub fn segment_dp(signal: &PmdSignal, k: usize, min_len: usize) -> Result<Segmentation> {
    let p = optimal_partition(&signal.values, k, min_len)?;
    Ok(Segmentation {
        trajectory_id: signal.trajectory_id.clone(),
        cutting_indexes: ends_to_cuts(&p.ends),
        total_cost: Some(p.cost),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentConfig {
    /// Minimum segment length.
    pub min_len: usize,
    /// Upper bound on the segment count is `n / k_divisor`.
    pub k_divisor: usize,
    /// Elbow threshold relative to the one-segment cost.
    pub theta: f64,
    pub transform: TransformConfig,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self {
            min_len: 5,
            k_divisor: 5,
            theta: 0.02,
            transform: TransformConfig::default(),
        }
    }
}

impl SegmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_len == 0 {
            return Err(Error::InvalidConfig("min_len must be positive".to_string()));
        }
        if self.k_divisor == 0 {
            return Err(Error::InvalidConfig("k_divisor must be positive".to_string()));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(Error::InvalidConfig("theta must be positive".to_string()));
        }
        Ok(())
    }
}

/// Output of the full segmentation pipeline for one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedTrajectory {
    /// Cleaned, quantized points; cutting indexes refer to these.
    pub points: Vec<PreprocessedPoint>,
    pub signal: PmdSignal,
    pub segmentation: Segmentation,
}

impl SegmentedTrajectory {
    pub fn cut_points(&self) -> Vec<CutPoint> {
        let base: Vec<TrajectoryPoint> = self.points.iter().map(|p| p.base).collect();
        self.segmentation.cut_points(&base)
    }
}

/// Preprocess, transform, pick k (at most `n / k_divisor`), and split.
pub fn segment_trajectory(
    traj: &Trajectory,
    model: &MarkovModel,
    cfg: &SegmentConfig,
) -> Result<SegmentedTrajectory> {
    cfg.validate()?;
    let points = preprocess(traj, &model.config().preprocess)?;
    let signal = transform(traj.id(), &points, model, &cfg.transform)?;
    let n = points.len();
    let len = signal.values.len();
    let k_max = (n / cfg.k_divisor).min(len / cfg.min_len);

    let segmentation = if k_max <= 1 {
        Segmentation {
            trajectory_id: traj.id().to_string(),
            cutting_indexes: vec![n],
            total_cost: Some(sse(&signal.values)),
        }
    } else {
        let dp = SuffixDp::solve(&signal.values, k_max, cfg.min_len);
        let k = elbow(&dp.costs(), cfg.theta);
        let ends = dp.ends(k).ok_or(Error::Infeasible {
            segments: k,
            min_len: cfg.min_len,
            length: len,
        })?;
        Segmentation {
            trajectory_id: traj.id().to_string(),
            total_cost: Some(partition_cost(&signal.values, &ends)),
            cutting_indexes: ends_to_cuts(&ends),
        }
    };

    Ok(SegmentedTrajectory {
        points,
        signal,
        segmentation,
    })
}

fn check_eta(n: usize, eta: usize) -> Result<()> {
    if eta == 0 || eta > n {
        return Err(Error::Infeasible {
            segments: eta,
            min_len: 1,
            length: n,
        });
    }
    Ok(())
}

/// `eta` segments of (nearly) equal length: cuts at `floor(i * n / eta)`.
pub fn baseline_equal_length(traj: &Trajectory, eta: usize) -> Result<Segmentation> {
    let n = traj.len();
    check_eta(n, eta)?;
    Ok(Segmentation {
        trajectory_id: traj.id().to_string(),
        cutting_indexes: (1..=eta).map(|i| i * n / eta).collect(),
        total_cost: None,
    })
}

/// `eta - 1` distinct interior cuts drawn uniformly without replacement,
/// plus the trip end.
pub fn baseline_random(traj: &Trajectory, eta: usize, seed: u64) -> Result<Segmentation> {
    let n = traj.len();
    check_eta(n, eta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cuts: Vec<usize> = rand::seq::index::sample(&mut rng, n - 1, eta - 1)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(n);
    Ok(Segmentation {
        trajectory_id: traj.id().to_string(),
        cutting_indexes: cuts,
        total_cost: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StableCriteria {
    /// A segment's speed spread (km/h) must stay below this.
    pub speed_range: f64,
    /// A segment's circular heading spread (degrees) must stay below this.
    pub heading_range: f64,
    pub min_len: usize,
}

impl Default for StableCriteria {
    fn default() -> Self {
        Self {
            speed_range: 10.0,
            heading_range: 30.0,
            min_len: 5,
        }
    }
}

/// Width of the smallest arc containing every heading in `sorted`.
fn circular_spread(sorted: &[f64]) -> f64 {
    if sorted.len() < 2 {
        return 0.0;
    }
    let mut largest_gap = 360.0 - sorted[sorted.len() - 1] + sorted[0];
    for w in sorted.windows(2) {
        largest_gap = largest_gap.max(w[1] - w[0]);
    }
    360.0 - largest_gap
}

/// Greedy criteria-based segmentation.
///
/// The current segment grows while its speed spread and circular heading
/// spread both stay below the thresholds. A violating point starts a new
/// segment once the current one holds `min_len` points; before that the
/// point is absorbed. A trailing segment shorter than `min_len` is merged
/// into its predecessor.
pub fn baseline_stable_criteria(traj: &Trajectory, criteria: &StableCriteria) -> Segmentation {
    let pts = traj.points();
    let n = pts.len();
    let min_len = criteria.min_len.max(1);
    let mut cuts = Vec::new();
    let mut start = 0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut headings: Vec<f64> = Vec::new();

    for (i, p) in pts.iter().enumerate() {
        let h = rem_euclid(p.heading, 360.0);
        let pos = headings.partition_point(|&x| x < h);
        headings.insert(pos, h);
        let new_lo = lo.min(p.speed);
        let new_hi = hi.max(p.speed);
        let violated = new_hi - new_lo >= criteria.speed_range
            || circular_spread(&headings) >= criteria.heading_range;

        if violated && i - start >= min_len {
            cuts.push(i);
            start = i;
            lo = p.speed;
            hi = p.speed;
            headings.clear();
            headings.push(h);
        } else {
            lo = new_lo;
            hi = new_hi;
        }
    }
    if n > 0 {
        cuts.push(n);
    }
    if cuts.len() >= 2 && n - cuts[cuts.len() - 2] < min_len {
        cuts.remove(cuts.len() - 2);
    }
    Segmentation {
        trajectory_id: traj.id().to_string(),
        cutting_indexes: cuts,
        total_cost: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::destination;
    use crate::trajectory::TrajectoryPoint;
    use proptest::prelude::*;

    /// Exhaustive search over every composition of `values.len()` into `k`
    /// parts of at least `min_len`. Segment costs use the same streaming
    /// mean/variance arithmetic as the objective so totals compare
    /// bit-for-bit. Enumeration runs in lexicographic order and only a
    /// strictly better total replaces the incumbent, so ties keep the
    /// smallest ends.
    fn brute_force(values: &[f64], k: usize, min_len: usize) -> Option<(Vec<usize>, f64)> {
        fn seg_cost(v: &[f64]) -> f64 {
            let (mut count, mut mean, mut acc) = (0.0f64, 0.0f64, 0.0f64);
            for &x in v {
                count += 1.0;
                let d = x - mean;
                mean += d / count;
                acc += d * (x - mean);
            }
            acc
        }
        fn rec(
            values: &[f64],
            start: usize,
            left: usize,
            min_len: usize,
            ends: &mut Vec<usize>,
            best: &mut Option<(Vec<usize>, f64)>,
        ) {
            let n = values.len();
            if left == 1 {
                if n - start < min_len {
                    return;
                }
                ends.push(n);
                let mut s = 0;
                let mut total = 0.0;
                for &e in ends.iter() {
                    total += seg_cost(&values[s..e]);
                    s = e;
                }
                if best.as_ref().is_none_or(|(_, c)| total < *c) {
                    *best = Some((ends.clone(), total));
                }
                ends.pop();
                return;
            }
            for e in (start + min_len)..=n {
                ends.push(e);
                rec(values, e, left - 1, min_len, ends, best);
                ends.pop();
            }
        }
        let mut best = None;
        rec(values, 0, k, min_len, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn constant_signal_has_zero_cost_and_earliest_split() {
        let v = [0.7; 10];
        let p = optimal_partition(&v, 2, 1).unwrap();
        assert_eq!(p.cost, 0.0);
        assert_eq!(p.ends, vec![1, 10]);
    }

    #[test]
    fn two_plateaus() {
        let v = [0.0, 0.0, 0.0, 9.0, 9.0, 9.0];
        let p = optimal_partition(&v, 2, 3).unwrap();
        assert_eq!(p.ends, vec![3, 6]);
        assert_eq!(p.cost, 0.0);
        assert_eq!(brute_force(&v, 2, 3).unwrap(), (vec![3, 6], 0.0));
    }

    #[test]
    fn length_thirty_three_segments_matches_enumeration() {
        let v: Vec<f64> = (0..30)
            .map(|i| {
                let base = if i < 8 { 1.0 } else if i < 19 { 4.0 } else { 2.0 };
                base + libm::sin(i as f64 * 1.7) * 0.4
            })
            .collect();
        let p = optimal_partition(&v, 3, 5).unwrap();
        let (ends, cost) = brute_force(&v, 3, 5).unwrap();
        assert_eq!(p.ends, ends);
        assert_eq!(p.cost, cost);
    }

    #[test]
    fn infeasible_requests() {
        assert!(matches!(
            optimal_partition(&[1.0; 9], 2, 5),
            Err(Error::Infeasible { .. })
        ));
        assert!(optimal_partition(&[1.0; 9], 0, 1).is_err());
    }

    #[test]
    fn minimum_length_can_make_more_segments_cost_more() {
        // six segments of 2 must pair each spike with a zero
        let v = [0.0, 0.0, 0.0, 3.7, 0.0, 8.6, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let costs = cost_profile(&v, 6, 2).unwrap();
        assert!(costs[5] > costs[4]);
    }

    #[test]
    fn choose_k_on_flat_and_forced_inputs() {
        assert_eq!(choose_k(&[2.0; 40], 5, 8, 0.02), 1);
        let v: Vec<f64> = (0..40).map(|i| i as f64).collect();
        assert_eq!(choose_k(&v, 5, 1, 0.02), 1);
    }

    #[test]
    fn choose_k_finds_two_level_shifts() {
        // levels 0 / 10 / 3 with small deterministic jitter
        let v: Vec<f64> = (0..60)
            .map(|i| {
                let level = if i < 20 { 0.0 } else if i < 40 { 10.0 } else { 3.0 };
                level + 0.1 * libm::sin(i as f64 * 2.3)
            })
            .collect();
        let costs = cost_profile(&v, 5, 5).unwrap();
        // hand check of the elbow on the cost table
        let theta = 0.02 * costs[0];
        assert!(costs[0] - costs[1] >= theta);
        assert!(costs[1] - costs[2] >= theta);
        assert!(costs[2] - costs[3] < theta);
        assert_eq!(choose_k(&v, 5, 5, 0.02), 3);
        assert_eq!(optimal_partition(&v, 3, 5).unwrap().ends, vec![20, 40, 60]);
    }

    #[test]
    fn signal_boundaries_map_to_point_indexes() {
        let sig = PmdSignal {
            trajectory_id: "t".to_string(),
            values: vec![0.0, 0.0, 0.0, 9.0, 9.0, 9.0],
            level_trace: vec![],
        };
        let s = segment_dp(&sig, 2, 3).unwrap();
        // boundary after signal step 3 is point 4; the trip has 7 points
        assert_eq!(s.cutting_indexes, vec![4, 7]);
        s.validate(7, Some(3)).unwrap();
    }

    fn straight(n: usize, speeds: impl Fn(usize) -> f64, headings: impl Fn(usize) -> f64) -> Trajectory {
        let mut loc = LatLng::new(40.0, -83.0);
        let pts = (0..n)
            .map(|i| {
                if i > 0 {
                    loc = destination(loc, headings(i), speeds(i) / 3.6);
                }
                TrajectoryPoint::new(i as f64, loc.lat, loc.lng, speeds(i), 0.0, headings(i))
                    .unwrap()
            })
            .collect();
        Trajectory::new("b", pts).unwrap()
    }

    #[test]
    fn equal_length_cuts() {
        let t = straight(100, |_| 30.0, |_| 0.0);
        let s = baseline_equal_length(&t, 4).unwrap();
        assert_eq!(s.cutting_indexes, vec![25, 50, 75, 100]);
        assert_eq!(baseline_equal_length(&t, 1).unwrap().cutting_indexes, vec![100]);
        assert!(baseline_equal_length(&t, 101).is_err());
    }

    #[test]
    fn random_cuts_are_seeded() {
        let t = straight(100, |_| 30.0, |_| 0.0);
        let a = baseline_random(&t, 10, 7).unwrap();
        let b = baseline_random(&t, 10, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.k(), 10);
        a.validate(100, None).unwrap();
        assert_ne!(a, baseline_random(&t, 10, 8).unwrap());
        assert_eq!(baseline_random(&t, 1, 7).unwrap().cutting_indexes, vec![100]);
        assert!(baseline_random(&t, 0, 7).is_err());
    }

    #[test]
    fn stable_criteria_hand_traces() {
        let flat = straight(30, |_| 50.0, |_| 90.0);
        assert_eq!(
            baseline_stable_criteria(&flat, &StableCriteria::default()).cutting_indexes,
            vec![30]
        );

        let jump = straight(20, |i| if i < 10 { 40.0 } else { 80.0 }, |_| 90.0);
        assert_eq!(
            baseline_stable_criteria(&jump, &StableCriteria::default()).cutting_indexes,
            vec![10, 20]
        );

        // +-40 degrees every point: every point violates, so cuts fall every
        // min_len points and the 3-point tail merges into its predecessor
        let zigzag = straight(23, |_| 50.0, |i| if i % 2 == 0 { 20.0 } else { 340.0 });
        assert_eq!(
            baseline_stable_criteria(&zigzag, &StableCriteria::default()).cutting_indexes,
            vec![5, 10, 15, 23]
        );
    }

    #[test]
    fn circular_spread_wraps() {
        assert_eq!(circular_spread(&[10.0, 350.0]), 20.0);
        assert_eq!(circular_spread(&[0.0, 90.0, 180.0]), 180.0);
        assert_eq!(circular_spread(&[45.0]), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn dp_matches_enumeration(
            values in proptest::collection::vec(-5.0f64..5.0, 1..=18),
            k in 1usize..=4,
            min_len in prop::sample::select(vec![1usize, 3, 5]),
        ) {
            let oracle = brute_force(&values, k, min_len);
            match optimal_partition(&values, k, min_len) {
                Ok(p) => {
                    let (ends, cost) = oracle.expect("oracle finds a split when the DP does");
                    prop_assert_eq!(p.ends, ends);
                    prop_assert_eq!(p.cost, cost);
                }
                Err(_) => prop_assert!(oracle.is_none()),
            }
        }

        // Only without a minimum length: with one, k + 1 segments can force
        // every segment short enough that the optimum gets worse.
        #[test]
        fn cost_is_non_increasing_in_k(values in proptest::collection::vec(0.0f64..10.0, 5..60)) {
            let costs = cost_profile(&values, 8, 1).unwrap();
            for w in costs.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0]));
            }
        }
    }
}
