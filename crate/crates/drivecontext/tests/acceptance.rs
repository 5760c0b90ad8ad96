//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails when
//! any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use drivecontext_core::context::{
    correlate_group, ContextGroup, CorrelationConfig, CorrelationMode, DayType, Period, TrajectoryCuts,
};
use drivecontext_core::context::Context;
use drivecontext_core::eval::{evaluate, Algorithm, Eta, EvalConfig};
use drivecontext_core::events::{
    find_congestion_evidence, nearby_events, CongestionConfig, CongestionEvidence, Event, EventDatabase,
    EventFilter, EventKind,
};
use drivecontext_core::geo::destination;
use drivecontext_core::markov::{DrivingState, ModelConfig};
use drivecontext_core::pmd::{transform, TransformConfig, UnknownStatePolicy};
use drivecontext_core::segment::{segment_dp, CutPoint, SegmentConfig};
use drivecontext_core::synth::{generate_synthetic, SynthSpec};
use drivecontext_core::time::{FixedOffset, Weekday};
use drivecontext_core::trajectory::PreprocessedPoint;
use drivecontext_core::{build_model, LatLng, MarkovModel, PmdSignal, Trajectory, TrajectoryPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

// ---------------------------------------------------------------- 1

/// Streaming mean/variance sum of squares, the objective's segment cost.
fn seg_cost(v: &[f64]) -> f64 {
    let (mut n, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
    for &x in v {
        n += 1.0;
        let d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    m2
}

/// Every composition into `k` parts of at least `min_len`, visited in
/// lexicographic order of the ends; only a strictly lower total replaces
/// the incumbent. Ends are exclusive.
fn enumerate_best(values: &[f64], k: usize, min_len: usize) -> Option<(Vec<usize>, f64)> {
    fn go(
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
            go(values, e, left - 1, min_len, ends, best);
            ends.pop();
        }
    }
    let mut best = None;
    go(values, 0, k, min_len, &mut Vec::new(), &mut best);
    best
}

fn random_signal(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = rng.random_range(1..=30);
    match rng.random_range(0..3) {
        0 => (0..len).map(|_| rng.random_range(-5.0..5.0)).collect(),
        // Plateaus, including repeated levels, so exact ties occur.
        1 => {
            let mut v = Vec::with_capacity(len);
            while v.len() < len {
                let level = rng.random_range(0..3) as f64;
                let run = rng.random_range(1..=8);
                v.extend(std::iter::repeat_n(level, run.min(len - v.len())));
            }
            v
        }
        _ => (0..len).map(|_| rng.random_range(0..4) as f64 * 0.5).collect(),
    }
}

fn criterion_dp_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut feasible = 0;
    for case in 0..200 {
        let values = random_signal(&mut rng);
        let k = rng.random_range(1..=4);
        let min_len = [1, 3, 5][rng.random_range(0..3)];
        let signal = PmdSignal {
            trajectory_id: format!("s{case}"),
            values: values.clone(),
            level_trace: vec![],
        };
        match (segment_dp(&signal, k, min_len), enumerate_best(&values, k, min_len)) {
            (Ok(seg), Some((ends, cost))) => {
                feasible += 1;
                let want: Vec<usize> = ends.iter().map(|e| e + 1).collect();
                check(seg.total_cost == Some(cost), || {
                    format!("case {case}: cost {:?} vs oracle {cost} on {values:?}", seg.total_cost)
                })?;
                check(seg.cutting_indexes == want, || {
                    format!("case {case}: cuts {:?} vs oracle {want:?} on {values:?}", seg.cutting_indexes)
                })?;
            }
            (Err(_), None) => {}
            (got, want) => return Err(format!("case {case}: dp {got:?} vs oracle {want:?}")),
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("200 signals, {feasible} feasible, costs and cuts identical, {:.2?}", start.elapsed()))
}

// ---------------------------------------------------------------- 2

fn criterion_normalization() -> Outcome {
    let (trajs, _) = generate_synthetic(1000, &SynthSpec::default(), 2).map_err(|e| e.to_string())?;
    let model = build_model(&trajs, &ModelConfig::default()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (level, table) in model.levels().iter().enumerate() {
        for (from, out) in table.iter() {
            let sum: f64 = out.transitions.iter().map(|t| t.prob).sum();
            worst = worst.max((sum - 1.0).abs());
            check((sum - 1.0).abs() <= 1e-9, || format!("level {level} state {from}: sum {sum}"))?;
        }
    }
    let expected: u64 = trajs.iter().map(|t| t.len() as u64 - 1).sum();
    let observed = model.levels()[0].observation_count();
    check(observed == expected, || format!("level 0 holds {observed} transitions, expected {expected}"))?;
    Ok(format!(
        "1000 trajectories, {} levels, max |sum - 1| = {worst:.1e}, level-0 transitions {observed}",
        model.levels().len()
    ))
}

// ---------------------------------------------------------------- 3

fn st(speed: i32, accel: i32, dheading: i32) -> DrivingState {
    DrivingState { speed, accel, dheading }
}

fn hand_model(edges: &[(DrivingState, DrivingState, u64)]) -> MarkovModel {
    let mut table: BTreeMap<DrivingState, BTreeMap<DrivingState, u64>> = BTreeMap::new();
    for &(a, b, c) in edges {
        *table.entry(a).or_default().entry(b).or_default() += c;
    }
    MarkovModel::from_counts(ModelConfig::with_levels(1), vec![table], 1, 0).unwrap()
}

fn points(states: &[DrivingState]) -> Vec<PreprocessedPoint> {
    let grid = ModelConfig::with_levels(1).grid(0);
    states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let [speed_q, accel_q, dheading_q] = s.values(&grid);
            PreprocessedPoint {
                base: TrajectoryPoint::new(i as f64, 40.0, -83.0, speed_q, accel_q, 0.0).unwrap(),
                speed_q,
                accel_q,
                dheading_q,
                state: *s,
            }
        })
        .collect()
}

fn criterion_transform() -> Outcome {
    // Grid steps 5 km/h, 1 m/s², 5°: A = (0, 0, 0), B = (15, 0, 0),
    // C = (0, 0, 20), so |AB| = 15, |AC| = 20, |BC| = 25.
    let (a, b, c) = (st(0, 0, 0), st(3, 0, 0), st(0, 0, 4));
    let m1 = hand_model(&[(a, b, 1), (a, c, 3), (b, a, 2), (b, c, 2), (c, a, 1), (c, b, 2), (c, c, 1)]);
    let m2 = hand_model(&[(a, a, 1), (a, b, 1), (b, c, 4), (c, a, 3), (c, b, 1)]);
    let cases: [(&MarkovModel, Vec<DrivingState>, Vec<f64>); 3] = [
        (
            &m1,
            vec![a, b, c, a, c],
            vec![25.0 * 0.75 / 2.0, 20.0 * 0.5 / 2.0, (15.0 * 0.5 + 20.0 * 0.25) / 3.0, 25.0 * 0.25 / 2.0],
        ),
        (
            &m2,
            vec![a, b, c, b],
            vec![15.0 * 0.5 / 2.0, 0.0, 15.0 * 0.75 / 2.0],
        ),
        (
            &m2,
            vec![c, c, a, a],
            vec![(20.0 * 0.75 + 25.0 * 0.25) / 2.0, 15.0 * 0.25 / 2.0, 15.0 * 0.5 / 2.0],
        ),
    ];
    let mut worst = 0.0f64;
    for (i, (model, seq, want)) in cases.iter().enumerate() {
        let sig = transform("hand", &points(seq), model, &TransformConfig::default()).map_err(|e| e.to_string())?;
        check(sig.len() == seq.len() - 1, || format!("case {i}: length {}", sig.len()))?;
        for (got, want) in sig.values.iter().zip(want) {
            worst = worst.max((got - want).abs());
            check((got - want).abs() <= 1e-12, || format!("case {i}: {:?} vs {want:?}", sig.values))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let policy = TransformConfig { unknown_state: UnknownStatePolicy::Sentinel, ..Default::default() };
    for _ in 0..200 {
        let n = rng.random_range(2..60);
        let seq: Vec<DrivingState> = (0..n)
            .map(|_| [a, b, c, st(9, 9, 9)][rng.random_range(0..4)])
            .collect();
        let sig = transform("r", &points(&seq), &m1, &policy).map_err(|e| e.to_string())?;
        check(sig.len() == n - 1, || format!("|signal| = {} for |T| = {n}", sig.len()))?;
    }
    Ok(format!("3 hand cases within {worst:.1e}, |signal| = |T| - 1 on 200 random sequences"))
}

// ---------------------------------------------------------------- 4

fn criterion_baselines() -> Outcome {
    let start = Instant::now();
    let (train, _) = generate_synthetic(1000, &SynthSpec::default(), 101).map_err(|e| e.to_string())?;
    let model = build_model(&train, &ModelConfig::default()).map_err(|e| e.to_string())?;
    let (test, ants) = generate_synthetic(100, &SynthSpec::default(), 202).map_err(|e| e.to_string())?;
    let cases: Vec<_> = test.into_iter().zip(ants).collect();
    let mut segment = SegmentConfig::default();
    segment.transform.unknown_state = UnknownStatePolicy::Sentinel;
    let cfg = EvalConfig { seed: 7, segment, ..EvalConfig::default() };
    let algos = [
        Algorithm::DSegment,
        Algorithm::Random(Eta::TrueCount),
        Algorithm::EqualLength(Eta::Regime),
    ];
    let curves = evaluate(&algos, &cases, Some(&model), &cfg).map_err(|e| e.to_string())?;
    for c in &curves {
        for w in c.points.windows(2) {
            check(w[1].precision >= w[0].precision && w[1].recall >= w[0].recall, || {
                format!("{} not monotone between {} and {} m", c.algorithm, w[0].threshold_m, w[1].threshold_m)
            })?;
        }
    }
    let at = |i: usize| *curves[i].at(250.0).expect("250 m is evaluated");
    let (ds, rnd, eq) = (at(0), at(1), at(2));
    let summary = format!(
        "@250 m dsegment P={:.3} R={:.3}, random P={:.3} R={:.3}, equal_length P={:.3}, {:.1?}",
        ds.precision, ds.recall, rnd.precision, rnd.recall, eq.precision, start.elapsed()
    );
    check(ds.precision > rnd.precision && ds.recall > rnd.recall, || summary.clone())?;
    check(ds.precision > eq.precision, || summary.clone())?;
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(summary)
}

// ---------------------------------------------------------------- 5

fn origin() -> LatLng {
    LatLng::new(39.9612, -82.9988)
}

fn ctx() -> Context {
    Context { route_id: "r".into(), day_type: DayType::WD, period: Period::P3 }
}

fn cut(i: usize, at: LatLng) -> CutPoint {
    CutPoint { index: i, location: at, t: i as f64, is_final: false }
}

fn evidence(at: LatLng) -> CongestionEvidence {
    CongestionEvidence {
        trajectory_id: "a".into(),
        start_index: 1,
        end_index: 5,
        centroid: at,
        weekday: Weekday::Tue,
        hour: 16,
        support_count: 12,
    }
}

fn criterion_correlation() -> Outcome {
    // Eight cuts 1 km apart; facts sit next to cuts 2 and 5, evidence next
    // to cut 7; every other event is far away.
    let o = origin();
    let locs: Vec<LatLng> = (0..8).map(|i| destination(o, 90.0, 1000.0 * i as f64)).collect();
    let group = ContextGroup {
        context: ctx(),
        trajectories: vec![
            TrajectoryCuts {
                trajectory_id: "a".into(),
                cuts: (0..4).map(|i| cut(i + 1, locs[i])).collect(),
                evidences: vec![],
            },
            TrajectoryCuts {
                trajectory_id: "b".into(),
                cuts: (4..8).map(|i| cut(i + 1, locs[i])).collect(),
                evidences: vec![evidence(destination(locs[6], 0.0, 50.0))],
            },
        ],
    };
    let db = EventDatabase::new(vec![
        Event::physical("osm", "traffic_signal", destination(locs[1], 0.0, 120.0)),
        Event::physical("osm", "exit", destination(locs[4], 180.0, 199.0)),
        Event::physical("osm", "bridge", destination(locs[3], 0.0, 450.0)),
        Event::temporal("bing", "congestion", locs[2], 0.0, 60.0),
    ])
    .unwrap();
    let cfg = CorrelationConfig { min_cuts: 1, ..CorrelationConfig::default() };
    let r = correlate_group(&group, &db, &cfg);
    check(r.correlation_all == 0.375, || format!("all = {}", r.correlation_all))?;
    check(r.correlation_physical == 0.25 && r.correlation_temporal == 0.125, || {
        format!("physical {} temporal {}", r.correlation_physical, r.correlation_temporal)
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..100 {
        let spot = |rng: &mut ChaCha8Rng| destination(o, rng.random_range(0.0..360.0), rng.random_range(0.0..3000.0));
        let trajectories = (0..rng.random_range(1..4))
            .map(|t| TrajectoryCuts {
                trajectory_id: format!("t{t}"),
                cuts: (0..rng.random_range(0..8)).map(|i| cut(i + 1, spot(&mut rng))).collect(),
                evidences: (0..rng.random_range(0..3)).map(|_| evidence(spot(&mut rng))).collect(),
            })
            .collect();
        let group = ContextGroup { context: ctx(), trajectories };
        let mut events: Vec<Event> = (0..rng.random_range(0..6))
            .map(|_| Event::physical("osm", "exit", spot(&mut rng)))
            .collect();
        let th = rng.random_range(50.0..800.0);
        let cfg = CorrelationConfig { threshold_m: th, min_cuts: 1, include_final_cut: false };
        let before = correlate_group(&group, &EventDatabase::new(events.clone()).unwrap(), &cfg);
        events.push(Event::physical("osm", "bridge", spot(&mut rng)));
        let after = correlate_group(&group, &EventDatabase::new(events).unwrap(), &cfg);
        for r in [&before, &after] {
            for mode in [CorrelationMode::Physical, CorrelationMode::Temporal, CorrelationMode::All] {
                let v = r.correlation(mode);
                check((0.0..=1.0).contains(&v), || format!("trial {trial}: {mode:?} = {v}"))?;
            }
            check(
                r.correlation_all >= r.correlation_physical && r.correlation_all >= r.correlation_temporal,
                || format!("trial {trial}: all below a single mode"),
            )?;
        }
        for mode in [CorrelationMode::Physical, CorrelationMode::Temporal, CorrelationMode::All] {
            check(after.correlation(mode) >= before.correlation(mode), || {
                format!("trial {trial}: adding an event lowered {mode:?}")
            })?;
        }
    }
    Ok("3-of-8 fixture = 0.375, bounds and monotonicity hold on 100 random groups".into())
}

// ---------------------------------------------------------------- 6

const MON_08_UTC: f64 = 1_475_481_600.0; // 2016-10-03T08:00:00Z
const WEEK: f64 = 7.0 * 86_400.0;

/// Ten fast points, `run` points at `slow_kmh`, ten fast points, 10 m apart.
fn slow_trip(run: usize, slow_kmh: f64) -> (Trajectory, f64, LatLng) {
    let o = origin();
    let mut pts = Vec::new();
    let mut slow_start = 0.0;
    for i in 0..(20 + run) {
        let slow = (10..10 + run).contains(&i);
        let t = MON_08_UTC + 600.0 + i as f64;
        if i == 10 {
            slow_start = t;
        }
        let at = destination(o, 90.0, 10.0 * i as f64);
        let speed = if slow { slow_kmh } else { 80.0 };
        pts.push(TrajectoryPoint::new(t, at.lat, at.lng, speed, 0.0, 90.0).unwrap());
    }
    let mid = destination(o, 90.0, 10.0 * (10.0 + run as f64 / 2.0));
    (Trajectory::new("c", pts).unwrap(), slow_start, mid)
}

fn reports(n: usize, at: LatLng, t: f64) -> EventDatabase {
    let events = (1..=n)
        .map(|w| {
            let start = t - w as f64 * WEEK;
            Event::temporal("bing", "congestion", destination(at, 45.0 * w as f64, 30.0), start, start + 900.0)
        })
        .collect();
    EventDatabase::new(events).unwrap()
}

fn detected(run: usize, slow_kmh: f64, n_reports: usize) -> bool {
    let (traj, t, mid) = slow_trip(run, slow_kmh);
    let db = reports(n_reports, mid, t);
    let found = find_congestion_evidence(&traj, &db, &CongestionConfig::default(), &FixedOffset::UTC);
    !found.is_empty()
}

fn criterion_congestion() -> Outcome {
    let cases = [
        ("12 reports", detected(6, 30.0, 12), true),
        ("11 reports", detected(6, 30.0, 11), false),
        ("run of 5", detected(5, 30.0, 12), true),
        ("run of 4", detected(4, 30.0, 12), false),
        ("54.9 km/h", detected(6, 54.9, 12), true),
        ("55.0 km/h", detected(6, 55.0, 12), false),
    ];
    for (name, got, want) in cases {
        check(got == want, || format!("{name}: detected = {got}, expected {want}"))?;
    }
    Ok("12/11 reports, run 5/4, 54.9/55.0 km/h flip detection".into())
}

// ---------------------------------------------------------------- 7

fn oracle_distance(a: LatLng, b: LatLng) -> f64 {
    let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
    let dp = p2 - p1;
    let dl = (b.lng - a.lng).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * 6_371_000.0 * h.sqrt().min(1.0).asin()
}

fn criterion_spatial() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut queries = 0;
    let mut hits = 0;
    for db_i in 0..50 {
        let center = match db_i % 5 {
            0 => LatLng::new(rng.random_range(-60.0..60.0), rng.random_range(179.9..180.0)),
            1 => LatLng::new(rng.random_range(80.0..89.9), rng.random_range(-180.0..180.0)),
            _ => LatLng::new(rng.random_range(-70.0..70.0), rng.random_range(-180.0..180.0)),
        };
        let spread = rng.random_range(300.0..5000.0);
        let n = rng.random_range(1..=1000);
        let events: Vec<Event> = (0..n)
            .map(|i| {
                let at = destination(center, rng.random_range(0.0..360.0), rng.random_range(0.0..spread));
                if i % 3 == 0 {
                    Event::temporal("bing", "congestion", at, 0.0, 60.0)
                } else {
                    Event::physical("osm", "exit", at)
                }
            })
            .collect();
        let db = EventDatabase::new(events).unwrap();
        let base = db.events().as_ptr();
        for _ in 0..40 {
            let p = destination(center, rng.random_range(0.0..360.0), rng.random_range(0.0..spread * 1.2));
            for radius in [50.0, 200.0, 500.0] {
                for filter in [EventFilter::Any, EventFilter::Kind(EventKind::PhysicalFact)] {
                    queries += 1;
                    let got: Vec<usize> = nearby_events(&db, p, radius, filter)
                        .into_iter()
                        .map(|e| (e as *const Event as usize - base as usize) / std::mem::size_of::<Event>())
                        .collect();
                    let want: Vec<usize> = db
                        .events()
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| filter.accepts(e) && oracle_distance(p, e.location()) <= radius)
                        .map(|(i, _)| i)
                        .collect();
                    hits += want.len();
                    check(got == want, || {
                        format!("db {db_i} at {p} r={radius}: {} vs {} events", got.len(), want.len())
                    })?;
                }
            }
        }
    }
    Ok(format!("50 databases, {queries} queries, {hits} matches, zero discrepancies"))
}

// ---------------------------------------------------------------- 8

fn run_tool(dir: &Path, jobs: usize, args: &[&str]) -> Result<(), String> {
    let jobs = jobs.to_string();
    let out = Command::new(env!("CARGO_BIN_EXE_drivecontext"))
        .current_dir(dir)
        .args(["--seed", "42", "--timezone", "UTC", "--jobs", &jobs])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })
}

const ARTIFACTS: [&str; 10] = [
    "trajs.csv", "ants.csv", "events.csv", "model.bin", "model.json", "cuts.csv", "signals.csv",
    "report.csv", "report.json", "pr.csv",
];

fn pipeline(dir: &Path, jobs: usize) -> Result<BTreeMap<&'static str, Vec<u8>>, String> {
    let steps: [&[&str]; 6] = [
        &["synth", "--n", "150", "--trajectories", "trajs.csv", "--annotations", "ants.csv", "--events", "events.csv"],
        &["build-model", "--train", "trajs.csv", "--out", "model.bin", "--json", "model.json"],
        &["segment", "--trajectories", "trajs.csv", "--model", "model.bin", "--out", "cuts.csv", "--signals", "signals.csv"],
        &["describe", "--cuts", "cuts.csv", "--trajectories", "trajs.csv", "--events", "events.csv", "--out", "report.csv"],
        &["describe", "--cuts", "cuts.csv", "--trajectories", "trajs.csv", "--events", "events.csv", "--out", "report.json"],
        &["evaluate", "--trajectories", "trajs.csv", "--annotations", "ants.csv", "--model", "model.bin", "--out", "pr.csv"],
    ];
    for s in steps {
        run_tool(dir, jobs, s)?;
    }
    ARTIFACTS
        .iter()
        .map(|name| std::fs::read(dir.join(name)).map(|b| (*name, b)).map_err(|e| format!("{name}: {e}")))
        .collect()
}

fn criterion_determinism() -> Outcome {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let first = pipeline(dirs[0].path(), 1)?;
    let second = pipeline(dirs[1].path(), 1)?;
    let parallel = pipeline(dirs[2].path(), 8)?;
    for name in ARTIFACTS {
        check(first[name] == second[name], || format!("{name} differs between runs"))?;
        check(first[name] == parallel[name], || format!("{name} differs between --jobs 1 and 8"))?;
    }
    let bytes: usize = first.values().map(Vec::len).sum();
    Ok(format!("{} artifacts ({bytes} bytes) identical across runs and --jobs 1/8", ARTIFACTS.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("segmentation matches exhaustive search", criterion_dp_oracle),
        ("transition probabilities are normalized", criterion_normalization),
        ("dissimilarity transform matches hand values", criterion_transform),
        ("segmenter beats the baselines", criterion_baselines),
        ("correlation bounds and monotonicity", criterion_correlation),
        ("congestion evidence thresholds", criterion_congestion),
        ("spatial query matches a linear scan", criterion_spatial),
        ("pipeline output is deterministic", criterion_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
