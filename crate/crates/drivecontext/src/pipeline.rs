//! Per-trajectory stages run on a rayon pool. Results keep input order, so
//! the worker count never changes the output.

use drivecontext_core::eval::{average_curve, score_trajectory, Algorithm, AnnotationSet, EvalConfig, PrCurve};
use drivecontext_core::events::{find_congestion_evidence, CongestionConfig, CongestionEvidence, EventDatabase};
use drivecontext_core::markov::{MarkovModel, ModelConfig, TransitionCounts};
use drivecontext_core::segment::{segment_trajectory, SegmentConfig, SegmentedTrajectory};
use drivecontext_core::time::TimeZone;
use drivecontext_core::{Result as CoreResult, Trajectory};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{Error, Result};

const CHUNK: usize = 64;

pub fn thread_pool(jobs: usize) -> Result<ThreadPool> {
    if jobs == 0 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))
}

/// Counts chunks of the corpus in parallel and merges them. Counts are
/// integers, so the merge order does not matter.
pub fn build_model(pool: &ThreadPool, trajs: &[Trajectory], cfg: &ModelConfig) -> CoreResult<MarkovModel> {
    let empty = TransitionCounts::new(cfg.clone())?;
    let counts = pool.install(|| {
        trajs
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut c = empty.clone();
                for t in chunk {
                    c.add_trajectory(t)?;
                }
                Ok(c)
            })
            .try_reduce(
                || empty.clone(),
                |mut a, b| {
                    a.merge(b)?;
                    Ok(a)
                },
            )
    })?;
    counts.finish()
}

pub fn segment_all(
    pool: &ThreadPool,
    trajs: &[Trajectory],
    model: &MarkovModel,
    cfg: &SegmentConfig,
) -> Vec<CoreResult<SegmentedTrajectory>> {
    pool.install(|| trajs.par_iter().map(|t| segment_trajectory(t, model, cfg)).collect())
}

pub fn evidence_all(
    pool: &ThreadPool,
    trajs: &[&Trajectory],
    db: &EventDatabase,
    cfg: &CongestionConfig,
    tz: &(dyn TimeZone + Sync),
) -> Vec<Vec<CongestionEvidence>> {
    pool.install(|| {
        trajs
            .par_iter()
            .map(|t| find_congestion_evidence(t, db, cfg, tz))
            .collect()
    })
}

/// Same result as the serial evaluation in the core crate.
pub fn evaluate(
    pool: &ThreadPool,
    algorithms: &[Algorithm],
    cases: &[(Trajectory, AnnotationSet)],
    model: Option<&MarkovModel>,
    cfg: &EvalConfig,
) -> CoreResult<Vec<PrCurve>> {
    cfg.validate()?;
    pool.install(|| {
        algorithms
            .iter()
            .map(|algo| {
                let scores = cases
                    .par_iter()
                    .map(|(t, a)| score_trajectory(algo, t, a, model, cfg))
                    .collect::<CoreResult<Vec<_>>>()?;
                Ok(average_curve(&algo.label(), &cfg.thresholds, &scores))
            })
            .collect()
    })
}
