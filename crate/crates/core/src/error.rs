use alloc::string::String;

use crate::markov::DrivingState;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(&'static str),

    #[error("trajectory `{trajectory}`: timestamps not strictly increasing at point {index}")]
    NonMonotonicTime { trajectory: String, index: usize },

    #[error("trajectory `{trajectory}`: only {remaining} point(s) survive cleaning, need at least 2")]
    DegenerateTrajectory { trajectory: String, remaining: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot build a model from an empty corpus")]
    EmptyCorpus,

    #[error("state {state} is unknown at every model level")]
    UnknownState { state: DrivingState },

    #[error("trajectory `{trajectory}`: state {state} at step {step} is unknown at every model level")]
    UnknownStateInTrajectory {
        trajectory: String,
        step: usize,
        state: DrivingState,
    },

    #[error("cannot split {length} values into {segments} segment(s) of at least {min_len}")]
    Infeasible {
        segments: usize,
        min_len: usize,
        length: usize,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid event: {0}")]
    InvalidEvent(String),

    #[error("invalid annotation set: {0}")]
    InvalidAnnotations(String),

    #[error("unknown algorithm `{name}` (valid: dsegment, equal_length, random, stable_criteria)")]
    UnknownAlgorithm { name: String },

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}
