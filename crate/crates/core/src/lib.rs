//! Behaviour-driven trajectory segmentation and driving-context analysis.
//!
//! The pipeline has two halves. The segmentation half turns a trip into a
//! dissimilarity signal against a population Markov model of driving states
//! and splits that signal with an optimal piecewise-constant dynamic program.
//! The description half correlates the resulting cutting points with
//! located events (road features, congestion reports) per driving context.
//!
//! This crate is `no_std` (it needs `alloc`). File formats, timezones and
//! the command-line front end live in the `drivecontext` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod context;
pub mod error;
pub mod eval;
pub mod events;
pub mod geo;
pub mod markov;
pub mod pmd;
pub mod segment;
pub mod synth;
pub mod time;
pub mod trajectory;

pub use error::Error;
pub use geo::{haversine, LatLng};
pub use markov::{build_model, DrivingState, MarkovModel, ModelConfig};
pub use pmd::{transform, PmdSignal};
pub use segment::{segment_trajectory, Segmentation};

pub use trajectory::{preprocess, PreprocessedPoint, Trajectory, TrajectoryPoint};

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
