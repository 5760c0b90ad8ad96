//! File formats, timezones, parallel stages and the command line around
//! `drivecontext-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod model_file;
pub mod pipeline;
pub mod timefmt;
pub mod tz;

pub use error::{Error, Result};
