//! Binary model files and their JSON export.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! magic "DCMM" | version u32
//! speed_step f64 | accel_step f64 | dheading_step f64 | max_implied_speed_mps f64
//! trajectories u64 | skipped u64
//! level_count u32 | multiplier u32 * level_count
//! per level: sources u32, then per source
//!     from (i32 speed, i32 accel, i32 dheading) | targets u32
//!     per target: to (3 * i32) | count u64
//! echo_len u32 | echo (UTF-8 JSON of the run configuration)
//! ```
//!
//! Counts rather than probabilities are stored so a loaded model is
//! bit-identical to the one that was built.

use std::collections::BTreeMap;
use std::path::Path;

use drivecontext_core::markov::{DrivingState, MarkovModel, ModelConfig};
use drivecontext_core::trajectory::{PreprocessConfig, QuantizationConfig};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"DCMM";
pub const VERSION: u32 = 1;

fn put_state(buf: &mut Vec<u8>, s: &DrivingState) {
    for v in [s.speed, s.accel, s.dheading] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn encode_model(model: &MarkovModel, echo: &str) -> Vec<u8> {
    let cfg = model.config();
    let q = cfg.preprocess.quantization;
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    for v in [q.speed_step, q.accel_step, q.dheading_step, cfg.preprocess.max_implied_speed_mps] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(model.trajectories() as u64).to_le_bytes());
    buf.extend_from_slice(&(model.skipped_trajectories() as u64).to_le_bytes());
    buf.extend_from_slice(&(cfg.level_multipliers.len() as u32).to_le_bytes());
    for m in &cfg.level_multipliers {
        buf.extend_from_slice(&m.to_le_bytes());
    }
    for level in model.counts() {
        buf.extend_from_slice(&(level.len() as u32).to_le_bytes());
        for (from, targets) in &level {
            put_state(&mut buf, from);
            buf.extend_from_slice(&(targets.len() as u32).to_le_bytes());
            for (to, count) in targets {
                put_state(&mut buf, to);
                buf.extend_from_slice(&count.to_le_bytes());
            }
        }
    }
    buf.extend_from_slice(&(echo.len() as u32).to_le_bytes());
    buf.extend_from_slice(echo.as_bytes());
    buf
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| format!("truncated at byte {}", self.pos))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn i32(&mut self) -> std::result::Result<i32, String> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn state(&mut self) -> std::result::Result<DrivingState, String> {
        Ok(DrivingState {
            speed: self.i32()?,
            accel: self.i32()?,
            dheading: self.i32()?,
        })
    }
}

/// Decodes a model file, returning the model and its configuration echo.
pub fn decode_model(bytes: &[u8]) -> std::result::Result<(MarkovModel, String), String> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4).ok() != Some(&MAGIC[..]) {
        return Err("not a model file (bad magic)".to_string());
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(format!(
            "model file version {version} is not supported (this build reads version {VERSION})"
        ));
    }
    let quantization = QuantizationConfig {
        speed_step: r.f64()?,
        accel_step: r.f64()?,
        dheading_step: r.f64()?,
    };
    let max_implied_speed_mps = r.f64()?;
    let trajectories = r.u64()? as usize;
    let skipped = r.u64()? as usize;
    let level_count = r.u32()? as usize;
    if level_count > 64 {
        return Err(format!("implausible level count {level_count}"));
    }
    let level_multipliers = (0..level_count).map(|_| r.u32()).collect::<std::result::Result<_, _>>()?;
    let mut levels = Vec::with_capacity(level_count);
    for _ in 0..level_count {
        let mut table = BTreeMap::new();
        for _ in 0..r.u32()? {
            let from = r.state()?;
            let mut targets = BTreeMap::new();
            for _ in 0..r.u32()? {
                let to = r.state()?;
                targets.insert(to, r.u64()?);
            }
            table.insert(from, targets);
        }
        levels.push(table);
    }
    let echo_len = r.u32()? as usize;
    let echo = String::from_utf8(r.take(echo_len)?.to_vec()).map_err(|_| "echo is not UTF-8".to_string())?;
    if r.pos != bytes.len() {
        return Err(format!("{} trailing bytes", bytes.len() - r.pos));
    }
    let config = ModelConfig {
        preprocess: PreprocessConfig {
            quantization,
            max_implied_speed_mps,
        },
        level_multipliers,
    };
    let model = MarkovModel::from_counts(config, levels, trajectories, skipped).map_err(|e| e.to_string())?;
    Ok((model, echo))
}

pub fn save_model(path: &Path, model: &MarkovModel, echo: &str) -> Result<()> {
    std::fs::write(path, encode_model(model, echo)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<MarkovModel> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes)
        .map(|(m, _)| m)
        .map_err(|msg| Error::Core(drivecontext_core::Error::InvalidModel(format!("{}: {msg}", path.display()))))
}

/// `{config, levels: [{level, multiplier, transitions: [{from, to, prob}]}]}`
/// with states given as (km/h, m/s², degrees) values.
pub fn model_json(model: &MarkovModel, config: &Value) -> Value {
    let cfg = model.config();
    let levels: Vec<Value> = model
        .levels()
        .iter()
        .enumerate()
        .map(|(l, table)| {
            let grid = cfg.grid(l);
            let transitions: Vec<Value> = table
                .pairs()
                .map(|(from, to, prob)| json!({ "from": from.values(&grid), "to": to.values(&grid), "prob": prob }))
                .collect();
            json!({ "level": l, "multiplier": cfg.level_multipliers[l], "transitions": transitions })
        })
        .collect();
    json!({
        "config": config,
        "trajectories": model.trajectories(),
        "skipped_trajectories": model.skipped_trajectories(),
        "levels": levels,
    })
}
