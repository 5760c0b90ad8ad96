//! The `drivecontext` command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use drivecontext_core::context::{assign_context, correlation, group_by_context, TrajectoryCuts};
use drivecontext_core::eval::{AnnotationRegime, Algorithm, AnnotationSet, EvalConfig, ALGORITHM_NAMES};
use drivecontext_core::events::EventDatabase;
use drivecontext_core::pmd::UnknownStatePolicy;
use drivecontext_core::synth::{generate_events, generate_synthetic};
use drivecontext_core::{Error as CoreError, Trajectory};

use crate::config::RunConfig;
use crate::error::{Error, Result, Warning, EXIT_OK, EXIT_USAGE};
use crate::io;
use crate::model_file::{model_json, save_model};
use crate::pipeline;

#[derive(Debug, Parser)]
#[command(name = "drivecontext", version, about = "Segment driving trajectories and relate the cuts to road events")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for per-trajectory stages.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// IANA zone name, `UTC` or `+HH:MM`.
    #[arg(long, global = true)]
    pub timezone: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count state transitions of a training corpus into a model file.
    BuildModel(BuildModelArgs),
    /// Cut trajectories into driving patterns.
    Segment(SegmentArgs),
    /// Correlate cutting points with events per driving context.
    Describe(DescribeArgs),
    /// Score segmenters against annotated boundaries.
    Evaluate(EvaluateArgs),
    /// Generate synthetic trajectories, annotations and events.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct BuildModelArgs {
    /// Training trajectories (CSV).
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the transition tables as JSON.
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Number of levels, each doubling the grid steps.
    #[arg(long)]
    pub levels: Option<u32>,
    #[arg(long)]
    pub speed_step: Option<f64>,
    #[arg(long)]
    pub accel_step: Option<f64>,
    #[arg(long)]
    pub dheading_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long)]
    pub trajectories: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Cutting points (CSV).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the dissimilarity signals (CSV).
    #[arg(long, value_name = "FILE")]
    pub signals: Option<PathBuf>,
    #[arg(long)]
    pub min_len: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// `error` or `sentinel`.
    #[arg(long, value_parser = parse_policy)]
    pub unknown_state: Option<UnknownStatePolicy>,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    /// Cutting points written by `segment`.
    #[arg(long)]
    pub cuts: PathBuf,
    #[arg(long)]
    pub trajectories: PathBuf,
    /// Events (CSV, or JSON with a `.json` extension). Without it every
    /// correlation is 0.
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Report path; JSON when it ends in `.json`, CSV otherwise.
    #[arg(long)]
    pub out: PathBuf,
    /// Relevancy radius in meters.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub min_cuts: Option<usize>,
    #[arg(long)]
    pub include_final_cut: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub trajectories: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    /// Needed by `dsegment`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Comma-separated `name[:eta]` list.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<String>>,
    /// `easy` or `strict`.
    #[arg(long, value_parser = parse_regime)]
    pub regime: Option<AnnotationRegime>,
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    #[arg(long)]
    pub include_final_cut: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of trajectories.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trajectories: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub events: Option<PathBuf>,
    #[arg(long, value_parser = parse_regime)]
    pub regime: Option<AnnotationRegime>,
}

fn parse_policy(s: &str) -> std::result::Result<UnknownStatePolicy, String> {
    match s.to_ascii_lowercase().as_str() {
        "error" => Ok(UnknownStatePolicy::Error),
        "sentinel" => Ok(UnknownStatePolicy::Sentinel),
        _ => Err(format!("`{s}` is not one of: error, sentinel")),
    }
}

fn parse_regime(s: &str) -> std::result::Result<AnnotationRegime, String> {
    AnnotationRegime::parse(s).ok_or_else(|| format!("`{s}` is not one of: easy, strict"))
}

/// Runs the tool on `std::env::args` and returns the exit code.
pub fn main() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => {
            require_file(p)?;
            RunConfig::load(p)?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.timezone.is_some() {
        cfg.timezone = cli.timezone.clone();
    }
    let pool = pipeline::thread_pool(cli.jobs)?;
    match cli.command {
        Command::BuildModel(a) => build_model(a, cfg, &pool),
        Command::Segment(a) => segment(a, cfg, &pool),
        Command::Describe(a) => describe(a, cfg, &pool),
        Command::Evaluate(a) => evaluate(a, cfg, &pool),
        Command::Synth(a) => synth(a, cfg),
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        ))
    }
}

fn warn_all(path: &Path, warnings: &[Warning]) {
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
}

fn build_model(a: BuildModelArgs, mut cfg: RunConfig, pool: &rayon::ThreadPool) -> Result<()> {
    if let Some(l) = a.levels {
        cfg.model.level_multipliers = (0..l).map(|i| 1u32 << i).collect();
    }
    let q = &mut cfg.model.preprocess.quantization;
    q.speed_step = a.speed_step.unwrap_or(q.speed_step);
    q.accel_step = a.accel_step.unwrap_or(q.accel_step);
    q.dheading_step = a.dheading_step.unwrap_or(q.dheading_step);
    cfg.validate()?;
    require_file(&a.train)?;

    let file = io::load_trajectories(&a.train, &cfg.columns)?;
    warn_all(&a.train, &file.warnings);
    let model = pipeline::build_model(pool, &file.trajectories, &cfg.model)?;
    let echo = cfg.echo_lines("build-model").join("\n");
    save_model(&a.out, &model, &echo)?;
    if let Some(path) = &a.json {
        let doc = model_json(&model, &cfg.to_json());
        io::write_file(path, |w| {
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            std::io::Write::write_all(w, b"\n")
        })?;
    }

    let stats = model.stats();
    if stats.skipped_trajectories > 0 {
        eprintln!(
            "warning: {}: {} trajectories had fewer than 2 usable points and were skipped",
            a.train.display(),
            stats.skipped_trajectories
        );
    }
    println!(
        "trajectories={} skipped={}",
        stats.trajectories, stats.skipped_trajectories
    );
    for l in &stats.levels {
        println!(
            "level={} multiplier={} states={} transitions={} observations={}",
            l.level, l.multiplier, l.states, l.transitions, l.observations
        );
    }
    Ok(())
}

fn segment(a: SegmentArgs, mut cfg: RunConfig, pool: &rayon::ThreadPool) -> Result<()> {
    let s = &mut cfg.segment;
    s.min_len = a.min_len.unwrap_or(s.min_len);
    s.theta = a.theta.unwrap_or(s.theta);
    if let Some(p) = a.unknown_state {
        s.transform.unknown_state = p;
    }
    cfg.validate()?;
    require_file(&a.trajectories)?;
    require_file(&a.model)?;

    let model = crate::model_file::load_model(&a.model)?;
    let file = io::load_trajectories(&a.trajectories, &cfg.columns)?;
    warn_all(&a.trajectories, &file.warnings);

    let results = pipeline::segment_all(pool, &file.trajectories, &model, &cfg.segment);
    let mut cuts = Vec::new();
    let mut signals = Vec::new();
    for (traj, res) in file.trajectories.iter().zip(results) {
        match res {
            Ok(seg) => {
                cuts.push((traj.id().to_string(), seg.cut_points()));
                signals.push(seg.signal);
            }
            Err(e @ CoreError::DegenerateTrajectory { .. }) => {
                eprintln!("warning: {}: skipped: {e}", a.trajectories.display());
            }
            Err(e) => return Err(e.into()),
        }
    }

    let echo = cfg.echo_lines("segment");
    io::write_file(&a.out, |w| io::write_cuts(w, &cuts, &echo))?;
    if let Some(path) = &a.signals {
        io::write_file(path, |w| io::write_signals(w, &signals, &echo))?;
    }
    println!("trajectories={} segmented={}", file.trajectories.len(), cuts.len());
    Ok(())
}

fn describe(a: DescribeArgs, mut cfg: RunConfig, pool: &rayon::ThreadPool) -> Result<()> {
    let d = &mut cfg.describe;
    d.threshold_m = a.threshold.unwrap_or(d.threshold_m);
    d.min_cuts = a.min_cuts.unwrap_or(d.min_cuts);
    d.include_final_cut |= a.include_final_cut;
    cfg.validate()?;
    let zone = cfg.required_zone()?;
    require_file(&a.cuts)?;
    require_file(&a.trajectories)?;
    if let Some(p) = &a.events {
        require_file(p)?;
    }

    let (cut_map, cut_warnings) = io::read_cuts(&a.cuts)?;
    warn_all(&a.cuts, &cut_warnings);
    let file = io::load_trajectories(&a.trajectories, &cfg.columns)?;
    warn_all(&a.trajectories, &file.warnings);
    let db = match &a.events {
        Some(p) => {
            let ev = io::load_events(p)?;
            warn_all(p, &ev.warnings);
            ev.db
        }
        None => EventDatabase::default(),
    };

    let by_id: BTreeMap<&str, &Trajectory> =
        file.trajectories.iter().map(|t| (t.id(), t)).collect();
    let mut selected = Vec::new();
    for id in cut_map.keys() {
        match by_id.get(id.as_str()) {
            Some(t) => selected.push(*t),
            None => eprintln!(
                "warning: {}: trajectory `{id}` has cuts but no points; ignored",
                a.cuts.display()
            ),
        }
    }

    let evidences = pipeline::evidence_all(pool, &selected, &db, &cfg.congestion, &zone);
    let mut items = Vec::with_capacity(selected.len());
    for (traj, evidences) in selected.iter().zip(evidences) {
        let context = assign_context(traj, file.route_of(traj.id()), &zone)?;
        items.push((
            context,
            TrajectoryCuts {
                trajectory_id: traj.id().to_string(),
                cuts: cut_map[traj.id()].clone(),
                evidences,
            },
        ));
    }
    let groups = group_by_context(items);
    let (reports, skipped) = correlation(&groups, &db, &cfg.describe);
    for s in &skipped {
        eprintln!("warning: {s}; omitted from the report");
    }

    let is_json = a
        .out
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let config = cfg.to_json();
        io::write_file(&a.out, |w| io::write_report_json(w, &reports, &skipped, &config))?;
    } else {
        let echo = cfg.echo_lines("describe");
        io::write_file(&a.out, |w| io::write_report_csv(w, &reports, &echo))?;
    }
    println!("contexts={} reported={}", groups.len(), reports.len());
    Ok(())
}

fn evaluate(a: EvaluateArgs, mut cfg: RunConfig, pool: &rayon::ThreadPool) -> Result<()> {
    let e = &mut cfg.evaluate;
    if let Some(list) = a.algorithms {
        e.algorithms = list;
    }
    e.regime = a.regime.unwrap_or(e.regime);
    if let Some(t) = a.thresholds {
        e.thresholds = t;
    }
    e.include_final_cut |= a.include_final_cut;
    cfg.validate()?;
    let algorithms = cfg
        .evaluate
        .algorithms
        .iter()
        .map(|s| Algorithm::parse(s))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if algorithms.is_empty() {
        return Err(Error::Config(format!(
            "no algorithms given (valid: {})",
            ALGORITHM_NAMES.join(", ")
        )));
    }
    let needs_model = algorithms.contains(&Algorithm::DSegment);
    if needs_model && a.model.is_none() {
        return Err(Error::Config("dsegment needs --model".into()));
    }
    require_file(&a.trajectories)?;
    require_file(&a.annotations)?;
    if let Some(p) = &a.model {
        require_file(p)?;
    }

    let model = match &a.model {
        Some(p) if needs_model => Some(crate::model_file::load_model(p)?),
        _ => None,
    };
    let file = io::load_trajectories(&a.trajectories, &cfg.columns)?;
    warn_all(&a.trajectories, &file.warnings);
    let (sets, ann_warnings) = io::load_annotations(&a.annotations, cfg.evaluate.regime)?;
    warn_all(&a.annotations, &ann_warnings);

    let mut sets: BTreeMap<String, AnnotationSet> =
        sets.into_iter().map(|s| (s.trajectory_id.clone(), s)).collect();
    let mut cases = Vec::new();
    for t in file.trajectories {
        match sets.remove(t.id()) {
            Some(s) => cases.push((t, s)),
            None => eprintln!(
                "warning: {}: trajectory `{}` has no annotations; ignored",
                a.trajectories.display(),
                t.id()
            ),
        }
    }
    for id in sets.keys() {
        eprintln!(
            "warning: {}: annotations for unknown trajectory `{id}`; ignored",
            a.annotations.display()
        );
    }
    if cases.is_empty() {
        return Err(Error::Data("no annotated trajectories to evaluate".into()));
    }

    let ecfg = EvalConfig {
        thresholds: cfg.evaluate.thresholds.clone(),
        include_final_cut: cfg.evaluate.include_final_cut,
        seed: cfg.seed,
        segment: cfg.segment,
    };
    let curves = pipeline::evaluate(pool, &algorithms, &cases, model.as_ref(), &ecfg)?;
    let echo = cfg.echo_lines("evaluate");
    io::write_file(&a.out, |w| io::write_pr_curves(w, &curves, &echo))?;
    println!("trajectories={} algorithms={}", cases.len(), curves.len());
    Ok(())
}

fn synth(a: SynthArgs, mut cfg: RunConfig) -> Result<()> {
    cfg.synth.trajectories = a.n.unwrap_or(cfg.synth.trajectories);
    if let Some(r) = a.regime {
        cfg.synth.spec.annotation_regime = r;
    }
    cfg.validate()?;
    if cfg.synth.trajectories == 0 {
        return Err(Error::Config("--n must be positive".into()));
    }

    let (trajs, sets) = generate_synthetic(cfg.synth.trajectories, &cfg.synth.spec, cfg.seed)?;
    let echo = cfg.echo_lines("synth");
    io::write_file(&a.trajectories, |w| io::write_trajectories(w, &trajs, &echo))?;
    io::write_file(&a.annotations, |w| io::write_annotations(w, &sets, &echo))?;
    if let Some(path) = &a.events {
        let seed = drivecontext_core::eval::splitmix64(cfg.seed ^ 0x6576_656E_7473);
        let events = generate_events(&trajs, &sets, &cfg.synth.events, seed)?;
        io::write_file(path, |w| io::write_events(w, &events, &echo))?;
        println!("trajectories={} events={}", trajs.len(), events.len());
    } else {
        println!("trajectories={}", trajs.len());
    }
    Ok(())
}

