//! Command-line surface. Every command is a deterministic function of its
//! inputs and `--seed`; files are written atomically.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use celf_core::algebra::recover_intensities;
use celf_core::lightfield::code_image_normalized;
use celf_core::metrics::{data_rate, event_stats, psnr, ssim_lightfield, COO_BITS_PER_EVENT};
use celf_core::sensor::{expand_to_stream, simulate_acquisition};
use celf_core::train::{
    binarize_patterns, constant_predictor_mse, patterns_from_logits, train_with, validation_len, PatternLogits,
    Reconstructor, TrainConfig, TrainMode, EVAL_DRAW_BASE,
};
use celf_core::{AperturePattern, EventImage, EventModel, VIEW_SIDE};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config::{parse_widths, ConfigFile};
use crate::dataset::{load_dataset, load_lightfield, make_synthetic, SampleFormat, SynthOptions};
use crate::formats::{self, write_atomic, Kind};
use crate::pngio::{epi_horizontal, epi_vertical, write_gray, write_lightfield_dir, BitDepth};

pub const DATA_DIR_ENV: &str = "CELF_DATA_DIR";
pub const MODEL_CONFIG: &str = "model.cfg";
pub const MODEL_WEIGHTS: &str = "model.nn1";
pub const MODEL_PATTERNS: &str = "patterns.ap1";

#[derive(Debug, Parser)]
#[command(name = "celf", version, about = "Event-based coded-aperture light-field acquisition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic layered light-field dataset.
    MakeSynthetic(MakeSyntheticArgs),
    /// Simulate event images for a light field and pattern sequence.
    Simulate(SimulateArgs),
    /// Recover intensity images from event images and a black pattern.
    Recover(RecoverArgs),
    /// Jointly train aperture patterns and the reconstruction network.
    Train(TrainArgs),
    /// Evaluate a trained model on a dataset.
    Eval(EvalArgs),
    /// Print format, version and default configuration, or describe a file.
    Info(InfoArgs),
}

/// Sensor parameters; a config file is applied first, flags override it.
#[derive(Debug, Clone, Default, Args)]
pub struct SensorFlags {
    /// Flat key = value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub sigma_w: Option<f64>,
    #[arg(long)]
    pub sigma_z: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Disable sensor noise.
    #[arg(long)]
    pub noiseless: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TrainFlags {
    /// Number of aperture patterns.
    #[arg(short = 'N', long = "patterns")]
    pub n: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// baseline, baseline+BF, baseline+RA or baseline+BF+RA.
    #[arg(long)]
    pub mode: Option<TrainMode>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub s_init: Option<f64>,
    #[arg(long)]
    pub s_growth: Option<f64>,
    #[arg(long)]
    pub net_width: Option<usize>,
    #[arg(long)]
    pub net_depth: Option<usize>,
    /// Explicit channel widths, e.g. `3,16,16,64`.
    #[arg(long)]
    pub net_widths: Option<String>,
}

impl SensorFlags {
    fn resolve(&self, cfg: &mut TrainConfig) -> Result<()> {
        if let Some(path) = &self.config {
            ConfigFile::load(path)?.apply(cfg)?;
        }
        let s = &mut cfg.sensor;
        s.tau = self.tau.unwrap_or(s.tau);
        s.epsilon = self.epsilon.unwrap_or(s.epsilon);
        s.sigma_w = self.sigma_w.unwrap_or(s.sigma_w);
        s.sigma_z = self.sigma_z.unwrap_or(s.sigma_z);
        s.noiseless |= self.noiseless;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
            cfg.sensor.seed = seed;
        }
        cfg.sensor.validate()?;
        Ok(())
    }
}

impl TrainFlags {
    fn resolve(&self, cfg: &mut TrainConfig) -> Result<()> {
        cfg.patterns = self.n.unwrap_or(cfg.patterns);
        cfg.epochs = self.epochs.unwrap_or(cfg.epochs);
        cfg.batch_size = self.batch_size.unwrap_or(cfg.batch_size);
        cfg.mode = self.mode.unwrap_or(cfg.mode);
        cfg.adam.lr = self.lr.unwrap_or(cfg.adam.lr);
        cfg.s_init = self.s_init.unwrap_or(cfg.s_init);
        cfg.s_growth = self.s_growth.unwrap_or(cfg.s_growth);
        cfg.net_width = self.net_width.unwrap_or(cfg.net_width);
        cfg.net_depth = self.net_depth.unwrap_or(cfg.net_depth);
        if let Some(w) = &self.net_widths {
            cfg.net_widths = Some(parse_widths(w)?);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Lf4,
    Png,
    Both,
}

#[derive(Debug, Args)]
pub struct MakeSyntheticArgs {
    /// Output dataset directory.
    #[arg(long, env = DATA_DIR_ENV)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    /// Defaults to the width.
    #[arg(long)]
    pub height: Option<usize>,
    /// Sample `i` has `1 + i % max_layers` depth layers.
    #[arg(long, default_value_t = 3)]
    pub max_layers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Lf4)]
    pub format: FormatArg,
    /// PNG bit depth (8 or 16).
    #[arg(long, default_value_t = 16)]
    pub bit_depth: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Baseline,
    Ra,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Light field: `.lf4` file, PNG view directory or sample directory.
    #[arg(long)]
    pub lightfield: PathBuf,
    /// Pattern file (`CELF-AP1`).
    #[arg(long, conflicts_with = "random")]
    pub patterns: Option<PathBuf>,
    /// Use this many random binary patterns instead of a pattern file.
    #[arg(long)]
    pub random: Option<usize>,
    /// Make the first random pattern black.
    #[arg(long, requires = "random")]
    pub black_first: bool,
    /// Event model; defaults to the config file's mode, else reference-aware.
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Noise draw index.
    #[arg(long, default_value_t = 0)]
    pub draw: u64,
    /// Also write the expanded event stream `events.ev1`.
    #[arg(long)]
    pub stream: bool,
    /// Duration of each transition window in the stream, microseconds.
    #[arg(long, default_value_t = 10_000)]
    pub duration_us: u32,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub sensor: SensorFlags,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    /// Directory of `events_K.ei1` files, or individual event-image files.
    #[arg(long, required = true, num_args = 1..)]
    pub events: Vec<PathBuf>,
    /// 1-based index of the black pattern.
    #[arg(long)]
    pub black_index: Option<usize>,
    /// Ground-truth light field for the residual report (needs --patterns).
    #[arg(long, requires = "patterns")]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub patterns: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub sensor: SensorFlags,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset directory.
    #[arg(long, env = DATA_DIR_ENV)]
    pub data: PathBuf,
    /// Output model directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub sensor: SensorFlags,
    #[command(flatten)]
    pub train: TrainFlags,
    /// Suppress per-epoch progress on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model directory written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, env = DATA_DIR_ENV)]
    pub data: PathBuf,
    /// Evaluate every sample instead of the trailing 10%.
    #[arg(long)]
    pub all: bool,
    /// Threshold the patterns at 0.5 before evaluating.
    #[arg(long)]
    pub binarize: bool,
    #[arg(long)]
    pub no_ssim: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub sensor: SensorFlags,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    /// A file to describe.
    pub file: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::MakeSynthetic(a) => cmd_make_synthetic(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Recover(a) => cmd_recover(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Info(a) => cmd_info(&a),
    }
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

fn print_pairs(title: &str, value: &Value) {
    println!("{title}");
    if let Value::Object(map) = value {
        for (k, v) in map {
            println!("  {k}: {v}");
        }
    }
}

/// Finite reals as JSON numbers; infinities become null.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn cmd_make_synthetic(a: &MakeSyntheticArgs) -> Result<()> {
    let opts = SynthOptions {
        count: a.count,
        width: a.width,
        height: a.height.unwrap_or(a.width),
        max_layers: a.max_layers,
        seed: a.seed,
        format: match a.format {
            FormatArg::Lf4 => SampleFormat::Lf4,
            FormatArg::Png => SampleFormat::Png,
            FormatArg::Both => SampleFormat::Both,
        },
        depth: BitDepth::from_bits(a.bit_depth)?,
    };
    let disparities = make_synthetic(&a.out, &opts)?;
    let mut histogram = [0usize; 7];
    for d in disparities.iter().flatten() {
        histogram[(d + 3) as usize] += 1;
    }
    println!("wrote {} samples to {}", a.count, a.out.display());
    println!("disparity histogram (-3..=3): {histogram:?}");
    Ok(())
}

fn random_binary_patterns(n: usize, black_first: bool, seed: u64) -> Result<Vec<AperturePattern>> {
    let logits = PatternLogits::random(n, black_first, seed)?;
    Ok(binarize_patterns(&patterns_from_logits(&logits, 1.0)?))
}

fn event_file_name(k: usize) -> String {
    format!("events_{k}.ei1")
}

fn stats_json(images: &[EventImage]) -> Result<Value> {
    let stats = event_stats(images)?;
    Ok(json!({
        "events_per_pixel": num(stats.total),
        "per_transition": stats.per_transition.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "bits_per_sensor_pixel": num(stats.total * COO_BITS_PER_EVENT as f64),
        "bits_per_lightfield_pixel": num(stats.total * COO_BITS_PER_EVENT as f64 / 64.0),
    }))
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let mut cfg = TrainConfig::default();
    a.sensor.resolve(&mut cfg)?;
    let lf = load_lightfield(&a.lightfield)?;
    let patterns = match (&a.patterns, a.random) {
        (Some(path), None) => formats::read_patterns(path).with_context(|| format!("reading {}", path.display()))?,
        (None, Some(n)) => random_binary_patterns(n, a.black_first, cfg.seed)?,
        _ => bail!("give either --patterns or --random"),
    };
    ensure!(patterns.len() >= 2, "at least two patterns are required, found {}", patterns.len());
    let model = match a.model {
        Some(ModelArg::Baseline) => EventModel::Baseline,
        Some(ModelArg::Ra) => EventModel::ReferenceAware,
        None if a.sensor.config.is_some() => cfg.mode.event_model(),
        None => EventModel::ReferenceAware,
    };
    let acq = simulate_acquisition(&lf, &patterns, &cfg.sensor, model, a.draw)?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for (k, e) in acq.events.iter().enumerate() {
        formats::write_event_image(&a.out.join(event_file_name(k + 1)), e)?;
    }
    if a.random.is_some() {
        formats::write_patterns(&a.out.join(MODEL_PATTERNS), &patterns)?;
    }
    if a.stream {
        let durations = vec![a.duration_us; acq.events.len()];
        let stream = expand_to_stream(&acq.events, &durations)?;
        formats::write_stream(&a.out.join("events.ev1"), &stream)?;
    }
    let mut report = stats_json(&acq.events)?;
    report["model"] = json!(match model {
        EventModel::Baseline => "baseline",
        EventModel::ReferenceAware => "ra",
    });
    report["patterns"] = json!(patterns.len());
    write_json(&a.out.join("stats.json"), &report)?;
    print_pairs("event statistics", &report);
    Ok(())
}

fn collect_event_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<(usize, PathBuf)> = Vec::new();
            for entry in fs::read_dir(input).with_context(|| format!("reading {}", input.display()))? {
                let path = entry?.path();
                let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
                if let Some(k) = name.strip_prefix("events_").and_then(|r| r.strip_suffix(".ei1")) {
                    if let Ok(k) = k.parse() {
                        found.push((k, path));
                    }
                }
            }
            found.sort();
            files.extend(found.into_iter().map(|(_, p)| p));
        } else {
            files.push(input.clone());
        }
    }
    ensure!(!files.is_empty(), "no event images found");
    Ok(files)
}

pub fn cmd_recover(a: &RecoverArgs) -> Result<()> {
    let black = a.black_index.context("--black-index is required")?;
    let mut cfg = TrainConfig::default();
    a.sensor.resolve(&mut cfg)?;
    let images = collect_event_files(&a.events)?
        .iter()
        .map(|p| formats::read_event_image(p).with_context(|| format!("reading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let rec = recover_intensities(&images, black, &cfg.sensor)?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let (w, h) = (images[0].width(), images[0].height());
    for (n, img) in rec.images.iter().enumerate() {
        write_gray(&a.out.join(format!("recovered_{}.png", n + 1)), w, h, img.as_slice(), BitDepth::Sixteen)?;
        let raw: Vec<u8> = img.as_slice().iter().flat_map(|v| v.to_le_bytes()).collect();
        write_atomic(&a.out.join(format!("recovered_{}.f64", n + 1)), &raw)?;
    }
    let mut report = json!({
        "frames": rec.images.len(),
        "width": w,
        "height": h,
        "black_index": black,
        "clamped_pixels": rec.clamped,
    });
    if let (Some(truth), Some(patterns)) = (&a.truth, &a.patterns) {
        let lf = load_lightfield(truth)?;
        let patterns = formats::read_patterns(patterns)?;
        ensure!(patterns.len() == rec.images.len(), "pattern count does not match the event images");
        let eps = cfg.sensor.epsilon;
        let mut worst: f64 = 0.0;
        let mut below = 0usize;
        let mut total = 0usize;
        for (p, r) in patterns.iter().zip(&rec.images) {
            let t = code_image_normalized(&lf, p);
            ensure!(t.width() == w && t.height() == h, "ground truth size differs from the event images");
            for (a, b) in r.as_slice().iter().zip(t.as_slice()) {
                let d = ((a + eps).ln() - (b + eps).ln()).abs();
                worst = worst.max(d);
                below += usize::from(d < cfg.sensor.tau);
                total += 1;
            }
        }
        report["max_log_residual"] = num(worst);
        report["fraction_below_tau"] = num(below as f64 / total as f64);
        report["tau"] = num(cfg.sensor.tau);
    }
    write_json(&a.out.join("recover.json"), &report)?;
    print_pairs("recovery", &report);
    Ok(())
}

pub fn cmd_train(a: &TrainArgs) -> Result<()> {
    let mut cfg = TrainConfig::default();
    a.sensor.resolve(&mut cfg)?;
    a.train.resolve(&mut cfg)?;
    cfg.validate()?;
    let data = load_dataset(&a.data)?;
    let quiet = a.quiet;
    let outcome = train_with(&data, &cfg, |r| {
        if !quiet {
            eprintln!(
                "epoch {:>4}  loss {:.6}  val {}  s {:.4}  events/px {:.3}",
                r.epoch,
                r.loss,
                r.val_loss.map_or("-".into(), |v| format!("{v:.6}")),
                r.s,
                r.events_per_pixel
            );
        }
    })?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let patterns = outcome.model.patterns()?;
    formats::write_network(&a.out.join(MODEL_WEIGHTS), &outcome.model.net)?;
    formats::write_patterns(&a.out.join(MODEL_PATTERNS), &patterns)?;
    formats::write_patterns(&a.out.join("patterns_binary.ap1"), &binarize_patterns(&patterns))?;
    write_atomic(&a.out.join(MODEL_CONFIG), render_model_config(&cfg, outcome.model.s).as_bytes())?;

    let mut csv = String::from("epoch,loss,val_loss,s,events_per_pixel,min_transmittance\n");
    for r in &outcome.history {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.epoch,
            r.loss,
            r.val_loss.map_or(String::new(), |v| v.to_string()),
            r.s,
            r.events_per_pixel,
            r.min_transmittance
        );
    }
    write_atomic(&a.out.join("history.csv"), csv.as_bytes())?;

    let last = outcome.history.last();
    let report = json!({
        "samples": data.len(),
        "validation_samples": validation_len(data.len()),
        "epochs": cfg.epochs,
        "mode": cfg.mode.as_str(),
        "patterns": cfg.patterns,
        "final_loss": last.map_or(Value::Null, |r| num(r.loss)),
        "final_val_loss": last.and_then(|r| r.val_loss).map_or(Value::Null, num),
        "final_events_per_pixel": last.map_or(Value::Null, |r| num(r.events_per_pixel)),
        "s_final": num(outcome.model.s),
    });
    write_json(&a.out.join("train.json"), &report)?;
    print_pairs("training", &report);
    Ok(())
}

/// The training configuration plus the final sigmoid scale.
fn render_model_config(cfg: &TrainConfig, s_final: f64) -> String {
    let mut text = ConfigFile::from_train_config(cfg).render();
    let _ = writeln!(text, "# s_final = {s_final}");
    text
}

/// Loads `model.cfg`, weights and patterns from a model directory.
pub fn load_model(dir: &Path) -> Result<(TrainConfig, Reconstructor)> {
    let mut cfg = TrainConfig::default();
    ConfigFile::load(&dir.join(MODEL_CONFIG))?.apply(&mut cfg)?;
    let net = formats::read_network(&dir.join(MODEL_WEIGHTS))
        .with_context(|| format!("reading {}", dir.join(MODEL_WEIGHTS).display()))?;
    let patterns = formats::read_patterns(&dir.join(MODEL_PATTERNS))
        .with_context(|| format!("reading {}", dir.join(MODEL_PATTERNS).display()))?;
    ensure!(patterns.len() >= 2, "model has fewer than two patterns");
    ensure!(
        patterns.len() - 1 == net.input_channels(),
        "incompatible checkpoint: {} patterns but the network expects {} event channels",
        patterns.len(),
        net.input_channels()
    );
    let rec = Reconstructor::new(patterns, net, cfg.mode.event_model())?;
    Ok((cfg, rec))
}

fn pattern_grid(p: &AperturePattern) -> String {
    let mut out = String::new();
    for v in 0..VIEW_SIDE {
        let row: Vec<String> = (0..VIEW_SIDE).map(|u| format!("{:.2}", p.get(u, v))).collect();
        let _ = writeln!(out, "    {}", row.join(" "));
    }
    out
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let (mut cfg, mut rec) = load_model(&a.model)?;
    a.sensor.resolve(&mut cfg)?;
    if a.binarize {
        rec.patterns = binarize_patterns(&rec.patterns);
    }
    let data = load_dataset(&a.data)?;
    let held = validation_len(data.len());
    let set = if a.all || held == 0 { &data[..] } else { &data[data.len() - held..] };

    for (n, p) in rec.patterns.iter().enumerate() {
        println!("pattern {} (transmittance {:.3}{})", n + 1, p.transmittance(), if p.is_black() { ", black" } else { "" });
        print!("{}", pattern_grid(p));
    }

    let eval = rec.evaluate(set, &cfg.sensor, !a.no_ssim)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;

    // Images for the first evaluated sample, using the same noise draw as `evaluate`.
    let first = &set[0];
    let (recon, _) = rec.reconstruct(first, &cfg.sensor, EVAL_DRAW_BASE)?;
    write_lightfield_dir(&a.out.join("recon"), &recon, BitDepth::Sixteen)?;
    let (y, x) = (first.height() / 2, first.width() / 2);
    for (tag, lf) in [("recon", &recon), ("truth", first)] {
        let (w, h, img) = epi_horizontal(lf, y, VIEW_SIDE / 2);
        write_gray(&a.out.join(format!("epi_h_{tag}.png")), w, h, &img, BitDepth::Sixteen)?;
        let (w, h, img) = epi_vertical(lf, x, VIEW_SIDE / 2);
        write_gray(&a.out.join(format!("epi_v_{tag}.png")), w, h, &img, BitDepth::Sixteen)?;
    }

    let rate = if eval.events_per_pixel > 0.0 {
        let r = data_rate(eval.events_per_pixel, COO_BITS_PER_EVENT)?;
        json!({
            "bits_per_sensor_pixel": num(r.bits_per_sensor_pixel),
            "bits_per_lightfield_pixel": num(r.bits_per_lf_pixel),
        })
    } else {
        Value::Null
    };
    let report = json!({
        "samples": set.len(),
        "mode": cfg.mode.as_str(),
        "mse": num(eval.mse),
        "psnr": num(eval.psnr),
        "mean_sample_psnr": num(eval.mean_sample_psnr),
        "ssim": eval.ssim.map_or(Value::Null, num),
        "events_per_pixel": num(eval.events_per_pixel),
        "constant_predictor_mse": num(constant_predictor_mse(set)?),
        "first_sample_psnr": num(psnr(first, &recon)?),
        "first_sample_ssim": if a.no_ssim { Value::Null } else { num(ssim_lightfield(first, &recon)?) },
        "black_patterns": rec.patterns.iter().enumerate().filter(|(_, p)| p.is_black()).map(|(n, _)| n + 1).collect::<Vec<_>>(),
        "data_rate": rate,
    });
    write_json(&a.out.join("eval.json"), &report)?;
    print_pairs("evaluation", &report);
    Ok(())
}

pub fn cmd_info(a: &InfoArgs) -> Result<()> {
    let Some(path) = &a.file else {
        println!("celf {}", env!("CARGO_PKG_VERSION"));
        println!("formats:");
        for kind in [Kind::LightField, Kind::EventStream, Kind::EventImage, Kind::Network, Kind::Patterns] {
            println!("  {}", kind.magic());
        }
        println!("light-field directories: view_{{u}}_{{v}}.png + meta.json (8 or 16 bit)");
        println!("data directory variable: {DATA_DIR_ENV}");
        println!("default configuration:");
        for line in ConfigFile::from_train_config(&TrainConfig::default()).render().lines() {
            println!("  {line}");
        }
        return Ok(());
    };
    if path.is_dir() {
        let lf = load_lightfield(path)?;
        println!("light-field directory {}x{}", lf.width(), lf.height());
        return Ok(());
    }
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let kind = Kind::detect(&bytes).with_context(|| format!("{} is not a recognized file", path.display()))?;
    println!("{}", kind.magic());
    match kind {
        Kind::LightField => {
            let lf = formats::decode_lightfield(&bytes)?;
            println!("light field {}x{} with 64 views", lf.width(), lf.height());
        }
        Kind::EventStream => {
            let s = formats::decode_stream(&bytes)?;
            println!("event stream {}x{}, {} records", s.width(), s.height(), s.len());
        }
        Kind::EventImage => {
            let e = formats::decode_event_image(&bytes)?;
            let t = e.transition().map_or("none".to_string(), |t| format!("({}, {})", t.from, t.to));
            println!("event image {}x{}, transition {t}, {} events", e.width(), e.height(), e.event_count());
        }
        Kind::Network => {
            let net = formats::decode_network(&bytes)?;
            println!("network widths {:?}, {} parameters", net.widths(), net.parameter_count());
        }
        Kind::Patterns => {
            let p = formats::decode_patterns(&bytes)?;
            println!("{} aperture patterns", p.len());
            for (n, p) in p.iter().enumerate() {
                println!("  pattern {}: transmittance {:.3}", n + 1, p.transmittance());
            }
        }
    }
    Ok(())
}
