//! Command-line front end: `analyze` runs the windowed connectivity +
//! community pipeline on a recording, `synth` generates test recordings with
//! planted community structure. Every `analyze` flag can also come from a
//! flat key=value config file; explicit flags win.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sigcom::anneal::AnnealingSchedule;
use sigcom::betweenness::EdgeLengthMode;
use sigcom::connectivity::{AnticorrMode, MatrixKind, SpectralConfig};
use sigcom::error::{Error, Result};
use sigcom::pipeline::{run_pipeline, PipelineConfig};
use sigcom::report::MethodId;
use sigcom::signal::{
    generate_synthetic, load_recording, save_recording, InputFormat, LoadOptions, SyntheticSpec,
};
use sigcom::spectral::DEFAULT_K_MAX;

#[derive(Parser)]
#[command(
    name = "sigcom",
    version,
    about = "Windowed connectivity graphs and their community structure"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut a recording into windows, build connectivity graphs, cluster them
    Analyze(Box<AnalyzeArgs>),
    /// Generate a synthetic recording with planted communities
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Csv,
    RawF32,
}

impl From<CliFormat> for InputFormat {
    fn from(f: CliFormat) -> InputFormat {
        match f {
            CliFormat::Csv => InputFormat::Csv,
            CliFormat::RawF32 => InputFormat::RawF32,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliAnticorr {
    Weighted,
    Count,
}

impl From<CliAnticorr> for AnticorrMode {
    fn from(m: CliAnticorr) -> AnticorrMode {
        match m {
            CliAnticorr::Weighted => AnticorrMode::Weighted,
            CliAnticorr::Count => AnticorrMode::Count,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliLengths {
    Inverse,
    Unit,
}

impl From<CliLengths> for EdgeLengthMode {
    fn from(m: CliLengths) -> EdgeLengthMode {
        match m {
            CliLengths::Inverse => EdgeLengthMode::InverseWeight,
            CliLengths::Unit => EdgeLengthMode::Unit,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input recording
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format [default: csv]
    #[arg(long, value_enum)]
    format: Option<CliFormat>,
    /// Channel count (required for raw-f32 input)
    #[arg(long)]
    channels: Option<usize>,
    /// Skip a header row in CSV input
    #[arg(long)]
    header: bool,
    /// Sample rate in Hz [default: 1000]
    #[arg(long)]
    rate: Option<f64>,
    /// Window length in samples
    #[arg(long)]
    window_size: Option<usize>,
    /// Connectivity kinds, comma-separated [default: correlation]
    #[arg(long)]
    kinds: Option<String>,
    /// Methods to run, comma-separated [default: A,B,C,D]
    #[arg(long)]
    methods: Option<String>,
    /// Drop edges whose |value| is at or below this [default: 0]
    #[arg(long)]
    threshold: Option<f64>,
    /// Master seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots
    #[arg(long)]
    plots: bool,
    /// Anticorrelation flavor the plots highlight [default: weighted]
    #[arg(long, value_enum)]
    anticorr_mode: Option<CliAnticorr>,
    /// Annealing temperature steps [default: 400]
    #[arg(long)]
    sa_steps: Option<usize>,
    /// Annealing proposals per temperature [default: 500]
    #[arg(long)]
    sa_samples: Option<usize>,
    /// Annealing initial temperature [default: 1]
    #[arg(long)]
    sa_t0: Option<f64>,
    /// Annealing final temperature [default: 0.001]
    #[arg(long)]
    sa_tf: Option<f64>,
    /// Coherency band as LOW:HIGH in Hz [default: 1:100]
    #[arg(long)]
    band: Option<String>,
    /// Welch segment length in samples [default: window / 8]
    #[arg(long)]
    segment_len: Option<usize>,
    /// Welch segment overlap fraction [default: 0.5]
    #[arg(long)]
    overlap: Option<f64>,
    /// Edge lengths for shortest-path betweenness [default: inverse]
    #[arg(long, value_enum)]
    betweenness_lengths: Option<CliLengths>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    workers: Option<usize>,
    /// Flat key=value file supplying defaults for any of these flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write per-window annealing traces
    #[arg(long)]
    trace: bool,
    /// Write per-window spectral coordinates
    #[arg(long)]
    dump_coords: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Channel count
    #[arg(long, default_value_t = 16)]
    channels: usize,
    /// Samples to generate
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Community sizes, comma-separated; must sum to the channel count
    #[arg(long, default_value = "9,7")]
    communities: String,
    /// Shared-signal mixing strength
    #[arg(long, default_value_t = 0.9)]
    strength: f64,
    /// Couple communities pairwise with a negative latent coefficient
    #[arg(long)]
    anticorrelate: bool,
    /// Strength of a drive signal common to all channels
    #[arg(long, default_value_t = 0.0)]
    drive: f64,
    /// White-noise level
    #[arg(long, default_value_t = 0.2)]
    noise: f64,
    /// Sample rate in Hz
    #[arg(long, default_value_t = 1000.0)]
    rate: f64,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: CliFormat,
    /// Output path
    #[arg(long)]
    out: PathBuf,
}

const CONFIG_KEYS: &[&str] = &[
    "input",
    "format",
    "channels",
    "header",
    "rate",
    "window-size",
    "kinds",
    "methods",
    "threshold",
    "seed",
    "out",
    "plots",
    "anticorr-mode",
    "sa-steps",
    "sa-samples",
    "sa-t0",
    "sa-tf",
    "band",
    "segment-len",
    "overlap",
    "betweenness-lengths",
    "workers",
    "trace",
    "dump-coords",
];

fn parse_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected key=value, got {line:?}",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "{}:{}: unknown config key {key:?}",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn cfg_parse<T: FromStr>(map: &HashMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|e| Error::Config(format!("config key {key}: {e} (value {v:?})"))),
    }
}

fn cfg_bool(map: &HashMap<String, String>, key: &str) -> Result<Option<bool>> {
    match map.get(key).map(String::as_str) {
        None => Ok(None),
        Some("true") | Some("1") | Some("yes") => Ok(Some(true)),
        Some("false") | Some("0") | Some("no") => Ok(Some(false)),
        Some(v) => Err(Error::Config(format!("config key {key}: expected a boolean, got {v:?}"))),
    }
}

fn parse_format(s: &str) -> Result<InputFormat> {
    match s {
        "csv" => Ok(InputFormat::Csv),
        "raw-f32" => Ok(InputFormat::RawF32),
        _ => Err(Error::Config(format!("unknown format {s:?} (csv, raw-f32)"))),
    }
}

fn parse_anticorr(s: &str) -> Result<AnticorrMode> {
    match s {
        "weighted" => Ok(AnticorrMode::Weighted),
        "count" => Ok(AnticorrMode::Count),
        _ => Err(Error::Config(format!("unknown anticorrelation mode {s:?} (weighted, count)"))),
    }
}

fn parse_lengths(s: &str) -> Result<EdgeLengthMode> {
    match s {
        "inverse" => Ok(EdgeLengthMode::InverseWeight),
        "unit" => Ok(EdgeLengthMode::Unit),
        _ => Err(Error::Config(format!("unknown edge length mode {s:?} (inverse, unit)"))),
    }
}

fn parse_kinds(s: &str) -> Result<Vec<MatrixKind>> {
    let mut kinds = Vec::new();
    for token in s.split(',') {
        let kind = match token.trim().to_ascii_lowercase().as_str() {
            "correlation" => MatrixKind::Correlation,
            "coherency" => MatrixKind::Coherency,
            other => {
                return Err(Error::Config(format!(
                    "unknown connectivity kind {other:?} (correlation, coherency)"
                )))
            }
        };
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

fn parse_methods(s: &str) -> Result<Vec<MethodId>> {
    let mut methods = Vec::new();
    for token in s.split(',') {
        let method: MethodId = token.trim().parse()?;
        if !methods.contains(&method) {
            methods.push(method);
        }
    }
    Ok(methods)
}

fn parse_band(s: &str) -> Result<(f64, f64)> {
    let err = || Error::Config(format!("band must be LOW:HIGH in Hz, got {s:?}"));
    let (low, high) = s.split_once(':').ok_or_else(err)?;
    let low: f64 = low.trim().parse().map_err(|_| err())?;
    let high: f64 = high.trim().parse().map_err(|_| err())?;
    Ok((low, high))
}

fn run_analyze(a: AnalyzeArgs) -> Result<()> {
    let file = match &a.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };

    let input: PathBuf = a
        .input
        .or(cfg_parse(&file, "input")?)
        .ok_or_else(|| Error::Config("--input is required".into()))?;
    let format = match a.format {
        Some(f) => f.into(),
        None => match file.get("format") {
            Some(v) => parse_format(v)?,
            None => InputFormat::Csv,
        },
    };
    let channels = a.channels.or(cfg_parse(&file, "channels")?);
    let header = a.header || cfg_bool(&file, "header")?.unwrap_or(false);
    let rate = a.rate.or(cfg_parse(&file, "rate")?).unwrap_or(1000.0);
    let window_size = a
        .window_size
        .or(cfg_parse(&file, "window-size")?)
        .ok_or_else(|| Error::Config("--window-size is required".into()))?;
    let kinds = match a.kinds.as_deref().or(file.get("kinds").map(String::as_str)) {
        Some(s) => parse_kinds(s)?,
        None => vec![MatrixKind::Correlation],
    };
    let methods = match a.methods.as_deref().or(file.get("methods").map(String::as_str)) {
        Some(s) => parse_methods(s)?,
        None => MethodId::ALL.to_vec(),
    };
    let out: PathBuf = a
        .out
        .or(cfg_parse(&file, "out")?)
        .ok_or_else(|| Error::Config("--out is required".into()))?;
    let anticorr_mode = match a.anticorr_mode {
        Some(m) => m.into(),
        None => match file.get("anticorr-mode") {
            Some(v) => parse_anticorr(v)?,
            None => AnticorrMode::Weighted,
        },
    };
    let schedule = AnnealingSchedule {
        temp_steps: a.sa_steps.or(cfg_parse(&file, "sa-steps")?).unwrap_or(400),
        samples_per_temp: a.sa_samples.or(cfg_parse(&file, "sa-samples")?).unwrap_or(500),
        t_initial: a.sa_t0.or(cfg_parse(&file, "sa-t0")?).unwrap_or(1.0),
        t_final: a.sa_tf.or(cfg_parse(&file, "sa-tf")?).unwrap_or(1e-3),
    };
    let (band_low, band_high) = match a.band.as_deref().or(file.get("band").map(String::as_str)) {
        Some(s) => parse_band(s)?,
        None => (1.0, 100.0),
    };
    let spectral = SpectralConfig {
        segment_length: a.segment_len.or(cfg_parse(&file, "segment-len")?),
        overlap_fraction: a.overlap.or(cfg_parse(&file, "overlap")?).unwrap_or(0.5),
        band_low,
        band_high,
    };
    let betweenness_mode = match a.betweenness_lengths {
        Some(m) => m.into(),
        None => match file.get("betweenness-lengths") {
            Some(v) => parse_lengths(v)?,
            None => EdgeLengthMode::InverseWeight,
        },
    };

    let cfg = PipelineConfig {
        out_dir: out,
        kinds,
        methods,
        window_size,
        threshold: a.threshold.or(cfg_parse(&file, "threshold")?).unwrap_or(0.0),
        seed: a.seed.or(cfg_parse(&file, "seed")?).unwrap_or(0),
        anticorr_mode,
        schedule,
        spectral,
        betweenness_mode,
        k_max: DEFAULT_K_MAX,
        workers: a.workers.or(cfg_parse(&file, "workers")?),
        emit_plots: a.plots || cfg_bool(&file, "plots")?.unwrap_or(false),
        emit_sa_trace: a.trace || cfg_bool(&file, "trace")?.unwrap_or(false),
        emit_coords: a.dump_coords || cfg_bool(&file, "dump-coords")?.unwrap_or(false),
    };

    let opts = LoadOptions { sample_rate: rate, has_header: header, channels };
    let rec = load_recording(&input, format, &opts)?;
    let results = run_pipeline(&cfg, &rec)?;

    let warnings: BTreeSet<&str> =
        results.iter().flat_map(|r| r.warnings.iter().map(String::as_str)).collect();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "analyzed {} window(s) x {} kind(s) with {} method(s); wrote {}",
        results.len() / cfg.kinds.len(),
        cfg.kinds.len(),
        cfg.methods.len(),
        cfg.out_dir.display()
    );
    Ok(())
}

fn run_synth(a: SynthArgs) -> Result<()> {
    let mut sizes = Vec::new();
    for token in a.communities.split(',') {
        let size: usize = token
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("community sizes: {e} (token {token:?})")))?;
        if size == 0 {
            return Err(Error::Config("community sizes must be positive".into()));
        }
        sizes.push(size);
    }
    let total: usize = sizes.iter().sum();
    if total != a.channels {
        return Err(Error::Config(format!(
            "community sizes sum to {total}, but --channels is {}",
            a.channels
        )));
    }
    let mut assignment = Vec::with_capacity(a.channels);
    for (c, &size) in sizes.iter().enumerate() {
        assignment.extend(std::iter::repeat_n(c, size));
    }
    let spec = SyntheticSpec {
        n_channels: a.channels,
        n_samples: a.samples,
        sample_rate: a.rate,
        community_assignment: assignment,
        shared_signal_strength: a.strength,
        anticorrelated_pairs: a.anticorrelate,
        noise_level: a.noise,
        drive_strength: a.drive,
    };
    let rec = generate_synthetic(&spec, a.seed)?;
    save_recording(&rec, &a.out, a.format.into())?;
    println!(
        "wrote {} channels x {} samples ({} communities) to {}",
        a.channels,
        a.samples,
        sizes.len(),
        a.out.display()
    );
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(*args),
        Command::Synth(args) => run_synth(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
