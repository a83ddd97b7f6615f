//! End-to-end driver: a recording is cut into windows, each window becomes
//! one connectivity matrix per requested kind, each matrix becomes a signed
//! graph, every requested method clusters it, and the collected results are
//! written out as cluster maps, modularity traces, anticorrelation traces,
//! dendrograms and a run manifest.
//!
//! Window jobs are independent and run on a rayon pool. Every random choice
//! is keyed by (master seed, window index, method), so the emitted files are
//! byte-identical regardless of worker count or scheduling order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::anneal::{method_d, AnnealingSchedule, LevelTraces};
use crate::betweenness::{method_c, EdgeLengthMode};
use crate::connectivity::{
    anticorrelation_index, coherency_matrix, correlation_matrix, AnticorrMode, MatrixKind,
    SpectralConfig,
};
use crate::error::{Error, Result};
use crate::fiedler::method_a;
use crate::graph::SignedGraph;
use crate::plot;
use crate::report::{MethodId, MethodReport};
use crate::seed::derive_seed;
use crate::signal::{window_recording, Recording, Window, WindowSpec};
use crate::spectral::{method_b, spectral_coordinates, DEFAULT_K_MAX};

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub out_dir: PathBuf,
    pub kinds: Vec<MatrixKind>,
    pub methods: Vec<MethodId>,
    pub window_size: usize,
    /// Edges with |value| at or below this are dropped.
    pub threshold: f64,
    pub seed: u64,
    /// Which anticorrelation flavor the plots highlight (the CSV always
    /// carries both).
    pub anticorr_mode: AnticorrMode,
    pub schedule: AnnealingSchedule,
    pub spectral: SpectralConfig,
    pub betweenness_mode: EdgeLengthMode,
    pub k_max: usize,
    /// Rayon worker count; `None` uses the global default.
    pub workers: Option<usize>,
    pub emit_plots: bool,
    pub emit_sa_trace: bool,
    pub emit_coords: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            out_dir: PathBuf::from("out"),
            kinds: vec![MatrixKind::Correlation],
            methods: vec![MethodId::A, MethodId::B, MethodId::C, MethodId::D],
            window_size: 1000,
            threshold: 0.0,
            seed: 0,
            anticorr_mode: AnticorrMode::Weighted,
            schedule: AnnealingSchedule::default(),
            spectral: SpectralConfig::default(),
            betweenness_mode: EdgeLengthMode::InverseWeight,
            k_max: DEFAULT_K_MAX,
            workers: None,
            emit_plots: false,
            emit_sa_trace: false,
            emit_coords: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::Config("no connectivity kinds requested".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods requested".into()));
        }
        for (list, what) in [
            (self.kinds.iter().map(|k| k.as_str()).collect::<Vec<_>>(), "kind"),
            (self.methods.iter().map(|m| m.letter()).collect::<Vec<_>>(), "method"),
        ] {
            for (i, name) in list.iter().enumerate() {
                if list[..i].contains(name) {
                    return Err(Error::Config(format!("duplicate {what} {name}")));
                }
            }
        }
        if self.window_size < 2 {
            return Err(Error::Config(format!(
                "window size must be at least 2 samples, got {}",
                self.window_size
            )));
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "threshold {} outside [0, 1)",
                self.threshold
            )));
        }
        if self.k_max < 1 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        self.schedule.validate()
    }
}

/// Everything computed for one (window, kind) job.
#[derive(Clone, Debug)]
pub struct WindowResult {
    pub window_index: usize,
    pub kind: MatrixKind,
    /// Both anticorrelation flavors; `None` for unsigned kinds.
    pub anticorr_weighted: Option<f64>,
    pub anticorr_count: Option<f64>,
    /// One report per requested method, in request order.
    pub reports: Vec<MethodReport>,
    pub warnings: Vec<String>,
    /// Committed annealing traces as (level k, per-temperature best q_s);
    /// populated only when trace emission is on.
    pub sa_traces: LevelTraces,
    /// Spectral embeddings as (k, one row per vertex); populated only when
    /// coordinate emission is on.
    pub coords: Vec<(usize, Vec<Vec<f64>>)>,
}

fn with_context(e: Error, window: usize, kind: MatrixKind) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("window {window} ({kind}): {m}")),
        Error::Data(m) => Error::Data(format!("window {window} ({kind}): {m}")),
        Error::Numeric(m) => Error::Numeric(format!("window {window} ({kind}): {m}")),
        io => io,
    }
}

fn analyze_window(
    cfg: &PipelineConfig,
    rec: &Recording,
    window: &Window,
    kind: MatrixKind,
) -> Result<WindowResult> {
    let inner = || -> Result<WindowResult> {
        let matrix = match kind {
            MatrixKind::Correlation => correlation_matrix(window)?,
            MatrixKind::Coherency => coherency_matrix(window, rec.sample_rate(), &cfg.spectral)?,
        };
        let (anticorr_weighted, anticorr_count) = if kind == MatrixKind::Correlation {
            (
                Some(anticorrelation_index(&matrix, AnticorrMode::Weighted)?),
                Some(anticorrelation_index(&matrix, AnticorrMode::Count)?),
            )
        } else {
            (None, None)
        };
        let g = SignedGraph::from_connectivity(&matrix, cfg.threshold)?;
        let mut reports = Vec::with_capacity(cfg.methods.len());
        let mut sa_traces = Vec::new();
        for &method in &cfg.methods {
            let seed = derive_seed(cfg.seed, &[window.index as u64, method.seed_id()]);
            let report = match method {
                MethodId::A => method_a(&g)?,
                MethodId::B => method_b(&g, cfg.k_max, seed)?,
                MethodId::C => method_c(&g, cfg.betweenness_mode)?.0,
                MethodId::D => {
                    let (report, traces) = method_d(&g, &cfg.schedule, seed)?;
                    if cfg.emit_sa_trace {
                        sa_traces = traces;
                    }
                    report
                }
            };
            reports.push(report);
        }
        let mut coords = Vec::new();
        if cfg.emit_coords && cfg.methods.contains(&MethodId::B) {
            for k in 1..=cfg.k_max.min(g.n()) {
                coords.push((k, spectral_coordinates(&g, k)?));
            }
        }
        Ok(WindowResult {
            window_index: window.index,
            kind,
            anticorr_weighted,
            anticorr_count,
            reports,
            warnings: matrix.warnings().to_vec(),
            sa_traces,
            coords,
        })
    };
    inner().map_err(|e| with_context(e, window.index, kind))
}

/// Runs the whole analysis and writes every output under `cfg.out_dir`.
/// If any window job fails, only the manifest is written (with per-job
/// statuses, so the failure is locatable) and the first error in job order
/// is returned.
pub fn run_pipeline(cfg: &PipelineConfig, rec: &Recording) -> Result<Vec<WindowResult>> {
    cfg.validate()?;
    let windows = window_recording(rec, &WindowSpec { window_size: cfg.window_size })?;
    let jobs: Vec<(usize, MatrixKind)> = windows
        .iter()
        .flat_map(|w| cfg.kinds.iter().map(move |&k| (w.index, k)))
        .collect();

    let work = || -> Vec<Result<WindowResult>> {
        jobs.par_iter()
            .map(|&(wi, kind)| analyze_window(cfg, rec, &windows[wi], kind))
            .collect()
    };
    let results = match cfg.workers {
        Some(count) => rayon::ThreadPoolBuilder::new()
            .num_threads(count)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(work),
        None => work(),
    };

    let statuses: Vec<Value> = jobs
        .iter()
        .zip(&results)
        .map(|(&(wi, kind), r)| {
            let status = match r {
                Ok(_) => "ok".to_string(),
                Err(e) => format!("error: {e}"),
            };
            json!({ "window": wi, "kind": kind.as_str(), "status": status })
        })
        .collect();
    let first_failure = results.iter().position(|r| r.is_err());
    write_manifest(cfg, rec, windows.len(), &statuses, first_failure.is_none())?;
    if let Some(i) = first_failure {
        return Err(results.into_iter().nth(i).unwrap().unwrap_err());
    }

    let results: Vec<WindowResult> = results.into_iter().map(|r| r.unwrap()).collect();
    emit_outputs(cfg, rec, &results)?;
    Ok(results)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_json_file(path: &Path, doc: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

fn write_manifest(
    cfg: &PipelineConfig,
    rec: &Recording,
    n_windows: usize,
    statuses: &[Value],
    complete: bool,
) -> Result<()> {
    ensure_dir(&cfg.out_dir)?;
    let manifest = json!({
        "status": if complete { "complete" } else { "failed" },
        "n_channels": rec.n_channels(),
        "n_samples": rec.n_samples(),
        "sample_rate": rec.sample_rate(),
        "windows": n_windows,
        "window_size": cfg.window_size,
        "kinds": cfg.kinds.iter().map(|k| k.as_str()).collect::<Vec<_>>(),
        "methods": cfg.methods.iter().map(|m| m.letter()).collect::<Vec<_>>(),
        "threshold": cfg.threshold,
        "seed": cfg.seed,
        "k_max": cfg.k_max,
        "anticorr_mode": match cfg.anticorr_mode {
            AnticorrMode::Weighted => "weighted",
            AnticorrMode::Count => "count",
        },
        "betweenness_lengths": match cfg.betweenness_mode {
            EdgeLengthMode::InverseWeight => "inverse",
            EdgeLengthMode::Unit => "unit",
        },
        "annealing": {
            "temp_steps": cfg.schedule.temp_steps,
            "samples_per_temp": cfg.schedule.samples_per_temp,
            "t_initial": cfg.schedule.t_initial,
            "t_final": cfg.schedule.t_final,
        },
        "spectral": {
            "segment_length": cfg.spectral.segment_length,
            "overlap_fraction": cfg.spectral.overlap_fraction,
            "band": [cfg.spectral.band_low, cfg.spectral.band_high],
        },
        "jobs": statuses,
    });
    write_json_file(&cfg.out_dir.join("run_manifest.json"), &manifest)
}

fn emit_outputs(cfg: &PipelineConfig, rec: &Recording, results: &[WindowResult]) -> Result<()> {
    let out = &cfg.out_dir;
    let maps_dir = out.join("cluster_maps");
    let dendro_dir = out.join("dendrograms");
    ensure_dir(&maps_dir)?;
    ensure_dir(&dendro_dir)?;

    for &kind in &cfg.kinds {
        let rows: Vec<&WindowResult> = results.iter().filter(|r| r.kind == kind).collect();

        // Cluster maps: one file per method, vertices down, windows across,
        // 1-based cluster ids.
        for (mi, &method) in cfg.methods.iter().enumerate() {
            let mut text = String::new();
            for v in 0..rec.n_channels() {
                for (c, r) in rows.iter().enumerate() {
                    if c > 0 {
                        text.push(',');
                    }
                    let id = r.reports[mi].chosen().clustering.assignment()[v] + 1;
                    write!(text, "{id}").unwrap();
                }
                text.push('\n');
            }
            write_text(
                &maps_dir.join(format!("{}_{}.csv", kind.as_str(), method.letter())),
                &text,
            )?;
        }

        // Modularity trace: chosen q_s per window and method.
        let mut text = String::from("window");
        for &method in &cfg.methods {
            text.push(',');
            text.push_str(method.letter());
        }
        text.push('\n');
        for r in &rows {
            write!(text, "{}", r.window_index).unwrap();
            for report in &r.reports {
                write!(text, ",{}", report.chosen().q_s).unwrap();
            }
            text.push('\n');
        }
        write_text(&out.join(format!("modularity_{}.csv", kind.as_str())), &text)?;

        // Dendrograms: full level-by-level report per window and method.
        for r in &rows {
            for (mi, &method) in cfg.methods.iter().enumerate() {
                let path = dendro_dir.join(format!(
                    "{}_w{:05}_{}.json",
                    kind.as_str(),
                    r.window_index,
                    method.letter()
                ));
                write_json_file(&path, &r.reports[mi].to_json())?;
            }
        }

        if cfg.emit_sa_trace && cfg.methods.contains(&MethodId::D) {
            let trace_dir = out.join("sa_traces");
            ensure_dir(&trace_dir)?;
            for r in &rows {
                let levels: Vec<Value> = r
                    .sa_traces
                    .iter()
                    .map(|(k, trace)| json!({ "k": k, "best_q_s": trace }))
                    .collect();
                let doc = json!({
                    "window": r.window_index,
                    "kind": kind.as_str(),
                    "levels": levels,
                });
                let path =
                    trace_dir.join(format!("{}_w{:05}.json", kind.as_str(), r.window_index));
                write_json_file(&path, &doc)?;
            }
        }

        if cfg.emit_coords && cfg.methods.contains(&MethodId::B) {
            let coords_dir = out.join("coords");
            ensure_dir(&coords_dir)?;
            for r in &rows {
                for (k, points) in &r.coords {
                    let mut text = String::new();
                    for point in points {
                        let cells: Vec<String> =
                            point.iter().map(|v| format!("{v:.16e}")).collect();
                        text.push_str(&cells.join(","));
                        text.push('\n');
                    }
                    let path = coords_dir.join(format!(
                        "{}_w{:05}_k{}.csv",
                        kind.as_str(),
                        r.window_index,
                        k
                    ));
                    write_text(&path, &text)?;
                }
            }
        }
    }

    if cfg.kinds.contains(&MatrixKind::Correlation) {
        let mut text = String::from("window,weighted,count\n");
        for r in results.iter().filter(|r| r.kind == MatrixKind::Correlation) {
            writeln!(
                text,
                "{},{},{}",
                r.window_index,
                r.anticorr_weighted.unwrap(),
                r.anticorr_count.unwrap()
            )
            .unwrap();
        }
        write_text(&out.join("anticorrelation.csv"), &text)?;
    }

    if cfg.emit_plots {
        plot::emit_plots(cfg, rec, results)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{generate_synthetic, SyntheticSpec};

    fn tiny_recording() -> Recording {
        let spec = SyntheticSpec {
            n_channels: 6,
            n_samples: 600,
            sample_rate: 1000.0,
            community_assignment: vec![0, 0, 0, 1, 1, 1],
            shared_signal_strength: 0.9,
            anticorrelated_pairs: false,
            noise_level: 0.2,
            drive_strength: 0.0,
        };
        generate_synthetic(&spec, 7).unwrap()
    }

    fn tiny_config(dir: &Path) -> PipelineConfig {
        PipelineConfig {
            out_dir: dir.to_path_buf(),
            window_size: 200,
            schedule: AnnealingSchedule {
                temp_steps: 40,
                samples_per_temp: 40,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn pipeline_emits_expected_files() {
        let dir = tempfile::tempdir().unwrap();
        let rec = tiny_recording();
        let cfg = tiny_config(dir.path());
        let results = run_pipeline(&cfg, &rec).unwrap();
        assert_eq!(results.len(), 3); // 600 samples / 200 per window
        for name in [
            "run_manifest.json",
            "modularity_correlation.csv",
            "anticorrelation.csv",
            "cluster_maps/correlation_A.csv",
            "cluster_maps/correlation_D.csv",
            "dendrograms/correlation_w00000_A.json",
            "dendrograms/correlation_w00002_D.json",
        ] {
            assert!(dir.path().join(name).exists(), "missing {name}");
        }
        let manifest: Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join("run_manifest.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest["status"], "complete");
        assert_eq!(manifest["jobs"].as_array().unwrap().len(), 3);
        let map = fs::read_to_string(dir.path().join("cluster_maps/correlation_A.csv")).unwrap();
        assert_eq!(map.lines().count(), 6);
        assert_eq!(map.lines().next().unwrap().split(',').count(), 3);
        let modularity =
            fs::read_to_string(dir.path().join("modularity_correlation.csv")).unwrap();
        assert_eq!(modularity.lines().next().unwrap(), "window,A,B,C,D");
    }

    #[test]
    fn pipeline_output_is_identical_across_worker_counts() {
        let rec = tiny_recording();
        let mut trees = Vec::new();
        for workers in [Some(1), Some(3)] {
            let dir = tempfile::tempdir().unwrap();
            let mut cfg = tiny_config(dir.path());
            cfg.workers = workers;
            run_pipeline(&cfg, &rec).unwrap();
            let mut files: Vec<(String, Vec<u8>)> = Vec::new();
            let mut stack = vec![dir.path().to_path_buf()];
            while let Some(d) = stack.pop() {
                for entry in fs::read_dir(&d).unwrap() {
                    let p = entry.unwrap().path();
                    if p.is_dir() {
                        stack.push(p);
                    } else {
                        let rel = p.strip_prefix(dir.path()).unwrap();
                        files.push((rel.to_string_lossy().into_owned(), fs::read(&p).unwrap()));
                    }
                }
            }
            files.sort();
            trees.push(files);
        }
        assert_eq!(trees[0].len(), trees[1].len());
        for (a, b) in trees[0].iter().zip(&trees[1]) {
            assert_eq!(a.0, b.0);
            assert!(a.1 == b.1, "file {} differs between worker counts", a.0);
        }
    }

    #[test]
    fn pipeline_failure_leaves_manifest_only() {
        let dir = tempfile::tempdir().unwrap();
        let rec = tiny_recording();
        let mut cfg = tiny_config(dir.path());
        // Coherency on 200-sample windows: default segment length 25 ≥ 8 is
        // fine, but an explicit band above what 1000 Hz supports is not.
        cfg.kinds = vec![MatrixKind::Coherency];
        cfg.spectral.band_high = 900.0;
        let err = run_pipeline(&cfg, &rec).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(format!("{err}").contains("window 0"));
        assert!(dir.path().join("run_manifest.json").exists());
        assert!(!dir.path().join("modularity_coherency.csv").exists());
        let manifest: Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join("run_manifest.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest["status"], "failed");
        assert!(manifest["jobs"][0]["status"]
            .as_str()
            .unwrap()
            .starts_with("error:"));
    }

    #[test]
    fn pipeline_rejects_bad_configs() {
        let rec = tiny_recording();
        let dir = tempfile::tempdir().unwrap();
        let base = tiny_config(dir.path());

        let mut cfg = base.clone();
        cfg.kinds.clear();
        assert!(run_pipeline(&cfg, &rec).is_err());

        let mut cfg = base.clone();
        cfg.methods = vec![MethodId::A, MethodId::A];
        assert!(run_pipeline(&cfg, &rec).is_err());

        let mut cfg = base.clone();
        cfg.threshold = 1.0;
        assert!(run_pipeline(&cfg, &rec).is_err());

        let mut cfg = base.clone();
        cfg.workers = Some(0);
        assert!(run_pipeline(&cfg, &rec).is_err());

        let mut cfg = base;
        cfg.window_size = 100_000;
        assert!(matches!(run_pipeline(&cfg, &rec), Err(Error::Data(_))));
    }

    #[test]
    fn optional_emissions_appear_when_requested() {
        let dir = tempfile::tempdir().unwrap();
        let rec = tiny_recording();
        let mut cfg = tiny_config(dir.path());
        cfg.emit_sa_trace = true;
        cfg.emit_coords = true;
        cfg.emit_plots = true;
        run_pipeline(&cfg, &rec).unwrap();
        assert!(dir.path().join("sa_traces/correlation_w00000.json").exists());
        assert!(dir.path().join("coords/correlation_w00000_k1.csv").exists());
        assert!(dir.path().join("coords/correlation_w00000_k6.csv").exists());
        assert!(dir.path().join("plots/modularity_correlation.svg").exists());
        assert!(dir.path().join("plots/cluster_map_correlation_A.svg").exists());
        assert!(dir.path().join("plots/anticorrelation.svg").exists());
        let trace: Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join("sa_traces/correlation_w00000.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(trace["window"], 0);
        assert!(!trace["levels"].as_array().unwrap().is_empty());
        assert_eq!(trace["levels"][0]["k"], 2);
    }
}
