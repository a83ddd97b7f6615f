//! End-to-end runs of the `sigcom` binary: synth → analyze round trips,
//! config-file layering, exit codes, and byte-identical reruns.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigcom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn assert_fails(out: &Output, code: i32, needle: &str) {
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(code), "stderr: {stderr}");
    assert!(stderr.contains(needle), "stderr {stderr:?} does not mention {needle:?}");
}

/// Small two-community recording, quick enough to analyze in every test.
fn synth_csv(dir: &Path, seed: u64) -> PathBuf {
    let path = dir.join(format!("rec_{seed}.csv"));
    let out = run(&[
        "synth",
        "--channels",
        "8",
        "--samples",
        "6000",
        "--communities",
        "5,3",
        "--anticorrelate",
        "--drive",
        "0.3",
        "--seed",
        &seed.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    let stdout = assert_ok(&out);
    assert!(stdout.contains("8 channels x 6000 samples (2 communities)"), "stdout: {stdout}");
    path
}

/// Flags that keep the annealer short; tests that only care about plumbing
/// use these everywhere so the suite stays fast.
const FAST_SA: [&str; 4] = ["--sa-steps", "60", "--sa-samples", "80"];

fn snapshot_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn synth_then_analyze_writes_the_full_output_tree() {
    let dir = tempfile::tempdir().unwrap();
    let rec = synth_csv(dir.path(), 5);
    let out_dir = dir.path().join("out");

    let out = run(&[
        "analyze",
        "--input",
        rec.to_str().unwrap(),
        "--window-size",
        "2000",
        "--kinds",
        "correlation,coherency",
        "--seed",
        "3",
        "--plots",
        "--trace",
        "--dump-coords",
        "--sa-steps",
        "60",
        "--sa-samples",
        "80",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    let stdout = assert_ok(&out);
    assert!(
        stdout.contains("analyzed 3 window(s) x 2 kind(s) with 4 method(s)"),
        "stdout: {stdout}"
    );

    for name in [
        "run_manifest.json",
        "modularity_correlation.csv",
        "modularity_coherency.csv",
        "anticorrelation.csv",
        "cluster_maps/correlation_A.csv",
        "cluster_maps/correlation_B.csv",
        "cluster_maps/correlation_C.csv",
        "cluster_maps/correlation_D.csv",
        "cluster_maps/coherency_A.csv",
        "dendrograms/correlation_w00000_A.json",
        "dendrograms/coherency_w00002_D.json",
        "sa_traces/correlation_w00000.json",
        "sa_traces/coherency_w00002.json",
        "plots/cluster_map_correlation_A.svg",
        "plots/modularity_coherency.svg",
        "plots/anticorrelation.svg",
    ] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
    // Coordinates exist for whatever k method B chose on window 0.
    let coords: Vec<_> = std::fs::read_dir(out_dir.join("coords"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(
        coords.iter().any(|n| n.starts_with("correlation_w00000_k")),
        "no window-0 coordinates in {coords:?}"
    );

    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("run_manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["status"], "complete");
    assert_eq!(manifest["windows"], 3);
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["kinds"], serde_json::json!(["correlation", "coherency"]));

    // The planted 5/3 split is strong: every correlation window's best method
    // stays clearly structured.
    let modularity = std::fs::read_to_string(out_dir.join("modularity_correlation.csv")).unwrap();
    let mut lines = modularity.lines();
    assert_eq!(lines.next().unwrap(), "window,A,B,C,D");
    for line in lines {
        let best = line
            .split(',')
            .skip(1)
            .map(|cell| cell.parse::<f64>().unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best > 0.5, "weak correlation window: {line}");
    }
}

#[test]
fn analyze_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let rec = synth_csv(dir.path(), 7);

    let analyze = |out_dir: &Path, extra: &[&str]| {
        let mut args = vec![
            "analyze",
            "--input",
            rec.to_str().unwrap(),
            "--window-size",
            "3000",
            "--seed",
            "12",
        ];
        args.extend_from_slice(&FAST_SA);
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out", out_dir.to_str().unwrap()]);
        assert_ok(&run(&args));
    };

    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    analyze(&a, &[]);
    analyze(&b, &[]);
    analyze(&c, &["--workers", "1"]);

    let base = snapshot_tree(&a);
    assert_eq!(base, snapshot_tree(&b), "rerun differs");
    assert_eq!(base, snapshot_tree(&c), "single-worker run differs");
}

#[test]
fn missing_required_flags_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let rec = synth_csv(dir.path(), 1);

    let out = run(&["analyze", "--input", rec.to_str().unwrap(), "--out", "x"]);
    assert_fails(&out, 2, "--window-size is required");

    let out = run(&["analyze", "--window-size", "100", "--out", "x"]);
    assert_fails(&out, 2, "--input is required");
}

#[test]
fn mismatched_community_sizes_are_a_config_error() {
    let out = run(&[
        "synth",
        "--channels",
        "8",
        "--communities",
        "5,4",
        "--samples",
        "100",
        "--out",
        "x.csv",
    ]);
    assert_fails(&out, 2, "community sizes sum to 9");
}

#[test]
fn malformed_csv_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("ragged.csv");
    std::fs::write(&bad, "1.0,2.0,3.0\n4.0,5.0\n").unwrap();
    let out = run(&[
        "analyze",
        "--input",
        bad.to_str().unwrap(),
        "--window-size",
        "1",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_fails(&out, 3, "data:");
}

#[test]
fn missing_input_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "analyze",
        "--input",
        dir.path().join("absent.raw").to_str().unwrap(),
        "--format",
        "raw-f32",
        "--channels",
        "4",
        "--window-size",
        "10",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn raw_f32_roundtrip_requires_a_channel_count() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("rec.raw");
    assert_ok(&run(&[
        "synth",
        "--channels",
        "4",
        "--samples",
        "4000",
        "--communities",
        "2,2",
        "--seed",
        "2",
        "--format",
        "raw-f32",
        "--out",
        raw.to_str().unwrap(),
    ]));

    let out = run(&[
        "analyze",
        "--input",
        raw.to_str().unwrap(),
        "--format",
        "raw-f32",
        "--window-size",
        "2000",
        "--methods",
        "A,B",
        "--out",
        dir.path().join("no_channels").to_str().unwrap(),
    ]);
    assert_fails(&out, 2, "explicit channel count");

    let out = run(&[
        "analyze",
        "--input",
        raw.to_str().unwrap(),
        "--format",
        "raw-f32",
        "--channels",
        "4",
        "--window-size",
        "2000",
        "--methods",
        "A,B",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    let stdout = assert_ok(&out);
    assert!(stdout.contains("analyzed 2 window(s)"), "stdout: {stdout}");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let rec = synth_csv(dir.path(), 9);
    let from_file = dir.path().join("from_file");
    let overridden = dir.path().join("overridden");

    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "# defaults for this recording\n\
             input = {}\n\
             window-size = 3000\n\
             methods = A,D\n\
             seed = 9\n\
             sa_steps = 60\n\
             sa-samples = 80\n\
             out = {}\n",
            rec.display(),
            from_file.display()
        ),
    )
    .unwrap();

    let stdout = assert_ok(&run(&["analyze", "--config", cfg.to_str().unwrap()]));
    assert!(stdout.contains("analyzed 2 window(s) x 1 kind(s) with 2 method(s)"));
    let manifest: Value = serde_json::from_str(
        &std::fs::read_to_string(from_file.join("run_manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["methods"], serde_json::json!(["A", "D"]));

    // Explicit flags override file values; the rest still comes from the file.
    let stdout = assert_ok(&run(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "31",
        "--methods",
        "A",
        "--out",
        overridden.to_str().unwrap(),
    ]));
    assert!(stdout.contains("with 1 method(s)"));
    let manifest: Value = serde_json::from_str(
        &std::fs::read_to_string(overridden.join("run_manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["seed"], 31);
    assert_eq!(manifest["methods"], serde_json::json!(["A"]));
    assert_eq!(manifest["window_size"], 3000);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "windowsize = 100\n").unwrap();
    let out = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_fails(&out, 2, "unknown config key \"windowsize\"");
}

#[test]
fn config_line_without_equals_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "seed\n").unwrap();
    let out = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_fails(&out, 2, "expected key=value");
}

#[test]
fn bad_band_flag_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let rec = synth_csv(dir.path(), 4);
    let out = run(&[
        "analyze",
        "--input",
        rec.to_str().unwrap(),
        "--window-size",
        "1000",
        "--band",
        "40",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_fails(&out, 2, "band must be LOW:HIGH");
}

/// The numeric failure class (eigensolver non-convergence) is not reachable
/// through the CLI with valid input, so its code is pinned here directly.
#[test]
fn exit_codes_cover_every_error_class() {
    use sigcom::error::Error;
    assert_eq!(Error::Config("x".into()).exit_code(), 2);
    assert_eq!(Error::Data("x".into()).exit_code(), 3);
    assert_eq!(
        Error::io("p", std::io::Error::new(std::io::ErrorKind::NotFound, "x")).exit_code(),
        3
    );
    assert_eq!(Error::Numeric("x".into()).exit_code(), 4);
}
