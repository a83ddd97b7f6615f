//! Recording I/O, windowing, and the planted-community synthetic generator.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// A multichannel recording: `n_samples × n_channels` finite reals plus the
/// sample rate. Stored row-major (sample-major), i.e. the layout multichannel
/// DAQ dumps usually have.
#[derive(Clone, Debug)]
pub struct Recording {
    sample_rate: f64,
    n_channels: usize,
    data: Vec<f64>,
}

impl Recording {
    pub fn new(sample_rate: f64, n_channels: usize, data: Vec<f64>) -> Result<Self> {
        if sample_rate <= 0.0 || !sample_rate.is_finite() {
            return Err(Error::Config(format!("sample rate {sample_rate} must be positive")));
        }
        if n_channels < 2 {
            return Err(Error::Data(format!(
                "need at least 2 channels, got {n_channels}"
            )));
        }
        if !data.len().is_multiple_of(n_channels) {
            return Err(Error::Data(format!(
                "sample buffer length {} is not a multiple of {n_channels} channels",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite sample at row {}, column {}",
                pos / n_channels + 1,
                pos % n_channels + 1
            )));
        }
        Ok(Recording { sample_rate, n_channels, data })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_samples(&self) -> usize {
        self.data.len() / self.n_channels
    }

    pub fn value(&self, sample: usize, channel: usize) -> f64 {
        self.data[sample * self.n_channels + channel]
    }

    pub fn samples(&self) -> &[f64] {
        &self.data
    }
}

/// Input file formats understood by [`load_recording`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// Comma-separated, one sample per row, one column per channel.
    Csv,
    /// Little-endian IEEE-754 binary32, channel-interleaved.
    RawF32,
}

/// Options accompanying a load: the sample rate to stamp on the recording,
/// whether a CSV starts with a header row, and (raw format only) the channel
/// count, which raw files cannot self-describe.
#[derive(Clone, Debug)]
pub struct LoadOptions {
    pub sample_rate: f64,
    pub has_header: bool,
    pub channels: Option<usize>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { sample_rate: 1000.0, has_header: false, channels: None }
    }
}

/// Loads a recording, reporting parse problems with their row/column.
pub fn load_recording(path: &Path, format: InputFormat, opts: &LoadOptions) -> Result<Recording> {
    match format {
        InputFormat::Csv => load_csv(path, opts),
        InputFormat::RawF32 => load_raw(path, opts),
    }
}

fn load_csv(path: &Path, opts: &LoadOptions) -> Result<Recording> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(opts.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let mut data = Vec::new();
    let mut n_channels = 0usize;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        if r == 0 {
            n_channels = record.len();
        } else if record.len() != n_channels {
            return Err(Error::Data(format!(
                "{}: row {} has {} columns, expected {n_channels}",
                path.display(),
                r + 1,
                record.len()
            )));
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::Data(format!(
                    "{}: row {}, column {}: cannot parse {field:?} as a number",
                    path.display(),
                    r + 1,
                    c + 1
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "{}: row {}, column {}: non-finite sample {field:?}",
                    path.display(),
                    r + 1,
                    c + 1
                )));
            }
            data.push(v);
        }
    }
    if data.is_empty() {
        return Err(Error::Data(format!("{}: no samples", path.display())));
    }
    Recording::new(opts.sample_rate, n_channels, data)
}

fn load_raw(path: &Path, opts: &LoadOptions) -> Result<Recording> {
    let n_channels = opts.channels.ok_or_else(|| {
        Error::Config("raw-f32 input needs an explicit channel count (--channels)".into())
    })?;
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let frame = 4 * n_channels;
    if n_channels == 0 || bytes.is_empty() || bytes.len() % frame != 0 {
        return Err(Error::Data(format!(
            "{}: byte length {} is not a positive multiple of 4·{n_channels}",
            path.display(),
            bytes.len()
        )));
    }
    let mut data = Vec::with_capacity(bytes.len() / 4);
    for (i, chunk) in bytes.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::Data(format!(
                "{}: non-finite sample at row {}, column {}",
                path.display(),
                i / n_channels + 1,
                i % n_channels + 1
            )));
        }
        data.push(f64::from(v));
    }
    Recording::new(opts.sample_rate, n_channels, data)
}

/// Writes a recording in one of the loadable formats (CSV rows carry no
/// header; raw output truncates to f32, which is that format's precision).
pub fn save_recording(rec: &Recording, path: &Path, format: InputFormat) -> Result<()> {
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(path).map_err(|e| Error::io(path, e))?,
    );
    match format {
        InputFormat::Csv => {
            for s in 0..rec.n_samples() {
                let row: Vec<String> =
                    (0..rec.n_channels()).map(|c| rec.value(s, c).to_string()).collect();
                writeln!(out, "{}", row.join(",")).map_err(|e| Error::io(path, e))?;
            }
        }
        InputFormat::RawF32 => {
            for &v in rec.samples() {
                out.write_all(&(v as f32).to_le_bytes()).map_err(|e| Error::io(path, e))?;
            }
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Window length in samples.
#[derive(Clone, Copy, Debug)]
pub struct WindowSpec {
    pub window_size: usize,
}

/// A borrowed, contiguous `window_size × n_channels` block of a recording.
#[derive(Clone, Copy, Debug)]
pub struct Window<'a> {
    pub index: usize,
    n_channels: usize,
    data: &'a [f64],
}

impl<'a> Window<'a> {
    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_samples(&self) -> usize {
        self.data.len() / self.n_channels
    }

    pub fn value(&self, sample: usize, channel: usize) -> f64 {
        self.data[sample * self.n_channels + channel]
    }

    pub fn samples(&self) -> &'a [f64] {
        self.data
    }

    /// One channel as an owned series.
    pub fn channel(&self, c: usize) -> Vec<f64> {
        (0..self.n_samples()).map(|s| self.value(s, c)).collect()
    }
}

/// Slices a recording into consecutive non-overlapping windows; a trailing
/// remainder shorter than the window is dropped (never zero-padded — padding
/// would bias the correlation estimates).
pub fn window_recording<'a>(rec: &'a Recording, spec: &WindowSpec) -> Result<Vec<Window<'a>>> {
    if spec.window_size < 2 {
        return Err(Error::Config(format!(
            "window size {} must be at least 2",
            spec.window_size
        )));
    }
    if spec.window_size > rec.n_samples() {
        return Err(Error::Data(format!(
            "window size {} exceeds recording length {}",
            spec.window_size,
            rec.n_samples()
        )));
    }
    let stride = spec.window_size * rec.n_channels();
    Ok(rec
        .samples()
        .chunks_exact(stride)
        .enumerate()
        .map(|(index, data)| Window { index, n_channels: rec.n_channels(), data })
        .collect())
}

/// Blueprint for a synthetic recording with planted communities: channels in
/// one community share a latent band-limited signal; optionally communities
/// are coupled pairwise with a negative coefficient, and every channel can
/// receive a common broadband drive (what makes coherency look uniform) plus
/// independent noise.
#[derive(Clone, Debug)]
pub struct SyntheticSpec {
    pub n_channels: usize,
    pub n_samples: usize,
    pub sample_rate: f64,
    /// Planted community label per channel (arbitrary labels).
    pub community_assignment: Vec<usize>,
    /// Latent mix coefficient in [0, 1].
    pub shared_signal_strength: f64,
    /// Couple communities pairwise with a negative latent coefficient.
    pub anticorrelated_pairs: bool,
    /// Independent per-channel noise amplitude.
    pub noise_level: f64,
    /// Common broadband drive amplitude (0 disables it).
    pub drive_strength: f64,
}

/// Latent coupling used for anticorrelated community pairs: the second
/// community of a pair gets −γ·(partner latent) + √(1−γ²)·(own latent).
const ANTI_COUPLING: f64 = 0.45;

fn validate_spec(spec: &SyntheticSpec) -> Result<()> {
    if spec.n_channels < 2 {
        return Err(Error::Config("need at least 2 channels".into()));
    }
    if spec.n_samples < 2 {
        return Err(Error::Config("need at least 2 samples".into()));
    }
    if spec.sample_rate <= 0.0 || spec.sample_rate.is_nan() {
        return Err(Error::Config("sample rate must be positive".into()));
    }
    if spec.community_assignment.len() != spec.n_channels {
        return Err(Error::Config(format!(
            "community assignment covers {} channels, expected {}",
            spec.community_assignment.len(),
            spec.n_channels
        )));
    }
    if !(0.0..=1.0).contains(&spec.shared_signal_strength) {
        return Err(Error::Config("shared signal strength must lie in [0, 1]".into()));
    }
    if spec.noise_level < 0.0 || spec.drive_strength < 0.0 {
        return Err(Error::Config("noise and drive levels must be non-negative".into()));
    }
    Ok(())
}

/// Unit-variance, zero-mean in-place standardization; leaves constant series
/// untouched (their variance cannot be fixed up).
fn standardize(x: &mut [f64]) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var > 0.0 {
        let s = var.sqrt();
        for v in x.iter_mut() {
            *v = (*v - mean) / s;
        }
    }
}

/// Uniform white noise with unit variance.
fn white(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let half_width = 3f64.sqrt();
    (0..n).map(|_| rng.gen_range(-half_width..half_width)).collect()
}

/// Band-limited latent: a handful of sinusoids in 1–10 Hz with random
/// frequencies, amplitudes, and phases.
fn band_limited_latent(rng: &mut ChaCha8Rng, n: usize, rate: f64) -> Vec<f64> {
    const COMPONENTS: usize = 4;
    let params: Vec<(f64, f64, f64)> = (0..COMPONENTS)
        .map(|_| {
            (
                rng.gen_range(1.0..10.0),
                rng.gen_range(0.5..1.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    (0..n)
        .map(|t| {
            let time = t as f64 / rate;
            params
                .iter()
                .map(|(f, a, p)| a * (std::f64::consts::TAU * f * time + p).sin())
                .sum()
        })
        .collect()
}

/// Generates a planted-community recording; a pure function of (spec, seed).
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Recording> {
    validate_spec(spec)?;
    let n = spec.n_samples;

    // Map arbitrary labels to dense community indices in label order.
    let mut labels: Vec<usize> = spec.community_assignment.clone();
    labels.sort_unstable();
    labels.dedup();
    let community_of: Vec<usize> = spec
        .community_assignment
        .iter()
        .map(|l| labels.binary_search(l).unwrap())
        .collect();

    let mut latents: Vec<Vec<f64>> = labels
        .iter()
        .enumerate()
        .map(|(c, _)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[1, c as u64]));
            band_limited_latent(&mut rng, n, spec.sample_rate)
        })
        .collect();
    for latent in &mut latents {
        standardize(latent);
    }
    if spec.anticorrelated_pairs {
        // Couple (0,1), (2,3), …; an unpaired trailing community stays as is.
        let gamma = ANTI_COUPLING;
        let ortho = (1.0 - gamma * gamma).sqrt();
        for pair in (1..latents.len()).step_by(2) {
            let partner = pair - 1;
            for t in 0..n {
                latents[pair][t] = -gamma * latents[partner][t] + ortho * latents[pair][t];
            }
            standardize(&mut latents[pair]);
        }
    }

    let drive = {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[2]));
        let mut d = white(&mut rng, n);
        standardize(&mut d);
        d
    };

    let mut data = vec![0.0; n * spec.n_channels];
    for ch in 0..spec.n_channels {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[3, ch as u64]));
        let noise = white(&mut rng, n);
        let latent = &latents[community_of[ch]];
        for t in 0..n {
            data[t * spec.n_channels + ch] = spec.shared_signal_strength * latent[t]
                + spec.drive_strength * drive[t]
                + spec.noise_level * noise[t];
        }
    }
    Recording::new(spec.sample_rate, spec.n_channels, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(strength: f64, noise: f64) -> SyntheticSpec {
        SyntheticSpec {
            n_channels: 4,
            n_samples: 20_000,
            sample_rate: 1000.0,
            community_assignment: vec![0, 0, 1, 1],
            shared_signal_strength: strength,
            anticorrelated_pairs: false,
            noise_level: noise,
            drive_strength: 0.0,
        }
    }

    fn pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut vx = 0.0;
        let mut vy = 0.0;
        for (a, b) in x.iter().zip(y) {
            cov += (a - mx) * (b - my);
            vx += (a - mx) * (a - mx);
            vy += (b - my) * (b - my);
        }
        cov / (vx * vy).sqrt()
    }

    fn channel(rec: &Recording, c: usize) -> Vec<f64> {
        (0..rec.n_samples()).map(|s| rec.value(s, c)).collect()
    }

    #[test]
    fn windowing_shapes_and_reconstruction() {
        let rec = Recording::new(10.0, 2, (0..20).map(f64::from).collect()).unwrap();
        // 10 samples, window 3 → 3 windows, 1 sample dropped.
        let windows = window_recording(&rec, &WindowSpec { window_size: 3 }).unwrap();
        assert_eq!(windows.len(), 3);
        assert_eq!(windows[2].n_samples(), 3);
        let mut rebuilt: Vec<f64> = windows.iter().flat_map(|w| w.samples().to_vec()).collect();
        rebuilt.extend_from_slice(&rec.samples()[18..]);
        assert_eq!(rebuilt, rec.samples());
        // Exact fit.
        let exact = window_recording(&rec, &WindowSpec { window_size: 10 }).unwrap();
        assert_eq!(exact.len(), 1);
        // Oversized window.
        assert!(window_recording(&rec, &WindowSpec { window_size: 11 }).is_err());
    }

    #[test]
    fn synthetic_is_deterministic() {
        let s = spec(0.9, 0.1);
        let a = generate_synthetic(&s, 7).unwrap();
        let b = generate_synthetic(&s, 7).unwrap();
        assert_eq!(a.samples(), b.samples());
        let c = generate_synthetic(&s, 8).unwrap();
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn strong_communities_correlate() {
        let rec = generate_synthetic(&spec(0.9, 0.2), 42).unwrap();
        let (c0, c1) = (channel(&rec, 0), channel(&rec, 1));
        assert!(pearson(&c0, &c1) > 0.7);
    }

    #[test]
    fn zero_strength_decorrelates() {
        let rec = generate_synthetic(&spec(0.0, 1.0), 42).unwrap();
        for a in 0..4 {
            for b in (a + 1)..4 {
                let r = pearson(&channel(&rec, a), &channel(&rec, b));
                assert!(r.abs() < 0.1, "channels {a},{b}: r={r}");
            }
        }
    }

    #[test]
    fn anticorrelated_pairs_flip_sign() {
        let mut s = spec(0.9, 0.1);
        s.anticorrelated_pairs = true;
        let rec = generate_synthetic(&s, 3).unwrap();
        let r = pearson(&channel(&rec, 0), &channel(&rec, 2));
        assert!(r < -0.2, "cross-community r={r}");
    }

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rec = generate_synthetic(&spec(0.5, 0.3), 1).unwrap();
        save_recording(&rec, &path, InputFormat::Csv).unwrap();
        let opts = LoadOptions { sample_rate: rec.sample_rate(), ..Default::default() };
        let back = load_recording(&path, InputFormat::Csv, &opts).unwrap();
        assert_eq!(back.n_channels(), rec.n_channels());
        assert_eq!(back.samples(), rec.samples());
    }

    #[test]
    fn raw_roundtrip_and_length_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.bin");
        let rec = Recording::new(10.0, 2, vec![1.0, -2.0, 3.5, 4.25]).unwrap();
        save_recording(&rec, &path, InputFormat::RawF32).unwrap();
        let opts = LoadOptions { sample_rate: 10.0, has_header: false, channels: Some(2) };
        let back = load_recording(&path, InputFormat::RawF32, &opts).unwrap();
        assert_eq!(back.samples(), rec.samples());
        // Truncated file: not a multiple of 4·channels.
        std::fs::write(&path, [0u8; 10]).unwrap();
        assert!(load_recording(&path, InputFormat::RawF32, &opts).is_err());
    }

    #[test]
    fn csv_errors_carry_location() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1.0,2.0\n3.0,NaN\n").unwrap();
        let err = load_recording(&path, InputFormat::Csv, &LoadOptions::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 2"), "{err}");
        assert!(err.contains("column 2"), "{err}");
        std::fs::write(&path, "1.0,2.0\n3.0\n").unwrap();
        let err = load_recording(&path, InputFormat::Csv, &LoadOptions::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 2"), "{err}");
    }
}
