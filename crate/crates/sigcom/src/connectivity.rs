//! Window-level connectivity estimation: signed Pearson correlation and
//! band-averaged magnitude-squared coherency, plus the anticorrelation index
//! and the matrix serializers.

use std::io::Write;
use std::path::Path;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::signal::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Correlation,
    Coherency,
}

impl MatrixKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatrixKind::Correlation => "correlation",
            MatrixKind::Coherency => "coherency",
        }
    }
}

impl std::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One window's pairwise connectivity. Correlation entries are signed in
/// [−1, 1]; coherency entries are unsigned in [0, 1]. Both have a unit
/// diagonal.
#[derive(Clone, Debug)]
pub struct ConnectivityMatrix {
    kind: MatrixKind,
    window_index: usize,
    values: SquareMatrix,
    warnings: Vec<String>,
}

impl ConnectivityMatrix {
    pub fn from_values(kind: MatrixKind, window_index: usize, values: SquareMatrix) -> Result<Self> {
        if values.n() == 0 {
            return Err(Error::Data("empty connectivity matrix".into()));
        }
        if let Some(v) = values.as_slice().iter().find(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite connectivity value {v}")));
        }
        if values.asymmetry() > 1e-9 {
            return Err(Error::Data(format!(
                "connectivity matrix is asymmetric by {}",
                values.asymmetry()
            )));
        }
        Ok(ConnectivityMatrix { kind, window_index, values, warnings: Vec::new() })
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn window_index(&self) -> usize {
        self.window_index
    }

    pub fn n(&self) -> usize {
        self.values.n()
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// CSV: one row per channel, `{:.16e}` cells (17 significant digits, so
    /// parsing the file back reproduces the doubles bit for bit).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| Error::io(path, e))?,
        );
        for i in 0..self.n() {
            let row: Vec<String> =
                self.values.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", row.join(",")).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// JSON object: kind, window index, dimension, row-major values.
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let doc = json!({
            "kind": self.kind.as_str(),
            "window_index": self.window_index,
            "n": self.n(),
            "values": self.values.as_slice(),
        });
        let text = serde_json::to_string_pretty(&doc)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Pearson correlation over one window, channel means removed per window.
/// A zero-variance channel gets zero correlations (its value carries no
/// direction) and a warning instead of NaNs.
pub fn correlation_matrix(window: &Window) -> Result<ConnectivityMatrix> {
    let n_ch = window.n_channels();
    let n_s = window.n_samples();
    let mut centered = vec![0.0; n_ch * n_s];
    let mut variance = vec![0.0; n_ch];
    for c in 0..n_ch {
        let mean = (0..n_s).map(|s| window.value(s, c)).sum::<f64>() / n_s as f64;
        for s in 0..n_s {
            let d = window.value(s, c) - mean;
            centered[c * n_s + s] = d;
            variance[c] += d * d;
        }
    }
    let mut values = SquareMatrix::identity(n_ch);
    let mut warnings = Vec::new();
    for c in 0..n_ch {
        if variance[c] == 0.0 {
            warnings.push(format!(
                "window {}: channel {} has zero variance; its correlations are 0",
                window.index,
                c + 1
            ));
        }
    }
    for i in 0..n_ch {
        for j in (i + 1)..n_ch {
            let r = if variance[i] == 0.0 || variance[j] == 0.0 {
                0.0
            } else {
                let xi = &centered[i * n_s..(i + 1) * n_s];
                let xj = &centered[j * n_s..(j + 1) * n_s];
                let cov: f64 = xi.iter().zip(xj).map(|(a, b)| a * b).sum();
                (cov / (variance[i] * variance[j]).sqrt()).clamp(-1.0, 1.0)
            };
            values[(i, j)] = r;
            values[(j, i)] = r;
        }
    }
    let mut m = ConnectivityMatrix::from_values(MatrixKind::Correlation, window.index, values)?;
    m.warnings = warnings;
    Ok(m)
}

/// Spectral estimation parameters for [`coherency_matrix`].
#[derive(Clone, Debug)]
pub struct SpectralConfig {
    /// Welch segment length in samples; default is window length / 8.
    pub segment_length: Option<usize>,
    /// Segment overlap fraction in [0, 1).
    pub overlap_fraction: f64,
    /// Band to average over, inclusive, in Hz.
    pub band_low: f64,
    pub band_high: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            segment_length: None,
            overlap_fraction: 0.5,
            band_low: 1.0,
            band_high: 100.0,
        }
    }
}

/// Shortest segment the Welch estimator accepts.
const MIN_SEGMENT: usize = 8;

impl SpectralConfig {
    fn resolve_segment(&self, window_len: usize) -> Result<usize> {
        let seg = self.segment_length.unwrap_or(window_len / 8);
        if seg < MIN_SEGMENT {
            return Err(Error::Config(format!(
                "segment length {seg} is shorter than {MIN_SEGMENT} samples; \
                 pass an explicit segment length"
            )));
        }
        if seg > window_len {
            return Err(Error::Config(format!(
                "segment length {seg} exceeds the window length {window_len}"
            )));
        }
        Ok(seg)
    }

    fn validate(&self, sample_rate: f64) -> Result<()> {
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::Config(format!(
                "overlap fraction {} outside [0, 1)",
                self.overlap_fraction
            )));
        }
        if !(self.band_low > 0.0 && self.band_low < self.band_high) {
            return Err(Error::Config(format!(
                "band {}:{} must satisfy 0 < low < high",
                self.band_low, self.band_high
            )));
        }
        if self.band_high > sample_rate / 2.0 {
            return Err(Error::Config(format!(
                "band upper edge {} Hz exceeds the Nyquist frequency {} Hz",
                self.band_high,
                sample_rate / 2.0
            )));
        }
        Ok(())
    }
}

/// Welch magnitude-squared coherency, averaged over the configured band:
/// per-segment mean removal, Hann taper, cross-spectra averaged over
/// segments, then MSC(f) = |S_ij|² / (S_ii·S_jj) averaged across band bins.
/// Needs at least two segments — with one, MSC is identically 1 and useless.
pub fn coherency_matrix(
    window: &Window,
    sample_rate: f64,
    config: &SpectralConfig,
) -> Result<ConnectivityMatrix> {
    config.validate(sample_rate)?;
    let n_ch = window.n_channels();
    let n_s = window.n_samples();
    let seg = config.resolve_segment(n_s)?;
    let hop = (((seg as f64) * (1.0 - config.overlap_fraction)) as usize).max(1);
    let starts: Vec<usize> = (0..)
        .map(|k| k * hop)
        .take_while(|&s| s + seg <= n_s)
        .collect();
    if starts.len() < 2 {
        return Err(Error::Data(format!(
            "window of {n_s} samples yields {} Welch segment(s) of length {seg}; need at least 2",
            starts.len()
        )));
    }

    let n_bins = seg / 2 + 1;
    let df = sample_rate / seg as f64;
    let band: Vec<usize> = (0..n_bins)
        .filter(|&k| {
            let f = k as f64 * df;
            f >= config.band_low && f <= config.band_high
        })
        .collect();
    if band.is_empty() {
        return Err(Error::Config(format!(
            "band {}:{} Hz contains no FFT bins at resolution {df} Hz",
            config.band_low, config.band_high
        )));
    }

    let taper: Vec<f64> = (0..seg)
        .map(|t| 0.5 * (1.0 - (std::f64::consts::TAU * t as f64 / seg as f64).cos()))
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(seg);

    // spectra[ch][segment] = positive-frequency half spectrum.
    let mut spectra: Vec<Vec<Vec<Complex<f64>>>> = Vec::with_capacity(n_ch);
    let mut buf = vec![Complex::new(0.0, 0.0); seg];
    for c in 0..n_ch {
        let mut per_segment = Vec::with_capacity(starts.len());
        for &start in &starts {
            let mean = (0..seg).map(|t| window.value(start + t, c)).sum::<f64>() / seg as f64;
            for t in 0..seg {
                buf[t] = Complex::new((window.value(start + t, c) - mean) * taper[t], 0.0);
            }
            fft.process(&mut buf);
            per_segment.push(buf[..n_bins].to_vec());
        }
        spectra.push(per_segment);
    }

    // Segment-averaged auto-spectra (real, non-negative by construction).
    let auto: Vec<Vec<f64>> = (0..n_ch)
        .map(|c| {
            (0..n_bins)
                .map(|k| spectra[c].iter().map(|x| x[k].norm_sqr()).sum::<f64>())
                .collect()
        })
        .collect();

    let mut values = SquareMatrix::identity(n_ch);
    let mut warnings = Vec::new();
    for c in 0..n_ch {
        if band.iter().all(|&k| auto[c][k] == 0.0) {
            warnings.push(format!(
                "window {}: channel {} has no in-band power; its coherencies are 0",
                window.index,
                c + 1
            ));
        }
    }
    for i in 0..n_ch {
        for j in (i + 1)..n_ch {
            let mut acc = 0.0;
            for &k in &band {
                let cross: Complex<f64> = spectra[i]
                    .iter()
                    .zip(&spectra[j])
                    .map(|(xi, xj)| xi[k] * xj[k].conj())
                    .sum();
                let denom = auto[i][k] * auto[j][k];
                if denom > 0.0 {
                    acc += cross.norm_sqr() / denom;
                }
            }
            let msc = (acc / band.len() as f64).clamp(0.0, 1.0);
            values[(i, j)] = msc;
            values[(j, i)] = msc;
        }
    }
    let mut m = ConnectivityMatrix::from_values(MatrixKind::Coherency, window.index, values)?;
    m.warnings = warnings;
    Ok(m)
}

/// How the anticorrelation index weighs negative entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AnticorrMode {
    /// Σ|negative| / Σ|nonzero|.
    #[default]
    Weighted,
    /// #negative / #nonzero.
    Count,
}

/// Fraction of a correlation matrix's off-diagonal mass that is negative
/// (upper triangle; zero entries excluded; 0 when nothing is nonzero).
/// Coherency matrices are rejected: they are unsigned, so the index would
/// always be 0 and reporting it would only mislead.
pub fn anticorrelation_index(m: &ConnectivityMatrix, mode: AnticorrMode) -> Result<f64> {
    if m.kind() != MatrixKind::Correlation {
        return Err(Error::Config(
            "anticorrelation index is only defined for correlation matrices".into(),
        ));
    }
    let mut neg = 0.0;
    let mut total = 0.0;
    for i in 0..m.n() {
        for j in (i + 1)..m.n() {
            let v = m.values()[(i, j)];
            if v == 0.0 {
                continue;
            }
            match mode {
                AnticorrMode::Weighted => {
                    total += v.abs();
                    if v < 0.0 {
                        neg += v.abs();
                    }
                }
                AnticorrMode::Count => {
                    total += 1.0;
                    if v < 0.0 {
                        neg += 1.0;
                    }
                }
            }
        }
    }
    Ok(if total == 0.0 { 0.0 } else { neg / total })
}
