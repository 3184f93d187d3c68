//! Run-to-failure recordings: the PHM 2012 (PRONOSTIA) and IMS directory
//! layouts, a plain one-column CSV layout, and a synthetic generator.
//!
//! Recordings are exposed as [`WindowSource`]s so windows can be read (in
//! parallel) batch by batch without loading a whole run into memory.

mod ims;
mod phm;
mod synth;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use ims::{parse_ims_timestamp, parse_ims_window, ImsSource, IMS_SAMPLE_RATE, IMS_WINDOW_LEN};
pub use phm::{parse_phm_window, PhmSource, PHM_INTERVAL, PHM_SAMPLE_RATE, PHM_WINDOW_LEN};
pub use synth::{synth_bearing, synth_feature_table, SynthConfig};

use crate::error::{Error, Result};
use crate::features::{Feature, FeatureExtractor, FeatureParams, FeatureTable, SignalWindow};

/// A directory of per-window files with known timestamps.
pub trait WindowSource: Sync {
    fn bearing_id(&self) -> &str;

    /// Number of windows.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Elapsed seconds at window `k` (0-based position).
    fn timestamp(&self, k: usize) -> f64;

    /// Parses window `k` (0-based position).
    fn read_window(&self, k: usize) -> Result<SignalWindow>;

    /// Time of the last window: the run ends at failure.
    fn lifetime(&self) -> f64 {
        self.timestamp(self.len() - 1)
    }
}

/// An in-memory recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub bearing_id: String,
    pub windows: Vec<SignalWindow>,
    /// Nominal (median) spacing between windows, in seconds.
    pub sample_interval: f64,
    /// Timestamp of the last window, for run-to-failure recordings.
    pub lifetime: Option<f64>,
}

impl Recording {
    /// Reads every window of a source.
    pub fn from_source<S: WindowSource>(source: &S) -> Result<Self> {
        let windows = (0..source.len())
            .into_par_iter()
            .map(|k| source.read_window(k))
            .collect::<Result<Vec<_>>>()?;
        let mut gaps: Vec<f64> = windows.windows(2).map(|w| w[1].timestamp - w[0].timestamp).collect();
        gaps.sort_by(f64::total_cmp);
        let sample_interval = gaps.get(gaps.len() / 2).copied().unwrap_or(0.0);
        Ok(Self {
            bearing_id: source.bearing_id().to_string(),
            windows,
            sample_interval,
            lifetime: Some(source.lifetime()),
        })
    }
}

/// Loads a PHM 2012 bearing directory (`acc_*.csv` files).
pub fn load_phm(dir: impl AsRef<Path>) -> Result<Recording> {
    Recording::from_source(&PhmSource::open(dir)?)
}

/// Loads one channel of an IMS test directory.
pub fn load_ims(dir: impl AsRef<Path>, channel: usize) -> Result<Recording> {
    Recording::from_source(&ImsSource::open(dir, channel)?)
}

/// Windows per parallel batch when streaming a source through feature extraction.
pub const DEFAULT_BATCH: usize = 64;

/// Streams a source through the feature extractor, `batch` windows at a time.
/// With `labeled`, observations get `rho = tau / lifetime`.
pub fn extract_from_source<S: WindowSource>(
    source: &S,
    feature_set: &[Feature],
    params: &FeatureParams,
    labeled: bool,
    batch: usize,
) -> Result<FeatureTable> {
    if source.is_empty() {
        return Err(Error::input(format!("recording {} has no windows", source.bearing_id())));
    }
    let mut ex = FeatureExtractor::new(feature_set.to_vec(), params.clone())?;
    let batch = batch.max(1);
    let mut start = 0;
    while start < source.len() {
        let end = (start + batch).min(source.len());
        let windows = (start..end)
            .into_par_iter()
            .map(|k| source.read_window(k))
            .collect::<Result<Vec<_>>>()?;
        ex.push_batch(&windows)?;
        start = end;
    }
    ex.finish(labeled.then(|| source.lifetime()))
}

/// Directory of headerless sample files (`*.csv`, first column used), one
/// window per file in file-name order, with a fixed sampling rate and
/// window interval.
#[derive(Debug, Clone)]
pub struct CsvSource {
    id: String,
    files: Vec<PathBuf>,
    sample_rate: f64,
    interval: f64,
}

impl CsvSource {
    pub fn open(dir: impl AsRef<Path>, sample_rate: f64, interval: f64) -> Result<Self> {
        let dir = dir.as_ref();
        if !(sample_rate > 0.0) || !(interval > 0.0) {
            return Err(Error::config("sample rate and window interval must be positive"));
        }
        let files = list_files(dir, |name| name.ends_with(".csv"))?;
        if files.is_empty() {
            return Err(Error::load(dir, None, "no .csv window files"));
        }
        Ok(Self {
            id: dir_id(dir),
            files: files.into_iter().map(|(p, _)| p).collect(),
            sample_rate,
            interval,
        })
    }
}

/// Parses the first column of a headerless sample file.
pub fn parse_sample_column(text: &str, source: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let field = line.split([',', ';', '\t', ' ']).next().unwrap_or("");
        let v = parse_sample(field).ok_or_else(|| {
            Error::load(source, Some(n + 1), format!("`{field}` is not a finite number"))
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::load(source, None, "no samples"));
    }
    Ok(out)
}

impl WindowSource for CsvSource {
    fn bearing_id(&self) -> &str {
        &self.id
    }

    fn len(&self) -> usize {
        self.files.len()
    }

    fn timestamp(&self, k: usize) -> f64 {
        self.interval * k as f64
    }

    fn read_window(&self, k: usize) -> Result<SignalWindow> {
        let path = &self.files[k];
        let text = read_text(path)?;
        let samples = parse_sample_column(&text, path)?;
        SignalWindow::new(samples, self.sample_rate, k + 1, self.timestamp(k))
            .map_err(|e| Error::load(path, None, e.to_string()))
    }
}

pub(crate) fn parse_sample(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::load(path, None, e.to_string()))
}

pub(crate) fn dir_id(dir: &Path) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string())
}

/// Regular files in `dir` whose names pass `keep`, sorted by file name.
pub(crate) fn list_files(dir: &Path, keep: impl Fn(&str) -> bool) -> Result<Vec<(PathBuf, String)>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::load(dir, None, e.to_string()))?;
    let mut files = Vec::new();
    for entry in rd {
        let entry = entry.map_err(|e| Error::load(dir, None, e.to_string()))?;
        if !entry.file_type().map(|t| t.is_file()).unwrap_or(false) {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        if keep(&name) {
            files.push((entry.path(), name));
        }
    }
    files.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(files)
}
