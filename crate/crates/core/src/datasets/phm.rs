//! PHM 2012 / PRONOSTIA layout: one `acc_NNNNN.csv` per 0.1 s snapshot taken
//! every 10 s, rows of `hour, minute, second, microsecond, horizontal, vertical`.
//! Some bearings in the public release use `;` as the separator.

use std::path::{Path, PathBuf};

use super::{dir_id, list_files, parse_sample, read_text, WindowSource};
use crate::error::{Error, Result};
use crate::features::SignalWindow;

pub const PHM_SAMPLE_RATE: f64 = 25_600.0;
pub const PHM_WINDOW_LEN: usize = 2560;
/// Seconds between consecutive snapshots.
pub const PHM_INTERVAL: f64 = 10.0;

const COLUMNS: usize = 6;
const HORIZONTAL: usize = 4;

/// Horizontal-channel samples of one `acc_*.csv` file.
pub fn parse_phm_window(text: &str, source: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(PHM_WINDOW_LEN);
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let sep = if line.contains(';') { ';' } else { ',' };
        let fields: Vec<&str> = line.split(sep).collect();
        if fields.len() != COLUMNS {
            return Err(Error::load(
                source,
                Some(line_no),
                format!("expected {COLUMNS} columns, found {}", fields.len()),
            ));
        }
        for (c, f) in fields.iter().enumerate() {
            if parse_sample(f).is_none() {
                return Err(Error::load(
                    source,
                    Some(line_no),
                    format!("column {} (`{}`) is not a finite number", c + 1, f.trim()),
                ));
            }
        }
        out.push(parse_sample(fields[HORIZONTAL]).expect("checked above"));
        if out.len() > PHM_WINDOW_LEN {
            return Err(Error::load(source, Some(line_no), format!("more than {PHM_WINDOW_LEN} rows")));
        }
    }
    if out.len() != PHM_WINDOW_LEN {
        return Err(Error::load(
            source,
            None,
            format!("expected {PHM_WINDOW_LEN} rows, found {}", out.len()),
        ));
    }
    Ok(out)
}

fn file_index(name: &str) -> Option<u64> {
    name.strip_prefix("acc_")?.strip_suffix(".csv")?.parse().ok()
}

/// A PHM 2012 bearing directory.
#[derive(Debug, Clone)]
pub struct PhmSource {
    id: String,
    files: Vec<PathBuf>,
}

impl PhmSource {
    /// Lists `acc_*.csv` files; other files (temperature logs) are ignored.
    /// File names must sort in strictly increasing index order.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let listed = list_files(dir, |n| n.starts_with("acc_") && n.ends_with(".csv"))?;
        if listed.is_empty() {
            return Err(Error::load(dir, None, "no acc_*.csv files"));
        }
        let mut prev: Option<u64> = None;
        for (path, name) in &listed {
            let idx = file_index(name)
                .ok_or_else(|| Error::load(path, None, "file name is not acc_<index>.csv"))?;
            if prev.is_some_and(|p| idx <= p) {
                return Err(Error::load(path, None, format!("non-monotone file index {idx} after {}", prev.unwrap())));
            }
            prev = Some(idx);
        }
        Ok(Self {
            id: dir_id(dir),
            files: listed.into_iter().map(|(p, _)| p).collect(),
        })
    }
}

impl WindowSource for PhmSource {
    fn bearing_id(&self) -> &str {
        &self.id
    }

    fn len(&self) -> usize {
        self.files.len()
    }

    fn timestamp(&self, k: usize) -> f64 {
        PHM_INTERVAL * k as f64
    }

    fn read_window(&self, k: usize) -> Result<SignalWindow> {
        let path = &self.files[k];
        let samples = parse_phm_window(&read_text(path)?, path)?;
        SignalWindow::new(samples, PHM_SAMPLE_RATE, k + 1, self.timestamp(k))
    }
}
