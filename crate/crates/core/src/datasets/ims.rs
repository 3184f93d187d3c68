//! IMS bearing layout: one ASCII file per 1 s snapshot, named by its
//! acquisition time (`2003.10.22.12.06.24`), one row per sample and one
//! tab-separated column per channel. Test 1 files carry 8 columns (two per
//! bearing), tests 2 and 3 carry 4; the caller picks the column.

use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;

use super::{dir_id, list_files, parse_sample, read_text, WindowSource};
use crate::error::{Error, Result};
use crate::features::SignalWindow;

pub const IMS_SAMPLE_RATE: f64 = 20_000.0;
pub const IMS_WINDOW_LEN: usize = 20_480;

const NAME_FORMAT: &str = "%Y.%m.%d.%H.%M.%S";

/// Seconds since the Unix epoch encoded in an IMS file name.
pub fn parse_ims_timestamp(name: &str) -> Option<f64> {
    let t = NaiveDateTime::parse_from_str(name, NAME_FORMAT).ok()?;
    Some(t.and_utc().timestamp() as f64)
}

/// Samples of column `channel` (0-based) of one IMS file.
pub fn parse_ims_window(text: &str, channel: usize, source: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(IMS_WINDOW_LEN);
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(['\t', ' ']).filter(|f| !f.is_empty()).collect();
        let field = fields.get(channel).ok_or_else(|| {
            Error::load(
                source,
                Some(line_no),
                format!("channel {channel} out of range ({} columns)", fields.len()),
            )
        })?;
        let v = parse_sample(field)
            .ok_or_else(|| Error::load(source, Some(line_no), format!("`{field}` is not a finite number")))?;
        out.push(v);
        if out.len() > IMS_WINDOW_LEN {
            return Err(Error::load(source, Some(line_no), format!("more than {IMS_WINDOW_LEN} rows")));
        }
    }
    if out.len() != IMS_WINDOW_LEN {
        return Err(Error::load(
            source,
            None,
            format!("expected {IMS_WINDOW_LEN} rows, found {}", out.len()),
        ));
    }
    Ok(out)
}

/// One IMS test directory, one channel.
#[derive(Debug, Clone)]
pub struct ImsSource {
    id: String,
    channel: usize,
    files: Vec<PathBuf>,
    /// Seconds since the first file.
    times: Vec<f64>,
}

impl ImsSource {
    /// Lists the timestamp-named files of `dir`; other names are ignored.
    /// Timestamps must increase strictly in file-name order.
    pub fn open(dir: impl AsRef<Path>, channel: usize) -> Result<Self> {
        let dir = dir.as_ref();
        let listed = list_files(dir, |n| parse_ims_timestamp(n).is_some())?;
        if listed.is_empty() {
            return Err(Error::load(dir, None, "no timestamp-named files"));
        }
        let stamps: Vec<f64> = listed
            .iter()
            .map(|(_, n)| parse_ims_timestamp(n).expect("filtered above"))
            .collect();
        for (i, w) in stamps.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::load(&listed[i + 1].0, None, "non-monotone timestamp"));
            }
        }
        let t0 = stamps[0];
        Ok(Self {
            id: format!("{}-ch{}", dir_id(dir), channel + 1),
            channel,
            files: listed.into_iter().map(|(p, _)| p).collect(),
            times: stamps.iter().map(|t| t - t0).collect(),
        })
    }
}

impl WindowSource for ImsSource {
    fn bearing_id(&self) -> &str {
        &self.id
    }

    fn len(&self) -> usize {
        self.files.len()
    }

    fn timestamp(&self, k: usize) -> f64 {
        self.times[k]
    }

    fn read_window(&self, k: usize) -> Result<SignalWindow> {
        let path = &self.files[k];
        let samples = parse_ims_window(&read_text(path)?, self.channel, path)?;
        SignalWindow::new(samples, IMS_SAMPLE_RATE, k + 1, self.times[k])
    }
}
