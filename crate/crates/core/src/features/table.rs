//! Feature tables and their CSV form: `k,tau,<feature names..>,rho`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Feature, FeatureVector};
use crate::error::{Error, Result};

/// A sequence of observations from one recording, with named feature columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    names: Vec<String>,
    indices: Vec<usize>,
    rows: Vec<FeatureVector>,
}

impl FeatureTable {
    pub fn new<S: ToString>(names: Vec<S>, indices: Vec<usize>, rows: Vec<FeatureVector>) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|n| n.to_string()).collect();
        if names.is_empty() {
            return Err(Error::input("feature table has no feature columns"));
        }
        if indices.len() != rows.len() {
            return Err(Error::input("feature table index and row counts differ"));
        }
        for (k, row) in rows.iter().enumerate() {
            if row.dim() != names.len() {
                return Err(Error::input(format!(
                    "row {k} has {} values for {} feature columns",
                    row.dim(),
                    names.len()
                )));
            }
        }
        Ok(Self { names, indices, rows })
    }

    /// Builds a table with 1-based sequential indices.
    pub fn from_rows<S: ToString>(names: Vec<S>, rows: Vec<FeatureVector>) -> Result<Self> {
        let indices = (1..=rows.len()).collect();
        Self::new(names, indices, rows)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[FeatureVector] {
        &self.rows
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// True when every row carries a life ratio.
    pub fn is_labeled(&self) -> bool {
        self.rows.iter().all(|r| r.rho.is_some())
    }

    /// Errors unless `tau` strictly increases down the table.
    pub fn check_time_order(&self) -> Result<()> {
        for (k, pair) in self.rows.windows(2).enumerate() {
            if pair[1].tau <= pair[0].tau {
                return Err(Error::input(format!(
                    "observation {} (tau={}) is not after observation {} (tau={})",
                    self.indices[k + 1],
                    pair[1].tau,
                    self.indices[k],
                    pair[0].tau
                )));
            }
        }
        Ok(())
    }

    /// Feature set as the built-in enum, if every column is a known indicator.
    pub fn known_features(&self) -> Option<Vec<Feature>> {
        self.names.iter().map(|n| n.parse().ok()).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["k".to_string(), "tau".to_string()];
        header.extend(self.names.iter().cloned());
        header.push("rho".into());
        w.write_record(&header)?;
        for (k, row) in self.indices.iter().zip(&self.rows) {
            let mut rec = Vec::with_capacity(header.len());
            rec.push(k.to_string());
            rec.push(row.tau.to_string());
            rec.extend(row.values.iter().map(f64::to_string));
            rec.push(row.rho.map(|r| r.to_string()).unwrap_or_default());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(File::create(path)?)
    }

    /// Parses the CSV form; `source` only labels error messages.
    pub fn read_csv<R: Read>(input: R, source: &Path) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let header = rd
            .headers()
            .map_err(|e| Error::load(source, Some(1), e.to_string()))?
            .clone();
        let cols: Vec<&str> = header.iter().collect();
        if cols.len() < 4 || cols[0] != "k" || cols[1] != "tau" || cols[cols.len() - 1] != "rho" {
            return Err(Error::load(
                source,
                Some(1),
                "header must be `k,tau,<feature names..>,rho` with at least one feature",
            ));
        }
        let names: Vec<String> = cols[2..cols.len() - 1].iter().map(|s| s.to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || names[..i].contains(n) || n == "k" || n == "tau" || n == "rho" {
                return Err(Error::load(source, Some(1), format!("bad feature column name `{n}`")));
            }
        }

        let mut indices = Vec::new();
        let mut rows = Vec::new();
        for (n, rec) in rd.records().enumerate() {
            let line = n + 2;
            let rec = rec.map_err(|e| Error::load(source, Some(line), e.to_string()))?;
            let bad = |msg: String| Error::load(source, Some(line), msg);
            if rec.len() != cols.len() {
                return Err(bad(format!("expected {} fields, found {}", cols.len(), rec.len())));
            }
            let k: usize = rec[0]
                .parse()
                .map_err(|_| bad(format!("observation index `{}` is not an integer", &rec[0])))?;
            let num = |field: &str, what: &str| -> Result<f64> {
                match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(bad(format!("{what} `{field}` is not a finite number"))),
                }
            };
            let tau = num(&rec[1], "tau")?;
            let values = (2..cols.len() - 1)
                .map(|c| num(&rec[c], cols[c]))
                .collect::<Result<Vec<_>>>()?;
            let rho_field = &rec[cols.len() - 1];
            let rho = if rho_field.is_empty() {
                None
            } else {
                Some(num(rho_field, "rho")?)
            };
            let row = FeatureVector::new(values, tau, rho).map_err(|e| bad(e.to_string()))?;
            indices.push(k);
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::load(source, None, "no observations"));
        }
        Self::new(names, indices, rows)
    }

    pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::load(path, None, e.to_string()))?;
        Self::read_csv(f, path)
    }
}
