//! End-to-end steps on feature tables: train, predict, evaluate, benchmark.

use std::time::Instant;

use crate::clustering::{ClusterSet, TrainingTable};
use crate::config::{Config, FilterConfig};
use crate::error::{Error, Result};
use crate::features::FeatureTable;
use crate::fis::{identify, Provenance, TsFisModel, Variant};
use crate::rul::{rul_from_ratio, savitzky_golay, BearingResult, EvaluationReport, RATIO_FLOOR};

/// A feature table with the name of the recording it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedTable {
    pub name: String,
    pub table: FeatureTable,
}

impl NamedTable {
    pub fn new(name: impl Into<String>, table: FeatureTable) -> Self {
        Self {
            name: name.into(),
            table,
        }
    }
}

/// Clusters the pooled training tables and identifies a model; the effective
/// configuration and the recording names are stored as provenance.
pub fn train(tables: &[NamedTable], config: &Config, variant: Variant) -> Result<(ClusterSet, TsFisModel)> {
    config.validate()?;
    let pooled: Vec<FeatureTable> = tables.iter().map(|t| t.table.clone()).collect();
    for t in tables {
        t.table.check_time_order()?;
        if !t.table.is_labeled() {
            return Err(Error::input(format!("training recording {} has no life ratio column", t.name)));
        }
    }
    let training = TrainingTable::from_feature_tables(&pooled)?;
    let (clusters, model) = identify(&training, &config.cluster, variant)?;
    let provenance = Provenance::new(tables.iter().map(|t| t.name.clone()).collect(), config);
    Ok((clusters, model.with_provenance(provenance)))
}

fn check_features(model: &TsFisModel, table: &FeatureTable) -> Result<()> {
    if model.feature_set() != table.names() {
        return Err(Error::config(format!(
            "model expects features [{}], table has [{}]",
            model.feature_set().join(","),
            table.names().join(",")
        )));
    }
    Ok(())
}

/// One predicted row.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub k: usize,
    pub tau: f64,
    pub rho_hat_raw: f64,
    pub rho_hat: f64,
    pub rul_hat: Option<f64>,
    pub rul_hat_smoothed: f64,
}

/// Runs the model over a recording in time order.
pub fn predict(model: &TsFisModel, table: &FeatureTable, filter: &FilterConfig) -> Result<Vec<Prediction>> {
    check_features(model, table)?;
    table.check_time_order()?;
    let mut out = Vec::with_capacity(table.len());
    let mut floored = Vec::with_capacity(table.len());
    for (&k, row) in table.indices().iter().zip(table.rows()) {
        let inf = model.infer_observation(row)?;
        floored.push((1.0 / inf.clamped.max(RATIO_FLOOR) - 1.0) * row.tau);
        out.push(Prediction {
            k,
            tau: row.tau,
            rho_hat_raw: inf.raw,
            rho_hat: inf.clamped,
            rul_hat: rul_from_ratio(inf.clamped, row.tau)?.value(),
            rul_hat_smoothed: 0.0,
        });
    }
    let smoothed = savitzky_golay(&floored, filter.order, filter.frame)?;
    for (p, s) in out.iter_mut().zip(smoothed) {
        p.rul_hat_smoothed = s;
    }
    Ok(out)
}

/// Writes predictions as `k,tau,rho_hat_raw,rho_hat,rul_hat,rul_hat_smoothed`.
pub fn write_predictions_csv<W: std::io::Write>(rows: &[Prediction], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "tau", "rho_hat_raw", "rho_hat", "rul_hat", "rul_hat_smoothed"])?;
    for p in rows {
        w.write_record([
            p.k.to_string(),
            p.tau.to_string(),
            p.rho_hat_raw.to_string(),
            p.rho_hat.to_string(),
            p.rul_hat.map(|v| v.to_string()).unwrap_or_default(),
            p.rul_hat_smoothed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Scores the model on labeled test recordings.
pub fn evaluate(model: &TsFisModel, tables: &[NamedTable], filter: &FilterConfig) -> Result<EvaluationReport> {
    if tables.is_empty() {
        return Err(Error::input("no test recordings"));
    }
    let mut bearings = Vec::with_capacity(tables.len());
    for t in tables {
        check_features(model, &t.table)?;
        t.table.check_time_order()?;
        let rows = t.table.rows();
        let mut rho_true = Vec::with_capacity(rows.len());
        let mut rho_hat = Vec::with_capacity(rows.len());
        for row in rows {
            rho_true.push(row.rho.ok_or_else(|| {
                Error::input(format!("test recording {} is not labeled", t.name))
            })?);
            rho_hat.push(model.infer_observation(row)?.raw);
        }
        let tau: Vec<f64> = rows.iter().map(|r| r.tau).collect();
        bearings.push(BearingResult::evaluate(
            t.name.clone(),
            t.table.indices(),
            &tau,
            &rho_true,
            &rho_hat,
            filter.order,
            filter.frame,
        )?);
    }
    Ok(EvaluationReport {
        method: model.variant().name().to_string(),
        bearings,
    })
}

/// Accuracy and wall-clock time of one method.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub variant: Variant,
    pub rules: usize,
    pub report: EvaluationReport,
    pub seconds: f64,
}

/// Trains both variants on the same training recordings and scores them on
/// the same test recordings, baseline first.
pub fn benchmark(train_tables: &[NamedTable], test_tables: &[NamedTable], config: &Config) -> Result<Vec<MethodRun>> {
    [Variant::Baseline, Variant::Weighted]
        .into_iter()
        .map(|variant| {
            let start = Instant::now();
            let (_, model) = train(train_tables, config, variant)?;
            let report = evaluate(&model, test_tables, &config.filter)?;
            Ok(MethodRun {
                variant,
                rules: model.rule_count(),
                report,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

/// `method,bearing,rrmse,seconds` per bearing plus one `ARRMSE` row per method.
pub fn write_benchmark_csv<W: std::io::Write>(runs: &[MethodRun], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "bearing", "rrmse", "seconds"])?;
    for run in runs {
        let method = run.variant.name();
        for b in &run.report.bearings {
            w.write_record([method, &b.bearing, &b.rrmse.to_string(), ""])?;
        }
        w.write_record([method, "ARRMSE", &run.report.arrmse()?.to_string(), &format!("{:.6}", run.seconds)])?;
    }
    w.flush()?;
    Ok(())
}
