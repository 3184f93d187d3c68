use std::io::Write;

use super::{arrmse, rrmse, rul_from_ratio, savitzky_golay, RATIO_FLOOR};
use crate::error::{Error, Result};

/// One evaluated observation of a test bearing.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub k: usize,
    pub tau: f64,
    pub rho_true: f64,
    /// Raw model output (not clamped).
    pub rho_hat: f64,
    pub rul_true: f64,
    pub rul_hat: Option<f64>,
    pub rul_hat_smoothed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BearingResult {
    pub bearing: String,
    pub rrmse: f64,
    pub rows: Vec<ReportRow>,
}

impl BearingResult {
    /// Scores one bearing. `rho_hat` is the raw model output; the RUL path
    /// clamps it to `[0, 1]`, and the smoothed curve is computed from ratios
    /// floored at [`RATIO_FLOOR`] so early-life points stay finite.
    pub fn evaluate(
        bearing: impl Into<String>,
        indices: &[usize],
        tau: &[f64],
        rho_true: &[f64],
        rho_hat: &[f64],
        sg_order: usize,
        sg_frame: usize,
    ) -> Result<Self> {
        let n = tau.len();
        if indices.len() != n || rho_true.len() != n || rho_hat.len() != n {
            return Err(Error::input("evaluation columns have different lengths"));
        }
        let score = rrmse(rho_true, rho_hat)?;
        let (&tau_last, &rho_last) = tau.last().zip(rho_true.last()).expect("non-empty after rrmse");
        if !(rho_last > 0.0) {
            return Err(Error::input("last observation has zero life ratio; lifetime unknown"));
        }
        let lifetime = tau_last / rho_last;

        let mut rul_hat = Vec::with_capacity(n);
        let mut floored = Vec::with_capacity(n);
        for (&r, &t) in rho_hat.iter().zip(tau) {
            let clamped = r.clamp(0.0, 1.0);
            rul_hat.push(rul_from_ratio(clamped, t)?.value());
            floored.push((1.0 / clamped.max(RATIO_FLOOR) - 1.0) * t);
        }
        let smoothed = savitzky_golay(&floored, sg_order, sg_frame)?;

        let rows = (0..n)
            .map(|i| ReportRow {
                k: indices[i],
                tau: tau[i],
                rho_true: rho_true[i],
                rho_hat: rho_hat[i],
                rul_true: lifetime - tau[i],
                rul_hat: rul_hat[i],
                rul_hat_smoothed: smoothed[i],
            })
            .collect();
        Ok(Self {
            bearing: bearing.into(),
            rrmse: score,
            rows,
        })
    }
}

/// Per-bearing accuracy of one identification method.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub method: String,
    pub bearings: Vec<BearingResult>,
}

impl EvaluationReport {
    pub fn arrmse(&self) -> Result<f64> {
        arrmse(&self.bearings.iter().map(|b| b.rrmse).collect::<Vec<_>>())
    }

    /// `bearing,k,tau,rho_true,rho_hat,rul_true,rul_hat,rul_hat_smoothed`
    pub fn write_curves_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "bearing",
            "k",
            "tau",
            "rho_true",
            "rho_hat",
            "rul_true",
            "rul_hat",
            "rul_hat_smoothed",
        ])?;
        for b in &self.bearings {
            for r in &b.rows {
                w.write_record([
                    b.bearing.clone(),
                    r.k.to_string(),
                    r.tau.to_string(),
                    r.rho_true.to_string(),
                    r.rho_hat.to_string(),
                    r.rul_true.to_string(),
                    r.rul_hat.map(|v| v.to_string()).unwrap_or_default(),
                    r.rul_hat_smoothed.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// `method,bearing,rrmse` rows followed by one `ARRMSE` row.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["method", "bearing", "rrmse"])?;
        for b in &self.bearings {
            w.write_record([self.method.as_str(), &b.bearing, &b.rrmse.to_string()])?;
        }
        w.write_record([self.method.as_str(), "ARRMSE", &self.arrmse()?.to_string()])?;
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_estimates_score_zero() {
        let tau: Vec<f64> = (0..80).map(|k| 10.0 * k as f64).collect();
        let rho: Vec<f64> = tau.iter().map(|t| t / 790.0).collect();
        let idx: Vec<usize> = (1..=80).collect();
        let b = BearingResult::evaluate("b1", &idx, &tau, &rho, &rho, 2, 61).unwrap();
        assert_eq!(b.rrmse, 0.0);
        assert!(b.rows[0].rul_hat.is_none());
        assert!((b.rows[0].rul_true - 790.0).abs() < 1e-9);
        let last = b.rows.last().unwrap();
        assert_eq!(last.rul_hat, Some(0.0));
        // Away from the floored start, the smoothed curve is the true (linear) RUL.
        for r in &b.rows[40..] {
            assert!((r.rul_hat_smoothed - r.rul_true).abs() < 1e-6 * 790.0);
        }

        let report = EvaluationReport {
            method: "weighted".into(),
            bearings: vec![b],
        };
        assert_eq!(report.arrmse().unwrap(), 0.0);
        let mut buf = Vec::new();
        report.write_summary_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "method,bearing,rrmse\nweighted,b1,0\nweighted,ARRMSE,0\n");
        let mut buf = Vec::new();
        report.write_curves_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 81);
        assert!(text.starts_with("bearing,k,tau,rho_true,rho_hat,rul_true,rul_hat,rul_hat_smoothed\nb1,1,0,0,0,790,,"));
    }
}
