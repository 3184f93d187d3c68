use log::warn;
use nalgebra::{DMatrix, DVector};

use super::{Provenance, Rule, TsFisModel, Variant};
use crate::clustering::{subtractive_cluster, ClusterConfig, ClusterSet, TrainingTable};
use crate::error::{Error, Result};
use crate::mixture::{estimate_time_clusters, weighted_firing, Antecedents, TimeClusterParams};

/// Singular values below `s_max * RANK_TOLERANCE` are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Regression matrix with one row per observation and one `[w v^T, w]` block
/// per rule, rules in order: row `k` is
/// `[w_1k v_k^T, w_1k, w_2k v_k^T, w_2k, .., w_Jk v_k^T, w_Jk]`.
pub fn build_design_matrix(inputs: &[Vec<f64>], weights: &[Vec<f64>]) -> DMatrix<f64> {
    let k = inputs.len();
    let dim = inputs.first().map_or(0, Vec::len);
    let rules = weights.first().map_or(0, Vec::len);
    let block = dim + 1;
    let mut phi = DMatrix::zeros(k, rules * block);
    for (row, (v, w)) in inputs.iter().zip(weights).enumerate() {
        for (j, &wj) in w.iter().enumerate() {
            for (i, &x) in v.iter().enumerate() {
                phi[(row, j * block + i)] = wj * x;
            }
            phi[(row, j * block + dim)] = wj;
        }
    }
    phi
}

/// Minimum-norm least-squares solution of `phi * beta ~ rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub beta: DVector<f64>,
    pub rank: usize,
    pub residual_norm_sq: f64,
}

pub fn residual_norm_sq(phi: &DMatrix<f64>, rho: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    (rho - phi * beta).norm_squared()
}

/// Solves the least-squares problem through the singular value decomposition,
/// dropping singular values below `s_max * 1e-10`.
pub fn solve_least_squares(phi: &DMatrix<f64>, rho: &DVector<f64>) -> Result<LeastSquares> {
    if phi.nrows() != rho.len() {
        return Err(Error::input(format!(
            "design matrix has {} rows but {} targets",
            phi.nrows(),
            rho.len()
        )));
    }
    if phi.nrows() == 0 || phi.ncols() == 0 {
        return Err(Error::input("empty regression problem"));
    }
    let svd = phi.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let tol = s_max * RANK_TOLERANCE;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < phi.ncols() {
        warn!(
            "consequent regression is rank deficient ({rank} of {} columns); using the minimum-norm solution",
            phi.ncols()
        );
    }
    let beta = if s_max > 0.0 {
        svd.solve(rho, tol).map_err(|e| Error::input(format!("least squares failed: {e}")))?
    } else {
        DVector::zeros(phi.ncols())
    };
    Ok(LeastSquares {
        residual_norm_sq: residual_norm_sq(phi, rho, &beta),
        beta,
        rank,
    })
}

fn antecedents_from(table: &TrainingTable, clusters: &ClusterSet) -> Result<Antecedents> {
    let dim = table.input_dim();
    if clusters.sigmas.len() != dim || clusters.centers.iter().any(|c| c.len() != dim + 1) {
        return Err(Error::input("cluster set does not match the training table"));
    }
    Antecedents::new(
        (0..clusters.rule_count()).map(|j| clusters.input_center(j).to_vec()).collect(),
        clusters.sigmas.clone(),
    )
}

fn fit_rules(
    table: &TrainingTable,
    antecedents: &Antecedents,
    weights: &[Vec<f64>],
    time: Option<&TimeClusterParams>,
) -> Result<Vec<Rule>> {
    let phi = build_design_matrix(table.inputs(), weights);
    let rho = DVector::from_column_slice(table.rho());
    let ls = solve_least_squares(&phi, &rho)?;
    let block = table.input_dim() + 1;
    Ok((0..antecedents.rule_count())
        .map(|j| {
            let coef = ls.beta.rows(j * block, block);
            Rule {
                centers: antecedents.centers[j].clone(),
                weight: antecedents.weights[j],
                slopes: coef.rows(0, block - 1).iter().copied().collect(),
                intercept: coef[block - 1],
                time: time.map(|t| t.clusters[j]),
            }
        })
        .collect())
}

/// Baseline identification: consequents fitted with the plain normalized
/// firing degrees.
pub fn identify_baseline(table: &TrainingTable, clusters: &ClusterSet) -> Result<TsFisModel> {
    let ante = antecedents_from(table, clusters)?;
    let weights = ante.normalized_firing_table(table.inputs());
    let rules = fit_rules(table, &ante, &weights, None)?;
    TsFisModel::new(
        table.names().to_vec(),
        clusters.sigmas.clone(),
        rules,
        Variant::Baseline,
        Provenance::default(),
    )
}

/// Mixture-weighted identification.
///
/// The normalized firing degrees serve as posterior estimates; from them the
/// regime priors and the time clusters are estimated, and the consequents are
/// fitted with firing degrees re-weighted by prior and time membership.
pub fn identify_weighted(table: &TrainingTable, clusters: &ClusterSet) -> Result<TsFisModel> {
    let ante = antecedents_from(table, clusters)?;
    let posteriors = ante.normalized_firing_table(table.inputs());
    let time = estimate_time_clusters(table.tau(), &posteriors)?;
    fit_weighted(table, clusters, ante, time)
}

/// Weighted identification with externally supplied time clusters.
pub fn identify_weighted_with(table: &TrainingTable, clusters: &ClusterSet, time: TimeClusterParams) -> Result<TsFisModel> {
    let ante = antecedents_from(table, clusters)?;
    time.validate(ante.rule_count())?;
    fit_weighted(table, clusters, ante, time)
}

fn fit_weighted(table: &TrainingTable, clusters: &ClusterSet, ante: Antecedents, time: TimeClusterParams) -> Result<TsFisModel> {
    let weights: Vec<Vec<f64>> = table
        .inputs()
        .iter()
        .zip(table.tau())
        .map(|(v, &t)| weighted_firing(v, t, &ante, &time))
        .collect();
    let rules = fit_rules(table, &ante, &weights, Some(&time))?;
    TsFisModel::new(
        table.names().to_vec(),
        clusters.sigmas.clone(),
        rules,
        Variant::Weighted,
        Provenance::default(),
    )
}

/// Clusters the table and identifies a model of the requested variant.
pub fn identify(table: &TrainingTable, config: &ClusterConfig, variant: Variant) -> Result<(ClusterSet, TsFisModel)> {
    let clusters = subtractive_cluster(table, config)?;
    let model = match variant {
        Variant::Baseline => identify_baseline(table, &clusters)?,
        Variant::Weighted => identify_weighted(table, &clusters)?,
    };
    Ok((clusters, model))
}
