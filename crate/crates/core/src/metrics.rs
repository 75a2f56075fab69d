//! Accuracy indicators of an aggregation, computed on normalized series.

use crate::{AggError, CandidateMode, ClusterResult, TimeSeriesSet};

/// Per-attribute indicators and their totals.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub attribute_names: Vec<String>,
    pub rmse: Vec<f64>,
    pub rmse_dc: Vec<f64>,
    pub mae: Vec<f64>,
    pub rmse_tot: f64,
    pub rmse_dc_tot: f64,
    pub mae_tot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub rmse_tot: f64,
    pub rmse_dc_tot: f64,
    pub mae_tot: f64,
}

/// Predicted full-horizon series: every original step takes the
/// representative value of its cluster (at its offset, for periods).
pub fn expand_to_full(result: &ClusterResult, n_steps: usize) -> Result<Vec<Vec<f64>>, AggError> {
    let per = result.mode.steps_per_candidate();
    let covered = result.n_candidates() * per;
    if covered != n_steps {
        return Err(AggError::HorizonMismatch {
            covered,
            expected: n_steps,
        });
    }
    let n_a = result.attribute_names.len();
    let mut out = vec![Vec::with_capacity(n_steps); n_a];
    for &c in &result.assignment {
        let centroid = &result.centroids[c];
        for (a, row) in out.iter_mut().enumerate() {
            match result.mode {
                CandidateMode::TimeStep => row.push(centroid[a]),
                CandidateMode::Period(t) => row.extend_from_slice(&centroid[a * t..(a + 1) * t]),
            }
        }
    }
    Ok(out)
}

fn check_shapes(original: &TimeSeriesSet, predicted: &[Vec<f64>]) -> Result<(), AggError> {
    if predicted.len() != original.n_attributes()
        || predicted.iter().any(|r| r.len() != original.n_steps())
    {
        return Err(AggError::Shape(format!(
            "predicted series do not match {} attributes x {} steps",
            original.n_attributes(),
            original.n_steps()
        )));
    }
    Ok(())
}

fn root_mean_square(x: &[f64], y: &[f64]) -> f64 {
    let sum: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (sum / x.len() as f64).sqrt()
}

/// Series sorted in descending order.
pub fn duration_curve(series: &[f64]) -> Vec<f64> {
    let mut sorted = series.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted
}

pub fn rmse(original: &TimeSeriesSet, predicted: &[Vec<f64>]) -> Result<Vec<f64>, AggError> {
    check_shapes(original, predicted)?;
    Ok(original
        .values()
        .iter()
        .zip(predicted)
        .map(|(x, y)| root_mean_square(x, y))
        .collect())
}

/// RMSE between the duration curves of original and predicted series.
pub fn rmse_dc(original: &TimeSeriesSet, predicted: &[Vec<f64>]) -> Result<Vec<f64>, AggError> {
    check_shapes(original, predicted)?;
    Ok(original
        .values()
        .iter()
        .zip(predicted)
        .map(|(x, y)| root_mean_square(&duration_curve(x), &duration_curve(y)))
        .collect())
}

pub fn mae(original: &TimeSeriesSet, predicted: &[Vec<f64>]) -> Result<Vec<f64>, AggError> {
    check_shapes(original, predicted)?;
    Ok(original
        .values()
        .iter()
        .zip(predicted)
        .map(|(x, y)| {
            let sum: f64 = x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum();
            sum / x.len() as f64
        })
        .collect())
}

/// Quadratic mean of the RMSE values, arithmetic mean of the MAE values.
pub fn totals(rmse: &[f64], rmse_dc: &[f64], mae: &[f64]) -> Totals {
    let quad = |v: &[f64]| (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
    Totals {
        rmse_tot: quad(rmse),
        rmse_dc_tot: quad(rmse_dc),
        mae_tot: mae.iter().sum::<f64>() / mae.len() as f64,
    }
}

/// All indicators of `predicted` against the normalized `original`.
pub fn evaluate(original: &TimeSeriesSet, predicted: &[Vec<f64>]) -> Result<AccuracyReport, AggError> {
    let rmse = rmse(original, predicted)?;
    let rmse_dc = rmse_dc(original, predicted)?;
    let mae = mae(original, predicted)?;
    let t = totals(&rmse, &rmse_dc, &mae);
    Ok(AccuracyReport {
        attribute_names: original.attribute_names().to_vec(),
        rmse,
        rmse_dc,
        mae,
        rmse_tot: t.rmse_tot,
        rmse_dc_tot: t.rmse_dc_tot,
        mae_tot: t.mae_tot,
    })
}
