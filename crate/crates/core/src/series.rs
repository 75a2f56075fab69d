use std::collections::HashSet;

use crate::AggError;

/// Named attribute rows over a common horizon of equally long time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesSet {
    attribute_names: Vec<String>,
    values: Vec<Vec<f64>>,
    step_hours: f64,
}

impl TimeSeriesSet {
    /// Builds a set from one row per attribute. Rows must be equally long,
    /// non-empty and finite, names must be unique.
    pub fn new(
        attribute_names: Vec<String>,
        values: Vec<Vec<f64>>,
        step_hours: f64,
    ) -> Result<Self, AggError> {
        if attribute_names.is_empty() || values.is_empty() {
            return Err(AggError::Empty);
        }
        if attribute_names.len() != values.len() {
            return Err(AggError::Shape(format!(
                "{} attribute names for {} rows",
                attribute_names.len(),
                values.len()
            )));
        }
        if !(step_hours.is_finite() && step_hours > 0.0) {
            return Err(AggError::BadStepHours(step_hours));
        }
        let mut seen = HashSet::new();
        for name in &attribute_names {
            if !seen.insert(name.as_str()) {
                return Err(AggError::DuplicateAttribute(name.clone()));
            }
        }
        let n_steps = values[0].len();
        if n_steps == 0 {
            return Err(AggError::Empty);
        }
        for (name, row) in attribute_names.iter().zip(&values) {
            if row.len() != n_steps {
                return Err(AggError::RaggedRow {
                    name: name.clone(),
                    got: row.len(),
                    expected: n_steps,
                });
            }
            if let Some(step) = row.iter().position(|v| !v.is_finite()) {
                return Err(AggError::NonFinite {
                    name: name.clone(),
                    step,
                });
            }
        }
        Ok(Self {
            attribute_names,
            values,
            step_hours,
        })
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn step_hours(&self) -> f64 {
        self.step_hours
    }

    pub fn n_attributes(&self) -> usize {
        self.values.len()
    }

    pub fn n_steps(&self) -> usize {
        self.values[0].len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attribute_names.iter().position(|n| n == name)
    }

    pub fn row(&self, name: &str) -> Option<&[f64]> {
        self.index_of(name).map(|i| self.values[i].as_slice())
    }

    /// Keeps only the first `n_steps` steps.
    pub fn truncated(&self, n_steps: usize) -> Result<Self, AggError> {
        let values = self
            .values
            .iter()
            .map(|r| r[..n_steps.min(r.len())].to_vec())
            .collect();
        Self::new(self.attribute_names.clone(), values, self.step_hours)
    }
}

/// Per-attribute minimum and maximum of the raw series.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationParams {
    pub names: Vec<String>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| (self.min[i], self.max[i]))
    }
}

/// Min-max normalization per attribute. Constant attributes map to 0.0.
pub fn normalize(set: &TimeSeriesSet) -> (TimeSeriesSet, NormalizationParams) {
    let mut mins = Vec::with_capacity(set.n_attributes());
    let mut maxs = Vec::with_capacity(set.n_attributes());
    let values = set
        .values
        .iter()
        .map(|row| {
            let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            mins.push(lo);
            maxs.push(hi);
            if hi > lo {
                let span = hi - lo;
                row.iter().map(|x| ((x - lo) / span).clamp(0.0, 1.0)).collect()
            } else {
                vec![0.0; row.len()]
            }
        })
        .collect();
    let params = NormalizationParams {
        names: set.attribute_names.clone(),
        min: mins,
        max: maxs,
    };
    let normalized = TimeSeriesSet {
        attribute_names: set.attribute_names.clone(),
        values,
        step_hours: set.step_hours,
    };
    (normalized, params)
}

/// Maps normalized rows back to raw units. `names[i]` labels `rows[i]`.
pub fn rescale(
    names: &[String],
    rows: &[Vec<f64>],
    params: &NormalizationParams,
) -> Result<Vec<Vec<f64>>, AggError> {
    if names.len() != rows.len() {
        return Err(AggError::Shape(format!(
            "{} names for {} rows",
            names.len(),
            rows.len()
        )));
    }
    names
        .iter()
        .zip(rows)
        .map(|(name, row)| {
            let (lo, hi) = params
                .get(name)
                .ok_or_else(|| AggError::MissingParams(name.clone()))?;
            row.iter()
                .map(|&v| {
                    if !(-1e-9..=1.0 + 1e-9).contains(&v) {
                        return Err(AggError::OutOfUnitRange {
                            name: name.clone(),
                            value: v,
                        });
                    }
                    Ok(if hi > lo { lo + v * (hi - lo) } else { lo })
                })
                .collect()
        })
        .collect()
}
