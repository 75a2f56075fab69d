use tsagg_core::{rescale, CandidateMode, ClusterResult, NormalizationParams, TimeSeriesSet};

use crate::EsomError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    Full,
    TypicalSteps,
    TypicalPeriods(usize),
}

/// Representative profiles in raw units plus the chronology that links them
/// back to the original horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedTimeGrid {
    mode: GridMode,
    attribute_names: Vec<String>,
    /// Per attribute, `n_clusters × period_len` values, cluster-major.
    representatives: Vec<Vec<f64>>,
    /// Original step (or period) → cluster.
    assignment: Vec<usize>,
    weights: Vec<f64>,
    n_steps: usize,
    step_hours: f64,
}

impl AggregatedTimeGrid {
    /// One cluster per original step.
    pub fn full(set: &TimeSeriesSet) -> Self {
        let n = set.n_steps();
        Self {
            mode: GridMode::Full,
            attribute_names: set.attribute_names().to_vec(),
            representatives: set.values().to_vec(),
            assignment: (0..n).collect(),
            weights: vec![1.0; n],
            n_steps: n,
            step_hours: set.step_hours(),
        }
    }

    /// Builds the grid from a clustering of normalized candidates; centroids
    /// are mapped back to raw units with `params`.
    pub fn from_clusters(
        result: &ClusterResult,
        params: &NormalizationParams,
        step_hours: f64,
    ) -> Result<Self, EsomError> {
        let period_len = result.mode.steps_per_candidate();
        let n_attr = result.attribute_names.len();
        let k = result.k;
        let mut normalized = vec![Vec::with_capacity(k * period_len); n_attr];
        for centroid in &result.centroids {
            for (a, row) in normalized.iter_mut().enumerate() {
                row.extend_from_slice(&centroid[a * period_len..(a + 1) * period_len]);
            }
        }
        let representatives = rescale(&result.attribute_names, &normalized, params)?;
        let mode = match result.mode {
            CandidateMode::TimeStep => GridMode::TypicalSteps,
            CandidateMode::Period(t) => GridMode::TypicalPeriods(t),
        };
        Ok(Self {
            mode,
            attribute_names: result.attribute_names.clone(),
            representatives,
            assignment: result.assignment.clone(),
            weights: result.sizes.iter().map(|&s| s as f64).collect(),
            n_steps: result.assignment.len() * period_len,
            step_hours,
        })
    }

    /// Assembles a grid from explicit parts. `representatives[a]` holds
    /// `weights.len() × period_len` values.
    pub fn from_parts(
        mode: GridMode,
        attribute_names: Vec<String>,
        representatives: Vec<Vec<f64>>,
        assignment: Vec<usize>,
        step_hours: f64,
    ) -> Result<Self, EsomError> {
        let period_len = match mode {
            GridMode::TypicalPeriods(t) => t,
            _ => 1,
        };
        if period_len == 0 || attribute_names.len() != representatives.len() {
            return Err(EsomError::InconsistentGrid("attribute count or period length".into()));
        }
        let k = assignment.iter().max().map_or(0, |m| m + 1);
        let mut weights = vec![0.0; k];
        for &c in &assignment {
            weights[c] += 1.0;
        }
        if weights.contains(&0.0) {
            return Err(EsomError::InconsistentGrid("a cluster has no members".into()));
        }
        if representatives.iter().any(|r| r.len() != k * period_len) {
            return Err(EsomError::InconsistentGrid(format!(
                "expected {} values per attribute",
                k * period_len
            )));
        }
        Ok(Self {
            mode,
            attribute_names,
            representatives,
            n_steps: assignment.len() * period_len,
            assignment,
            weights,
            step_hours,
        })
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn n_clusters(&self) -> usize {
        self.weights.len()
    }

    /// Steps per representative: 1 unless typical periods.
    pub fn period_len(&self) -> usize {
        match self.mode {
            GridMode::TypicalPeriods(t) => t,
            _ => 1,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Original horizon in steps.
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn step_hours(&self) -> f64 {
        self.step_hours
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    /// Representative values of one attribute, cluster-major.
    pub fn profile(&self, name: &str) -> Option<&[f64]> {
        self.attribute_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.representatives[i].as_slice())
    }

    /// Steps covered by the whole grid; equals `n_steps` when consistent.
    pub fn represented_steps(&self) -> f64 {
        self.weights.iter().sum::<f64>() * self.period_len() as f64
    }

    /// Spreads per-representative values (cluster-major) over the original horizon.
    pub fn expand(&self, values: &[f64]) -> Vec<f64> {
        let t_len = self.period_len();
        let mut out = Vec::with_capacity(self.n_steps);
        for &k in &self.assignment {
            out.extend_from_slice(&values[k * t_len..(k + 1) * t_len]);
        }
        out
    }
}
