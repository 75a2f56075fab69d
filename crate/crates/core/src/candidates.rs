use crate::{AggError, TimeSeriesSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateMode {
    /// One candidate per time step, one feature per attribute.
    TimeStep,
    /// One candidate per period of the given number of steps.
    Period(usize),
}

impl CandidateMode {
    /// Number of original time steps one candidate covers.
    pub fn steps_per_candidate(self) -> usize {
        match self {
            CandidateMode::TimeStep => 1,
            CandidateMode::Period(t) => t,
        }
    }
}

/// Clustering candidates stored row-major.
///
/// In period mode the features of a row are laid out attribute-major:
/// all offsets of the first attribute, then all offsets of the second, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateMatrix {
    data: Vec<f64>,
    dim: usize,
    n_candidates: usize,
    mode: CandidateMode,
    attribute_names: Vec<String>,
    dropped_steps: usize,
}

impl CandidateMatrix {
    /// Wraps raw rows, e.g. for clustering data that did not come from a time series set.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, AggError> {
        let dim = rows.first().map(Vec::len).ok_or(AggError::Empty)?;
        if dim == 0 {
            return Err(AggError::Empty);
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(AggError::Shape("candidate rows differ in length".into()));
        }
        Ok(Self {
            data: rows.concat(),
            dim,
            n_candidates: rows.len(),
            mode: CandidateMode::TimeStep,
            attribute_names: (0..dim).map(|i| format!("x{i}")).collect(),
            dropped_steps: 0,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_candidates(&self) -> usize {
        self.n_candidates
    }

    pub fn n_attributes(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn mode(&self) -> CandidateMode {
        self.mode
    }

    /// Trailing steps left out because the horizon was not a whole number of periods.
    pub fn dropped_steps(&self) -> usize {
        self.dropped_steps
    }

    /// Number of original steps covered by the candidates.
    pub fn covered_steps(&self) -> usize {
        self.n_candidates * self.mode.steps_per_candidate()
    }

    /// Feature indices holding attribute `a` within a row.
    pub fn features_of(&self, a: usize) -> std::ops::Range<usize> {
        let t = self.mode.steps_per_candidate();
        a * t..(a + 1) * t
    }
}

/// One candidate per step: entry (s, a) is attribute `a` at step `s`.
pub fn build_step_candidates(normalized: &TimeSeriesSet) -> CandidateMatrix {
    let n_a = normalized.n_attributes();
    let n_s = normalized.n_steps();
    let mut data = vec![0.0; n_a * n_s];
    for (a, row) in normalized.values().iter().enumerate() {
        for (s, v) in row.iter().enumerate() {
            data[s * n_a + a] = *v;
        }
    }
    CandidateMatrix {
        data,
        dim: n_a,
        n_candidates: n_s,
        mode: CandidateMode::TimeStep,
        attribute_names: normalized.attribute_names().to_vec(),
        dropped_steps: 0,
    }
}

/// One candidate per period of `period_length` consecutive steps.
///
/// A horizon that is not a multiple of `period_length` is an error unless
/// `truncate` is set, in which case the trailing remainder is dropped and
/// reported through [`CandidateMatrix::dropped_steps`].
pub fn build_period_candidates(
    normalized: &TimeSeriesSet,
    period_length: usize,
    truncate: bool,
) -> Result<CandidateMatrix, AggError> {
    if period_length == 0 {
        return Err(AggError::ZeroPeriodLength);
    }
    let n_s = normalized.n_steps();
    let remainder = n_s % period_length;
    if remainder != 0 && !truncate {
        return Err(AggError::NotDivisible {
            n_steps: n_s,
            period_length,
        });
    }
    let n_p = n_s / period_length;
    if n_p == 0 {
        return Err(AggError::Empty);
    }
    let n_a = normalized.n_attributes();
    let dim = n_a * period_length;
    let mut data = Vec::with_capacity(n_p * dim);
    for p in 0..n_p {
        for row in normalized.values() {
            data.extend_from_slice(&row[p * period_length..(p + 1) * period_length]);
        }
    }
    Ok(CandidateMatrix {
        data,
        dim,
        n_candidates: n_p,
        mode: CandidateMode::Period(period_length),
        attribute_names: normalized.attribute_names().to_vec(),
        dropped_steps: remainder,
    })
}

/// Zero-based step index to (period, offset within period).
pub fn step_index_to_period(s: usize, period_length: usize) -> (usize, usize) {
    assert!(period_length >= 1, "period length must be at least 1");
    let p = s / period_length;
    (p, s - p * period_length)
}
