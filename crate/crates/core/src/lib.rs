//! Temporal aggregation of multi-attribute time series.
//!
//! The pipeline is: [`normalize`] the raw series, rearrange them into
//! clustering candidates (one per time step or one per period), cluster the
//! candidates with Ward's method, and measure how well the cluster
//! representatives reproduce the original series.
//!
//! ```
//! use tsagg_core::{normalize, build_step_candidates, ward_cluster, expand_to_full, evaluate, TimeSeriesSet};
//!
//! let set = TimeSeriesSet::new(vec!["load".into()], vec![vec![0.0, 1.0, 10.0, 11.0]], 1.0).unwrap();
//! let (norm, _params) = normalize(&set);
//! let cands = build_step_candidates(&norm);
//! let clusters = ward_cluster(&cands, 2).unwrap();
//! assert_eq!(clusters.assignment, vec![0, 0, 1, 1]);
//! let predicted = expand_to_full(&clusters, norm.n_steps()).unwrap();
//! let report = evaluate(&norm, &predicted).unwrap();
//! assert!(report.rmse_tot < 0.1);
//! ```

mod candidates;
mod error;
mod metrics;
mod series;
mod ward;

pub use candidates::{
    build_period_candidates, build_step_candidates, step_index_to_period, CandidateMatrix,
    CandidateMode,
};
pub use error::AggError;
pub use metrics::{
    duration_curve, evaluate, expand_to_full, mae, rmse, rmse_dc, totals, AccuracyReport, Totals,
};
pub use series::{normalize, rescale, NormalizationParams, TimeSeriesSet};
pub use ward::{
    inject_extreme_candidates, ward_cluster, ward_linkage, ClusterResult, Dendrogram, Merge,
};
