//! Benchmark harness: loads profiles, aggregates them to typical time steps
//! or typical days over a grid of cluster counts, solves the energy system
//! model on each grid point and writes CSV reports.

pub mod generate;
mod grid;
mod io;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;
use tsagg_core::{AggError, TimeSeriesSet};
use tsagg_esom::{
    build_building_spec, build_dispatch_spec, load_scenario, BuildingParams, DispatchParams,
    EnergySystemSpec, EsomError,
};
use tsagg_lp::LpError;

pub use grid::{
    aggregate, aggregate_all, configurations_for_counts, default_configurations, run_grid, AggregationMode,
    ConfigReport, Configuration, GridReport, LpSize, PhaseTimes, RunConfig, DEFAULT_DAY_COUNTS,
    DEFAULT_STEP_COUNTS, WORKERS_ENV,
};
pub use io::{load_csv, read_csv, write_csv};
pub use report::{emit_report, REPORT_COLUMNS};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{0}")]
    Io(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Aggregation(#[from] AggError),
    #[error(transparent)]
    Model(#[from] EsomError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("solve failed: {0}")]
    Solve(String),
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        BenchError::Csv(e.to_string())
    }
}

/// Which energy system model a grid run optimizes.
#[derive(Debug, Clone)]
pub enum ModelChoice {
    Building(BuildingParams),
    Dispatch(DispatchParams),
    Scenario(PathBuf),
}

impl ModelChoice {
    pub fn name(&self) -> String {
        match self {
            ModelChoice::Building(_) => "building".into(),
            ModelChoice::Dispatch(_) => "dispatch".into(),
            ModelChoice::Scenario(p) => p
                .file_stem()
                .map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned()),
        }
    }

    /// The model bound to `profiles`; fails on missing profile attributes.
    pub fn spec(&self, profiles: &TimeSeriesSet) -> Result<EnergySystemSpec, BenchError> {
        Ok(match self {
            ModelChoice::Building(p) => build_building_spec(p, Some(profiles))?,
            ModelChoice::Dispatch(p) => build_dispatch_spec(p, Some(profiles))?,
            ModelChoice::Scenario(path) => {
                let spec = load_scenario(path)?;
                for name in spec.profile_names() {
                    if profiles.index_of(&name).is_none() {
                        return Err(EsomError::UnresolvedProfile {
                            component: "scenario".into(),
                            profile: name,
                        }
                        .into());
                    }
                }
                spec
            }
        })
    }
}

/// Loads the profiles, binds the model and runs the grid.
pub fn run_from_csv(
    config: &RunConfig,
    model: &ModelChoice,
    profiles: impl AsRef<Path>,
) -> Result<GridReport, BenchError> {
    let start = Instant::now();
    let mut series = load_csv(profiles, 1.0)?;
    let spec = model.spec(&series)?;
    if spec.step_hours != series.step_hours() {
        series = TimeSeriesSet::new(series.attribute_names().to_vec(), series.values().to_vec(), spec.step_hours)?;
    }
    let load_time = start.elapsed();
    Ok(grid::run_grid_timed(config, &series, Some(&spec), load_time))
}

/// Path of a bundled sample file.
pub fn sample_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub const SAMPLE_BUILDING: &str = "sample_building.csv";
pub const SAMPLE_DISPATCH: &str = "sample_dispatch.csv";
