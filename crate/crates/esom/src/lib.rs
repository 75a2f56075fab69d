//! Component-based energy system models compiled to linear programs.
//!
//! An [`EnergySystemSpec`] lists regions, commodities and components
//! (sources, sinks, conversions, storages, transmission lines). [`compile`]
//! turns it into a [`tsagg_lp::LinearProgram`] on an [`AggregatedTimeGrid`]:
//! the full horizon, typical time steps or typical periods. Operational costs
//! of a representative are weighted by the number of original steps it
//! stands for; storage states are linked over the original chronology.
//!
//! ```
//! use tsagg_core::TimeSeriesSet;
//! use tsagg_esom::{compile, AggregatedTimeGrid, Capacity, Component, EnergySystemSpec, Price};
//! use tsagg_lp::{solve, SolveOptions};
//!
//! let set = TimeSeriesSet::new(vec!["load".into()], vec![vec![4.0, 8.0]], 1.0).unwrap();
//! let spec = EnergySystemSpec {
//!     regions: vec!["r".into()],
//!     commodities: vec!["el".into()],
//!     components: vec![
//!         Component::Source {
//!             name: "plant".into(),
//!             region: "r".into(),
//!             commodity: "el".into(),
//!             capacity: Capacity::Fixed { capacity: 10.0 },
//!             capacity_factor: None,
//!             variable_cost: Price::Constant(3.0),
//!         },
//!         Component::Sink {
//!             name: "demand".into(),
//!             region: "r".into(),
//!             commodity: "el".into(),
//!             profile: "load".into(),
//!             scale: 1.0,
//!         },
//!     ],
//!     step_hours: 1.0,
//!     emission_price: Price::Constant(0.0),
//!     annuity_rate: 0.0,
//! };
//! let model = compile(&spec, &AggregatedTimeGrid::full(&set)).unwrap();
//! let result = solve(&model.lp, &SolveOptions::default()).unwrap();
//! assert_eq!(result.objective, 36.0);
//! ```

mod builders;
mod compile;
mod costs;
mod grid;
mod model;

use std::path::Path;

use thiserror::Error;
use tsagg_core::AggError;
use tsagg_lp::{LpError, Status};

pub use builders::{
    build_building_spec, build_dispatch_spec, BuildingParams, DispatchParams, DispatchRegion, Fuel,
    Investment, Link, Renewable, Technology,
};
pub use compile::{compile, CompiledModel, CostKind};
pub use costs::{extract_cost_breakdown, ComponentCost, CostBreakdown};
pub use grid::{AggregatedTimeGrid, GridMode};
pub use model::{Capacity, Component, EnergySystemSpec, Price};

#[derive(Debug, Error)]
pub enum EsomError {
    #[error("invalid model: {0}")]
    InvalidSpec(String),
    #[error("`{component}` refers to profile `{profile}`, which is not in the time series")]
    UnresolvedProfile { component: String, profile: String },
    #[error("time grid does not match the model: {0}")]
    InconsistentGrid(String),
    #[error("total demand is zero; nothing to optimize")]
    ZeroDemand,
    #[error("solution is {0:?}, not optimal")]
    NotOptimal(Status),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Aggregation(#[from] AggError),
    #[error("scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Reads a JSON scenario file holding an [`EnergySystemSpec`].
pub fn load_scenario(path: impl AsRef<Path>) -> Result<EnergySystemSpec, EsomError> {
    let text = std::fs::read_to_string(path)?;
    let spec: EnergySystemSpec = serde_json::from_str(&text)?;
    spec.validate()?;
    Ok(spec)
}

pub fn save_scenario(spec: &EnergySystemSpec, path: impl AsRef<Path>) -> Result<(), EsomError> {
    std::fs::write(path, serde_json::to_string_pretty(spec)?)?;
    Ok(())
}
