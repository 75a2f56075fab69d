use serde::Serialize;
use tsagg_lp::{SolveResult, Status};

use crate::compile::{CompiledModel, CostKind};
use crate::grid::AggregatedTimeGrid;
use crate::EsomError;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ComponentCost {
    pub name: String,
    pub capex: f64,
    pub fixed_opex: f64,
    pub variable_opex: f64,
}

impl ComponentCost {
    pub fn total(&self) -> f64 {
        self.capex + self.fixed_opex + self.variable_opex
    }
}

/// Total annual cost split by component and cost type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub components: Vec<ComponentCost>,
    pub total: f64,
}

impl CostBreakdown {
    pub fn get(&self, name: &str) -> Option<&ComponentCost> {
        self.components.iter().find(|c| c.name == name)
    }
}

pub fn extract_cost_breakdown(model: &CompiledModel, result: &SolveResult) -> Result<CostBreakdown, EsomError> {
    if result.status != Status::Optimal {
        return Err(EsomError::NotOptimal(result.status));
    }
    let mut components: Vec<ComponentCost> = model
        .component_names
        .iter()
        .map(|n| ComponentCost {
            name: n.clone(),
            ..Default::default()
        })
        .collect();
    for &(v, comp, kind, coef) in &model.cost_terms {
        let part = coef * result.value(v);
        let slot = &mut components[comp];
        match kind {
            CostKind::Capex => slot.capex += part,
            CostKind::FixedOpex => slot.fixed_opex += part,
            CostKind::VariableOpex => slot.variable_opex += part,
        }
    }
    let total = components.iter().map(ComponentCost::total).sum();
    Ok(CostBreakdown { components, total })
}

impl CompiledModel {
    /// Values of an operation series over the original horizon.
    pub fn operation_profile(
        &self,
        key: &str,
        grid: &AggregatedTimeGrid,
        result: &SolveResult,
    ) -> Option<Vec<f64>> {
        let vars = self.operation.get(key)?;
        let per_rep: Vec<f64> = vars.iter().map(|&v| result.value(v)).collect();
        Some(grid.expand(&per_rep))
    }

    /// Optimal capacity of an expandable component, if it has one.
    pub fn capacity_value(&self, name: &str, result: &SolveResult) -> Option<f64> {
        self.capacities.get(name).map(|&v| result.value(v))
    }
}
