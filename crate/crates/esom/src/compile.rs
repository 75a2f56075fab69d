use std::collections::BTreeMap;

use tsagg_lp::{LinearProgram, Sense, VarId};

use crate::grid::{AggregatedTimeGrid, GridMode};
use crate::model::{Capacity, Component, EnergySystemSpec, Price};
use crate::EsomError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    Capex,
    FixedOpex,
    VariableOpex,
}

/// The LP for one (spec, grid) pair plus what is needed to read results back.
#[derive(Debug, Clone)]
pub struct CompiledModel {
    pub lp: LinearProgram,
    /// Objective split: (variable, component index, kind, coefficient).
    pub(crate) cost_terms: Vec<(VarId, usize, CostKind, f64)>,
    /// Capacity variables by name (`cap.<component>`, `pcap.<storage>`).
    pub(crate) capacities: BTreeMap<String, VarId>,
    /// Operation variables per representative, keyed like `src.pv_south`.
    pub(crate) operation: BTreeMap<String, Vec<VarId>>,
    /// State-of-charge variables per original step for storages under
    /// full or typical-step grids, `soc.<storage>`.
    pub(crate) states: BTreeMap<String, Vec<VarId>>,
    pub(crate) component_names: Vec<String>,
}

impl CompiledModel {
    pub fn component_names(&self) -> &[String] {
        &self.component_names
    }

    pub fn capacity_var(&self, name: &str) -> Option<VarId> {
        self.capacities.get(name).copied()
    }

    pub fn operation_vars(&self, key: &str) -> Option<&[VarId]> {
        self.operation.get(key).map(Vec::as_slice)
    }

    pub fn state_vars(&self, key: &str) -> Option<&[VarId]> {
        self.states.get(key).map(Vec::as_slice)
    }

    /// Keys of all operation series, e.g. `conv.heat_pump` or `ch.battery`.
    pub fn operation_keys(&self) -> impl Iterator<Item = &str> {
        self.operation.keys().map(String::as_str)
    }
}

fn price_series(
    price: &Price,
    grid: &AggregatedTimeGrid,
    owner: &str,
) -> Result<Vec<f64>, EsomError> {
    let len = grid.n_clusters() * grid.period_len();
    match price {
        Price::Constant(v) => Ok(vec![*v; len]),
        Price::Profile { profile, scale } => Ok(lookup(grid, profile, owner)?
            .iter()
            .map(|v| v * scale)
            .collect()),
    }
}

fn lookup<'a>(grid: &'a AggregatedTimeGrid, profile: &str, owner: &str) -> Result<&'a [f64], EsomError> {
    grid.profile(profile).ok_or_else(|| EsomError::UnresolvedProfile {
        component: owner.to_string(),
        profile: profile.to_string(),
    })
}

struct Builder<'a> {
    spec: &'a EnergySystemSpec,
    grid: &'a AggregatedTimeGrid,
    lp: LinearProgram,
    cost_terms: Vec<(VarId, usize, CostKind, f64)>,
    capacities: BTreeMap<String, VarId>,
    operation: BTreeMap<String, Vec<VarId>>,
    states: BTreeMap<String, Vec<VarId>>,
    /// Per (region, commodity): terms per representative index.
    balance: BTreeMap<(usize, usize), Vec<Vec<(VarId, f64)>>>,
    demand: BTreeMap<(usize, usize), Vec<f64>>,
    /// Objective weight of one unit of power at representative index i.
    step_weight: Vec<f64>,
}

impl<'a> Builder<'a> {
    fn n_rep(&self) -> usize {
        self.grid.n_clusters() * self.grid.period_len()
    }

    fn node(&self, region: &str, commodity: &str) -> (usize, usize) {
        let r = self.spec.regions.iter().position(|x| x == region).unwrap();
        let c = self.spec.commodities.iter().position(|x| x == commodity).unwrap();
        (r, c)
    }

    fn label(&self, i: usize) -> String {
        let t_len = self.grid.period_len();
        format!("{}.{}", i / t_len, i % t_len)
    }

    fn add_balance(&mut self, node: (usize, usize), i: usize, v: VarId, coef: f64) {
        let n = self.n_rep();
        self.balance.entry(node).or_insert_with(|| vec![Vec::new(); n])[i].push((v, coef));
    }

    fn var(&mut self, name: String, lower: f64, upper: f64) -> Result<VarId, EsomError> {
        Ok(self.lp.add_var(name, lower, upper, 0.0)?)
    }

    fn add_cost(&mut self, v: VarId, comp: usize, kind: CostKind, coef: f64) {
        if coef != 0.0 {
            let total = self.lp.variables()[v.0].cost + coef;
            self.lp.set_cost(v, total);
            self.cost_terms.push((v, comp, kind, coef));
        }
    }

    /// Returns the capacity variable if the capacity is a decision, otherwise
    /// the fixed upper bound (infinite when unlimited).
    fn capacity(&mut self, key: String, cap: &Capacity, comp: usize) -> Result<Result<VarId, f64>, EsomError> {
        match cap {
            Capacity::Fixed { capacity } => Ok(Err(*capacity)),
            Capacity::Unlimited => Ok(Err(f64::INFINITY)),
            Capacity::Expandable { capex, lifetime, fixed_opex, max } => {
                let v = self.var(key.clone(), 0.0, max.unwrap_or(f64::INFINITY))?;
                let (annual, fixed) = self.spec.annual_capacity_cost(*capex, *lifetime, *fixed_opex);
                self.add_cost(v, comp, CostKind::Capex, annual);
                self.add_cost(v, comp, CostKind::FixedOpex, fixed);
                self.capacities.insert(key, v);
                Ok(Ok(v))
            }
        }
    }

    /// One non-negative variable per representative index, limited by
    /// `factor[i] × capacity`.
    fn operation_series(
        &mut self,
        key: &str,
        cap: &Result<VarId, f64>,
        factor: Option<&[f64]>,
    ) -> Result<Vec<VarId>, EsomError> {
        let mut vars = Vec::with_capacity(self.n_rep());
        for i in 0..self.n_rep() {
            let f = factor.map_or(1.0, |p| p[i].max(0.0));
            let name = format!("{key}.{}", self.label(i));
            let v = match cap {
                Err(bound) => {
                    let ub = if bound.is_infinite() { f64::INFINITY } else { bound * f };
                    self.var(name, 0.0, ub)?
                }
                Ok(c) => {
                    let v = self.var(name.clone(), 0.0, f64::INFINITY)?;
                    self.lp.add_constraint(format!("lim.{name}"), [(v, 1.0), (*c, -f)], Sense::Le, 0.0)?;
                    v
                }
            };
            vars.push(v);
        }
        self.operation.insert(key.to_string(), vars.clone());
        Ok(vars)
    }

    fn component(&mut self, idx: usize, comp: &Component) -> Result<(), EsomError> {
        let n_rep = self.n_rep();
        match comp {
            Component::Source { name, region, commodity, capacity, capacity_factor, variable_cost } => {
                let factor = match capacity_factor {
                    Some(p) => Some(lookup(self.grid, p, name)?.to_vec()),
                    None => None,
                };
                let price = price_series(variable_cost, self.grid, name)?;
                let cap = self.capacity(format!("cap.{name}"), capacity, idx)?;
                let vars = self.operation_series(&format!("src.{name}"), &cap, factor.as_deref())?;
                let node = self.node(region, commodity);
                for (i, &v) in vars.iter().enumerate() {
                    self.add_balance(node, i, v, 1.0);
                    self.add_cost(v, idx, CostKind::VariableOpex, price[i] * self.step_weight[i]);
                }
            }
            Component::Sink { name, region, commodity, profile, scale } => {
                let values = lookup(self.grid, profile, name)?.to_vec();
                let node = self.node(region, commodity);
                let d = self.demand.entry(node).or_insert_with(|| vec![0.0; n_rep]);
                for (di, v) in d.iter_mut().zip(values) {
                    *di += scale * v;
                }
            }
            Component::Conversion { name, region, input, output, efficiency, capacity, variable_cost, emission_factor } => {
                let emission = price_series(&self.spec.emission_price, self.grid, name)?;
                let cap = self.capacity(format!("cap.{name}"), capacity, idx)?;
                let vars = self.operation_series(&format!("conv.{name}"), &cap, None)?;
                let out_node = self.node(region, output);
                let in_node = self.node(region, input);
                for (i, &v) in vars.iter().enumerate() {
                    self.add_balance(out_node, i, v, 1.0);
                    self.add_balance(in_node, i, v, -1.0 / efficiency);
                    let unit = variable_cost + emission_factor * emission[i] / efficiency;
                    self.add_cost(v, idx, CostKind::VariableOpex, unit * self.step_weight[i]);
                }
            }
            Component::Storage { name, region, commodity, efficiency, self_discharge, energy, power, cyclic } => {
                let pcap = self.capacity(format!("pcap.{name}"), power, idx)?;
                let ecap = self.capacity(format!("cap.{name}"), energy, idx)?;
                let charge = self.operation_series(&format!("ch.{name}"), &pcap, None)?;
                let discharge = self.operation_series(&format!("dis.{name}"), &pcap, None)?;
                let node = self.node(region, commodity);
                for i in 0..n_rep {
                    self.add_balance(node, i, charge[i], -1.0);
                    self.add_balance(node, i, discharge[i], 1.0);
                }
                let unit = StorageUnit {
                    name,
                    efficiency: *efficiency,
                    retention: 1.0 - self_discharge,
                    ecap,
                    cyclic: *cyclic,
                    charge: &charge,
                    discharge: &discharge,
                };
                match self.grid.mode() {
                    GridMode::Full | GridMode::TypicalSteps => self.chronological_storage(&unit)?,
                    GridMode::TypicalPeriods(_) => self.linked_storage(&unit)?,
                }
            }
            Component::Transmission { name, from, to, commodity, capacity, loss } => {
                let a = self.node(from, commodity);
                let b = self.node(to, commodity);
                let fwd = self.operation_series(&format!("fwd.{name}"), &Err(*capacity), None)?;
                let bwd = self.operation_series(&format!("bwd.{name}"), &Err(*capacity), None)?;
                for i in 0..n_rep {
                    self.add_balance(a, i, fwd[i], -1.0);
                    self.add_balance(b, i, fwd[i], 1.0 - loss);
                    self.add_balance(b, i, bwd[i], -1.0);
                    self.add_balance(a, i, bwd[i], 1.0 - loss);
                }
            }
        }
        Ok(())
    }

    fn energy_limit(&mut self, row: String, terms: Vec<(VarId, f64)>, ecap: &Result<VarId, f64>) -> Result<(), EsomError> {
        match ecap {
            Ok(c) => {
                let mut terms = terms;
                terms.push((*c, -1.0));
                self.lp.add_constraint(row, terms, Sense::Le, 0.0)?;
            }
            Err(e) if e.is_finite() => {
                self.lp.add_constraint(row, terms, Sense::Le, *e)?;
            }
            Err(_) => {}
        }
        Ok(())
    }

    /// One state per original step, driven by the operation of the step's cluster.
    fn chronological_storage(&mut self, s: &StorageUnit) -> Result<(), EsomError> {
        let h = self.grid.step_hours();
        let assignment = self.grid.assignment().to_vec();
        let n = assignment.len();
        let n_states = if s.cyclic { n } else { n + 1 };
        let ub = match s.ecap {
            Err(e) => e,
            Ok(_) => f64::INFINITY,
        };
        let mut soc = Vec::with_capacity(n_states);
        for step in 0..n_states {
            let upper = if !s.cyclic && step == 0 { 0.0 } else { ub };
            soc.push(self.var(format!("soc.{}.{step}", s.name), 0.0, upper)?);
        }
        for (step, &k) in assignment.iter().enumerate() {
            let next = soc[(step + 1) % n_states];
            self.lp.add_constraint(
                format!("soc_eq.{}.{step}", s.name),
                [
                    (next, 1.0),
                    (soc[step], -s.retention),
                    (s.charge[k], -s.efficiency * h),
                    (s.discharge[k], h / s.efficiency),
                ],
                Sense::Eq,
                0.0,
            )?;
        }
        if let Ok(c) = s.ecap {
            for (step, &v) in soc.iter().enumerate() {
                self.lp.add_constraint(format!("soc_max.{}.{step}", s.name), [(v, 1.0), (c, -1.0)], Sense::Le, 0.0)?;
            }
        }
        self.states.insert(format!("soc.{}", s.name), soc);
        Ok(())
    }

    /// Intra-period state per representative plus one inter-period state per
    /// original period, bounded at every offset.
    fn linked_storage(&mut self, s: &StorageUnit) -> Result<(), EsomError> {
        let h = self.grid.step_hours();
        let t_len = self.grid.period_len();
        let k_count = self.grid.n_clusters();
        let name = s.name;
        let mut intra = vec![Vec::with_capacity(t_len); k_count];
        for (k, row) in intra.iter_mut().enumerate() {
            for t in 0..t_len {
                let v = self.var(format!("intra.{name}.{k}.{}", t + 1), f64::NEG_INFINITY, f64::INFINITY)?;
                let i = k * t_len + t;
                let mut terms = vec![(v, 1.0), (s.charge[i], -s.efficiency * h), (s.discharge[i], h / s.efficiency)];
                if t > 0 {
                    terms.push((row[t - 1], -s.retention));
                }
                self.lp.add_constraint(format!("intra_eq.{name}.{k}.{}", t + 1), terms, Sense::Eq, 0.0)?;
                row.push(v);
            }
        }
        let assignment = self.grid.assignment().to_vec();
        let n_periods = assignment.len();
        let n_states = if s.cyclic { n_periods } else { n_periods + 1 };
        let ub = match s.ecap {
            Err(e) => e,
            Ok(_) => f64::INFINITY,
        };
        let mut xi = Vec::with_capacity(n_states);
        for d in 0..n_states {
            let upper = if !s.cyclic && d == 0 { 0.0 } else { ub };
            xi.push(self.var(format!("xi.{name}.{d}"), 0.0, upper)?);
        }
        let decay = s.retention.powi(t_len as i32);
        for (d, &k) in assignment.iter().enumerate() {
            self.lp.add_constraint(
                format!("xi_eq.{name}.{d}"),
                [(xi[(d + 1) % n_states], 1.0), (xi[d], -decay), (intra[k][t_len - 1], -1.0)],
                Sense::Eq,
                0.0,
            )?;
            for t in 1..t_len {
                let terms = vec![(xi[d], s.retention.powi(t as i32)), (intra[k][t - 1], 1.0)];
                self.lp.add_constraint(format!("soc_min.{name}.{d}.{t}"), terms.clone(), Sense::Ge, 0.0)?;
                self.energy_limit(format!("soc_max.{name}.{d}.{t}"), terms, &s.ecap)?;
            }
        }
        if s.ecap.is_ok() {
            for (d, &v) in xi.iter().enumerate() {
                self.energy_limit(format!("soc_max.{name}.{d}.0"), vec![(v, 1.0)], &s.ecap)?;
            }
        }
        self.states.insert(format!("xi.{name}"), xi);
        Ok(())
    }
}

struct StorageUnit<'s> {
    name: &'s str,
    efficiency: f64,
    retention: f64,
    ecap: Result<VarId, f64>,
    cyclic: bool,
    charge: &'s [VarId],
    discharge: &'s [VarId],
}

fn check_grid(spec: &EnergySystemSpec, grid: &AggregatedTimeGrid) -> Result<(), EsomError> {
    let expected_assign = match grid.mode() {
        GridMode::TypicalPeriods(t) => grid.n_steps() / t,
        _ => grid.n_steps(),
    };
    if grid.assignment().len() != expected_assign
        || (grid.represented_steps() - grid.n_steps() as f64).abs() > 0.5
        || grid.assignment().iter().any(|&k| k >= grid.n_clusters())
    {
        return Err(EsomError::InconsistentGrid(format!(
            "weights cover {} steps, horizon has {}",
            grid.represented_steps(),
            grid.n_steps()
        )));
    }
    if (grid.step_hours() - spec.step_hours).abs() > 1e-12 * spec.step_hours {
        return Err(EsomError::InconsistentGrid(format!(
            "grid step is {} h, model expects {} h",
            grid.step_hours(),
            spec.step_hours
        )));
    }
    Ok(())
}

/// Builds the LP of `spec` on `grid`.
pub fn compile(spec: &EnergySystemSpec, grid: &AggregatedTimeGrid) -> Result<CompiledModel, EsomError> {
    spec.validate()?;
    check_grid(spec, grid)?;
    let t_len = grid.period_len();
    let step_weight: Vec<f64> = (0..grid.n_clusters() * t_len)
        .map(|i| grid.weights()[i / t_len] * grid.step_hours())
        .collect();
    let mut b = Builder {
        spec,
        grid,
        lp: LinearProgram::new(),
        cost_terms: Vec::new(),
        capacities: BTreeMap::new(),
        operation: BTreeMap::new(),
        states: BTreeMap::new(),
        balance: BTreeMap::new(),
        demand: BTreeMap::new(),
        step_weight,
    };
    for (idx, comp) in spec.components.iter().enumerate() {
        b.component(idx, comp)?;
    }
    let positive_demand: f64 = b
        .demand
        .values()
        .flat_map(|d| d.iter())
        .map(|v| v.max(0.0))
        .sum();
    if positive_demand <= 0.0 {
        return Err(EsomError::ZeroDemand);
    }
    let n_rep = b.n_rep();
    let mut nodes: Vec<(usize, usize)> = b.balance.keys().chain(b.demand.keys()).copied().collect();
    nodes.sort_unstable();
    nodes.dedup();
    for i in 0..n_rep {
        for &node in &nodes {
            let terms = b.balance.get(&node).map(|t| t[i].clone()).unwrap_or_default();
            let rhs = b.demand.get(&node).map_or(0.0, |d| d[i]);
            let name = format!(
                "bal.{}.{}.{}",
                spec.regions[node.0],
                spec.commodities[node.1],
                b.label(i)
            );
            b.lp.add_constraint(name, terms, Sense::Eq, rhs)?;
        }
    }
    Ok(CompiledModel {
        lp: b.lp,
        cost_terms: b.cost_terms,
        capacities: b.capacities,
        operation: b.operation,
        states: b.states,
        component_names: spec.components.iter().map(|c| c.name().to_string()).collect(),
    })
}
