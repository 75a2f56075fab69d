use serde::{Deserialize, Serialize};
use tsagg_core::TimeSeriesSet;

use crate::model::{Capacity, Component, EnergySystemSpec, Price};
use crate::EsomError;

fn require(set: Option<&TimeSeriesSet>, profiles: &[&str]) -> Result<(), EsomError> {
    if let Some(set) = set {
        for p in profiles {
            if set.index_of(p).is_none() {
                return Err(EsomError::UnresolvedProfile {
                    component: "model".into(),
                    profile: p.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Investment data of an expandable technology: capex per kW or kWh,
/// lifetime in years, fixed opex as a fraction of capex per year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Investment {
    pub capex: f64,
    pub lifetime: f64,
    pub fixed_opex: f64,
}

impl Investment {
    const fn new(capex: f64, lifetime: f64, fixed_opex: f64) -> Self {
        Self { capex, lifetime, fixed_opex }
    }

    fn capacity(self) -> Capacity {
        Capacity::expandable(self.capex, self.lifetime, self.fixed_opex)
    }
}

/// Self-sufficient single-family house: PV, battery, hydrogen path and heat
/// supply. Units are kW, kWh and €.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildingParams {
    pub pv_profiles: [String; 3],
    pub electricity_demand: String,
    pub heat_demand: String,
    pub pv: Investment,
    pub battery: Investment,
    /// Inverter, sized as battery power.
    pub battery_power: Investment,
    pub battery_efficiency: f64,
    pub battery_self_discharge: f64,
    pub hydrogenizer: Investment,
    pub hydrogenizer_efficiency: f64,
    pub fuel_cell: Investment,
    pub fuel_cell_efficiency: f64,
    pub hydrogen_storage: Investment,
    pub hydrogen_self_discharge: f64,
    pub heat_pump: Investment,
    pub heat_pump_cop: f64,
    pub electric_heater: Investment,
    pub thermal_storage: Investment,
    pub thermal_efficiency: f64,
    pub thermal_self_discharge: f64,
    pub step_hours: f64,
}

impl Default for BuildingParams {
    fn default() -> Self {
        Self {
            pv_profiles: ["pv_south".into(), "pv_east".into(), "pv_west".into()],
            electricity_demand: "electricity_demand".into(),
            heat_demand: "heat_demand".into(),
            pv: Investment::new(769.0, 20.0, 0.01),
            battery: Investment::new(301.0, 15.0, 0.0),
            battery_power: Investment::new(75.0, 20.0, 0.0),
            battery_efficiency: 0.95,
            battery_self_discharge: 2e-4,
            hydrogenizer: Investment::new(761.1, 20.0, 0.01),
            hydrogenizer_efficiency: 0.65,
            fuel_cell: Investment::new(2400.0, 15.0, 0.01),
            fuel_cell_efficiency: 0.55,
            hydrogen_storage: Investment::new(15.0, 25.0, 0.0),
            hydrogen_self_discharge: 1e-5,
            heat_pump: Investment::new(504.9, 20.0, 0.015),
            heat_pump_cop: 3.0,
            electric_heater: Investment::new(60.0, 30.0, 0.02),
            thermal_storage: Investment::new(90.0, 25.0, 0.0001),
            thermal_efficiency: 0.99,
            thermal_self_discharge: 0.005,
            step_hours: 1.0,
        }
    }
}

impl BuildingParams {
    pub fn profile_names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.pv_profiles.iter().map(String::as_str).collect();
        out.push(&self.electricity_demand);
        out.push(&self.heat_demand);
        out
    }
}

/// Builds the building expansion model. When `profiles` is given, every
/// referenced attribute must exist in it.
pub fn build_building_spec(
    params: &BuildingParams,
    profiles: Option<&TimeSeriesSet>,
) -> Result<EnergySystemSpec, EsomError> {
    require(profiles, &params.profile_names())?;
    let region = "home".to_string();
    let el = "electricity".to_string();
    let heat = "heat".to_string();
    let h2 = "hydrogen".to_string();
    let mut components = Vec::new();
    for (orientation, profile) in ["south", "east", "west"].iter().zip(&params.pv_profiles) {
        components.push(Component::Source {
            name: format!("pv_{orientation}"),
            region: region.clone(),
            commodity: el.clone(),
            capacity: params.pv.capacity(),
            capacity_factor: Some(profile.clone()),
            variable_cost: Price::Constant(0.0),
        });
    }
    components.extend([
        Component::Sink {
            name: "electricity_demand".into(),
            region: region.clone(),
            commodity: el.clone(),
            profile: params.electricity_demand.clone(),
            scale: 1.0,
        },
        Component::Sink {
            name: "heat_demand".into(),
            region: region.clone(),
            commodity: heat.clone(),
            profile: params.heat_demand.clone(),
            scale: 1.0,
        },
        Component::Storage {
            name: "battery".into(),
            region: region.clone(),
            commodity: el.clone(),
            efficiency: params.battery_efficiency,
            self_discharge: params.battery_self_discharge,
            energy: params.battery.capacity(),
            power: params.battery_power.capacity(),
            cyclic: true,
        },
        Component::Conversion {
            name: "hydrogenizer".into(),
            region: region.clone(),
            input: el.clone(),
            output: h2.clone(),
            efficiency: params.hydrogenizer_efficiency,
            capacity: params.hydrogenizer.capacity(),
            variable_cost: 0.0,
            emission_factor: 0.0,
        },
        Component::Conversion {
            name: "fuel_cell".into(),
            region: region.clone(),
            input: h2.clone(),
            output: el.clone(),
            efficiency: params.fuel_cell_efficiency,
            capacity: params.fuel_cell.capacity(),
            variable_cost: 0.0,
            emission_factor: 0.0,
        },
        Component::Storage {
            name: "hydrogen_storage".into(),
            region: region.clone(),
            commodity: h2.clone(),
            efficiency: 1.0,
            self_discharge: params.hydrogen_self_discharge,
            energy: params.hydrogen_storage.capacity(),
            power: Capacity::Unlimited,
            cyclic: true,
        },
        Component::Conversion {
            name: "heat_pump".into(),
            region: region.clone(),
            input: el.clone(),
            output: heat.clone(),
            efficiency: params.heat_pump_cop,
            capacity: params.heat_pump.capacity(),
            variable_cost: 0.0,
            emission_factor: 0.0,
        },
        Component::Conversion {
            name: "electric_heater".into(),
            region: region.clone(),
            input: el.clone(),
            output: heat.clone(),
            efficiency: 1.0,
            capacity: params.electric_heater.capacity(),
            variable_cost: 0.0,
            emission_factor: 0.0,
        },
        Component::Storage {
            name: "thermal_storage".into(),
            region: region.clone(),
            commodity: heat.clone(),
            efficiency: params.thermal_efficiency,
            self_discharge: params.thermal_self_discharge,
            energy: params.thermal_storage.capacity(),
            power: Capacity::Unlimited,
            cyclic: true,
        },
    ]);
    let spec = EnergySystemSpec {
        regions: vec![region],
        commodities: vec![el, heat, h2],
        components,
        step_hours: params.step_hours,
        emission_price: Price::Constant(0.0),
        annuity_rate: 0.0,
    };
    spec.validate()?;
    Ok(spec)
}

/// A thermal plant class. `opex` is the operation cost per MWh of output;
/// fuel and emission costs come on top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Technology {
    pub name: String,
    pub fuel: String,
    pub efficiency: f64,
    pub opex: f64,
    /// t CO2 per MWh of fuel.
    pub emission_factor: f64,
}

impl Technology {
    /// Operation plus fuel cost per MWh of electricity, without emissions.
    pub fn fuel_and_opex(&self, fuel_price: f64) -> f64 {
        self.opex + fuel_price / self.efficiency
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fuel {
    pub name: String,
    /// € per MWh thermal.
    pub price: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Renewable {
    pub name: String,
    pub capacity: f64,
    pub capacity_factor: String,
    pub opex: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchRegion {
    pub name: String,
    pub demand: String,
    /// Signed net output of the region's storage plants; positive feeds in.
    #[serde(default)]
    pub storage_injection: Option<String>,
    pub renewables: Vec<Renewable>,
    /// Installed thermal capacity per technology name, MW.
    pub thermal: Vec<(String, f64)>,
    #[serde(default)]
    pub import_capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub from: String,
    pub to: String,
    pub capacity: f64,
    pub loss: f64,
}

/// Multi-region dispatch with fixed capacities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchParams {
    pub regions: Vec<DispatchRegion>,
    pub technologies: Vec<Technology>,
    pub fuels: Vec<Fuel>,
    pub links: Vec<Link>,
    /// € per t CO2.
    pub emission_price: Price,
    pub import_price: Price,
    /// Cost of unserved demand, € per MWh.
    pub lost_load_cost: f64,
    pub step_hours: f64,
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    (lo + hi) / 2.0
}

impl DispatchParams {
    /// Thermal plant classes at the midpoints of their efficiency and
    /// operation-cost ranges.
    pub fn default_technologies() -> Vec<Technology> {
        let tech = |name: &str, fuel: &str, eff: (f64, f64), opex: (f64, f64), ef: f64| Technology {
            name: name.into(),
            fuel: fuel.into(),
            efficiency: midpoint(eff.0, eff.1),
            opex: midpoint(opex.0, opex.1),
            emission_factor: ef,
        };
        vec![
            tech("lignite", "lignite", (0.20, 0.43), (11.1, 19.3), 0.4),
            tech("hard_coal", "hard_coal", (0.23, 0.50), (10.6, 16.8), 0.342),
            tech("gas_cc", "gas", (0.41, 0.63), (5.0, 8.7), 0.204),
            tech("gas_sc", "gas", (0.29, 0.42), (4.2, 7.0), 0.204),
        ]
    }

    pub fn default_fuels() -> Vec<Fuel> {
        vec![
            Fuel { name: "lignite".into(), price: 1.2 },
            Fuel { name: "hard_coal".into(), price: 8.0 },
            Fuel { name: "gas".into(), price: 15.0 },
        ]
    }

    /// Three regions matching the bundled dispatch profiles.
    pub fn desk_scale() -> Self {
        let region = |name: &str, wind: f64, pv: f64, thermal: [f64; 4], import: f64| DispatchRegion {
            name: name.into(),
            demand: format!("{name}_demand"),
            storage_injection: Some(format!("{name}_storage")),
            renewables: vec![
                Renewable {
                    name: format!("{name}_wind"),
                    capacity: wind,
                    capacity_factor: format!("{name}_wind"),
                    opex: 7.5,
                },
                Renewable {
                    name: format!("{name}_pv"),
                    capacity: pv,
                    capacity_factor: format!("{name}_pv"),
                    opex: 7.5,
                },
            ],
            thermal: ["lignite", "hard_coal", "gas_cc", "gas_sc"]
                .iter()
                .zip(thermal)
                .map(|(t, c)| (t.to_string(), c))
                .collect(),
            import_capacity: import,
        };
        Self {
            regions: vec![
                region("north", 9000.0, 2500.0, [0.0, 2500.0, 1500.0, 800.0], 2000.0),
                region("east", 5000.0, 3000.0, [6000.0, 500.0, 1000.0, 600.0], 1000.0),
                region("south", 2000.0, 7000.0, [0.0, 3000.0, 3500.0, 1500.0], 2500.0),
            ],
            technologies: Self::default_technologies(),
            fuels: Self::default_fuels(),
            links: vec![
                Link { from: "north".into(), to: "east".into(), capacity: 2500.0, loss: 0.02 },
                Link { from: "north".into(), to: "south".into(), capacity: 3000.0, loss: 0.03 },
                Link { from: "east".into(), to: "south".into(), capacity: 2000.0, loss: 0.02 },
            ],
            emission_price: Price::Constant(25.0),
            import_price: Price::Profile {
                profile: "import_price".into(),
                scale: 1.0,
            },
            lost_load_cost: 3000.0,
            step_hours: 1.0,
        }
    }

    pub fn profile_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for r in &self.regions {
            out.push(r.demand.as_str());
            if let Some(s) = &r.storage_injection {
                out.push(s.as_str());
            }
            for re in &r.renewables {
                out.push(re.capacity_factor.as_str());
            }
        }
        for p in [&self.import_price, &self.emission_price] {
            if let Price::Profile { profile, .. } = p {
                out.push(profile.as_str());
            }
        }
        out
    }
}

/// Builds the dispatch model: no storage, no expansion; fuels are bought
/// from per-region fuel sources and the historical storage operation enters
/// as a signed demand offset.
pub fn build_dispatch_spec(
    params: &DispatchParams,
    profiles: Option<&TimeSeriesSet>,
) -> Result<EnergySystemSpec, EsomError> {
    require(profiles, &params.profile_names())?;
    let el = "electricity".to_string();
    let mut commodities = vec![el.clone()];
    for f in &params.fuels {
        commodities.push(f.name.clone());
    }
    let mut components = Vec::new();
    for r in &params.regions {
        components.push(Component::Sink {
            name: format!("{}_demand", r.name),
            region: r.name.clone(),
            commodity: el.clone(),
            profile: r.demand.clone(),
            scale: 1.0,
        });
        if let Some(profile) = &r.storage_injection {
            components.push(Component::Sink {
                name: format!("{}_storage", r.name),
                region: r.name.clone(),
                commodity: el.clone(),
                profile: profile.clone(),
                scale: -1.0,
            });
        }
        for re in &r.renewables {
            components.push(Component::Source {
                name: re.name.clone(),
                region: r.name.clone(),
                commodity: el.clone(),
                capacity: Capacity::Fixed { capacity: re.capacity },
                capacity_factor: Some(re.capacity_factor.clone()),
                variable_cost: Price::Constant(re.opex),
            });
        }
        let mut fuels_used: Vec<&str> = Vec::new();
        for (tech_name, cap) in &r.thermal {
            if *cap <= 0.0 {
                continue;
            }
            let tech = params
                .technologies
                .iter()
                .find(|t| &t.name == tech_name)
                .ok_or_else(|| EsomError::InvalidSpec(format!("unknown technology `{tech_name}`")))?;
            if !params.fuels.iter().any(|f| f.name == tech.fuel) {
                return Err(EsomError::InvalidSpec(format!("unknown fuel `{}`", tech.fuel)));
            }
            if !fuels_used.contains(&tech.fuel.as_str()) {
                fuels_used.push(&tech.fuel);
            }
            components.push(Component::Conversion {
                name: format!("{}_{}", r.name, tech.name),
                region: r.name.clone(),
                input: tech.fuel.clone(),
                output: el.clone(),
                efficiency: tech.efficiency,
                capacity: Capacity::Fixed { capacity: *cap },
                variable_cost: tech.opex,
                emission_factor: tech.emission_factor,
            });
        }
        for f in params.fuels.iter().filter(|f| fuels_used.contains(&f.name.as_str())) {
            components.push(Component::Source {
                name: format!("{}_{}_supply", r.name, f.name),
                region: r.name.clone(),
                commodity: f.name.clone(),
                capacity: Capacity::Unlimited,
                capacity_factor: None,
                variable_cost: Price::Constant(f.price),
            });
        }
        if r.import_capacity > 0.0 {
            components.push(Component::Source {
                name: format!("{}_import", r.name),
                region: r.name.clone(),
                commodity: el.clone(),
                capacity: Capacity::Fixed { capacity: r.import_capacity },
                capacity_factor: None,
                variable_cost: params.import_price.clone(),
            });
        }
        components.push(Component::Source {
            name: format!("{}_lost_load", r.name),
            region: r.name.clone(),
            commodity: el.clone(),
            capacity: Capacity::Unlimited,
            capacity_factor: None,
            variable_cost: Price::Constant(params.lost_load_cost),
        });
    }
    for l in &params.links {
        components.push(Component::Transmission {
            name: format!("line_{}_{}", l.from, l.to),
            from: l.from.clone(),
            to: l.to.clone(),
            commodity: el.clone(),
            capacity: l.capacity,
            loss: l.loss,
        });
    }
    let spec = EnergySystemSpec {
        regions: params.regions.iter().map(|r| r.name.clone()).collect(),
        commodities,
        components,
        step_hours: params.step_hours,
        emission_price: params.emission_price.clone(),
        annuity_rate: 0.0,
    };
    spec.validate()?;
    Ok(spec)
}
