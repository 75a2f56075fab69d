use tsagg_core::{
    build_period_candidates, build_step_candidates, normalize, ward_cluster, TimeSeriesSet,
};
use tsagg_esom::{
    build_building_spec, build_dispatch_spec, compile, extract_cost_breakdown, load_scenario,
    save_scenario, AggregatedTimeGrid, BuildingParams, Capacity, Component, DispatchParams,
    EnergySystemSpec, EsomError, GridMode, Price,
};
use tsagg_lp::{solve, Method, SolveOptions, SolveResult, Status};

fn set(names: &[&str], rows: Vec<Vec<f64>>) -> TimeSeriesSet {
    TimeSeriesSet::new(names.iter().map(|s| s.to_string()).collect(), rows, 1.0).unwrap()
}

fn source(name: &str, cap: f64, cost: f64) -> Component {
    Component::Source {
        name: name.into(),
        region: "r".into(),
        commodity: "el".into(),
        capacity: Capacity::Fixed { capacity: cap },
        capacity_factor: None,
        variable_cost: Price::Constant(cost),
    }
}

fn sink(profile: &str) -> Component {
    Component::Sink {
        name: format!("{profile}_sink"),
        region: "r".into(),
        commodity: "el".into(),
        profile: profile.into(),
        scale: 1.0,
    }
}

fn single_region(components: Vec<Component>) -> EnergySystemSpec {
    EnergySystemSpec {
        regions: vec!["r".into()],
        commodities: vec!["el".into()],
        components,
        step_hours: 1.0,
        emission_price: Price::Constant(0.0),
        annuity_rate: 0.0,
    }
}

fn run(spec: &EnergySystemSpec, grid: &AggregatedTimeGrid) -> (tsagg_esom::CompiledModel, SolveResult) {
    let model = compile(spec, grid).unwrap();
    let result = solve(&model.lp, &SolveOptions::default()).unwrap();
    assert_eq!(result.status, Status::Optimal);
    (model, result)
}

fn typical_steps(series: &TimeSeriesSet, k: usize) -> AggregatedTimeGrid {
    let (norm, params) = normalize(series);
    let clusters = ward_cluster(&build_step_candidates(&norm), k).unwrap();
    AggregatedTimeGrid::from_clusters(&clusters, &params, series.step_hours()).unwrap()
}

fn typical_periods(series: &TimeSeriesSet, period: usize, k: usize) -> AggregatedTimeGrid {
    let (norm, params) = normalize(series);
    let cands = build_period_candidates(&norm, period, false).unwrap();
    let clusters = ward_cluster(&cands, k).unwrap();
    AggregatedTimeGrid::from_clusters(&clusters, &params, series.step_hours()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

#[test]
fn forced_dispatch_costs_all_demand() {
    let demand = vec![3.0, 5.0, 2.5, 7.0];
    let spec = single_region(vec![source("plant", 7.0, 4.0), sink("load")]);
    let series = set(&["load"], vec![demand.clone()]);
    let (_, result) = run(&spec, &AggregatedTimeGrid::full(&series));
    assert_eq!(result.objective, 4.0 * demand.iter().sum::<f64>());
}

#[test]
fn merit_order_underestimation_matches_hand_oracle() {
    let spec = single_region(vec![source("cheap", 6.0, 1.0), source("peaker", 10.0, 2.0), sink("load")]);
    let series = set(&["load"], vec![vec![4.0, 8.0]]);
    let (_, full) = run(&spec, &AggregatedTimeGrid::full(&series));
    let grid = typical_steps(&series, 1);
    assert_eq!(grid.profile("load").unwrap(), &[6.0]);
    assert_eq!(grid.weights(), &[2.0]);
    let (_, agg) = run(&spec, &grid);
    // Step 1: 4 × 1. Step 2: 6 × 1 + 2 × 2.
    assert_eq!(full.objective, 14.0);
    // One step of demand 6 counted twice, all from the cheap unit.
    assert_eq!(agg.objective, 12.0);
    assert!(agg.objective < full.objective);
}

#[test]
fn singleton_typical_steps_reproduce_full() {
    let spec = single_region(vec![source("cheap", 6.0, 1.0), source("peaker", 10.0, 2.5), sink("load")]);
    let series = set(&["load"], vec![vec![4.0, 8.0, 1.0, 9.5, 6.0, 7.25]]);
    let (_, full) = run(&spec, &AggregatedTimeGrid::full(&series));
    let (_, agg) = run(&spec, &typical_steps(&series, 6));
    assert!(rel(agg.objective, full.objective) <= 1e-9);
}

#[test]
fn weight_closure_on_constant_series() {
    let spec = single_region(vec![source("cheap", 6.0, 1.0), source("peaker", 10.0, 2.0), sink("load")]);
    let series = set(&["load"], vec![vec![7.0; 12]]);
    let (_, full) = run(&spec, &AggregatedTimeGrid::full(&series));
    for grid in [typical_steps(&series, 1), typical_periods(&series, 4, 1)] {
        let (_, agg) = run(&spec, &grid);
        assert_eq!(agg.objective, full.objective);
    }
}

/// Small building: a few synthetic days of PV, electricity and heat demand.
fn small_building(days: usize, heat_scale: f64) -> TimeSeriesSet {
    let n = days * 24;
    let mut pv = vec![Vec::with_capacity(n); 3];
    let mut el = Vec::with_capacity(n);
    let mut heat = Vec::with_capacity(n);
    for s in 0..n {
        let hour = (s % 24) as f64;
        let day = (s / 24) as f64;
        let sun = ((hour - 6.0) / 12.0 * std::f64::consts::PI).sin().max(0.0);
        let cloud = 0.5 + 0.5 * (1.7 * day).sin().abs();
        for (o, row) in pv.iter_mut().enumerate() {
            let shift = (o as f64 - 1.0) * 0.15;
            row.push((sun * cloud * (1.0 + shift * (hour - 12.0) / 6.0)).clamp(0.0, 1.0));
        }
        el.push(0.3 + 0.4 * (-(hour - 19.0).powi(2) / 6.0).exp() + 0.05 * day);
        heat.push(heat_scale * (0.5 + 0.3 * (hour / 24.0 * std::f64::consts::TAU).cos() + 0.1 * day));
    }
    let mut rows = pv;
    rows.push(el);
    rows.push(heat);
    set(&["pv_south", "pv_east", "pv_west", "electricity_demand", "heat_demand"], rows)
}

fn building(series: &TimeSeriesSet) -> EnergySystemSpec {
    build_building_spec(&BuildingParams::default(), Some(series)).unwrap()
}

#[test]
fn building_endpoints_are_exact() {
    let series = small_building(4, 1.0);
    let spec = building(&series);
    let (full_model, full) = run(&spec, &AggregatedTimeGrid::full(&series));
    let full_costs = extract_cost_breakdown(&full_model, &full).unwrap();
    for grid in [typical_periods(&series, 24, 4), typical_steps(&series, 96)] {
        let (model, agg) = run(&spec, &grid);
        assert!(rel(agg.objective, full.objective) <= 1e-6, "{:?}: {} vs {}", grid.mode(), agg.objective, full.objective);
        let costs = extract_cost_breakdown(&model, &agg).unwrap();
        for (a, b) in costs.components.iter().zip(&full_costs.components) {
            assert!((a.total() - b.total()).abs() <= 1e-6 * full.objective.abs(), "{}", a.name);
        }
    }
}

#[test]
fn aggregated_building_stays_feasible_and_balanced() {
    let series = small_building(6, 1.0);
    let spec = building(&series);
    for grid in [typical_periods(&series, 24, 2), typical_steps(&series, 20)] {
        let (model, result) = run(&spec, &grid);
        assert!(model.lp.max_violation(&result.primal) <= 1e-6);
        let costs = extract_cost_breakdown(&model, &result).unwrap();
        assert!(rel(costs.total, result.objective) <= 1e-7);
    }
}

#[test]
fn cyclic_storage_conserves_energy() {
    let series = small_building(3, 1.0);
    let spec = building(&series);
    let (model, result) = run(&spec, &AggregatedTimeGrid::full(&series));
    for (name, eta, delta) in [("battery", 0.95, 2e-4), ("hydrogen_storage", 1.0, 1e-5), ("thermal_storage", 0.99, 0.005)] {
        let ch: f64 = model.operation_vars(&format!("ch.{name}")).unwrap().iter().map(|&v| result.value(v)).sum();
        let dis: f64 = model.operation_vars(&format!("dis.{name}")).unwrap().iter().map(|&v| result.value(v)).sum();
        let soc: f64 = model.state_vars(&format!("soc.{name}")).unwrap().iter().map(|&v| result.value(v)).sum();
        let residual = ch * eta - dis / eta - delta * soc;
        assert!(residual.abs() <= 1e-6 * (1.0 + ch), "{name}: {residual}");
    }
}

#[test]
fn zero_heat_demand_builds_no_heat_supply() {
    let series = small_building(2, 0.0);
    let spec = building(&series);
    let (model, result) = run(&spec, &AggregatedTimeGrid::full(&series));
    for cap in ["cap.heat_pump", "cap.electric_heater", "cap.thermal_storage"] {
        assert!(model.capacity_value(cap, &result).unwrap().abs() <= 1e-9, "{cap}");
    }
    let costs = extract_cost_breakdown(&model, &result).unwrap();
    for name in ["heat_pump", "electric_heater", "thermal_storage"] {
        assert!(costs.get(name).unwrap().total().abs() <= 1e-9);
    }
}

#[test]
fn building_cost_parameters() {
    let spec = build_building_spec(&BuildingParams::default(), None).unwrap();
    let capex = |name: &str| {
        spec.components
            .iter()
            .find_map(|c| match c {
                Component::Source { name: n, capacity, .. } if n == name => Some(capacity.clone()),
                Component::Storage { name: n, energy, .. } if n == name => Some(energy.clone()),
                _ => None,
            })
            .unwrap()
    };
    assert_eq!(capex("pv_south"), Capacity::expandable(769.0, 20.0, 0.01));
    assert_eq!(capex("battery"), Capacity::expandable(301.0, 15.0, 0.0));
    assert!(spec.components.iter().all(|c| !matches!(c, Component::Transmission { .. })));
}

#[test]
fn lignite_fuel_and_opex_within_band() {
    let mut lignite = DispatchParams::default_technologies()
        .into_iter()
        .find(|t| t.name == "lignite")
        .unwrap();
    let fuel = DispatchParams::default_fuels().into_iter().find(|f| f.name == "lignite").unwrap();
    lignite.efficiency = 0.40;
    let cost = lignite.fuel_and_opex(fuel.price);
    assert!((11.1..=19.3).contains(&cost), "{cost}");
}

fn dispatch_series(n: usize, shift: usize) -> TimeSeriesSet {
    let params = DispatchParams::desk_scale();
    let names: Vec<String> = params.profile_names().iter().map(|s| s.to_string()).collect();
    let rows = names
        .iter()
        .enumerate()
        .map(|(a, name)| {
            (0..n)
                .map(|s| {
                    let x = ((s + shift) % n) as f64;
                    let wave = ((x * 0.7 + a as f64) * 1.3).sin();
                    if name.ends_with("_demand") {
                        9000.0 + 3000.0 * wave
                    } else if name.ends_with("_storage") {
                        300.0 * wave
                    } else if name == "import_price" {
                        50.0 + 20.0 * wave
                    } else {
                        0.5 + 0.45 * wave
                    }
                })
                .collect()
        })
        .collect();
    TimeSeriesSet::new(names, rows, 1.0).unwrap()
}

#[test]
fn dispatch_is_temporally_decoupled() {
    let params = DispatchParams::desk_scale();
    let a = dispatch_series(24, 0);
    let b = dispatch_series(24, 7);
    let spec = build_dispatch_spec(&params, Some(&a)).unwrap();
    let (model, ra) = run(&spec, &AggregatedTimeGrid::full(&a));
    let (_, rb) = run(&spec, &AggregatedTimeGrid::full(&b));
    assert!(rel(ra.objective, rb.objective) <= 1e-9);
    assert_eq!(ra.blocks, 24);
    let costs = extract_cost_breakdown(&model, &ra).unwrap();
    assert!(costs.components.iter().all(|c| c.capex == 0.0 && c.fixed_opex == 0.0));
    assert!(rel(costs.total, ra.objective) <= 1e-7);
}

#[test]
fn dispatch_endpoints_are_exact() {
    let params = DispatchParams::desk_scale();
    let series = dispatch_series(48, 0);
    let spec = build_dispatch_spec(&params, Some(&series)).unwrap();
    let (_, full) = run(&spec, &AggregatedTimeGrid::full(&series));
    for grid in [typical_steps(&series, 48), typical_periods(&series, 24, 2)] {
        let (_, agg) = run(&spec, &grid);
        assert!(rel(agg.objective, full.objective) <= 1e-6);
    }
}

#[test]
fn missing_profiles_are_reported() {
    let series = set(&["pv_south"], vec![vec![0.5; 4]]);
    let err = build_building_spec(&BuildingParams::default(), Some(&series)).unwrap_err();
    assert!(matches!(err, EsomError::UnresolvedProfile { .. }));
    let err = build_dispatch_spec(&DispatchParams::desk_scale(), Some(&series)).unwrap_err();
    assert!(matches!(err, EsomError::UnresolvedProfile { .. }));

    let spec = single_region(vec![source("plant", 1.0, 1.0), sink("load")]);
    let err = compile(&spec, &AggregatedTimeGrid::full(&series)).unwrap_err();
    assert!(matches!(err, EsomError::UnresolvedProfile { ref profile, .. } if profile == "load"));
}

#[test]
fn zero_demand_is_rejected() {
    let spec = single_region(vec![source("plant", 1.0, 1.0), sink("load")]);
    let series = set(&["load"], vec![vec![0.0; 4]]);
    assert!(matches!(compile(&spec, &AggregatedTimeGrid::full(&series)), Err(EsomError::ZeroDemand)));
}

#[test]
fn inconsistent_grids_are_rejected() {
    let spec = single_region(vec![source("plant", 10.0, 1.0), sink("load")]);
    let grid = AggregatedTimeGrid::from_parts(
        GridMode::TypicalPeriods(2),
        vec!["load".into()],
        vec![vec![1.0, 2.0, 3.0, 4.0]],
        vec![0, 1, 1],
        1.0,
    )
    .unwrap();
    assert_eq!(grid.represented_steps(), 6.0);
    assert!(compile(&spec, &grid).is_ok());
    let mut hourly = spec.clone();
    hourly.step_hours = 0.5;
    assert!(matches!(compile(&hourly, &grid), Err(EsomError::InconsistentGrid(_))));
    assert!(AggregatedTimeGrid::from_parts(
        GridMode::TypicalSteps,
        vec!["load".into()],
        vec![vec![1.0]],
        vec![0, 2],
        1.0
    )
    .is_err());
}

#[test]
fn invalid_components_are_rejected() {
    let mut spec = single_region(vec![source("plant", 10.0, 1.0), sink("load")]);
    spec.components.push(source("plant", 1.0, 1.0));
    assert!(matches!(spec.validate(), Err(EsomError::InvalidSpec(_))));
    let mut spec = single_region(vec![source("plant", -1.0, 1.0)]);
    assert!(spec.validate().is_err());
    spec.components = vec![Component::Sink {
        name: "x".into(),
        region: "elsewhere".into(),
        commodity: "el".into(),
        profile: "load".into(),
        scale: 1.0,
    }];
    assert!(spec.validate().is_err());
}

#[test]
fn scenario_files_round_trip() {
    let spec = build_dispatch_spec(&DispatchParams::desk_scale(), None).unwrap();
    let dir = std::env::temp_dir().join(format!("tsagg-esom-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dispatch.json");
    save_scenario(&spec, &path).unwrap();
    assert_eq!(load_scenario(&path).unwrap(), spec);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn scenario_json_accepts_defaults() {
    let text = r#"{
        "regions": ["r"],
        "commodities": ["el"],
        "components": [
            {"kind": "source", "name": "plant", "region": "r", "commodity": "el",
             "capacity": {"mode": "fixed", "capacity": 5.0}, "variable_cost": 2.0},
            {"kind": "sink", "name": "demand", "region": "r", "commodity": "el", "profile": "load"},
            {"kind": "storage", "name": "pack", "region": "r", "commodity": "el", "efficiency": 0.9,
             "energy": {"mode": "expandable", "capex": 10.0, "lifetime": 10.0}}
        ]
    }"#;
    let spec: EnergySystemSpec = serde_json::from_str(text).unwrap();
    spec.validate().unwrap();
    assert_eq!(spec.step_hours, 1.0);
    assert!(matches!(&spec.components[2], Component::Storage { cyclic: true, power: Capacity::Unlimited, .. }));
    let series = set(&["load"], vec![vec![1.0, 4.0]]);
    let (_, result) = run(&spec, &AggregatedTimeGrid::full(&series));
    assert_eq!(result.objective, 10.0);
}

#[test]
fn simplex_and_interior_point_agree_on_degenerate_storage_model() {
    let series = small_building(2, 1.0);
    let model = compile(&building(&series), &AggregatedTimeGrid::full(&series)).unwrap();
    let objective = |method| {
        let opts = SolveOptions { method, ..Default::default() };
        let r = solve(&model.lp, &opts).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!(model.lp.max_violation(&r.primal) <= 1e-6);
        r.objective
    };
    let simplex = objective(Method::Simplex);
    let interior = objective(Method::InteriorPoint);
    assert!(rel(simplex, interior) <= 1e-6, "{simplex} vs {interior}");
}
