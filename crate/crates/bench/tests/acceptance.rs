//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsagg_bench::*;
use tsagg_core::{
    build_period_candidates, build_step_candidates, evaluate, expand_to_full, normalize,
    ward_cluster, ward_linkage, CandidateMatrix, TimeSeriesSet,
};
use tsagg_esom::{BuildingParams, Capacity, Component, DispatchParams, EnergySystemSpec, Price};
use tsagg_lp::{export_lp_text, parse_lp_text, solve, LinearProgram, Method, Sense, SolveOptions, Status};
use tsagg_oracles::{best_bipartition, naive_ward, partition_sse, vertex_enumeration, DenseLp};

const SHARED_COUNTS: [usize; 6] = [120, 240, 480, 960, 1920, 3840];
/// Typical-step building LPs keep one storage state per hour while sharing
/// operation across each cluster's hours, which couples hours all over the
/// year. Factorization cost grows steeply with the cluster count: 960 steps
/// already take about half an hour on one core, so larger counts are left out.
const BUILDING_STEP_COUNTS: [usize; 4] = [120, 240, 480, 960];
const BOTH: [AggregationMode; 2] = [AggregationMode::Steps, AggregationMode::Days];

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn building_series() -> &'static TimeSeriesSet {
    static S: OnceLock<TimeSeriesSet> = OnceLock::new();
    S.get_or_init(|| load_csv(sample_path(SAMPLE_BUILDING), 1.0).expect("bundled building data"))
}

fn dispatch_series() -> &'static TimeSeriesSet {
    static S: OnceLock<TimeSeriesSet> = OnceLock::new();
    S.get_or_init(|| load_csv(sample_path(SAMPLE_DISPATCH), 1.0).expect("bundled dispatch data"))
}

fn datasets() -> [(&'static str, &'static TimeSeriesSet); 2] {
    [("building", building_series()), ("dispatch", dispatch_series())]
}

fn endpoints() -> Vec<Configuration> {
    vec![
        Configuration { mode: AggregationMode::Days, equivalent_steps: 8760 },
        Configuration { mode: AggregationMode::Steps, equivalent_steps: 8760 },
    ]
}

fn dispatch_config() -> RunConfig {
    let mut configs = default_configurations(&BOTH, 24);
    configs.extend(endpoints());
    RunConfig::new("dispatch", configs)
}

fn dispatch_spec() -> EnergySystemSpec {
    ModelChoice::Dispatch(DispatchParams::desk_scale()).spec(dispatch_series()).expect("dispatch model")
}

/// Dispatch model over the default grid plus both endpoints.
fn dispatch_grid() -> &'static GridReport {
    static G: OnceLock<GridReport> = OnceLock::new();
    G.get_or_init(|| run_grid(&dispatch_config(), dispatch_series(), Some(&dispatch_spec())))
}

/// Building model at both endpoints and the tractable shared counts.
fn building_grid() -> &'static GridReport {
    static G: OnceLock<GridReport> = OnceLock::new();
    G.get_or_init(|| {
        let mut configs = endpoints();
        configs.extend(configurations_for_counts(&BOTH, &BUILDING_STEP_COUNTS));
        let spec = ModelChoice::Building(BuildingParams::default()).spec(building_series()).expect("building model");
        run_grid(&RunConfig::new("building", configs), building_series(), Some(&spec))
    })
}

fn indicator_ordering() -> Check {
    let start = Instant::now();
    let configs = configurations_for_counts(&BOTH, &SHARED_COUNTS);
    let mut compared = 0;
    for (name, series) in datasets() {
        let results = aggregate_all(series, &configs, 24, false);
        for &n in &SHARED_COUNTS {
            let pick = |mode| {
                let i = configs.iter().position(|c| c.mode == mode && c.equivalent_steps == n).unwrap();
                results[i].as_ref().map(|(_, a)| a.clone()).map_err(|e| format!("{name} {n}: {e}"))
            };
            let (s, d) = (pick(AggregationMode::Steps)?, pick(AggregationMode::Days)?);
            for (label, a, b) in [
                ("RMSE_tot", s.rmse_tot, d.rmse_tot),
                ("RMSE_DC,tot", s.rmse_dc_tot, d.rmse_dc_tot),
                ("MAE_tot", s.mae_tot, d.mae_tot),
            ] {
                ensure(a <= b, || format!("{name} at {n}: {label} steps {a} > days {b}"))?;
                compared += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:.1?}"))?;
    Ok(format!("{compared} comparisons hold, {elapsed:.1?}"))
}

fn endpoint_exactness() -> Check {
    let mut worst: f64 = 0.0;
    let mut runtime = Duration::ZERO;
    for grid in [dispatch_grid(), building_grid()] {
        let reference = grid.reference.as_ref().ok_or("no reference row")?;
        let z = reference
            .objective
            .ok_or_else(|| format!("{} reference failed: {:?}", grid.model_name, reference.error))?;
        runtime += reference.times.total;
        for c in endpoints() {
            let row = grid.row(c.mode, c.equivalent_steps).ok_or("missing endpoint row")?;
            let obj = row.objective.ok_or_else(|| {
                format!("{} {} endpoint failed: {:?}", grid.model_name, c.mode.label(), row.error)
            })?;
            ensure(row.clusters == if c.mode == AggregationMode::Days { 365 } else { 8760 }, || {
                format!("{} {}: {} clusters", grid.model_name, c.mode.label(), row.clusters)
            })?;
            let r = rel(obj, z);
            ensure(r <= 1e-6, || format!("{} {}: {obj} vs {z} ({r:e})", grid.model_name, c.mode.label()))?;
            worst = worst.max(r);
            runtime += row.times.total;
        }
    }
    ensure(runtime < Duration::from_secs(600), || format!("endpoint solves took {runtime:.1?}"))?;
    Ok(format!("worst relative gap {worst:.2e}, solves {runtime:.1?}"))
}

fn mean_preservation() -> Check {
    let configs = default_configurations(&BOTH, 24);
    let mut worst: f64 = 0.0;
    for (name, series) in datasets() {
        let (normalized, _) = normalize(series);
        let n = normalized.n_steps() as f64;
        for (c, result) in configs.iter().zip(aggregate_all(series, &configs, 24, false)) {
            let (clusters, _) = result.map_err(|e| format!("{name} {c:?}: {e}"))?;
            let expanded = expand_to_full(&clusters, normalized.n_steps()).map_err(|e| e.to_string())?;
            for (a, (orig, pred)) in normalized.values().iter().zip(&expanded).enumerate() {
                let gap = (orig.iter().sum::<f64>() / n - pred.iter().sum::<f64>() / n).abs();
                ensure(gap <= 1e-9, || format!("{name} {c:?} attribute {a}: mean gap {gap:e}"))?;
                worst = worst.max(gap);
            }
        }
    }
    Ok(format!("{} configurations on both datasets, worst gap {worst:.1e}", configs.len()))
}

fn indicator_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for trial in 0..1000 {
        let n_a = rng.gen_range(1..=4);
        let t = rng.gen_range(1..=4);
        let n_p = rng.gen_range(1..=8);
        let rows: Vec<Vec<f64>> = (0..n_a)
            .map(|_| (0..t * n_p).map(|_| rng.gen_range(-50.0..50.0)).collect())
            .collect();
        let names = (0..n_a).map(|a| format!("a{a}")).collect();
        let set = TimeSeriesSet::new(names, rows, 1.0).map_err(|e| e.to_string())?;
        let (normalized, _) = normalize(&set);
        let candidates = if rng.gen_bool(0.5) {
            build_step_candidates(&normalized)
        } else {
            build_period_candidates(&normalized, t, false).map_err(|e| e.to_string())?
        };
        let k = rng.gen_range(1..=candidates.n_candidates());
        let clusters = ward_cluster(&candidates, k).map_err(|e| e.to_string())?;
        let predicted = expand_to_full(&clusters, normalized.n_steps()).map_err(|e| e.to_string())?;
        let r = evaluate(&normalized, &predicted).map_err(|e| e.to_string())?;
        let mean_sq = r.rmse.iter().map(|x| x * x).sum::<f64>() / n_a as f64;
        let gap = (r.rmse_tot * r.rmse_tot - mean_sq).abs();
        ensure(gap <= 1e-12, || format!("trial {trial}: RMSE_tot identity off by {gap:e}"))?;
        worst = worst.max(gap);
        for a in 0..n_a {
            ensure(r.mae[a] <= r.rmse[a] + 1e-15, || format!("trial {trial}: MAE > RMSE"))?;
            ensure(r.rmse_dc[a] <= r.rmse[a] + 1e-15, || format!("trial {trial}: RMSE_DC > RMSE"))?;
        }
    }
    Ok(format!("1000 inputs, worst identity gap {worst:.1e}"))
}

fn clustering_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..100 {
        let n = rng.gen_range(2..=8);
        let dim = 1 + trial % 2;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect();
        let c = CandidateMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let dendrogram = ward_linkage(&c);
        let want = naive_ward(&rows);
        let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        ensure(dendrogram.merges().len() == want.len(), || format!("trial {trial}: merge count"))?;
        for (step, (m, w)) in dendrogram.merges().iter().zip(&want).enumerate() {
            let mut got = [members[m.left].clone(), members[m.right].clone()];
            got.sort();
            let mut expect = [w.left.clone(), w.right.clone()];
            expect.sort();
            ensure(got == expect, || format!("trial {trial} merge {step}: {got:?} vs {expect:?}"))?;
            ensure((m.cost - w.cost).abs() <= 1e-12 * w.cost.max(1.0), || {
                format!("trial {trial} merge {step}: cost {} vs {}", m.cost, w.cost)
            })?;
            let mut joined = got.concat();
            joined.sort_unstable();
            members.push(joined);
        }
    }
    let rows: Vec<Vec<f64>> = [0.0, 1.0, 10.0, 11.0].iter().map(|x| vec![*x]).collect();
    let r = ward_cluster(&CandidateMatrix::from_rows(&rows).unwrap(), 2).map_err(|e| e.to_string())?;
    let (best, sse) = best_bipartition(&rows);
    ensure(r.assignment == best, || format!("{{0,1,10,11}}: {:?} vs {best:?}", r.assignment))?;
    ensure(partition_sse(&rows, &r.assignment) == sse, || "{0,1,10,11}: SSE differs".into())?;
    Ok(format!("100 trials merge-for-merge, {{0,1,10,11}} split {:?} with SSE {sse}", r.assignment))
}

fn random_lp(rng: &mut ChaCha8Rng) -> (LinearProgram, DenseLp) {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=6);
    let mut lp = LinearProgram::new();
    let mut dense = DenseLp { cost: vec![], lower: vec![], upper: vec![], rows: vec![] };
    let mut ids = Vec::new();
    for j in 0..n {
        let lo = rng.gen_range(-4.0..=0.0f64).round();
        let up = lo + rng.gen_range(0.0..=8.0f64).round();
        let c = rng.gen_range(-10.0..10.0);
        ids.push(lp.add_var(format!("x{j}"), lo, up, c).unwrap());
        dense.cost.push(c);
        dense.lower.push(lo);
        dense.upper.push(up);
    }
    for i in 0..m {
        let row: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.75) { rng.gen_range(-5.0..5.0) } else { 0.0 }).collect();
        let (sense, osense) = match rng.gen_range(0..5) {
            0 => (Sense::Eq, tsagg_oracles::Sense::Eq),
            1 | 2 => (Sense::Ge, tsagg_oracles::Sense::Ge),
            _ => (Sense::Le, tsagg_oracles::Sense::Le),
        };
        let rhs = rng.gen_range(-8.0..8.0);
        let terms = ids.iter().zip(&row).filter(|(_, a)| **a != 0.0).map(|(v, a)| (*v, *a));
        lp.add_constraint(format!("r{i}"), terms, sense, rhs).unwrap();
        dense.rows.push((row, osense, rhs));
    }
    (lp, dense)
}

fn lp_oracle() -> Check {
    let simplex = SolveOptions { method: Method::Simplex, ..SolveOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut optimal = 0;
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let (lp, dense) = random_lp(&mut rng);
        let res = solve(&lp, &simplex).map_err(|e| format!("trial {trial}: {e}"))?;
        match vertex_enumeration(&dense, 1e-9) {
            Some(z) => {
                optimal += 1;
                ensure(res.status == Status::Optimal, || format!("trial {trial}: status {:?}", res.status))?;
                let gap = (res.objective - z).abs();
                ensure(gap <= 1e-7 * z.abs().max(1.0), || format!("trial {trial}: {} vs {z}", res.objective))?;
                worst = worst.max(gap);
            }
            None => ensure(res.status == Status::Infeasible, || format!("trial {trial}: expected infeasible"))?,
        }
        let back = parse_lp_text(&export_lp_text(&lp)).map_err(|e| format!("trial {trial}: {e}"))?;
        let again = solve(&back, &simplex).map_err(|e| e.to_string())?;
        ensure(again.status == res.status, || format!("trial {trial}: round trip status"))?;
        if res.status == Status::Optimal {
            ensure((again.objective - res.objective).abs() <= 1e-9 * res.objective.abs().max(1.0), || {
                format!("trial {trial}: round trip {} vs {}", again.objective, res.objective)
            })?;
        }
    }

    let mut merit = LinearProgram::new();
    let g1 = merit.add_var("g1", 0.0, 6.0, 1.0).unwrap();
    let g2 = merit.add_var("g2", 0.0, 6.0, 2.0).unwrap();
    merit.add_constraint("demand", [(g1, 1.0), (g2, 1.0)], Sense::Eq, 10.0).unwrap();
    let z = solve(&merit, &SolveOptions::default()).map_err(|e| e.to_string())?.objective;
    ensure(z == 14.0, || format!("merit order objective {z}"))?;
    let text = export_lp_text(&merit);
    let back = parse_lp_text(&text).map_err(|e| e.to_string())?;
    let z2 = solve(&back, &SolveOptions::default()).map_err(|e| e.to_string())?.objective;
    ensure((z2 - 14.0).abs() <= 1e-9, || format!("reparsed merit order objective {z2}"))?;
    Ok(format!("200 LPs ({optimal} feasible), worst gap {worst:.1e}, merit order 14, round trips exact"))
}

fn plant_spec() -> EnergySystemSpec {
    let source = |name: &str, cap: f64, cost: f64| Component::Source {
        name: name.into(),
        region: "r".into(),
        commodity: "el".into(),
        capacity: Capacity::Fixed { capacity: cap },
        capacity_factor: None,
        variable_cost: Price::Constant(cost),
    };
    EnergySystemSpec {
        regions: vec!["r".into()],
        commodities: vec!["el".into()],
        components: vec![
            source("cheap", 6.0, 1.0),
            source("peaker", 10.0, 2.0),
            Component::Sink {
                name: "demand".into(),
                region: "r".into(),
                commodity: "el".into(),
                profile: "load".into(),
                scale: 1.0,
            },
        ],
        step_hours: 1.0,
        emission_price: Price::Constant(0.0),
        annuity_rate: 0.0,
    }
}

fn underestimation() -> Check {
    // Demand 4 then 8 against a 6-unit plant at cost 1 and a peaker at cost 2.
    // Full: 4·1 + (6·1 + 2·2) = 14. One typical step of demand 6 with
    // weight 2 runs only the cheap plant: 2·6·1 = 12.
    let series = TimeSeriesSet::new(vec!["load".into()], vec![vec![4.0, 8.0]], 1.0).map_err(|e| e.to_string())?;
    let configs = vec![Configuration { mode: AggregationMode::Steps, equivalent_steps: 1 }];
    let grid = run_grid(&RunConfig::new("plant", configs), &series, Some(&plant_spec()));
    let full = grid.reference_objective().ok_or("reference failed")?;
    let agg = grid.rows[0].objective.ok_or_else(|| format!("{:?}", grid.rows[0].error))?;
    ensure(full == 14.0 && agg == 12.0, || format!("full {full}, aggregated {agg}"))?;
    ensure(agg < full, || "no underestimation".into())?;
    Ok(format!("full {full}, one typical step {agg}"))
}

type Pair<'a> = (usize, &'a ConfigReport, &'a ConfigReport, f64, f64);

fn shared_deviations<'a>(grid: &'a GridReport, counts: &[usize]) -> Result<Vec<Pair<'a>>, String> {
    counts
        .iter()
        .map(|&n| {
            let s = grid.row(AggregationMode::Steps, n).ok_or("missing steps row")?;
            let d = grid.row(AggregationMode::Days, n).ok_or("missing days row")?;
            let ds = grid.deviation(s).ok_or_else(|| format!("{} steps {n}: {:?}", grid.model_name, s.error))?;
            let dd = grid.deviation(d).ok_or_else(|| format!("{} days {n}: {:?}", grid.model_name, d.error))?;
            Ok((n, s, d, ds, dd))
        })
        .collect()
}

fn cross_over() -> Check {
    // Cost axis: LP nonzeros, a deterministic stand-in for solve time.
    let mut dominated = Vec::new();
    for (n, s, d, ds, dd) in shared_deviations(dispatch_grid(), &SHARED_COUNTS)? {
        let (cs, cd) = (s.lp_size.unwrap().nonzeros, d.lp_size.unwrap().nonzeros);
        if ds.abs() <= dd.abs() && cs <= cd && (ds.abs() < dd.abs() || cs < cd) {
            dominated.push(n);
        }
    }
    ensure(dominated.len() >= 3, || format!("dispatch: steps dominate only at {dominated:?}"))?;
    let mut days_closer = Vec::new();
    for (n, _, _, ds, dd) in shared_deviations(building_grid(), &BUILDING_STEP_COUNTS)? {
        if dd.abs() < ds.abs() {
            days_closer.push(n);
        }
    }
    ensure(days_closer.len() >= 3, || format!("building: days closer only at {days_closer:?}"))?;
    Ok(format!("dispatch steps dominate at {dominated:?}; building days closer at {days_closer:?}"))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    emit_report(dispatch_grid(), &first).map_err(|e| e.to_string())?;
    let again = run_grid(&dispatch_config(), dispatch_series(), Some(&dispatch_spec()));
    emit_report(&again, &second).map_err(|e| e.to_string())?;
    let a = std::fs::read(first.join("report.csv")).map_err(|e| e.to_string())?;
    let b = std::fs::read(second.join("report.csv")).map_err(|e| e.to_string())?;
    ensure(a == b, || "report.csv differs between runs".into())?;
    Ok(format!("{} bytes identical over {} rows", a.len(), again.rows.len() + 1))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("indicator ordering", indicator_ordering),
        ("endpoint exactness", endpoint_exactness),
        ("mean preservation", mean_preservation),
        ("indicator identities", indicator_identities),
        ("clustering oracle", clustering_oracle),
        ("LP oracle", lp_oracle),
        ("underestimation", underestimation),
        ("cross-over finding", cross_over),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}) [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
