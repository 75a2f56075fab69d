use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use tsagg_core::{
    build_period_candidates, build_step_candidates, duration_curve, evaluate, expand_to_full,
    inject_extreme_candidates, normalize, ward_linkage, AccuracyReport, AggError, CandidateMatrix,
    ClusterResult, Dendrogram, NormalizationParams, TimeSeriesSet,
};
use tsagg_esom::{
    compile, extract_cost_breakdown, AggregatedTimeGrid, CostBreakdown, EnergySystemSpec,
};
use tsagg_lp::{export_lp_text, solve, SolveOptions, Status};

use crate::BenchError;

/// Environment variable overriding [`RunConfig::workers`].
pub const WORKERS_ENV: &str = "TSAGG_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggregationMode {
    Full,
    Steps,
    Days,
}

impl AggregationMode {
    pub fn label(self) -> &'static str {
        match self {
            AggregationMode::Full => "full",
            AggregationMode::Steps => "steps",
            AggregationMode::Days => "days",
        }
    }
}

/// One grid point: aggregation mode and number of represented time steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub mode: AggregationMode,
    pub equivalent_steps: usize,
}

/// Typical-step counts of the default grid.
pub const DEFAULT_STEP_COUNTS: [usize; 9] = [24, 48, 96, 120, 240, 480, 960, 1920, 3840];
/// Typical-day counts of the default grid.
pub const DEFAULT_DAY_COUNTS: [usize; 6] = [5, 10, 20, 40, 80, 160];

pub fn default_configurations(modes: &[AggregationMode], period_length: usize) -> Vec<Configuration> {
    let mut out = Vec::new();
    for &mode in modes {
        match mode {
            AggregationMode::Steps => out.extend(DEFAULT_STEP_COUNTS.iter().map(|&n| Configuration {
                mode,
                equivalent_steps: n,
            })),
            AggregationMode::Days => out.extend(DEFAULT_DAY_COUNTS.iter().map(|&k| Configuration {
                mode,
                equivalent_steps: k * period_length,
            })),
            AggregationMode::Full => {}
        }
    }
    out
}

/// Configurations for explicit equivalent step counts in every mode.
pub fn configurations_for_counts(modes: &[AggregationMode], counts: &[usize]) -> Vec<Configuration> {
    modes
        .iter()
        .filter(|m| **m != AggregationMode::Full)
        .flat_map(|&mode| counts.iter().map(move |&n| Configuration { mode, equivalent_steps: n }))
        .collect()
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Label written to every report row.
    pub model_name: String,
    pub configurations: Vec<Configuration>,
    /// Steps per typical period.
    pub period_length: usize,
    /// Give the peak candidate of every attribute its own cluster.
    pub extremes: bool,
    pub solver: SolveOptions,
    /// Build and solve the model; when false only indicators are computed.
    pub optimize: bool,
    pub workers: usize,
    /// Directory for `.lp` exports, if any.
    pub export_lp: Option<PathBuf>,
    /// Print a line to stderr as each configuration finishes.
    pub progress: bool,
}

impl RunConfig {
    pub fn new(model_name: impl Into<String>, configurations: Vec<Configuration>) -> Self {
        Self {
            model_name: model_name.into(),
            configurations,
            period_length: 24,
            extremes: false,
            solver: SolveOptions::default(),
            optimize: true,
            workers: 1,
            export_lp: None,
            progress: false,
        }
    }

    /// Worker count after applying the environment override.
    pub fn effective_workers(&self) -> usize {
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or(self.workers)
            .max(1)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimes {
    pub cluster: Duration,
    pub build: Duration,
    pub solve: Duration,
    pub map_back: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpSize {
    pub variables: usize,
    pub constraints: usize,
    pub nonzeros: usize,
}

/// Result of one configuration (or of the full-resolution reference).
#[derive(Debug, Clone)]
pub struct ConfigReport {
    pub configuration: Configuration,
    /// Clusters actually used; exceeds the nominal count when extremes were added.
    pub clusters: usize,
    pub period_length: usize,
    pub accuracy: Option<AccuracyReport>,
    /// Aggregated profiles in raw units, sorted descending, per attribute.
    pub duration_curves: Option<Vec<Vec<f64>>>,
    pub objective: Option<f64>,
    pub costs: Option<CostBreakdown>,
    pub lp_size: Option<LpSize>,
    pub times: PhaseTimes,
    pub error: Option<String>,
}

impl ConfigReport {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }

    fn failed(configuration: Configuration, period_length: usize, err: String, times: PhaseTimes) -> Self {
        Self {
            configuration,
            clusters: 0,
            period_length,
            accuracy: None,
            duration_curves: None,
            objective: None,
            costs: None,
            lp_size: None,
            times,
            error: Some(err),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridReport {
    pub model_name: String,
    pub attribute_names: Vec<String>,
    pub n_steps: usize,
    /// Original profiles in raw units, sorted descending.
    pub original_duration_curves: Vec<Vec<f64>>,
    /// Full-resolution solve; present when the grid optimized the model.
    pub reference: Option<ConfigReport>,
    pub rows: Vec<ConfigReport>,
    pub load_time: Duration,
    pub total_time: Duration,
}

impl GridReport {
    pub fn reference_objective(&self) -> Option<f64> {
        self.reference.as_ref().and_then(|r| r.objective)
    }

    /// Signed deviation of a row from the reference objective.
    pub fn deviation(&self, row: &ConfigReport) -> Option<f64> {
        Some(row.objective? - self.reference_objective()?)
    }

    pub fn all_succeeded(&self) -> bool {
        self.reference.as_ref().map_or(true, ConfigReport::succeeded) && self.rows.iter().all(ConfigReport::succeeded)
    }

    pub fn row(&self, mode: AggregationMode, equivalent_steps: usize) -> Option<&ConfigReport> {
        self.rows
            .iter()
            .find(|r| r.configuration.mode == mode && r.configuration.equivalent_steps == equivalent_steps)
    }
}

/// Normalized data shared by all configurations of a grid. Each candidate
/// mode is linked once and the dendrogram cut per cluster count.
struct Prepared<'a> {
    raw: &'a TimeSeriesSet,
    normalized: TimeSeriesSet,
    params: NormalizationParams,
    steps: OnceLock<Result<(CandidateMatrix, Dendrogram), AggError>>,
    days: OnceLock<Result<(CandidateMatrix, Dendrogram), AggError>>,
}

impl<'a> Prepared<'a> {
    fn new(raw: &'a TimeSeriesSet) -> Self {
        let (normalized, params) = normalize(raw);
        Prepared {
            raw,
            normalized,
            params,
            steps: OnceLock::new(),
            days: OnceLock::new(),
        }
    }

    fn linkage(&self, mode: AggregationMode, period_length: usize) -> Result<&(CandidateMatrix, Dendrogram), BenchError> {
        let (cell, build): (_, Box<dyn Fn() -> Result<CandidateMatrix, AggError>>) = match mode {
            AggregationMode::Days => (
                &self.days,
                Box::new(|| build_period_candidates(&self.normalized, period_length, false)),
            ),
            _ => (&self.steps, Box::new(|| Ok(build_step_candidates(&self.normalized)))),
        };
        cell.get_or_init(|| {
            let candidates = build()?;
            let dendrogram = ward_linkage(&candidates);
            Ok((candidates, dendrogram))
        })
        .as_ref()
        .map_err(|e| BenchError::Aggregation(e.clone()))
    }
}

/// Clusters one configuration and returns the clustering with its indicators.
pub fn aggregate(
    series: &TimeSeriesSet,
    configuration: Configuration,
    period_length: usize,
    extremes: bool,
) -> Result<(ClusterResult, AccuracyReport), BenchError> {
    aggregate_prepared(&Prepared::new(series), configuration, period_length, extremes)
}

/// Clusters every configuration on shared normalized data, linking each
/// candidate mode only once. No model is built.
pub fn aggregate_all(
    series: &TimeSeriesSet,
    configurations: &[Configuration],
    period_length: usize,
    extremes: bool,
) -> Vec<Result<(ClusterResult, AccuracyReport), BenchError>> {
    let prep = Prepared::new(series);
    configurations
        .iter()
        .map(|c| aggregate_prepared(&prep, *c, period_length, extremes))
        .collect()
}

fn aggregate_prepared(
    prep: &Prepared,
    configuration: Configuration,
    period_length: usize,
    extremes: bool,
) -> Result<(ClusterResult, AccuracyReport), BenchError> {
    let normalized = &prep.normalized;
    let n = configuration.equivalent_steps;
    let k = match configuration.mode {
        AggregationMode::Days => {
            if n % period_length != 0 {
                return Err(BenchError::Config(format!(
                    "{n} steps is not a whole number of {period_length}-step periods"
                )));
            }
            n / period_length
        }
        AggregationMode::Steps => n,
        AggregationMode::Full => normalized.n_steps(),
    };
    let (candidates, dendrogram) = prep.linkage(configuration.mode, period_length)?;
    if k == 0 || k > candidates.n_candidates() {
        return Err(AggError::ClusterCount { k, n: candidates.n_candidates() }.into());
    }
    let mut clusters = ClusterResult::from_assignment(candidates, &dendrogram.cut(k)?)?;
    if extremes {
        let names: Vec<&str> = normalized.attribute_names().iter().map(String::as_str).collect();
        clusters = inject_extreme_candidates(&candidates, &clusters, &names)?;
    }
    let predicted = expand_to_full(&clusters, normalized.n_steps())?;
    let accuracy = evaluate(normalized, &predicted)?;
    Ok((clusters, accuracy))
}

fn lp_size(lp: &tsagg_lp::LinearProgram) -> LpSize {
    LpSize {
        variables: lp.n_vars(),
        constraints: lp.n_constraints(),
        nonzeros: lp.n_nonzeros(),
    }
}

fn export_name(model: &str, configuration: Configuration) -> String {
    format!("{model}_{}_{}.lp", configuration.mode.label(), configuration.equivalent_steps)
}

fn run_one(
    prep: &Prepared,
    spec: Option<&EnergySystemSpec>,
    config: &RunConfig,
    configuration: Configuration,
) -> ConfigReport {
    let start = Instant::now();
    let mut times = PhaseTimes::default();
    let period_length = match configuration.mode {
        AggregationMode::Days => config.period_length,
        _ => 1,
    };
    let outcome = (|| -> Result<ConfigReport, BenchError> {
        let mut report = ConfigReport::failed(configuration, period_length, String::new(), times);
        report.error = None;
        let grid = if configuration.mode == AggregationMode::Full {
            report.clusters = prep.raw.n_steps();
            AggregatedTimeGrid::full(prep.raw)
        } else {
            let t = Instant::now();
            let (clusters, accuracy) =
                aggregate_prepared(prep, configuration, config.period_length, config.extremes)?;
            report.clusters = clusters.k;
            report.accuracy = Some(accuracy);
            let grid = AggregatedTimeGrid::from_clusters(&clusters, &prep.params, prep.raw.step_hours())
                .map_err(BenchError::Model)?;
            times.cluster = t.elapsed();
            let t = Instant::now();
            let curves = prep
                .raw
                .attribute_names()
                .iter()
                .map(|name| duration_curve(&grid.expand(grid.profile(name).expect("grid holds every attribute"))))
                .collect();
            report.duration_curves = Some(curves);
            times.map_back += t.elapsed();
            grid
        };
        let Some(spec) = spec.filter(|_| config.optimize) else {
            return Ok(report);
        };
        let t = Instant::now();
        let model = compile(spec, &grid).map_err(BenchError::Model)?;
        report.lp_size = Some(lp_size(&model.lp));
        if let Some(dir) = &config.export_lp {
            let path = dir.join(export_name(&config.model_name, configuration));
            std::fs::write(&path, export_lp_text(&model.lp))
                .map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        }
        times.build = t.elapsed();
        let t = Instant::now();
        let result = solve(&model.lp, &config.solver)?;
        times.solve = t.elapsed();
        if result.status != Status::Optimal {
            return Err(BenchError::Solve(format!("solver status {:?}", result.status)));
        }
        let t = Instant::now();
        report.objective = Some(result.objective);
        report.costs = Some(extract_cost_breakdown(&model, &result).map_err(BenchError::Model)?);
        times.map_back += t.elapsed();
        Ok(report)
    })();
    times.total = start.elapsed();
    match outcome {
        Ok(mut r) => {
            r.times = times;
            r
        }
        Err(e) => ConfigReport::failed(configuration, period_length, e.to_string(), times),
    }
}

/// Runs every configuration of `config` on `series`, plus the full-resolution
/// reference when a model is given and `config.optimize` is set.
/// Configurations run concurrently on up to `workers` threads; a failing
/// configuration is recorded in its row and does not stop the others.
pub fn run_grid(config: &RunConfig, series: &TimeSeriesSet, spec: Option<&EnergySystemSpec>) -> GridReport {
    run_grid_timed(config, series, spec, Duration::ZERO)
}

fn progress_line(r: &ConfigReport) -> String {
    let c = r.configuration;
    let outcome = match (&r.error, r.objective) {
        (Some(e), _) => format!("error: {e}"),
        (None, Some(z)) => format!("objective {z}"),
        (None, None) => format!("rmse_tot {}", r.accuracy.as_ref().map_or(f64::NAN, |a| a.rmse_tot)),
    };
    format!("{:>5} {:>5}: {outcome} ({:.2} s)", c.mode.label(), c.equivalent_steps, r.times.total.as_secs_f64())
}

pub(crate) fn run_grid_timed(
    config: &RunConfig,
    series: &TimeSeriesSet,
    spec: Option<&EnergySystemSpec>,
    load_time: Duration,
) -> GridReport {
    let start = Instant::now();
    let prep = Prepared::new(series);
    let mut tasks: Vec<Configuration> = Vec::new();
    let with_reference = spec.is_some() && config.optimize;
    if with_reference {
        tasks.push(Configuration {
            mode: AggregationMode::Full,
            equivalent_steps: series.n_steps(),
        });
    }
    tasks.extend(config.configurations.iter().copied());

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<ConfigReport>>> = Mutex::new(vec![None; tasks.len()]);
    let workers = config.effective_workers().min(tasks.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&task) = tasks.get(i) else { break };
                let report = run_one(&prep, spec, config, task);
                if config.progress {
                    eprintln!("{}", progress_line(&report));
                }
                results.lock().expect("no worker panics while holding the lock")[i] = Some(report);
            });
        }
    });
    let mut rows: Vec<ConfigReport> = results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every task ran"))
        .collect();
    let reference = if with_reference { Some(rows.remove(0)) } else { None };
    GridReport {
        model_name: config.model_name.clone(),
        attribute_names: series.attribute_names().to_vec(),
        n_steps: series.n_steps(),
        original_duration_curves: series.values().iter().map(|r| duration_curve(r)).collect(),
        reference,
        rows,
        load_time,
        total_time: start.elapsed() + load_time,
    }
}
