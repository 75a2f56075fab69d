use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use tsagg_bench::{
    configurations_for_counts, default_configurations, emit_report, generate, run_from_csv,
    sample_path, write_csv, AggregationMode, ModelChoice, RunConfig, SAMPLE_BUILDING,
    SAMPLE_DISPATCH,
};
use tsagg_esom::{BuildingParams, DispatchParams};
use tsagg_lp::{Method, SolveOptions};

#[derive(Parser)]
#[command(name = "tsagg-bench", version, about = "Typical time steps vs. typical days on energy system models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Days,
    Steps,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Simplex,
    Ipm,
}

#[derive(Subcommand)]
enum Command {
    /// Run an aggregation grid and write reports.
    Run {
        /// `building`, `dispatch`, or `scenario <path.json>`.
        #[arg(long, num_args = 1..=2, value_names = ["MODEL", "PATH"], required = true)]
        model: Vec<String>,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        /// Comma-separated equivalent time-step counts, or `default`.
        #[arg(long, default_value = "default")]
        counts: String,
        /// Profile CSV; defaults to the bundled sample for the model.
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Keep each attribute's peak period as its own cluster.
        #[arg(long)]
        extremes: bool,
        /// Parallel configurations; overridden by TSAGG_WORKERS.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write each LP to `<out>/lp/`.
        #[arg(long)]
        export_lp: bool,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-7)]
        feasibility_tol: f64,
        #[arg(long, default_value_t = 1e-7)]
        optimality_tol: f64,
        /// Only cluster and compute indicators.
        #[arg(long)]
        no_solve: bool,
        /// No per-configuration progress lines.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Regenerate the bundled sample profiles.
    Generate {
        #[arg(long, default_value = "crates/bench/data")]
        out: PathBuf,
    },
}

fn parse_model(args: &[String]) -> Result<ModelChoice> {
    match (args[0].as_str(), args.get(1)) {
        ("building", None) => Ok(ModelChoice::Building(BuildingParams::default())),
        ("dispatch", None) => Ok(ModelChoice::Dispatch(DispatchParams::desk_scale())),
        ("scenario", Some(path)) => Ok(ModelChoice::Scenario(path.into())),
        ("scenario", None) => bail!("`--model scenario` needs a path"),
        (other, _) => bail!("unknown model `{other}`; use building, dispatch or scenario <path>"),
    }
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    match Cli::parse().command {
        Command::Generate { out } => {
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write_csv(&generate::building_profiles(generate::BUILDING_SEED), out.join(SAMPLE_BUILDING))?;
            write_csv(&generate::dispatch_profiles(generate::DISPATCH_SEED), out.join(SAMPLE_DISPATCH))?;
            Ok(true)
        }
        Command::Run {
            model,
            mode,
            counts,
            profiles,
            out,
            extremes,
            workers,
            export_lp,
            method,
            feasibility_tol,
            optimality_tol,
            no_solve,
            quiet,
        } => {
            let model = parse_model(&model)?;
            let modes = match mode {
                ModeArg::Days => vec![AggregationMode::Days],
                ModeArg::Steps => vec![AggregationMode::Steps],
                ModeArg::Both => vec![AggregationMode::Steps, AggregationMode::Days],
            };
            let configurations = if counts.trim() == "default" {
                default_configurations(&modes, 24)
            } else {
                let list = counts
                    .split(',')
                    .map(|c| c.trim().parse::<usize>().with_context(|| format!("bad count `{c}`")))
                    .collect::<Result<Vec<_>>>()?;
                if list.contains(&0) {
                    bail!("counts must be positive");
                }
                configurations_for_counts(&modes, &list)
            };
            let profiles = profiles.unwrap_or_else(|| {
                sample_path(match model {
                    ModelChoice::Building(_) => SAMPLE_BUILDING,
                    _ => SAMPLE_DISPATCH,
                })
            });
            let mut config = RunConfig::new(model.name(), configurations);
            config.extremes = extremes;
            config.workers = workers;
            config.optimize = !no_solve;
            config.solver = SolveOptions {
                feasibility_tol,
                optimality_tol,
                method: match method {
                    MethodArg::Auto => Method::Auto,
                    MethodArg::Simplex => Method::Simplex,
                    MethodArg::Ipm => Method::InteriorPoint,
                },
                ..SolveOptions::default()
            };
            if export_lp {
                let dir = out.join("lp");
                std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                config.export_lp = Some(dir);
            }
            config.progress = !quiet;
            let report = run_from_csv(&config, &model, &profiles)?;
            emit_report(&report, &out)?;
            let failed = report.reference.iter().chain(&report.rows).filter(|r| !r.succeeded()).count();
            eprintln!(
                "{} configurations, {failed} failed, {:.1} s; reports in {}",
                report.rows.len() + usize::from(report.reference.is_some()),
                report.total_time.as_secs_f64(),
                out.display()
            );
            if let Some(kib) = peak_rss_kib() {
                eprintln!("peak resident memory: {} MiB", kib / 1024);
            }
            Ok(report.all_succeeded())
        }
    }
}
