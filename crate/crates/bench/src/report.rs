use std::path::Path;

use crate::grid::{ConfigReport, GridReport};
use crate::BenchError;

/// Column order of `report.csv`.
pub const REPORT_COLUMNS: [&str; 20] = [
    "model",
    "mode",
    "clusters",
    "period_length",
    "equivalent_steps",
    "status",
    "rmse_tot",
    "rmse_dc_tot",
    "mae_tot",
    "reference_objective",
    "objective",
    "deviation",
    "relative_deviation",
    "lp_variables",
    "lp_constraints",
    "lp_nonzeros",
    "capex",
    "fixed_opex",
    "variable_opex",
    "error",
];

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn count(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn report_row(grid: &GridReport, row: &ConfigReport) -> Vec<String> {
    let ok = row.succeeded();
    let acc = row.accuracy.as_ref();
    let reference = grid.reference_objective();
    let deviation = grid.deviation(row);
    let relative = deviation.zip(reference).map(|(d, r)| d / r.abs());
    let size = row.lp_size;
    let cost = |f: fn(&tsagg_esom::ComponentCost) -> f64| {
        row.costs.as_ref().map(|c| c.components.iter().map(f).sum::<f64>())
    };
    vec![
        grid.model_name.clone(),
        row.configuration.mode.label().to_string(),
        if ok { row.clusters.to_string() } else { String::new() },
        row.period_length.to_string(),
        row.configuration.equivalent_steps.to_string(),
        if ok { "ok" } else { "error" }.to_string(),
        num(acc.map(|a| a.rmse_tot)),
        num(acc.map(|a| a.rmse_dc_tot)),
        num(acc.map(|a| a.mae_tot)),
        num(reference),
        num(row.objective),
        num(deviation),
        num(relative),
        count(size.map(|s| s.variables)),
        count(size.map(|s| s.constraints)),
        count(size.map(|s| s.nonzeros)),
        num(cost(|c| c.capex)),
        num(cost(|c| c.fixed_opex)),
        num(cost(|c| c.variable_opex)),
        row.error.clone().unwrap_or_default(),
    ]
}

fn all_rows(grid: &GridReport) -> impl Iterator<Item = &ConfigReport> {
    grid.reference.iter().chain(&grid.rows)
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> BenchError {
    BenchError::Io(format!("{}: {e}", path.display()))
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Writes `report.csv` (one row per configuration, reference first),
/// `indicators.csv` and `costs.csv` (long format), `timings.csv` and
/// duration curves under `duration/`. Everything except `timings.csv` is
/// deterministic for a given input.
pub fn emit_report(grid: &GridReport, dir: impl AsRef<Path>) -> Result<(), BenchError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let rows: Vec<&ConfigReport> = all_rows(grid).collect();
    if rows.is_empty() {
        return Err(BenchError::Config("nothing to report".into()));
    }
    write_table(&dir.join("report.csv"), &REPORT_COLUMNS, rows.iter().map(|r| report_row(grid, r)))?;

    let key = |r: &ConfigReport| {
        vec![
            grid.model_name.clone(),
            r.configuration.mode.label().to_string(),
            r.configuration.equivalent_steps.to_string(),
        ]
    };
    let mut indicator_rows = Vec::new();
    for r in &rows {
        if let Some(a) = &r.accuracy {
            for (i, name) in a.attribute_names.iter().enumerate() {
                let mut rec = key(r);
                rec.extend([name.clone(), a.rmse[i].to_string(), a.rmse_dc[i].to_string(), a.mae[i].to_string()]);
                indicator_rows.push(rec);
            }
        }
    }
    write_table(
        &dir.join("indicators.csv"),
        &["model", "mode", "equivalent_steps", "attribute", "rmse", "rmse_dc", "mae"],
        indicator_rows,
    )?;

    let mut cost_rows = Vec::new();
    for r in &rows {
        if let Some(c) = &r.costs {
            for comp in &c.components {
                let mut rec = key(r);
                rec.extend([
                    comp.name.clone(),
                    comp.capex.to_string(),
                    comp.fixed_opex.to_string(),
                    comp.variable_opex.to_string(),
                ]);
                cost_rows.push(rec);
            }
        }
    }
    write_table(
        &dir.join("costs.csv"),
        &["model", "mode", "equivalent_steps", "component", "capex", "fixed_opex", "variable_opex"],
        cost_rows,
    )?;

    let secs = |d: std::time::Duration| d.as_secs_f64().to_string();
    let mut timing_rows = vec![vec![
        grid.model_name.clone(),
        "load".into(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        secs(grid.load_time),
    ]];
    for r in &rows {
        let mut rec = key(r);
        rec.extend([
            secs(r.times.cluster),
            secs(r.times.build),
            secs(r.times.solve),
            secs(r.times.map_back),
            secs(r.times.total),
        ]);
        timing_rows.push(rec);
    }
    write_table(
        &dir.join("timings.csv"),
        &["model", "mode", "equivalent_steps", "cluster_s", "build_s", "solve_s", "map_back_s", "total_s"],
        timing_rows,
    )?;

    let curves_dir = dir.join("duration");
    std::fs::create_dir_all(&curves_dir).map_err(|e| io_err(&curves_dir, e))?;
    write_curves(&curves_dir.join(format!("{}_original.csv", grid.model_name)), &grid.attribute_names, &grid.original_duration_curves)?;
    for r in &grid.rows {
        if let Some(curves) = &r.duration_curves {
            let name = format!(
                "{}_{}_{}.csv",
                grid.model_name,
                r.configuration.mode.label(),
                r.configuration.equivalent_steps
            );
            write_curves(&curves_dir.join(name), &grid.attribute_names, curves)?;
        }
    }
    Ok(())
}

fn write_curves(path: &Path, names: &[String], curves: &[Vec<f64>]) -> Result<(), BenchError> {
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    let n = curves.first().map_or(0, Vec::len);
    write_table(path, &header, (0..n).map(|i| curves.iter().map(|c| c[i].to_string()).collect()))
}
