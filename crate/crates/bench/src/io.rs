use std::path::Path;

use tsagg_core::TimeSeriesSet;

use crate::BenchError;

const TIMESTAMP_HEADERS: [&str; 4] = ["timestamp", "time", "datetime", "date"];

fn is_timestamp_header(h: &str) -> bool {
    TIMESTAMP_HEADERS.iter().any(|t| t.eq_ignore_ascii_case(h.trim()))
}

/// Reads profiles from a CSV file: a header row of attribute names, then one
/// row per time step. A leading `timestamp` column is checked for strictly
/// increasing values and otherwise ignored.
pub fn load_csv(path: impl AsRef<Path>, step_hours: f64) -> Result<TimeSeriesSet, BenchError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
    read_csv(file, step_hours)
}

pub fn read_csv(reader: impl std::io::Read, step_hours: f64) -> Result<TimeSeriesSet, BenchError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(BenchError::Csv("missing header row".into()));
    }
    let skip = usize::from(is_timestamp_header(&headers[0]));
    let names: Vec<String> = headers[skip..].to_vec();
    if names.is_empty() {
        return Err(BenchError::Csv("no value columns".into()));
    }
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() {
            return Err(BenchError::Csv(format!("column {} has an empty name", i + skip + 1)));
        }
        if names[..i].contains(n) {
            return Err(BenchError::Csv(format!("duplicate column `{n}`")));
        }
    }
    let mut rows = vec![Vec::new(); names.len()];
    let mut previous: Option<String> = None;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(BenchError::Csv(format!(
                "line {line}: expected {} fields, found {}",
                headers.len(),
                record.len()
            )));
        }
        if skip == 1 {
            let stamp = record[0].to_string();
            if let Some(prev) = &previous {
                if !increasing(prev, &stamp) {
                    return Err(BenchError::Csv(format!(
                        "line {line}: timestamp `{stamp}` does not follow `{prev}`"
                    )));
                }
            }
            previous = Some(stamp);
        }
        for (col, (cell, row)) in record.iter().skip(skip).zip(rows.iter_mut()).enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                BenchError::Csv(format!("line {line}, column `{}`: `{cell}` is not a number", names[col]))
            })?;
            if !value.is_finite() {
                return Err(BenchError::Csv(format!(
                    "line {line}, column `{}`: non-finite value `{cell}`",
                    names[col]
                )));
            }
            row.push(value);
        }
    }
    if rows[0].is_empty() {
        return Err(BenchError::Csv("no data rows".into()));
    }
    Ok(TimeSeriesSet::new(names, rows, step_hours)?)
}

fn increasing(prev: &str, next: &str) -> bool {
    match (prev.parse::<f64>(), next.parse::<f64>()) {
        (Ok(a), Ok(b)) => b > a,
        _ => next > prev,
    }
}

/// Hourly ISO timestamps for a non-leap year.
fn timestamp(step: usize) -> String {
    const MONTH_DAYS: [usize; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];
    let year = 2019 + step / 8760;
    let mut day = (step / 24) % 365;
    let mut month = 0;
    while day >= MONTH_DAYS[month] {
        day -= MONTH_DAYS[month];
        month += 1;
    }
    format!("{year}-{:02}-{:02}T{:02}:00", month + 1, day + 1, step % 24)
}

/// Writes profiles with a leading timestamp column, values at full precision.
pub fn write_csv(set: &TimeSeriesSet, path: impl AsRef<Path>) -> Result<(), BenchError> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["timestamp".to_string()];
    header.extend(set.attribute_names().iter().cloned());
    w.write_record(&header)?;
    for s in 0..set.n_steps() {
        let mut rec = vec![timestamp(s)];
        rec.extend(set.values().iter().map(|row| row[s].to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}
