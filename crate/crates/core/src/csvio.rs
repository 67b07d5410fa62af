//! CSV readers and writers for every artifact the tool emits.
//!
//! All floats are written in scientific notation with a configurable number
//! of significant digits (default 17, which round-trips f64 exactly), and
//! every writer has a matching parser so emitted files can be re-read.

use crate::dynamics::{TimeMode, Trajectory};
use crate::error::{Error, Result};
use crate::popsim::{Histogram, StepRecord};

/// Default number of significant digits.
pub const DEFAULT_SIG_DIGITS: usize = 17;

/// Format with `sig` significant digits in scientific notation.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    format!("{:.*e}", sig.max(1) - 1, x)
}

fn parse_f64(field: &str, line_no: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        Error::Config(format!("line {line_no}: `{field}` is not a number"))
    })
}

/// Split a CSV body into rows of fields, checking the header verbatim.
fn rows<'a>(text: &'a str, expected_header: &str) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == expected_header => {}
        Some((_, h)) => {
            return Err(Error::Config(format!(
                "expected header `{expected_header}`, found `{}`",
                h.trim()
            )))
        }
        None => return Err(Error::Config("empty CSV".into())),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push((i + 1, line.split(',').collect()));
    }
    Ok(out)
}

fn trajectory_header(mode: TimeMode) -> &'static str {
    match mode {
        TimeMode::Regular => "time,rho",
        TimeMode::Effective => "tau,rho",
    }
}

/// `time,rho` (regular) or `tau,rho` (effective), one sample per line.
pub fn trajectory_csv(traj: &Trajectory, sig: usize) -> String {
    let mut out = String::from(trajectory_header(traj.time_mode));
    out.push('\n');
    for &(t, rho) in &traj.samples {
        out.push_str(&fmt_sig(t, sig));
        out.push(',');
        out.push_str(&fmt_sig(rho, sig));
        out.push('\n');
    }
    out
}

pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory> {
    let mode = match text.lines().next().map(str::trim) {
        Some("time,rho") => TimeMode::Regular,
        Some("tau,rho") => TimeMode::Effective,
        other => {
            return Err(Error::Config(format!(
                "expected `time,rho` or `tau,rho` header, found {other:?}"
            )))
        }
    };
    let mut samples = Vec::new();
    for (line_no, fields) in rows(text, trajectory_header(mode))? {
        if fields.len() != 2 {
            return Err(Error::Config(format!("line {line_no}: expected 2 fields")));
        }
        samples.push((parse_f64(fields[0], line_no)?, parse_f64(fields[1], line_no)?));
    }
    Ok(Trajectory { samples, time_mode: mode })
}

pub const TRACE_HEADER: &str = "step,mean_rho,mean_rho_hat,frac_zero,frac_full";

pub fn trace_csv(records: &[StepRecord], sig: usize) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.step,
            fmt_sig(r.mean_rho, sig),
            fmt_sig(r.mean_rho_hat, sig),
            fmt_sig(r.frac_zero, sig),
            fmt_sig(r.frac_full, sig),
        ));
    }
    out
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<StepRecord>> {
    let mut records = Vec::new();
    for (line_no, fields) in rows(text, TRACE_HEADER)? {
        if fields.len() != 5 {
            return Err(Error::Config(format!("line {line_no}: expected 5 fields")));
        }
        records.push(StepRecord {
            step: fields[0]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("line {line_no}: bad step index")))?,
            mean_rho: parse_f64(fields[1], line_no)?,
            mean_rho_hat: parse_f64(fields[2], line_no)?,
            frac_zero: parse_f64(fields[3], line_no)?,
            frac_full: parse_f64(fields[4], line_no)?,
        });
    }
    Ok(records)
}

pub const HISTOGRAM_HEADER: &str = "bin_start,percent";

/// `bin_start,percent` rows, one per attainable ρ̂ value.
pub fn histogram_csv(hist: &Histogram, sig: usize) -> String {
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    for (i, &p) in hist.percentages().iter().enumerate() {
        out.push_str(&fmt_sig(hist.bin_start(i), sig));
        out.push(',');
        out.push_str(&fmt_sig(p, sig));
        out.push('\n');
    }
    out
}

pub fn parse_histogram_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (line_no, fields) in rows(text, HISTOGRAM_HEADER)? {
        if fields.len() != 2 {
            return Err(Error::Config(format!("line {line_no}: expected 2 fields")));
        }
        out.push((parse_f64(fields[0], line_no)?, parse_f64(fields[1], line_no)?));
    }
    Ok(out)
}

pub const INIT_HISTOGRAM_HEADER: &str = "rho,percent";

/// Parse an initial-distribution file: `rho,percent` rows summing to
/// 100 ± 0.01 percent.
pub fn parse_init_histogram(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut support = Vec::new();
    for (line_no, fields) in rows(text, INIT_HISTOGRAM_HEADER)? {
        if fields.len() != 2 {
            return Err(Error::Config(format!("line {line_no}: expected 2 fields")));
        }
        support.push((parse_f64(fields[0], line_no)?, parse_f64(fields[1], line_no)?));
    }
    if support.is_empty() {
        return Err(Error::Config("init histogram has no rows".into()));
    }
    let total: f64 = support.iter().map(|s| s.1).sum();
    if (total - 100.0).abs() > 0.01 {
        return Err(Error::Config(format!(
            "init histogram percents must sum to 100 +/- 0.01, got {total}"
        )));
    }
    Ok(support)
}

/// Multi-column table: a time (or step) column followed by one column per
/// scheme, headers verbatim.
pub fn figure_table_csv(
    first_col: &str,
    times: &[f64],
    columns: &[(String, Vec<f64>)],
    sig: usize,
) -> Result<String> {
    for (name, values) in columns {
        if values.len() != times.len() {
            return Err(Error::Config(format!(
                "column `{name}` has {} rows, expected {}",
                values.len(),
                times.len()
            )));
        }
    }
    let mut out = String::from(first_col);
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, &t) in times.iter().enumerate() {
        out.push_str(&fmt_sig(t, sig));
        for (_, values) in columns {
            out.push(',');
            out.push_str(&fmt_sig(values[i], sig));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Header names, time column, and per-scheme data columns of a figure table.
pub type FigureTable = (Vec<String>, Vec<f64>, Vec<Vec<f64>>);

/// Parse a figure table back into (header names, time column, data columns).
pub fn parse_figure_table_csv(text: &str) -> Result<FigureTable> {
    let mut lines = text.lines().enumerate();
    let header: Vec<String> = match lines.next() {
        Some((_, h)) => h.trim().split(',').map(str::to_string).collect(),
        None => return Err(Error::Config("empty CSV".into())),
    };
    if header.len() < 2 {
        return Err(Error::Config("figure table needs at least 2 columns".into()));
    }
    let mut times = Vec::new();
    let mut columns = vec![Vec::new(); header.len() - 1];
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::Config(format!("line {}: ragged row", i + 1)));
        }
        times.push(parse_f64(fields[0], i + 1)?);
        for (j, f) in fields[1..].iter().enumerate() {
            columns[j].push(parse_f64(f, i + 1)?);
        }
    }
    Ok((header, times, columns))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 6.240461366183808] {
            let s = fmt_sig(x, 17);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn trajectory_round_trip() {
        let traj = Trajectory {
            samples: vec![(0.0, 0.1), (0.5, 1.0 / 3.0), (1.0, 0.77)],
            time_mode: TimeMode::Effective,
        };
        let text = trajectory_csv(&traj, 17);
        assert!(text.starts_with("tau,rho\n"));
        let back = parse_trajectory_csv(&text).unwrap();
        assert_eq!(back, traj);
    }

    #[test]
    fn trace_round_trip() {
        let records = vec![StepRecord {
            step: 3,
            mean_rho: 0.25,
            mean_rho_hat: 0.26,
            frac_zero: 0.5,
            frac_full: 0.0,
        }];
        let text = trace_csv(&records, 17);
        assert_eq!(parse_trace_csv(&text).unwrap(), records);
    }

    #[test]
    fn histogram_round_trip() {
        let groups = vec![
            crate::weighting::RewardGroup::new(&[0, 0]).unwrap(),
            crate::weighting::RewardGroup::new(&[1, 0]).unwrap(),
        ];
        let hist = crate::popsim::rho_hat_histogram(&groups, 2).unwrap();
        let text = histogram_csv(&hist, 17);
        let rows = parse_histogram_csv(&text).unwrap();
        assert_eq!(rows, vec![(0.0, 50.0), (0.5, 50.0), (1.0, 0.0)]);
    }

    #[test]
    fn init_histogram_validation() {
        let good = "rho,percent\n0.05,60\n0.5,40\n";
        assert_eq!(parse_init_histogram(good).unwrap().len(), 2);
        let bad_sum = "rho,percent\n0.05,60\n0.5,30\n";
        assert!(parse_init_histogram(bad_sum).is_err());
        let bad_header = "fraction,percent\n0.05,100\n";
        assert!(parse_init_histogram(bad_header).is_err());
    }

    #[test]
    fn figure_table_round_trip() {
        let cols = vec![
            ("GRPO".to_string(), vec![0.1, 0.2]),
            ("RLOO".to_string(), vec![0.3, 0.4]),
        ];
        let text = figure_table_csv("t", &[0.0, 1.0], &cols, 17).unwrap();
        assert!(text.starts_with("t,GRPO,RLOO\n"));
        let (header, times, data) = parse_figure_table_csv(&text).unwrap();
        assert_eq!(header, vec!["t", "GRPO", "RLOO"]);
        assert_eq!(times, vec![0.0, 1.0]);
        assert_eq!(data, vec![vec![0.1, 0.2], vec![0.3, 0.4]]);
    }
}
