//! CSV tables for sweep records, per-point summaries and bound checks.

use std::io::Write;
use std::path::{Path, PathBuf};

use super::config::SolverKind;
use super::sweep::{sort_records, SweepRecord};
use super::validate::BoundCheckRow;
use crate::error::{Error, Result};

pub const RECORD_HEADER: [&str; 12] = [
    "sweep_value",
    "replication",
    "seed",
    "solver",
    "nu",
    "rho_star",
    "p_star",
    "u_bs",
    "u_pb",
    "gamma_min",
    "p_nonoutage_hat",
    "antenna_powers",
];

/// 12 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format_float(*v))
        .collect::<Vec<_>>()
        .join(";")
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::validation(format!("csv: {e}"))
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::validation(format!("csv: {e}")))
}

fn record_row(r: &SweepRecord) -> Vec<String> {
    vec![
        format_float(r.sweep_value),
        r.replication.to_string(),
        r.seed.to_string(),
        r.solver.name().to_string(),
        format_float(r.nu),
        format_float(r.rho_star),
        format_float(r.p_star),
        format_float(r.u_bs),
        format_float(r.u_pb),
        format_float(r.gamma_min),
        r.p_nonoutage_hat.map(format_float).unwrap_or_default(),
        r.per_antenna_power.as_deref().map(join).unwrap_or_default(),
    ]
}

/// Sorted records as CSV text.
pub fn records_to_csv(records: &[SweepRecord]) -> Result<String> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut buf = Vec::new();
    write_rows(&mut buf, &RECORD_HEADER, sorted.iter().map(record_row))?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Writes the record table to `path`.
pub fn emit_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if records.is_empty() {
        return Err(Error::validation("no records to write"));
    }
    let text = records_to_csv(records)?;
    std::fs::write(path, text).map_err(io_error(path))
}

fn parse_f64(field: &str, what: &str, line: usize) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::validation(format!("line {line}: {what}: not a number: {field:?}")))
}

/// Parses a table written by [`emit_csv`].
pub fn parse_records(text: &str) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_error)?;
    if header.iter().ne(RECORD_HEADER.iter().copied()) {
        return Err(Error::validation("unexpected header"));
    }
    let mut out = Vec::new();
    for (k, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_error)?;
        let line = k + 2;
        let f = |i: usize| parse_f64(&row[i], RECORD_HEADER[i], line);
        let int = |i: usize| {
            row[i]
                .parse::<u64>()
                .map_err(|_| Error::validation(format!("line {line}: {}: not an integer", RECORD_HEADER[i])))
        };
        out.push(SweepRecord {
            sweep_value: f(0)?,
            replication: int(1)? as usize,
            seed: int(2)?,
            solver: row[3].parse::<SolverKind>()?,
            nu: f(4)?,
            rho_star: f(5)?,
            p_star: f(6)?,
            u_bs: f(7)?,
            u_pb: f(8)?,
            gamma_min: f(9)?,
            p_nonoutage_hat: if row[10].is_empty() { None } else { Some(f(10)?) },
            per_antenna_power: if row[11].is_empty() {
                None
            } else {
                Some(
                    row[11]
                        .split(';')
                        .map(|v| parse_f64(v, "antenna_powers", line))
                        .collect::<Result<_>>()?,
                )
            },
        });
    }
    Ok(out)
}

/// `runs/distance.csv` → `runs/distance_summary.csv`
pub fn summary_path(path: impl AsRef<Path>) -> PathBuf {
    let path = path.as_ref();
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}_summary.csv"))
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Stat { mean, std }
    }
}

/// Cross-replication aggregate for one `(sweep_value, solver)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub sweep_value: f64,
    pub solver: SolverKind,
    pub count: usize,
    pub nu: Stat,
    pub rho_star: Stat,
    pub p_star: Stat,
    pub u_bs: Stat,
    pub u_pb: Stat,
    pub gamma_min: Stat,
    pub p_nonoutage_hat: Option<Stat>,
    /// Mean power per antenna.
    pub antenna_powers: Option<Vec<f64>>,
}

pub const SUMMARY_HEADER: [&str; 17] = [
    "sweep_value",
    "solver",
    "count",
    "nu_mean",
    "nu_std",
    "rho_star_mean",
    "rho_star_std",
    "p_star_mean",
    "p_star_std",
    "u_bs_mean",
    "u_bs_std",
    "u_pb_mean",
    "u_pb_std",
    "gamma_min_mean",
    "gamma_min_std",
    "p_nonoutage_hat_mean",
    "antenna_powers_mean",
];

/// Groups records by `(sweep_value, solver)`, ordered like the record table.
pub fn summarize(records: &[SweepRecord]) -> Vec<SummaryRow> {
    let mut sorted: Vec<&SweepRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then(a.solver.name().cmp(b.solver.name()))
    });
    let mut out = Vec::new();
    for group in sorted.chunk_by(|a, b| a.sweep_value == b.sweep_value && a.solver == b.solver) {
        let stat = |f: fn(&SweepRecord) -> f64| Stat::of(&group.iter().map(|r| f(r)).collect::<Vec<_>>());
        let p_hat: Option<Vec<f64>> = group.iter().map(|r| r.p_nonoutage_hat).collect();
        let powers: Option<Vec<&Vec<f64>>> = group.iter().map(|r| r.per_antenna_power.as_ref()).collect();
        let antenna_powers = powers.and_then(|p| {
            let m = p[0].len();
            if p.iter().any(|v| v.len() != m) {
                return None;
            }
            Some(
                (0..m)
                    .map(|k| p.iter().map(|v| v[k]).sum::<f64>() / p.len() as f64)
                    .collect(),
            )
        });
        out.push(SummaryRow {
            sweep_value: group[0].sweep_value,
            solver: group[0].solver,
            count: group.len(),
            nu: stat(|r| r.nu),
            rho_star: stat(|r| r.rho_star),
            p_star: stat(|r| r.p_star),
            u_bs: stat(|r| r.u_bs),
            u_pb: stat(|r| r.u_pb),
            gamma_min: stat(|r| r.gamma_min),
            p_nonoutage_hat: p_hat.map(|v| Stat::of(&v)),
            antenna_powers,
        });
    }
    out
}

fn summary_row(s: &SummaryRow) -> Vec<String> {
    let mut row = vec![
        format_float(s.sweep_value),
        s.solver.name().to_string(),
        s.count.to_string(),
    ];
    for st in [s.nu, s.rho_star, s.p_star, s.u_bs, s.u_pb, s.gamma_min] {
        row.push(format_float(st.mean));
        row.push(format_float(st.std));
    }
    row.push(
        s.p_nonoutage_hat
            .map(|st| format_float(st.mean))
            .unwrap_or_default(),
    );
    row.push(s.antenna_powers.as_deref().map(join).unwrap_or_default());
    row
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, &SUMMARY_HEADER, rows.iter().map(summary_row))?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub fn emit_summary_csv(rows: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, summary_to_csv(rows)?).map_err(io_error(path))
}

pub const BOUND_HEADER: [&str; 11] = [
    "sweep_value",
    "replication",
    "seed",
    "sensor",
    "p_star",
    "p_hat",
    "std_err",
    "gamma",
    "gamma_capped",
    "margin",
    "violated",
];

fn bound_row(r: &BoundCheckRow) -> Vec<String> {
    vec![
        format_float(r.sweep_value),
        r.replication.to_string(),
        r.seed.to_string(),
        r.sensor.to_string(),
        format_float(r.p_star),
        format_float(r.p_hat),
        format_float(r.std_err),
        format_float(r.gamma),
        format_float(r.gamma.min(1.0)),
        format_float(r.margin()),
        r.violated().to_string(),
    ]
}

pub fn bound_rows_to_csv(rows: &[BoundCheckRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, &BOUND_HEADER, rows.iter().map(bound_row))?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub fn emit_bound_csv(rows: &[BoundCheckRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, bound_rows_to_csv(rows)?).map_err(io_error(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(value: f64, rep: usize, solver: SolverKind) -> SweepRecord {
        SweepRecord {
            sweep_value: value,
            replication: rep,
            seed: 42,
            solver,
            nu: 1.234_567_890_123_456e-8,
            rho_star: 123.456_789_012_345,
            p_star: 0.1 * (rep + 1) as f64,
            u_bs: -1.0 / 3.0,
            u_pb: 2.0 / 3.0,
            gamma_min: 1.5,
            p_nonoutage_hat: None,
            per_antenna_power: None,
        }
    }

    #[test]
    fn one_record_two_lines() {
        let text = records_to_csv(&[record(2.0, 0, SolverKind::NuMax)]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], RECORD_HEADER.join(","));
        assert!(lines[1].ends_with(",,"), "{}", lines[1]);
        assert!(lines[1].starts_with("2.00000000000e0,0,42,nu_max,1.23456789012e-8,"));
    }

    #[test]
    fn rows_are_sorted() {
        let text = records_to_csv(&[
            record(4.0, 0, SolverKind::NuMin),
            record(2.0, 1, SolverKind::NuMin),
            record(2.0, 0, SolverKind::Sdp),
            record(2.0, 0, SolverKind::GlobalSearch),
        ])
        .unwrap();
        let keys: Vec<(f64, usize, SolverKind)> = parse_records(&text)
            .unwrap()
            .iter()
            .map(|r| (r.sweep_value, r.replication, r.solver))
            .collect();
        assert_eq!(
            keys,
            vec![
                (2.0, 0, SolverKind::GlobalSearch),
                (2.0, 0, SolverKind::Sdp),
                (2.0, 1, SolverKind::NuMin),
                (4.0, 0, SolverKind::NuMin),
            ]
        );
    }

    #[test]
    fn round_trip_to_twelve_digits() {
        let mut a = record(2.0, 3, SolverKind::Sdp);
        a.p_nonoutage_hat = Some(0.987_654_321_987_6);
        a.per_antenna_power = Some(vec![0.1, 0.2 / 3.0, 1e-20]);
        let back = parse_records(&records_to_csv(&[a.clone()]).unwrap()).unwrap();
        assert_eq!(back.len(), 1);
        let b = &back[0];
        let close = |x: f64, y: f64| (x - y).abs() <= 5e-12 * x.abs();
        assert!(close(a.nu, b.nu) && close(a.rho_star, b.rho_star) && close(a.u_bs, b.u_bs));
        assert!(close(a.p_nonoutage_hat.unwrap(), b.p_nonoutage_hat.unwrap()));
        for (x, y) in a
            .per_antenna_power
            .unwrap()
            .iter()
            .zip(b.per_antenna_power.as_ref().unwrap())
        {
            assert!(close(*x, *y));
        }
        assert_eq!((b.replication, b.seed, b.solver), (3, 42, SolverKind::Sdp));
    }

    #[test]
    fn summary_statistics() {
        let recs = vec![
            record(2.0, 0, SolverKind::NuMax),
            record(2.0, 1, SolverKind::NuMax),
            record(2.0, 2, SolverKind::NuMax),
            record(2.0, 0, SolverKind::NuMin),
        ];
        let s = summarize(&recs);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].solver, s[0].count), (SolverKind::NuMax, 3));
        assert!((s[0].p_star.mean - 0.2).abs() < 1e-15);
        assert!((s[0].p_star.std - 0.1).abs() < 1e-15);
        assert_eq!(s[1].p_star.std, 0.0);
        assert!(s[0].antenna_powers.is_none());
        let text = summary_to_csv(&s).unwrap();
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn summary_file_name() {
        assert_eq!(
            summary_path("out/distance.csv"),
            PathBuf::from("out/distance_summary.csv")
        );
        assert_eq!(summary_path("run"), PathBuf::from("run_summary.csv"));
    }

    #[test]
    fn empty_and_unwritable() {
        assert!(emit_csv(&[], "/tmp/never.csv").is_err());
        let err = emit_csv(&[record(1.0, 0, SolverKind::Sdp)], "/nonexistent-dir/x.csv").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
