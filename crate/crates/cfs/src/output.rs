//! CSV and JSON plot data for solution profiles and convergence reports.
//!
//! CSV files start with `# key=value` metadata lines, then a header row and
//! one row per node (or grid). Floats carry 17 significant digits, so a
//! file parses back to the values it was written from. JSON holds the same
//! metadata plus one array per CSV column.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use cfs_core::{ConvergenceReport, ConvergenceRow, ProblemSpec, Solution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("malformed data: {0}")]
    Malformed(String),
}

/// Nodal values of one solve, optionally with the reference solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub problem_name: String,
    pub epsilon: f64,
    pub mu: f64,
    pub x: Vec<f64>,
    pub phi_numeric: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_exact: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_error: Option<Vec<f64>>,
}

impl Profile {
    pub fn from_solution(spec: &ProblemSpec, sol: &Solution) -> Self {
        let x = sol.grid.nodes().to_vec();
        let exact: Option<Vec<f64>> = spec.exact().map(|e| x.iter().map(|&xj| e.value(xj)).collect());
        let abs_error = exact
            .as_ref()
            .map(|ex| ex.iter().zip(&sol.values).map(|(e, v)| (v - e).abs()).collect());
        Profile {
            problem_name: spec.name().to_string(),
            epsilon: spec.epsilon(),
            mu: spec.mu(),
            x,
            phi_numeric: sol.values.clone(),
            phi_exact: exact,
            abs_error,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ReportColumns {
    problem_name: String,
    epsilon: f64,
    mu: f64,
    lsq_slope: Option<f64>,
    h: Vec<f64>,
    n_points: Vec<usize>,
    max_error: Vec<f64>,
    observed_order: Vec<Option<f64>>,
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn parse_float(s: &str) -> Result<f64, OutputError> {
    s.trim()
        .parse()
        .map_err(|_| OutputError::Malformed(format!("not a number: '{s}'")))
}

fn parse_opt(s: &str) -> Result<Option<f64>, OutputError> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_float(s).map(Some)
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Splits `# key=value` lines from the CSV body.
fn split_metadata(text: &str) -> (Vec<(String, String)>, String) {
    let mut meta = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        match line.strip_prefix('#') {
            Some(rest) => {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
            }
            None => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    (meta, body)
}

fn lookup<'a>(meta: &'a [(String, String)], key: &str) -> Result<&'a str, OutputError> {
    meta.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| OutputError::Malformed(format!("missing metadata '{key}'")))
}

fn read_header(reader: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<usize, OutputError> {
    let header = reader.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.len() > expected.len() || names[..] != expected[..names.len()] {
        return Err(OutputError::Malformed(format!("unexpected header {names:?}")));
    }
    Ok(names.len())
}

pub fn write_profile<W: Write>(mut w: W, profile: &Profile, format: Format) -> Result<(), OutputError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, profile)?;
            w.write_all(b"\n")?;
        }
        Format::Csv => {
            writeln!(w, "# problem={}", profile.problem_name)?;
            writeln!(w, "# epsilon={}", fmt_float(profile.epsilon))?;
            writeln!(w, "# mu={}", fmt_float(profile.mu))?;
            let mut out = csv_writer(&mut w);
            let with_exact = profile.phi_exact.is_some() && profile.abs_error.is_some();
            if with_exact {
                out.write_record(["x", "phi_numeric", "phi_exact", "abs_error"])?;
            } else {
                out.write_record(["x", "phi_numeric"])?;
            }
            for j in 0..profile.x.len() {
                let mut row = vec![fmt_float(profile.x[j]), fmt_float(profile.phi_numeric[j])];
                if let (Some(ex), Some(err)) = (&profile.phi_exact, &profile.abs_error) {
                    row.push(fmt_float(ex[j]));
                    row.push(fmt_float(err[j]));
                }
                out.write_record(&row)?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

pub fn read_profile<R: Read>(mut r: R, format: Format) -> Result<Profile, OutputError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    match format {
        Format::Json => Ok(serde_json::from_str(&text)?),
        Format::Csv => {
            let (meta, body) = split_metadata(&text);
            let mut reader = csv::Reader::from_reader(body.as_bytes());
            let columns = read_header(&mut reader, &["x", "phi_numeric", "phi_exact", "abs_error"])?;
            if columns != 2 && columns != 4 {
                return Err(OutputError::Malformed(format!("expected 2 or 4 columns, found {columns}")));
            }
            let mut p = Profile {
                problem_name: lookup(&meta, "problem")?.to_string(),
                epsilon: parse_float(lookup(&meta, "epsilon")?)?,
                mu: parse_float(lookup(&meta, "mu")?)?,
                x: Vec::new(),
                phi_numeric: Vec::new(),
                phi_exact: (columns == 4).then(Vec::new),
                abs_error: (columns == 4).then(Vec::new),
            };
            for record in reader.records() {
                let record = record?;
                p.x.push(parse_float(&record[0])?);
                p.phi_numeric.push(parse_float(&record[1])?);
                if let (Some(ex), Some(err)) = (&mut p.phi_exact, &mut p.abs_error) {
                    ex.push(parse_float(&record[2])?);
                    err.push(parse_float(&record[3])?);
                }
            }
            Ok(p)
        }
    }
}

pub fn write_report<W: Write>(mut w: W, report: &ConvergenceReport, format: Format) -> Result<(), OutputError> {
    match format {
        Format::Json => {
            let columns = ReportColumns {
                problem_name: report.problem_name.clone(),
                epsilon: report.epsilon,
                mu: report.mu,
                lsq_slope: report.lsq_slope,
                h: report.rows.iter().map(|r| r.h).collect(),
                n_points: report.rows.iter().map(|r| r.n_points).collect(),
                max_error: report.rows.iter().map(|r| r.max_error).collect(),
                observed_order: report.rows.iter().map(|r| r.observed_order).collect(),
            };
            serde_json::to_writer_pretty(&mut w, &columns)?;
            w.write_all(b"\n")?;
        }
        Format::Csv => {
            writeln!(w, "# problem={}", report.problem_name)?;
            writeln!(w, "# epsilon={}", fmt_float(report.epsilon))?;
            writeln!(w, "# mu={}", fmt_float(report.mu))?;
            writeln!(w, "# lsq_slope={}", fmt_opt(report.lsq_slope))?;
            let mut out = csv_writer(&mut w);
            out.write_record(["h", "n_points", "max_error", "observed_order"])?;
            for row in &report.rows {
                out.write_record([
                    fmt_float(row.h),
                    row.n_points.to_string(),
                    fmt_float(row.max_error),
                    fmt_opt(row.observed_order),
                ])?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

pub fn read_report<R: Read>(mut r: R, format: Format) -> Result<ConvergenceReport, OutputError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    match format {
        Format::Json => {
            let c: ReportColumns = serde_json::from_str(&text)?;
            let n = c.h.len();
            if [c.n_points.len(), c.max_error.len(), c.observed_order.len()] != [n, n, n] {
                return Err(OutputError::Malformed("columns differ in length".into()));
            }
            let rows = (0..n)
                .map(|k| ConvergenceRow {
                    h: c.h[k],
                    n_points: c.n_points[k],
                    max_error: c.max_error[k],
                    observed_order: c.observed_order[k],
                })
                .collect();
            Ok(ConvergenceReport {
                problem_name: c.problem_name,
                epsilon: c.epsilon,
                mu: c.mu,
                rows,
                lsq_slope: c.lsq_slope,
            })
        }
        Format::Csv => {
            let (meta, body) = split_metadata(&text);
            let mut reader = csv::Reader::from_reader(body.as_bytes());
            if read_header(&mut reader, &["h", "n_points", "max_error", "observed_order"])? != 4 {
                return Err(OutputError::Malformed("expected 4 columns".into()));
            }
            let mut rows = Vec::new();
            for record in reader.records() {
                let record = record?;
                rows.push(ConvergenceRow {
                    h: parse_float(&record[0])?,
                    n_points: record[1]
                        .trim()
                        .parse()
                        .map_err(|_| OutputError::Malformed(format!("bad n_points '{}'", &record[1])))?,
                    max_error: parse_float(&record[2])?,
                    observed_order: parse_opt(&record[3])?,
                });
            }
            Ok(ConvergenceReport {
                problem_name: lookup(&meta, "problem")?.to_string(),
                epsilon: parse_float(lookup(&meta, "epsilon")?)?,
                mu: parse_float(lookup(&meta, "mu")?)?,
                rows,
                lsq_slope: parse_opt(lookup(&meta, "lsq_slope")?)?,
            })
        }
    }
}

/// Writes `path` through a temporary file in the same directory, renamed
/// into place once complete.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<(), OutputError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), OutputError>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buffered = io::BufWriter::new(tmp.as_file_mut());
        fill(&mut buffered)?;
        buffered.flush()?;
    }
    tmp.persist(path).map_err(|e| OutputError::Io(e.error))?;
    Ok(())
}
