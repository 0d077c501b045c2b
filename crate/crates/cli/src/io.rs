//! CSV reading and writing, plus a minimal SVG line plot.

use std::fmt::Write as _;
use std::path::Path;

use xz_dressing::analysis::FoldedEstimate;
use xz_dressing::{DriveField, Trajectory};

use crate::error::{CliError, CliResult};

pub const TRACE_HEADER: [&str; 7] = ["tau", "t", "sx", "sy", "sz", "p_plus", "omega_ld"];
pub const ESTIMATE_HEADER: [&str; 5] = ["t_mid", "tau_mid", "tau_folded", "f_ld", "uncertainty"];

/// Shortest round-trip form is not fixed-width, so use 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes a header and rows of already formatted fields.
pub fn write_csv<S: AsRef<str>>(path: &Path, header: &[S], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(header.iter().map(|h| h.as_ref())).map_err(|e| csv_io(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e.to_string()))
}

/// Trace rows; `omega_ld` is the dressed Larmor frequency in kHz.
pub fn trace_rows(traj: &Trajectory<f64>) -> Vec<Vec<String>> {
    traj.samples
        .iter()
        .map(|s| {
            let omega_ld = traj.scenario.dressed_larmor(s.t) / std::f64::consts::TAU;
            [traj.scenario.reduced_time(s.t), s.t, s.sx, s.sy, s.sz, s.p_plus, omega_ld]
                .into_iter()
                .map(num)
                .collect()
        })
        .collect()
}

pub fn write_trace(path: &Path, traj: &Trajectory<f64>) -> CliResult<()> {
    write_csv(path, &TRACE_HEADER, &trace_rows(traj))
}

/// Estimate rows; the reduced-time columns stay empty without a drive frequency.
pub fn estimate_rows(est: &[(f64, f64, f64, Option<f64>, Option<f64>)]) -> Vec<Vec<String>> {
    est.iter()
        .map(|&(t_mid, f_ld, unc, tau_mid, tau_folded)| vec![num(t_mid), opt(tau_mid), opt(tau_folded), num(f_ld), num(unc)])
        .collect()
}

pub fn folded_tuples(folded: &[FoldedEstimate<f64>]) -> Vec<(f64, f64, f64, Option<f64>, Option<f64>)> {
    folded
        .iter()
        .map(|f| {
            let e = f.estimate;
            (e.t_mid, e.f_ld, e.uncertainty, Some(f.tau_mid), Some(f.tau_folded))
        })
        .collect()
}

/// A trace read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceFile {
    /// Sample times, ms.
    pub t: Vec<f64>,
    /// Named columns other than `t` and `tau`.
    pub columns: Vec<(String, Vec<f64>)>,
    /// Drive frequency implied by the `tau` column, kHz.
    pub drive_khz: Option<f64>,
}

impl TraceFile {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

fn parse_field(s: &str, line: u64, col: usize) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("line {line}, column {}: `{s}` is not a number", col + 1)))
}

/// Reads either the full trace schema or a two-column `t,signal` file
/// (header optional, `t` in ms).
pub fn read_trace(path: &Path) -> CliResult<TraceFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read trace {}: {e}", path.display())))?;
    parse_trace(&text)
}

pub fn parse_trace(text: &str) -> CliResult<TraceFile> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Config(format!("malformed CSV: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        if header.is_none() && rows.is_empty() && rec.iter().any(|f| f.parse::<f64>().is_err()) {
            header = Some(rec.iter().map(|s| s.to_ascii_lowercase()).collect());
            continue;
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(i, f)| parse_field(f, line, i))
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    let width = header.as_ref().map_or_else(|| rows.first().map_or(0, Vec::len), Vec::len);
    let names: Vec<String> = match header {
        Some(h) => h,
        None if width == 2 => vec!["t".into(), "signal".into()],
        None if width == TRACE_HEADER.len() => TRACE_HEADER.iter().map(|s| s.to_string()).collect(),
        None => {
            return Err(CliError::Config(format!(
                "headerless CSV must have 2 or 7 columns, found {width}"
            )))
        }
    };
    let t_idx = names
        .iter()
        .position(|n| n == "t")
        .or((names.len() == 2).then_some(0))
        .ok_or_else(|| CliError::Config("trace CSV needs a `t` column".to_string()))?;
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(rows.len()); names.len()];
    for row in &rows {
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(*v);
        }
    }
    let tau_idx = names.iter().position(|n| n == "tau");
    let t = cols[t_idx].clone();
    let drive_khz = tau_idx.and_then(|i| {
        let tau = &cols[i];
        let (n0, n1) = (0, tau.len().checked_sub(1)?);
        let dt = t[n1] - t[n0];
        (dt > 0.0).then(|| (tau[n1] - tau[n0]) / dt)
    });
    let columns = names
        .into_iter()
        .zip(cols)
        .enumerate()
        .filter(|(i, _)| *i != t_idx && Some(*i) != tau_idx)
        .map(|(_, c)| c)
        .collect();
    Ok(TraceFile { t, columns, drive_khz })
}

/// Line plot of the given series against reduced time.
pub fn write_svg(path: &Path, tau: &[f64], series: &[(&str, Vec<f64>)]) -> CliResult<()> {
    const W: f64 = 900.0;
    const H: f64 = 300.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let (t0, t1) = (tau.first().copied().unwrap_or(0.0), tau.last().copied().unwrap_or(1.0));
    let span = (t1 - t0).max(f64::MIN_POSITIVE);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    for (k, (name, values)) in series.iter().enumerate() {
        let pts: Vec<String> = tau
            .iter()
            .zip(values)
            .map(|(&x, &y)| format!("{:.2},{:.2}", (x - t0) / span * W, (1.0 - y) * H / 2.0))
            .collect();
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(svg, r#"<text x="8" y="{}" fill="{color}" font-size="12">{name}</text>"#, 16 + 14 * k);
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).map_err(|e| CliError::io(path, e))
}
