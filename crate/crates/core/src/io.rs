//! CSV and JSON formats.
//!
//! Signals are stored as `x,value` rows on an equispaced grid; spectra as
//! `xi,re,im`; weight configurations as JSON objects such as
//! `{"family": "power-tail", "p": 2}` or
//! `{"family": "tabulated", "table": "phi.csv"}` (a `t,phi` CSV).

use std::cmp::Ordering;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{HausError, Result};
use crate::signal::{SampledSignal, Spectrum};
use crate::verify::ExperimentReport;
use crate::weights::WeightSpec;

/// Relative tolerance on grid spacing irregularities in signal files.
pub const SPACING_TOL: f64 = 1e-9;

fn csv_err(e: csv::Error) -> HausError {
    match e.kind() {
        csv::ErrorKind::Io(_) => HausError::Io(e.to_string()),
        _ => HausError::Format(e.to_string()),
    }
}

fn parse_num(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| HausError::Format(format!("line {line}: `{field}` is not a number")))
}

pub fn write_signal_csv<W: Write>(f: &SampledSignal<f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "value"]).map_err(csv_err)?;
    for (i, v) in f.values().iter().enumerate() {
        w.write_record([f.x(i).to_string(), v.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an `x,value` CSV. The spacing is recovered so that, whenever the
/// file was written by [`write_signal_csv`], every `x` is reproduced exactly.
pub fn read_signal_csv<R: Read>(input: R) -> Result<SampledSignal<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
        return Err(HausError::Format(format!(
            "expected header `x,value`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = k + 2;
        if rec.len() != 2 {
            return Err(HausError::Format(format!("line {line}: expected 2 fields, found {}", rec.len())));
        }
        xs.push(parse_num(&rec[0], line)?);
        vs.push(parse_num(&rec[1], line)?);
    }
    if xs.len() < 2 {
        return Err(HausError::Format("a signal needs at least two rows".into()));
    }
    let n = xs.len();
    let x0 = xs[0];
    let approx = (xs[n - 1] - x0) / (n - 1) as f64;
    if !(approx > 0.0) {
        return Err(HausError::Format("x must be strictly increasing".into()));
    }
    for (i, w) in xs.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(HausError::Format(format!("x is not strictly increasing at row {}", i + 2)));
        }
        if ((w[1] - w[0]) - approx).abs() > SPACING_TOL * approx {
            return Err(HausError::Format(format!("x is not equispaced at row {}", i + 2)));
        }
    }
    let dx = exact_spacing(&xs, approx).unwrap_or(approx);
    let probe = SampledSignal::new(x0, dx, vec![0.0; n])?;
    for (i, x) in xs.iter().enumerate() {
        if (probe.x(i) - x).abs() > SPACING_TOL * dx {
            return Err(HausError::Format(format!(
                "x at row {} deviates from the grid by more than {SPACING_TOL:e} dx",
                i + 2
            )));
        }
    }
    SampledSignal::new(x0, dx, vs)
}

/// Whether the grid `xs[0] + i dx` falls short of (`Less`), overshoots
/// (`Greater`) or reproduces (`Equal`) the tabulated `xs`; `None` if it does
/// both at different rows.
fn compare_spacing(xs: &[f64], dx: f64) -> Option<Ordering> {
    let (mut short, mut over) = (false, false);
    for (i, x) in xs.iter().enumerate() {
        let c = xs[0] + i as f64 * dx;
        short |= c < *x;
        over |= c > *x;
    }
    match (short, over) {
        (false, false) => Some(Ordering::Equal),
        (true, false) => Some(Ordering::Less),
        (false, true) => Some(Ordering::Greater),
        (true, true) => None,
    }
}

/// Smallest bit pattern in `[lo, hi]` (positive floats, so bit order is value
/// order) at which `pred` holds, assuming `pred` is monotone.
fn first_bits(mut lo: u64, mut hi: u64, pred: impl Fn(f64) -> bool) -> u64 {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(f64::from_bits(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// The spacing reproducing every `x` bitwise. Several spacings can do so when
/// `|x0|` is large relative to `dx`; the one with the shortest decimal form
/// is taken, which recovers grids specified by decimal spacings.
fn exact_spacing(xs: &[f64], approx: f64) -> Option<f64> {
    let lo = (approx * (1.0 - 1e-9)).to_bits();
    let hi = (approx * (1.0 + 1e-9)).to_bits();
    let not_short = |d: f64| !matches!(compare_spacing(xs, d), Some(Ordering::Less));
    let over = |d: f64| matches!(compare_spacing(xs, d), Some(Ordering::Greater));
    let first = f64::from_bits(first_bits(lo, hi, not_short));
    if compare_spacing(xs, first) != Some(Ordering::Equal) {
        return None;
    }
    let last = f64::from_bits(first_bits(first.to_bits(), hi, over) - 1);
    for digits in 1..=17 {
        for anchor in [first, last, 0.5 * (first + last)] {
            let c: f64 = format!("{:.*e}", digits - 1, anchor).parse().ok()?;
            if c >= first && c <= last && compare_spacing(xs, c) == Some(Ordering::Equal) {
                return Some(c);
            }
        }
    }
    Some(first)
}

pub fn write_spectrum_csv<W: Write>(s: &Spectrum<f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["xi", "re", "im"]).map_err(csv_err)?;
    for (k, c) in s.values().iter().enumerate() {
        w.write_record([s.xi(k).to_string(), c.re.to_string(), c.im.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the `xi,re,im` rows of a spectrum file.
pub fn read_spectrum_rows<R: Read>(input: R) -> Result<Vec<(f64, Complex<f64>)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["xi", "re", "im"] {
        return Err(HausError::Format("expected header `xi,re,im`".into()));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = k + 2;
        if rec.len() != 3 {
            return Err(HausError::Format(format!("line {line}: expected 3 fields")));
        }
        rows.push((
            parse_num(&rec[0], line)?,
            Complex::new(parse_num(&rec[1], line)?, parse_num(&rec[2], line)?),
        ));
    }
    Ok(rows)
}

/// Columns of a two-column numeric CSV with any header.
pub fn read_pairs<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 2 {
            return Err(HausError::Format(format!("line {}: expected 2 fields", k + 2)));
        }
        a.push(parse_num(&rec[0], k + 2)?);
        b.push(parse_num(&rec[1], k + 2)?);
    }
    Ok((a, b))
}

/// JSON form of a weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

impl WeightConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HausError::Config(format!("weight config: {e}")))
    }

    /// Builds the weight; relative table paths are resolved against `base`.
    pub fn build(&self, base: Option<&Path>) -> Result<WeightSpec<f64>> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| HausError::Config(format!("family `{}` requires `{name}`", self.family)))
        };
        let spec = match self.family.as_str() {
            "power-tail" => WeightSpec::power_tail(need(self.p, "p")?),
            "power-bump" => WeightSpec::power_bump(need(self.p, "p")?),
            "adjoint-hardy" => Ok(WeightSpec::adjoint_hardy()),
            "riemann-liouville" => WeightSpec::riemann_liouville(need(self.alpha, "alpha")?),
            "tabulated" => {
                let path = self
                    .table
                    .as_ref()
                    .ok_or_else(|| HausError::Config("family `tabulated` requires `table`".into()))?;
                let path = match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path.clone(),
                };
                let file = fs::File::open(&path)
                    .map_err(|e| HausError::Io(format!("{}: {e}", path.display())))?;
                let (t, phi) = read_pairs(file)?;
                WeightSpec::tabulated(t, phi)
            }
            other => {
                return Err(HausError::Config(format!(
                    "unknown weight family `{other}` (expected power-tail, power-bump, adjoint-hardy, riemann-liouville or tabulated)"
                )))
            }
        };
        spec.map_err(|e| match e {
            HausError::Parameter(m) => HausError::Config(m),
            other => other,
        })
    }

    /// Inverse of [`Self::build`] for the analytic families.
    pub fn from_spec(w: &WeightSpec<f64>) -> Option<Self> {
        let mut c = Self {
            family: w.family().to_string(),
            p: None,
            alpha: None,
            table: None,
        };
        match w {
            WeightSpec::PowerTail { p } | WeightSpec::PowerBump { p } => c.p = Some(*p),
            WeightSpec::RiemannLiouville { alpha } => c.alpha = Some(*alpha),
            WeightSpec::AdjointHardy => {}
            WeightSpec::Tabulated(_) => return None,
        }
        Some(c)
    }
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| HausError::Io(format!("{}: {e}", dir.display())))?;
        }
    }
    fs::write(path, text).map_err(|e| HausError::Io(format!("{}: {e}", path.display())))
}

pub fn write_signal_file(path: &Path, f: &SampledSignal<f64>) -> Result<()> {
    let mut buf = Vec::new();
    write_signal_csv(f, &mut buf)?;
    write_text(path, &String::from_utf8_lossy(&buf))
}

pub fn read_signal_file(path: &Path) -> Result<SampledSignal<f64>> {
    let file = fs::File::open(path).map_err(|e| HausError::Io(format!("{}: {e}", path.display())))?;
    read_signal_csv(file)
}

/// Writes the report as JSON (with timestamp and version) and its metrics as CSV.
pub fn write_report(report: &ExperimentReport, json_path: &Path, csv_path: Option<&Path>) -> Result<()> {
    write_text(json_path, &report.to_json()?)?;
    if let Some(p) = csv_path {
        write_text(p, &report.metrics_csv())?;
    }
    Ok(())
}
