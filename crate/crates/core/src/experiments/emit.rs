use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::sweep::CurvePoint;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "axis_name",
    "axis_value",
    "overlay_label",
    "metric",
    "analytic",
    "mc_value",
    "mc_stderr",
    "n_trials",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
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

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::invalid("format", format!("expected csv or json, got `{other}`"))),
        }
    }
}

/// 12 significant digits in scientific notation.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn rounded(x: f64) -> f64 {
    sig12(x).parse().unwrap_or(x)
}

fn ser_sig12<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(rounded(*x))
}

fn ser_opt_sig12<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&rounded(*v)),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    axis_name: &'a str,
    #[serde(serialize_with = "ser_sig12")]
    axis_value: f64,
    overlay_label: &'a str,
    metric: &'static str,
    #[serde(serialize_with = "ser_sig12")]
    analytic: f64,
    #[serde(serialize_with = "ser_opt_sig12")]
    mc_value: Option<f64>,
    #[serde(serialize_with = "ser_opt_sig12")]
    mc_stderr: Option<f64>,
    n_trials: Option<u64>,
    seed: Option<u64>,
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn write_csv<W: Write>(points: &[CurvePoint], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for p in points {
        out.write_record([
            p.axis_name.clone(),
            sig12(p.axis_value),
            p.overlay_label.clone(),
            p.metric.name().to_string(),
            sig12(p.analytic),
            opt(p.mc_value, sig12),
            opt(p.mc_stderr, sig12),
            opt(p.n_trials, |n| n.to_string()),
            opt(p.seed, |s| s.to_string()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn write_json<W: Write>(points: &[CurvePoint], mut w: W) -> std::io::Result<()> {
    let records: Vec<JsonRecord> = points
        .iter()
        .map(|p| JsonRecord {
            axis_name: &p.axis_name,
            axis_value: p.axis_value,
            overlay_label: &p.overlay_label,
            metric: p.metric.name(),
            analytic: p.analytic,
            mc_value: p.mc_value,
            mc_stderr: p.mc_stderr,
            n_trials: p.n_trials,
            seed: p.seed,
        })
        .collect();
    serde_json::to_writer_pretty(&mut w, &records)?;
    w.write_all(b"\n")
}

/// Serializes `points` into an in-memory document.
pub fn render(points: &[CurvePoint], format: Format) -> Result<String> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(points, &mut buf).map_err(|e| Error::Config(e.to_string()))?,
        Format::Json => write_json(points, &mut buf).map_err(|e| Error::Config(e.to_string()))?,
    }
    Ok(String::from_utf8(buf).expect("emitters write UTF-8"))
}

pub fn emit(points: &[CurvePoint], format: Format, path: &Path) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Degenerate("nothing to emit"));
    }
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    match format {
        Format::Csv => write_csv(points, &mut w).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => io_err(source),
            other => Error::Config(format!("{other:?}")),
        })?,
        Format::Json => write_json(points, &mut w).map_err(io_err)?,
    }
    w.flush().map_err(io_err)
}
