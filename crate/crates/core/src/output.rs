//! Tabular output of sweep records and the run manifest.
//!
//! Columns, in order:
//!
//! ```text
//! setup,r_d_m,n_m,h_l_m,h_h_m,h_s_m,satellite,policy,seed,n_real,
//! coverage,ci95,outage_share,share_user_tbs,...,share_user_hap_sat
//! ```
//!
//! Columns that do not apply to a record's setup are left empty (`null` in
//! JSON). Reals are written in fixed notation with 10 significant digits.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::association::PathType;
use crate::scenario::SetupParams;
use crate::sweep::SweepRecord;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown output format `{0}` (expected csv or json)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = OutputError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(OutputError::UnknownFormat(s.into())),
        }
    }
}

const FIXED_COLUMNS: [&str; 13] = [
    "setup",
    "r_d_m",
    "n_m",
    "h_l_m",
    "h_h_m",
    "h_s_m",
    "satellite",
    "policy",
    "seed",
    "n_real",
    "coverage",
    "ci95",
    "outage_share",
];

pub fn columns() -> Vec<String> {
    FIXED_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain(PathType::ALL.iter().map(|p| format!("share_{}", p.label())))
        .collect()
}

/// `x` in fixed notation with 10 significant digits.
pub fn format_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.9e}", x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (9 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

enum Field {
    Text(String),
    Real(f64),
    Int(u64),
    Bool(bool),
    Empty,
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Text(s) => s.clone(),
            Field::Real(x) => format_real(*x),
            Field::Int(n) => n.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Field::Text(s) => serde_json::Value::from(s.as_str()).to_string(),
            Field::Empty => "null".into(),
            _ => self.csv(),
        }
    }
}

fn row(r: &SweepRecord) -> Vec<Field> {
    let c = &r.config;
    let e = &r.estimate;
    let (n_m, h_l, h_h, h_s, sat) = match &c.setup {
        SetupParams::Small(s) => (Field::Int(s.n_m as u64), Field::Real(s.lap.altitude), Field::Empty, Field::Empty, Field::Empty),
        SetupParams::Large(l) => (
            Field::Empty,
            Field::Empty,
            Field::Real(l.hap.altitude),
            Field::Real(l.sat.altitude),
            Field::Bool(l.satellite_enabled),
        ),
    };
    let mut fields = vec![
        Field::Text(c.setup_kind().name().into()),
        Field::Real(c.r_d),
        n_m,
        h_l,
        h_h,
        h_s,
        sat,
        Field::Text(c.policy.name().into()),
        Field::Int(e.master_seed),
        Field::Int(e.n_realizations),
        Field::Real(e.p_hat),
        Field::Real(e.ci95_half_width),
        Field::Real(e.path_shares.outage),
    ];
    fields.extend(PathType::ALL.iter().map(|&p| Field::Real(e.path_shares.share(p))));
    fields
}

pub fn write_records<W: Write>(records: &[SweepRecord], sink: W, format: Format) -> Result<(), OutputError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
            w.write_record(columns())?;
            for r in records {
                w.write_record(row(r).iter().map(Field::csv))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut sink = sink;
            let cols = columns();
            sink.write_all(b"[")?;
            for (i, r) in records.iter().enumerate() {
                sink.write_all(if i == 0 { b"\n  {" } else { b",\n  {" })?;
                for (j, (k, v)) in cols.iter().zip(row(r)).enumerate() {
                    let sep = if j == 0 { "" } else { ", " };
                    write!(sink, "{sep}\"{k}\": {}", v.json())?;
                }
                sink.write_all(b"}")?;
            }
            sink.write_all(b"\n]\n")?;
            sink.flush()?;
        }
    }
    Ok(())
}

/// Provenance record written next to an output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub config: String,
    pub axes: Vec<String>,
    pub master_seed: u64,
    pub threads: usize,
    pub started_unix: u64,
    pub output_sha256: String,
}

impl RunManifest {
    pub fn path_for(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write(&self, out: &Path) -> Result<PathBuf, OutputError> {
        let path = Self::path_for(out);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(format_real(0.5), "0.5000000000");
        assert_eq!(format_real(1234.5), "1234.500000");
        assert_eq!(format_real(500000.0), "500000.0000");
        assert_eq!(format_real(0.012345678912), "0.01234567891");
        assert_eq!(format_real(9.99999999999), "10.00000000");
        assert_eq!(format_real(1e-12), "0.000000000001000000000");
        assert_eq!(format_real(0.0), "0");
    }

    #[test]
    fn sha_of_empty() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn manifest_path() {
        assert_eq!(RunManifest::path_for(Path::new("/tmp/a.csv")), PathBuf::from("/tmp/a.csv.manifest.json"));
    }
}
