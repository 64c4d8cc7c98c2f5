//! Cartesian parameter sweeps.
//!
//! Grid points run in parallel but are returned in canonical order: the
//! first axis varies slowest. Every point reuses the base master seed, so
//! neighbouring points see the same user, TBS field and fading draws.

use rayon::prelude::*;
use thiserror::Error;

use crate::config::{set_key, ConfigError, Line};
use crate::montecarlo::{estimate_coverage, CoverageEstimate, MonteCarloError};
use crate::scenario::ScenarioConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid axis `{0}`: {1}")]
    InvalidAxis(String, String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    MonteCarlo(#[from] MonteCarloError),
    #[error("no records")]
    Empty,
    #[error("records differ in more than `n_m`")]
    MismatchedRecords,
    #[error("records are not small-disaster runs")]
    NotSmallDisaster,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

impl Axis {
    pub fn new(key: impl Into<String>, values: impl IntoIterator<Item = impl ToString>) -> Self {
        Axis { key: key.into(), values: values.into_iter().map(|v| v.to_string()).collect() }
    }

    /// Parses `key=v1,v2,...`.
    pub fn parse(spec: &str) -> Result<Self, SweepError> {
        let (key, values) =
            spec.split_once('=').ok_or_else(|| SweepError::InvalidAxis(spec.into(), "expected key=v1,v2,...".into()))?;
        Ok(Axis::new(key.trim(), values.split(',').map(str::trim)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub config: ScenarioConfig,
    pub estimate: CoverageEstimate,
}

/// Expands the grid into concrete configurations without running them.
pub fn grid(base: &ScenarioConfig, axes: &[Axis]) -> Result<Vec<ScenarioConfig>, SweepError> {
    for (i, axis) in axes.iter().enumerate() {
        if axis.key == "setup" {
            return Err(SweepError::InvalidAxis(axis.key.clone(), "the setup cannot be swept".into()));
        }
        if axes[..i].iter().any(|a| a.key == axis.key) {
            return Err(SweepError::InvalidAxis(axis.key.clone(), "duplicate axis".into()));
        }
        if axis.values.is_empty() || axis.values.iter().any(String::is_empty) {
            return Err(SweepError::InvalidAxis(axis.key.clone(), "empty value".into()));
        }
        for (j, v) in axis.values.iter().enumerate() {
            if axis.values[..j].contains(v) {
                return Err(SweepError::InvalidAxis(axis.key.clone(), format!("duplicate value `{v}`")));
            }
        }
    }

    let mut configs = vec![base.clone()];
    for axis in axes {
        let mut next = Vec::with_capacity(configs.len() * axis.values.len());
        for cfg in &configs {
            for v in &axis.values {
                let mut c = cfg.clone();
                set_key(&mut c, &axis.key, v).map_err(|e| e.at(&axis.key, v, Line(None)))?;
                next.push(c);
            }
        }
        configs = next;
    }
    for c in &configs {
        c.validate().map_err(|e| ConfigError::Constraint { key: "sweep".into(), line: Line(None), reason: e.to_string() })?;
    }
    Ok(configs)
}

pub fn run_sweep(base: &ScenarioConfig, axes: &[Axis]) -> Result<Vec<SweepRecord>, SweepError> {
    grid(base, axes)?
        .into_par_iter()
        .map(|config| {
            let estimate = estimate_coverage(&config)?;
            Ok(SweepRecord { config, estimate })
        })
        .collect()
}

/// Best MDRU count: `(n_m, coverage)` maximizing coverage, ties to the smaller count.
pub fn optimal_n_m(records: &[SweepRecord]) -> Result<(usize, f64), SweepError> {
    let first = records.first().ok_or(SweepError::Empty)?;
    let strip = |c: &ScenarioConfig| {
        let mut c = c.clone();
        c.small_mut().map(|s| s.n_m = 0).ok_or(SweepError::NotSmallDisaster)?;
        Ok::<_, SweepError>(c)
    };
    let reference = strip(&first.config)?;
    let mut best: Option<(usize, f64)> = None;
    for r in records {
        if strip(&r.config)? != reference {
            return Err(SweepError::MismatchedRecords);
        }
        let n = r.config.small().map(|s| s.n_m).ok_or(SweepError::NotSmallDisaster)?;
        let p = r.estimate.p_hat;
        best = match best {
            Some((bn, bp)) if bp > p || (bp == p && bn <= n) => Some((bn, bp)),
            _ => Some((n, p)),
        };
    }
    best.ok_or(SweepError::Empty)
}
