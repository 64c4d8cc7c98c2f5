//! Seeded realization loop.
//!
//! Realization `i` draws everything from `mix(master_seed, i)`, and the
//! reduction is an integer sum, so the estimate is bit-identical for any
//! thread count or evaluation order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};
use thiserror::Error;

use crate::association::{select_path, AssociationError, PathCounts, PathShares};
use crate::scenario::{build_realization, ScenarioConfig, ScenarioError};
use crate::sinr::{path_covered, InterferencePolicy, SinrError};
use crate::stream::StreamSeed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonteCarloError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Association(#[from] AssociationError),
    #[error(transparent)]
    Sinr(#[from] SinrError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CiMethod {
    /// Wald interval, `p +- 1.96 sqrt(p (1 - p) / n)`.
    #[default]
    Normal,
    /// Exact binomial interval, for coverage near 0 or 1.
    ClopperPearson,
}

impl CiMethod {
    pub fn name(self) -> &'static str {
        match self {
            CiMethod::Normal => "normal",
            CiMethod::ClopperPearson => "clopper_pearson",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [CiMethod::Normal, CiMethod::ClopperPearson].into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub p_hat: f64,
    /// Normal-approximation half width.
    pub ci95_half_width: f64,
    /// 95% interval from the configured method.
    pub ci95: (f64, f64),
    pub n_realizations: u64,
    pub covered: u64,
    pub path_counts: PathCounts,
    pub path_shares: PathShares,
    pub master_seed: u64,
}

impl CoverageEstimate {
    pub fn from_counts(covered: u64, path_counts: PathCounts, master_seed: u64, method: CiMethod) -> Result<Self, AssociationError> {
        let n = path_counts.total();
        let path_shares = path_counts.shares()?;
        let p_hat = covered as f64 / n as f64;
        let ci95_half_width = 1.96 * (p_hat * (1.0 - p_hat) / n as f64).sqrt();
        let ci95 = match method {
            CiMethod::Normal => ((p_hat - ci95_half_width).max(0.0), (p_hat + ci95_half_width).min(1.0)),
            CiMethod::ClopperPearson => clopper_pearson(covered, n),
        };
        Ok(CoverageEstimate { p_hat, ci95_half_width, ci95, n_realizations: n, covered, path_counts, path_shares, master_seed })
    }

    pub fn std_error(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.n_realizations as f64).sqrt()
    }
}

/// Exact two-sided 95% binomial interval.
pub fn clopper_pearson(k: u64, n: u64) -> (f64, f64) {
    let alpha = 1.0 - 0.95;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 { 0.0 } else { Beta::new(kf, nf - kf + 1.0).expect("positive shapes").inverse_cdf(alpha / 2.0) };
    let hi = if k == n { 1.0 } else { Beta::new(kf + 1.0, nf - kf).expect("positive shapes").inverse_cdf(1.0 - alpha / 2.0) };
    (lo, hi)
}

#[derive(Debug, Default)]
struct Tally {
    covered: u64,
    paths: PathCounts,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.covered += other.covered;
        self.paths = self.paths.merge(&other.paths);
        self
    }
}

/// Runs `cfg.n_realizations` trials under `cfg.seed` on the current rayon pool.
pub fn estimate_coverage(cfg: &ScenarioConfig) -> Result<CoverageEstimate, MonteCarloError> {
    cfg.validate()?;
    let model = cfg.channel_model()?;
    let rules = cfg.rules();
    let policy = InterferencePolicy::new(cfg.policy, &rules);

    let tally = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|i| -> Result<Tally, MonteCarloError> {
            let real = build_realization(cfg, StreamSeed::realization(cfg.seed, i))?;
            let mut t = Tally::default();
            match select_path(&real, &rules, &model) {
                Ok(path) => {
                    t.paths.record(path.path_type());
                    if path_covered(&path, &real, &model, &policy, cfg.tau_access, cfg.tau_backhaul, cfg.noise)? {
                        t.covered = 1;
                    }
                }
                Err(AssociationError::NoPathAvailable(_)) => t.paths.record(None),
                Err(e) => return Err(e.into()),
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    Ok(CoverageEstimate::from_counts(tally.covered, tally.paths, cfg.seed, cfg.ci_method)?)
}
