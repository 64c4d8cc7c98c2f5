//! Closed-form checks behind the `oracle` subcommand.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{los_probability, path_loss_gain, LosModel};
use crate::fading::{nakagami_power_gain, shadowed_rician_power_gain, ShadowedRicianParams};
use crate::geometry::{expected_tbs_count, sample_tbs_field, sample_uniform_disk, DiskRegion, FieldCount};
use crate::montecarlo::estimate_coverage;
use crate::scenario::{ScenarioConfig, TbsLayout, UserPlacement};
use crate::sinr::PolicyMode;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: &'static str,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        (self.observed - self.expected).abs() <= self.tolerance
    }
}

fn check(name: &'static str, expected: f64, observed: f64, tolerance: f64) -> OracleCheck {
    OracleCheck { name, expected, observed, tolerance }
}

/// Runs every check with draws from `seed`.
pub fn run_oracles(seed: u64) -> Vec<OracleCheck> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    out.push(check("path_loss_tbs_1km", 10.0 * 1000f64.powf(-2.9), 10.0 * path_loss_gain(2.9, 1000.0).unwrap(), 1e-18));
    out.push(check("los_probability_90deg", 1.0 / (1.0 + 9.61 * (-0.16f64 * (90.0 - 9.61)).exp()), los_probability(&LosModel::urban(), 90.0).unwrap(), 1e-12));

    let n = 1_000_000;
    for m in [1.0, 2.0, 3.0] {
        let xs: Vec<f64> = (0..n).map(|_| nakagami_power_gain(m, &mut rng).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let name = ["nakagami_var_m1", "nakagami_var_m2", "nakagami_var_m3"][m as usize - 1];
        out.push(check(name, 1.0 / m, var, 0.01 / m));
    }

    let sr = ShadowedRicianParams::AVERAGE_SHADOWING;
    let mean = (0..n).map(|_| shadowed_rician_power_gain(&sr, &mut rng).unwrap()).sum::<f64>() / n as f64;
    out.push(check("shadowed_rician_mean", 2.0 * sr.b0 + sr.omega, mean, 0.005));

    let disk = DiskRegion::centered(1000.0).unwrap();
    let pts = sample_uniform_disk(&mut rng, &disk, 200_000);
    let mean_r = pts.iter().map(|p| p.ground_range()).sum::<f64>() / pts.len() as f64;
    out.push(check("uniform_disk_mean_radius", 2000.0 / 3.0, mean_r, 2.0));

    let trials = 10_000;
    let total: usize = (0..trials)
        .map(|_| sample_tbs_field(&mut rng, 1000.0, 4000.0, 10.0, FieldCount::Poisson).unwrap().len())
        .sum();
    let lambda = expected_tbs_count(1000.0, 4000.0, 10.0);
    out.push(check("tbs_count_mean", lambda, total as f64 / trials as f64, 0.02 * lambda));

    let mut cfg = ScenarioConfig::small_disaster(10.0, 0);
    cfg.aerial_enabled = false;
    cfg.user = UserPlacement::FixedRadius(0.0);
    cfg.tbs_layout = TbsLayout::Pinned(vec![(67_206.0, 0.0)]);
    cfg.policy = PolicyMode::None;
    cfg.seed = seed;
    let est = estimate_coverage(&cfg).expect("valid oracle scenario");
    let exact = (-cfg.tau_access * cfg.noise * 67_206f64.powf(2.9) / 10.0).exp();
    out.push(check("rayleigh_cell_edge_coverage", exact, est.p_hat, 3.0 * (exact * (1.0 - exact) / est.n_realizations as f64).sqrt()));

    out
}
