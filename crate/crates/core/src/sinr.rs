//! Per-hop SINR and the end-to-end coverage predicate.
//!
//! Access and backhaul hops occupy orthogonal bands. On each band the
//! potential interferers are the tiers that transmit on it: the tiers a user
//! may attach to for access, and the tiers an infrastructure node may attach
//! to for backhaul. The policy then narrows that set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::association::{AdjacencyRules, Hop, HopRole, PathSpec};
use crate::channel::{ChannelError, ChannelModel, Tier};
use crate::scenario::{Node, Realization, ScenarioError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SinrError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PolicyMode {
    /// Noise only.
    None,
    /// Every other node of the serving transmitter's tier.
    #[default]
    SameTier,
    /// Every other node transmitting on the hop's band.
    AllTier,
}

impl PolicyMode {
    pub const ALL: [PolicyMode; 3] = [PolicyMode::None, PolicyMode::SameTier, PolicyMode::AllTier];

    pub fn name(self) -> &'static str {
        match self {
            PolicyMode::None => "none",
            PolicyMode::SameTier => "same_tier",
            PolicyMode::AllTier => "all_tier",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterferencePolicy {
    pub mode: PolicyMode,
    access_band: Vec<Tier>,
    backhaul_band: Vec<Tier>,
}

impl InterferencePolicy {
    pub fn new(mode: PolicyMode, rules: &AdjacencyRules) -> Self {
        InterferencePolicy { mode, access_band: rules.access_tiers(), backhaul_band: rules.backhaul_tiers() }
    }

    fn band(&self, role: HopRole) -> &[Tier] {
        match role {
            HopRole::Access => &self.access_band,
            HopRole::Backhaul => &self.backhaul_band,
        }
    }

    /// Tiers whose nodes may interfere with `hop`.
    pub fn interfering_tiers(&self, hop: &Hop) -> Vec<Tier> {
        match self.mode {
            PolicyMode::None => Vec::new(),
            PolicyMode::SameTier => vec![hop.tx.tier],
            PolicyMode::AllTier => self.band(hop.role).to_vec(),
        }
    }
}

/// Received power of `tx` at `rx` in this realization (LoS state and fading applied).
pub fn received_power(real: &Realization, model: &ChannelModel, tx: &Node, rx: &Node) -> Result<f64, SinrError> {
    let geom = model.geometry(tx, rx)?;
    let state = real.link_state_with(model, tx, rx, geom.los_probability)?;
    Ok(model.tx_power(tx.tier)? * state.gain * model.state_gain(&geom, state.los)?)
}

/// Sums interference at `hop.rx`; stops early once the sum exceeds `cap`.
fn interference(
    hop: &Hop,
    real: &Realization,
    model: &ChannelModel,
    policy: &InterferencePolicy,
    cap: f64,
) -> Result<f64, SinrError> {
    let mut total = 0.0;
    for tier in policy.interfering_tiers(hop) {
        for k in real.nodes_of(tier) {
            if k.id == hop.tx.id || k.id == hop.rx.id {
                continue;
            }
            total += received_power(real, model, k, &hop.rx)?;
            if total > cap {
                return Ok(total);
            }
        }
    }
    Ok(total)
}

/// `S / (I + noise)` for one hop.
pub fn link_sinr(
    hop: &Hop,
    real: &Realization,
    model: &ChannelModel,
    policy: &InterferencePolicy,
    noise: f64,
) -> Result<f64, SinrError> {
    let signal = received_power(real, model, &hop.tx, &hop.rx)?;
    let i = interference(hop, real, model, policy, f64::INFINITY)?;
    Ok(signal / (i + noise))
}

/// `link_sinr(..) >= tau`, skipping the rest of the interferer sum once the
/// outcome is decided.
pub fn hop_meets(
    hop: &Hop,
    real: &Realization,
    model: &ChannelModel,
    policy: &InterferencePolicy,
    noise: f64,
    tau: f64,
) -> Result<bool, SinrError> {
    let signal = received_power(real, model, &hop.tx, &hop.rx)?;
    // SINR >= tau  <=>  I <= S / tau - noise; partial sums only grow.
    let cap = signal / tau - noise;
    if cap < 0.0 {
        return Ok(false);
    }
    let i = interference(hop, real, model, policy, cap)?;
    Ok(signal / (i + noise) >= tau)
}

/// True iff every access hop reaches `tau_access` and every backhaul hop `tau_backhaul`.
pub fn path_covered(
    path: &PathSpec,
    real: &Realization,
    model: &ChannelModel,
    policy: &InterferencePolicy,
    tau_access: f64,
    tau_backhaul: f64,
    noise: f64,
) -> Result<bool, SinrError> {
    for hop in &path.hops {
        let tau = match hop.role {
            HopRole::Access => tau_access,
            HopRole::Backhaul => tau_backhaul,
        };
        if !hop_meets(hop, real, model, policy, noise, tau)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Threshold logic on precomputed hop SINRs.
pub fn sinrs_meet(hops: &[(HopRole, f64)], tau_access: f64, tau_backhaul: f64) -> bool {
    hops.iter().all(|&(role, s)| match role {
        HopRole::Access => s >= tau_access,
        HopRole::Backhaul => s >= tau_backhaul,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::association::select_path;
    use crate::scenario::{build_realization, ScenarioConfig, TbsLayout, UserPlacement};
    use crate::stream::StreamSeed;
    use approx::assert_relative_eq;

    fn single_tbs(points: Vec<(f64, f64)>) -> (ScenarioConfig, Realization) {
        let mut cfg = ScenarioConfig::small_disaster(10.0, 0);
        cfg.aerial_enabled = false;
        cfg.user = UserPlacement::FixedRadius(0.0);
        cfg.tbs_layout = TbsLayout::Pinned(points);
        let real = build_realization(&cfg, StreamSeed(5)).unwrap();
        (cfg, real)
    }

    #[test]
    fn noise_limited_cell_edge() {
        let (cfg, real) = single_tbs(vec![(67_206.0, 0.0)]);
        let model = cfg.channel_model().unwrap();
        let policy = InterferencePolicy::new(PolicyMode::None, &cfg.rules());
        let hop = select_path(&real, &cfg.rules(), &model).unwrap().hops[0];
        let g = real.link_state(&model, &hop.tx, &hop.rx).unwrap().gain;
        let sinr = link_sinr(&hop, &real, &model, &policy, 1e-12).unwrap();
        assert_relative_eq!(sinr / g, 10.0 * 67_206f64.powf(-2.9) / 1e-12, max_relative = 1e-12);
        assert_relative_eq!(sinr / g, 0.1, max_relative = 2e-3);
    }

    #[test]
    fn symmetric_same_tier_pair() {
        let (cfg, real) = single_tbs(vec![(1000.0, 0.0), (-1000.0, 0.0)]);
        let model = cfg.channel_model().unwrap();
        let policy = InterferencePolicy::new(PolicyMode::SameTier, &cfg.rules());
        let hop = select_path(&real, &cfg.rules(), &model).unwrap().hops[0];
        let s = received_power(&real, &model, &hop.tx, &hop.rx).unwrap();
        let i = received_power(&real, &model, &real.nodes_of(Tier::Tbs)[1], &hop.rx).unwrap();
        let sinr = link_sinr(&hop, &real, &model, &policy, 1e-12).unwrap();
        assert_relative_eq!(sinr, s / (i + 1e-12), max_relative = 1e-12);
        // Equal fading would give S / (S + noise) < 1, tending to 1 as noise vanishes.
        let equal = s / (s + 1e-12);
        assert!(equal < 1.0);
        assert!(s / (s + 1e-20) > equal);
    }

    #[test]
    fn sinr_decreases_with_distance() {
        let mut last = f64::INFINITY;
        for d in [100.0, 500.0, 2000.0, 10_000.0, 50_000.0] {
            let (cfg, real) = single_tbs(vec![(d, 0.0)]);
            let model = cfg.channel_model().unwrap();
            let policy = InterferencePolicy::new(PolicyMode::None, &cfg.rules());
            let hop = select_path(&real, &cfg.rules(), &model).unwrap().hops[0];
            let g = real.link_state(&model, &hop.tx, &hop.rx).unwrap().gain;
            let s = link_sinr(&hop, &real, &model, &policy, 1e-12).unwrap() / g;
            assert!(s < last);
            last = s;
        }
    }

    #[test]
    fn threshold_logic() {
        assert!(!sinrs_meet(&[(HopRole::Access, 0.5), (HopRole::Backhaul, 0.15)], 0.1, 0.2));
        assert!(sinrs_meet(&[(HopRole::Access, 0.1)], 0.1, 0.2));
        assert!(sinrs_meet(&[(HopRole::Access, 0.3), (HopRole::Backhaul, 1e4)], 0.1, 0.2));
    }

    #[test]
    fn early_exit_agrees_with_full_sum() {
        let cfg = ScenarioConfig::small_disaster(2000.0, 40);
        let model = cfg.channel_model().unwrap();
        let rules = cfg.rules();
        for mode in PolicyMode::ALL {
            let policy = InterferencePolicy::new(mode, &rules);
            for i in 0..200 {
                let real = build_realization(&cfg, StreamSeed(100 + i)).unwrap();
                let Ok(path) = select_path(&real, &rules, &model) else { continue };
                for hop in &path.hops {
                    let s = link_sinr(hop, &real, &model, &policy, 1e-12).unwrap();
                    for tau in [0.1, 0.2, 1.0] {
                        assert_eq!(hop_meets(hop, &real, &model, &policy, 1e-12, tau).unwrap(), s >= tau);
                    }
                }
            }
        }
    }

    #[test]
    fn policies_are_nested() {
        let cfg = ScenarioConfig::large_disaster(5000.0, 10_000.0, 500_000.0, true);
        let model = cfg.channel_model().unwrap();
        let rules = cfg.rules();
        let [none, same, all] = PolicyMode::ALL.map(|m| InterferencePolicy::new(m, &rules));
        for i in 0..100 {
            let real = build_realization(&cfg, StreamSeed(i)).unwrap();
            let path = select_path(&real, &rules, &model).unwrap();
            for hop in &path.hops {
                let a = link_sinr(hop, &real, &model, &none, 1e-12).unwrap();
                let b = link_sinr(hop, &real, &model, &same, 1e-12).unwrap();
                let c = link_sinr(hop, &real, &model, &all, 1e-12).unwrap();
                assert!(a >= b && b >= c, "{a} {b} {c}");
            }
        }
    }
}
