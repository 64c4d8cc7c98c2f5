//! Hop-by-hop path selection under the maximum-average-received-power rule.
//!
//! Starting at the user, each hop picks, among all nodes of the tiers the
//! current node may attach to, the one whose average received power toward
//! the current node is largest. The walk stops at a core-connected node.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelError, ChannelModel, Tier};
use crate::scenario::{Node, Realization};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssociationError {
    #[error("no path available: {0} has no candidate successor")]
    NoPathAvailable(Tier),
    #[error("empty sample")]
    EmptySample,
    #[error("invalid adjacency rules: {0}")]
    InvalidRules(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Which tiers each tier may attach to on its way to the core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyRules {
    successors: [Vec<Tier>; 6],
    core: Vec<Tier>,
}

impl AdjacencyRules {
    pub fn new(edges: &[(Tier, &[Tier])], core: &[Tier]) -> Result<Self, AssociationError> {
        let mut successors: [Vec<Tier>; 6] = Default::default();
        for (from, to) in edges {
            successors[from.slot()] = to.to_vec();
        }
        let rules = AdjacencyRules { successors, core: core.to_vec() };
        if !rules.is_acyclic() {
            return Err(AssociationError::InvalidRules("tier graph has a cycle".into()));
        }
        Ok(rules)
    }

    /// User -> {TBS, LAP, MDRU}; MDRU -> {TBS, LAP}; LAP -> {TBS}.
    pub fn small_disaster(lap_ideal_backhaul: bool) -> Self {
        let core: &[Tier] = if lap_ideal_backhaul { &[Tier::Tbs, Tier::Lap] } else { &[Tier::Tbs] };
        Self::new(
            &[
                (Tier::User, &[Tier::Tbs, Tier::Lap, Tier::Mdru]),
                (Tier::Mdru, &[Tier::Tbs, Tier::Lap]),
                (Tier::Lap, if lap_ideal_backhaul { &[] } else { &[Tier::Tbs] }),
            ],
            core,
        )
        .expect("acyclic")
    }

    /// User -> {TBS, HAP}; HAP -> {TBS, SAT}.
    pub fn large_disaster() -> Self {
        Self::new(&[(Tier::User, &[Tier::Tbs, Tier::Hap]), (Tier::Hap, &[Tier::Tbs, Tier::Sat])], &[Tier::Tbs, Tier::Sat])
            .expect("acyclic")
    }

    pub fn successors(&self, tier: Tier) -> &[Tier] {
        &self.successors[tier.slot()]
    }

    pub fn is_core(&self, tier: Tier) -> bool {
        self.core.contains(&tier)
    }

    pub fn is_acyclic(&self) -> bool {
        fn visit(rules: &AdjacencyRules, t: Tier, stack: &mut Vec<Tier>) -> bool {
            if stack.contains(&t) {
                return false;
            }
            stack.push(t);
            let ok = rules.successors(t).iter().all(|&s| visit(rules, s, stack));
            stack.pop();
            ok
        }
        Tier::INFRASTRUCTURE.iter().chain([Tier::User].iter()).all(|&t| visit(self, t, &mut Vec::new()))
    }

    /// Every tier sequence from the user to a core tier the rules allow.
    pub fn words(&self) -> Vec<Vec<Tier>> {
        fn walk(rules: &AdjacencyRules, prefix: &mut Vec<Tier>, out: &mut Vec<Vec<Tier>>) {
            let last = *prefix.last().expect("nonempty");
            if last != Tier::User && rules.is_core(last) {
                out.push(prefix.clone());
                return;
            }
            for &s in rules.successors(last) {
                prefix.push(s);
                walk(rules, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, &mut vec![Tier::User], &mut out);
        out
    }

    /// Tiers that transmit toward the user (access band).
    pub fn access_tiers(&self) -> Vec<Tier> {
        self.successors(Tier::User).to_vec()
    }

    /// Tiers that transmit toward infrastructure nodes (backhaul band).
    pub fn backhaul_tiers(&self) -> Vec<Tier> {
        let mut out: Vec<Tier> = Tier::INFRASTRUCTURE.iter().flat_map(|&t| self.successors(t).iter().copied()).collect();
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HopRole {
    Access,
    Backhaul,
}

/// One link of a path. `tx` is the infrastructure-side endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hop {
    pub tx: Node,
    pub rx: Node,
    pub role: HopRole,
}

/// Ordered hops from the user (first hop's `rx`) to a core-connected node.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub hops: Vec<Hop>,
}

impl PathSpec {
    pub fn tiers(&self) -> Vec<Tier> {
        let mut out = vec![Tier::User];
        out.extend(self.hops.iter().map(|h| h.tx.tier));
        out
    }

    pub fn path_type(&self) -> Option<PathType> {
        PathType::from_tiers(&self.tiers())
    }

    pub fn terminus(&self) -> Option<&Node> {
        self.hops.last().map(|h| &h.tx)
    }
}

/// Path shapes of both setups, in output column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PathType {
    UserTbs,
    UserLap,
    UserLapTbs,
    UserMdruTbs,
    UserMdruLap,
    UserMdruLapTbs,
    UserHapTbs,
    UserHapSat,
}

impl PathType {
    pub const ALL: [PathType; 8] = [
        PathType::UserTbs,
        PathType::UserLap,
        PathType::UserLapTbs,
        PathType::UserMdruTbs,
        PathType::UserMdruLap,
        PathType::UserMdruLapTbs,
        PathType::UserHapTbs,
        PathType::UserHapSat,
    ];

    pub fn tiers(self) -> &'static [Tier] {
        use Tier::*;
        match self {
            PathType::UserTbs => &[User, Tbs],
            PathType::UserLap => &[User, Lap],
            PathType::UserLapTbs => &[User, Lap, Tbs],
            PathType::UserMdruTbs => &[User, Mdru, Tbs],
            PathType::UserMdruLap => &[User, Mdru, Lap],
            PathType::UserMdruLapTbs => &[User, Mdru, Lap, Tbs],
            PathType::UserHapTbs => &[User, Hap, Tbs],
            PathType::UserHapSat => &[User, Hap, Sat],
        }
    }

    pub fn from_tiers(tiers: &[Tier]) -> Option<PathType> {
        Self::ALL.into_iter().find(|p| p.tiers() == tiers)
    }

    /// Column label, e.g. `user_mdru_lap_tbs`.
    pub fn label(self) -> String {
        self.tiers().iter().map(|t| t.name()).collect::<Vec<_>>().join("_")
    }
}

/// Greedy per-hop association. Ties go to the lowest node id.
pub fn select_path(real: &Realization, rules: &AdjacencyRules, model: &ChannelModel) -> Result<PathSpec, AssociationError> {
    let mut current = real.user_node();
    let mut hops = Vec::new();
    // Each hop climbs the acyclic tier graph, so this bounds the walk.
    for _ in 0..=Tier::INFRASTRUCTURE.len() {
        if current.tier != Tier::User && current.core_connected {
            return Ok(PathSpec { hops });
        }
        let mut best: Option<(f64, Node)> = None;
        for &tier in rules.successors(current.tier) {
            for cand in real.nodes_of(tier) {
                let power = model.avg_received_power(cand, &current)?;
                let better = match &best {
                    None => true,
                    Some((bp, bn)) => power > *bp || (power == *bp && cand.id < bn.id),
                };
                if better {
                    best = Some((power, *cand));
                }
            }
        }
        let Some((_, next)) = best else {
            return Err(AssociationError::NoPathAvailable(current.tier));
        };
        let role = if current.tier == Tier::User { HopRole::Access } else { HopRole::Backhaul };
        hops.push(Hop { tx: next, rx: current, role });
        current = next;
    }
    Err(AssociationError::InvalidRules("walk did not terminate".into()))
}

/// Integer tallies of selected path types and no-path outages.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCounts {
    pub by_type: [u64; 8],
    pub no_path: u64,
}

impl PathCounts {
    pub fn record(&mut self, outcome: Option<PathType>) {
        match outcome {
            Some(t) => self.by_type[t as usize] += 1,
            None => self.no_path += 1,
        }
    }

    pub fn merge(mut self, other: &PathCounts) -> PathCounts {
        for (a, b) in self.by_type.iter_mut().zip(other.by_type) {
            *a += b;
        }
        self.no_path += other.no_path;
        self
    }

    pub fn total(&self) -> u64 {
        self.by_type.iter().sum::<u64>() + self.no_path
    }

    pub fn shares(&self) -> Result<PathShares, AssociationError> {
        let n = self.total();
        if n == 0 {
            return Err(AssociationError::EmptySample);
        }
        let n = n as f64;
        Ok(PathShares {
            by_type: self.by_type.map(|c| c as f64 / n),
            outage: self.no_path as f64 / n,
        })
    }
}

/// Fraction of trials per path type, plus the no-path bucket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathShares {
    pub by_type: [f64; 8],
    pub outage: f64,
}

impl PathShares {
    pub fn share(&self, t: PathType) -> f64 {
        self.by_type[t as usize]
    }
}

/// `None` entries are trials with no available path.
pub fn path_share_histogram(paths: &[Option<PathType>]) -> Result<PathShares, AssociationError> {
    let mut counts = PathCounts::default();
    for p in paths {
        counts.record(*p);
    }
    counts.shares()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::scenario::{build_realization, ScenarioConfig, TbsLayout, UserPlacement};
    use crate::stream::StreamSeed;

    #[test]
    fn grammar_small() {
        let words = AdjacencyRules::small_disaster(false).words();
        let mut types: Vec<_> = words.iter().map(|w| PathType::from_tiers(w).unwrap()).collect();
        types.sort();
        assert_eq!(
            types,
            vec![PathType::UserTbs, PathType::UserLapTbs, PathType::UserMdruTbs, PathType::UserMdruLapTbs]
        );
        let ideal = AdjacencyRules::small_disaster(true).words();
        assert!(ideal.iter().any(|w| w == &[Tier::User, Tier::Lap]));
        assert!(ideal.iter().any(|w| w == &[Tier::User, Tier::Mdru, Tier::Lap]));
    }

    #[test]
    fn grammar_large() {
        let mut types: Vec<_> =
            AdjacencyRules::large_disaster().words().iter().map(|w| PathType::from_tiers(w).unwrap()).collect();
        types.sort();
        assert_eq!(types, vec![PathType::UserTbs, PathType::UserHapTbs, PathType::UserHapSat]);
    }

    #[test]
    fn cyclic_rules_rejected() {
        let r = AdjacencyRules::new(&[(Tier::User, &[Tier::Mdru]), (Tier::Mdru, &[Tier::Lap]), (Tier::Lap, &[Tier::Mdru])], &[]);
        assert!(r.is_err());
    }

    #[test]
    fn bands() {
        let small = AdjacencyRules::small_disaster(false);
        assert_eq!(small.backhaul_tiers(), vec![Tier::Tbs, Tier::Lap]);
        let large = AdjacencyRules::large_disaster();
        assert_eq!(large.access_tiers(), vec![Tier::Tbs, Tier::Hap]);
        assert_eq!(large.backhaul_tiers(), vec![Tier::Tbs, Tier::Sat]);
    }

    #[test]
    fn nearby_tbs_beats_zenith_lap() {
        let mut cfg = ScenarioConfig::small_disaster(1000.0, 0);
        cfg.user = UserPlacement::FixedRadius(0.0);
        // TBSs must lie outside the disk, so shrink it around a user at the origin.
        cfg.r_d = 50.0;
        cfg.tbs_layout = TbsLayout::Pinned(vec![(100.0, 0.0)]);
        let real = build_realization(&cfg, StreamSeed(1)).unwrap();
        let model = cfg.channel_model().unwrap();
        let path = select_path(&real, &cfg.rules(), &model).unwrap();
        assert_eq!(path.path_type(), Some(PathType::UserTbs));
        assert_eq!(path.hops[0].role, HopRole::Access);
        assert_eq!(path.hops[0].rx.tier, Tier::User);
    }

    #[test]
    fn satellite_only_completion() {
        let mut cfg = ScenarioConfig::large_disaster(5000.0, 10_000.0, 500_000.0, true);
        cfg.tbs_layout = TbsLayout::Pinned(vec![]);
        let real = build_realization(&cfg, StreamSeed(2)).unwrap();
        let path = select_path(&real, &cfg.rules(), &cfg.channel_model().unwrap()).unwrap();
        assert_eq!(path.path_type(), Some(PathType::UserHapSat));
        assert_eq!(path.hops[1].role, HopRole::Backhaul);
        assert!(path.terminus().unwrap().core_connected);
    }

    #[test]
    fn dead_end_lap() {
        let mut cfg = ScenarioConfig::small_disaster(1000.0, 0);
        cfg.tbs_layout = TbsLayout::Pinned(vec![]);
        let real = build_realization(&cfg, StreamSeed(3)).unwrap();
        assert_eq!(
            select_path(&real, &cfg.rules(), &cfg.channel_model().unwrap()),
            Err(AssociationError::NoPathAvailable(Tier::Lap))
        );
    }

    #[test]
    fn ideal_lap_backhaul_stops_at_lap() {
        let mut cfg = ScenarioConfig::small_disaster(1000.0, 0);
        cfg.tbs_layout = TbsLayout::Pinned(vec![]);
        cfg.small_mut().unwrap().lap_ideal_backhaul = true;
        let real = build_realization(&cfg, StreamSeed(3)).unwrap();
        let path = select_path(&real, &cfg.rules(), &cfg.channel_model().unwrap()).unwrap();
        assert_eq!(path.path_type(), Some(PathType::UserLap));
    }

    #[test]
    fn ties_go_to_lowest_id() {
        let mut cfg = ScenarioConfig::small_disaster(100.0, 0);
        cfg.aerial_enabled = false;
        cfg.user = UserPlacement::FixedRadius(0.0);
        cfg.tbs_layout = TbsLayout::Pinned(vec![(0.0, 500.0), (500.0, 0.0), (-500.0, 0.0)]);
        let real = build_realization(&cfg, StreamSeed(4)).unwrap();
        let path = select_path(&real, &cfg.rules(), &cfg.channel_model().unwrap()).unwrap();
        assert_eq!(path.hops[0].tx.position, Point3::ground(0.0, 500.0));
    }

    #[test]
    fn histogram_examples() {
        let all_out = path_share_histogram(&[None, None, None]).unwrap();
        assert_eq!(all_out.outage, 1.0);
        let mixed = path_share_histogram(&[
            Some(PathType::UserTbs),
            Some(PathType::UserTbs),
            Some(PathType::UserTbs),
            Some(PathType::UserHapSat),
        ])
        .unwrap();
        assert_eq!(mixed.share(PathType::UserTbs), 0.75);
        assert_eq!(mixed.share(PathType::UserHapSat), 0.25);
        assert_eq!(mixed.outage, 0.0);
        assert_eq!(path_share_histogram(&[]), Err(AssociationError::EmptySample));
    }

    #[test]
    fn labels() {
        assert_eq!(PathType::UserMdruLapTbs.label(), "user_mdru_lap_tbs");
        assert_eq!(PathType::UserHapSat.label(), "user_hap_sat");
    }
}
