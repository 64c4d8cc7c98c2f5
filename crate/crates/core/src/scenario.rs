//! Scenario configuration and per-trial network realizations.
//!
//! Setup A (small disaster) places one LAP above the epicenter and `n_m`
//! MDRUs inside the disaster disk. Setup B (large disaster) places one HAP
//! above the epicenter and optionally one satellite. Both keep the
//! functional TBSs that surround the disk out to `r_d + 3 km`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::association::AdjacencyRules;
use crate::channel::{ChannelError, ChannelModel, ClassOverride, LosModel, Tier, TierParams};
use crate::fading::{FadingError, FadingLaw, ShadowedRicianParams};
use crate::geometry::{sample_tbs_field, sample_uniform_disk, DiskRegion, FieldCount, GeometryError, Point3};
use crate::montecarlo::CiMethod;
use crate::sinr::PolicyMode;
use crate::stream::StreamSeed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("builder for {expected:?} called with a {found:?} config")]
    SetupMismatch { expected: Setup, found: Setup },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Fading(#[from] FadingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setup {
    SmallDisaster,
    LargeDisaster,
}

impl Setup {
    pub fn name(self) -> &'static str {
        match self {
            Setup::SmallDisaster => "small",
            Setup::LargeDisaster => "large",
        }
    }
}

/// Which law the HAP-satellite link fades with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SatFading {
    #[default]
    ShadowedRician,
    Nakagami,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallDisasterParams {
    pub n_m: usize,
    pub mdru: TierParams,
    /// `lap.altitude` is h_L.
    pub lap: TierParams,
    /// Treat the LAP as core-connected (literal "user-LAP" path).
    pub lap_ideal_backhaul: bool,
}

impl Default for SmallDisasterParams {
    fn default() -> Self {
        SmallDisasterParams {
            n_m: 0,
            mdru: TierParams::ground(Tier::Mdru, 10.0, 3.0, 1.0),
            lap: TierParams { tier: Tier::Lap, tx_power: 3.0, alpha_los: 2.5, alpha_nlos: 3.0, nakagami_m: 2.0, altitude: 200.0 },
            lap_ideal_backhaul: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeDisasterParams {
    /// `hap.altitude` is h_H.
    pub hap: TierParams,
    /// `sat.altitude` is h_S.
    pub sat: TierParams,
    pub satellite_enabled: bool,
    pub sat_fading: SatFading,
    pub shadowed_rician: ShadowedRicianParams,
}

/// Lower of the two default HAP altitudes, meters.
pub const HAP_ALTITUDES: [f64; 2] = [10_000.0, 20_000.0];
/// Default satellite altitudes, meters.
pub const SAT_ALTITUDES: [f64; 2] = [500_000.0, 1_500_000.0];

impl Default for LargeDisasterParams {
    fn default() -> Self {
        LargeDisasterParams {
            hap: TierParams { tier: Tier::Hap, tx_power: 20.0, alpha_los: 2.2, alpha_nlos: 3.0, nakagami_m: 3.0, altitude: HAP_ALTITUDES[0] },
            sat: TierParams { tier: Tier::Sat, tx_power: 1000.0, alpha_los: 2.0, alpha_nlos: 2.0, nakagami_m: 3.0, altitude: SAT_ALTITUDES[0] },
            satellite_enabled: true,
            sat_fading: SatFading::ShadowedRician,
            shadowed_rician: ShadowedRicianParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SetupParams {
    Small(SmallDisasterParams),
    Large(LargeDisasterParams),
}

/// Where the functional TBSs come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TbsLayout {
    /// Sampled over the annulus `r_d < |p| <= r_d + margin`.
    Field(FieldCount),
    /// Fixed ground positions (diagnostic runs). Every position must lie outside the disaster disk.
    Pinned(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum UserPlacement {
    /// Uniform over the disaster disk, resampled every realization.
    Uniform,
    /// At a fixed distance from the epicenter with a random bearing.
    FixedRadius(f64),
}

/// Full description of one coverage experiment. Defaults are the reference scenario values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub setup: SetupParams,
    /// Disaster radius, meters.
    pub r_d: f64,
    /// `r_s - r_d`, meters.
    pub r_s_margin: f64,
    pub tbs: TierParams,
    pub tbs_density_per_km2: f64,
    pub tbs_layout: TbsLayout,
    /// Deploy the LAP (Setup A) or HAP (Setup B).
    pub aerial_enabled: bool,
    pub los: LosModel,
    pub reference_gain: f64,
    pub min_link_distance: f64,
    pub class_overrides: Vec<ClassOverride>,
    pub policy: PolicyMode,
    pub tau_access: f64,
    pub tau_backhaul: f64,
    /// Watts.
    pub noise: f64,
    pub n_realizations: u64,
    pub seed: u64,
    pub user: UserPlacement,
    pub ci_method: CiMethod,
}

impl ScenarioConfig {
    pub fn new(setup: Setup, r_d: f64) -> Self {
        let setup = match setup {
            Setup::SmallDisaster => SetupParams::Small(SmallDisasterParams::default()),
            Setup::LargeDisaster => SetupParams::Large(LargeDisasterParams::default()),
        };
        ScenarioConfig {
            setup,
            r_d,
            r_s_margin: 3000.0,
            tbs: TierParams::ground(Tier::Tbs, 10.0, 2.9, 1.0),
            tbs_density_per_km2: 10.0,
            tbs_layout: TbsLayout::Field(FieldCount::Poisson),
            aerial_enabled: true,
            los: LosModel::urban(),
            reference_gain: 1.0,
            min_link_distance: 1.0,
            class_overrides: Vec::new(),
            policy: PolicyMode::SameTier,
            tau_access: 0.1,
            tau_backhaul: 0.2,
            noise: 1e-12,
            n_realizations: 20_000,
            seed: 1,
            user: UserPlacement::Uniform,
            ci_method: CiMethod::Normal,
        }
    }

    pub fn small_disaster(r_d: f64, n_m: usize) -> Self {
        let mut cfg = Self::new(Setup::SmallDisaster, r_d);
        if let SetupParams::Small(s) = &mut cfg.setup {
            s.n_m = n_m;
        }
        cfg
    }

    pub fn large_disaster(r_d: f64, h_h: f64, h_s: f64, satellite_enabled: bool) -> Self {
        let mut cfg = Self::new(Setup::LargeDisaster, r_d);
        if let SetupParams::Large(l) = &mut cfg.setup {
            l.hap.altitude = h_h;
            l.sat.altitude = h_s;
            l.satellite_enabled = satellite_enabled;
        }
        cfg
    }

    pub fn setup_kind(&self) -> Setup {
        match self.setup {
            SetupParams::Small(_) => Setup::SmallDisaster,
            SetupParams::Large(_) => Setup::LargeDisaster,
        }
    }

    pub fn small(&self) -> Option<&SmallDisasterParams> {
        match &self.setup {
            SetupParams::Small(s) => Some(s),
            SetupParams::Large(_) => None,
        }
    }

    pub fn large(&self) -> Option<&LargeDisasterParams> {
        match &self.setup {
            SetupParams::Large(l) => Some(l),
            SetupParams::Small(_) => None,
        }
    }

    pub fn small_mut(&mut self) -> Option<&mut SmallDisasterParams> {
        match &mut self.setup {
            SetupParams::Small(s) => Some(s),
            SetupParams::Large(_) => None,
        }
    }

    pub fn large_mut(&mut self) -> Option<&mut LargeDisasterParams> {
        match &mut self.setup {
            SetupParams::Large(l) => Some(l),
            SetupParams::Small(_) => None,
        }
    }

    pub fn r_s(&self) -> f64 {
        self.r_d + self.r_s_margin
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |msg: String| Err(ScenarioError::InvalidConfig(msg));
        if !(self.r_d > 0.0 && self.r_d.is_finite()) {
            return bad(format!("r_d must be > 0, got {}", self.r_d));
        }
        if !(self.r_s_margin > 0.0 && self.r_s_margin.is_finite()) {
            return bad(format!("r_s margin must be > 0, got {}", self.r_s_margin));
        }
        if !(self.tbs_density_per_km2 > 0.0 && self.tbs_density_per_km2.is_finite()) {
            return bad(format!("TBS density must be > 0, got {}", self.tbs_density_per_km2));
        }
        if let TbsLayout::Pinned(points) = &self.tbs_layout {
            for &(x, y) in points {
                if !(x.is_finite() && y.is_finite()) || x.hypot(y) <= self.r_d {
                    return bad(format!("pinned TBS ({x}, {y}) must lie outside the disaster disk"));
                }
            }
        }
        if let UserPlacement::FixedRadius(r) = self.user {
            if !(0.0..=self.r_d).contains(&r) {
                return bad(format!("fixed user radius {r} must lie in [0, r_d]"));
            }
        }
        for (name, v) in [("tau_access", self.tau_access), ("tau_backhaul", self.tau_backhaul)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0, got {v}"));
            }
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad(format!("noise power must be >= 0, got {}", self.noise));
        }
        if !(self.reference_gain > 0.0 && self.reference_gain.is_finite()) {
            return bad(format!("reference gain must be > 0, got {}", self.reference_gain));
        }
        if !(self.min_link_distance > 0.0 && self.min_link_distance.is_finite()) {
            return bad(format!("minimum link distance must be > 0, got {}", self.min_link_distance));
        }
        if self.n_realizations == 0 {
            return bad("realization count must be >= 1".into());
        }
        for o in &self.class_overrides {
            if o.class != o.a && o.class != o.b {
                return bad(format!("override class {} must be one of the pair {}-{}", o.class, o.a, o.b));
            }
        }
        self.tbs.validate()?;
        self.los.validate()?;
        match &self.setup {
            SetupParams::Small(s) => {
                s.mdru.validate()?;
                s.lap.validate()?;
            }
            SetupParams::Large(l) => {
                l.hap.validate()?;
                l.sat.validate()?;
                l.shadowed_rician.validate()?;
                if l.sat.altitude <= l.hap.altitude {
                    return bad("satellite altitude must exceed HAP altitude".into());
                }
            }
        }
        Ok(())
    }

    pub fn channel_model(&self) -> Result<ChannelModel, ScenarioError> {
        let mut tiers = vec![self.tbs];
        match &self.setup {
            SetupParams::Small(s) => tiers.extend([s.mdru, s.lap]),
            SetupParams::Large(l) => tiers.extend([l.hap, l.sat]),
        }
        let mut model = ChannelModel::new(tiers, self.los.clone())?;
        model.reference_gain = self.reference_gain;
        model.min_distance = self.min_link_distance;
        model.overrides = self.class_overrides.clone();
        if let SetupParams::Large(l) = &self.setup {
            if l.sat_fading == SatFading::ShadowedRician {
                model.sat_fading = Some(FadingLaw::ShadowedRician(l.shadowed_rician));
            }
        }
        Ok(model)
    }

    pub fn rules(&self) -> AdjacencyRules {
        match &self.setup {
            SetupParams::Small(s) => AdjacencyRules::small_disaster(s.lap_ideal_backhaul),
            SetupParams::Large(_) => AdjacencyRules::large_disaster(),
        }
    }
}

/// A transmitter/receiver in one realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Position in the realization's node list; used for tie-breaking.
    pub id: u32,
    pub tier: Tier,
    /// Position among nodes of the same tier; keys the per-link random draws.
    pub index: u32,
    pub position: Point3,
    pub core_connected: bool,
}

/// Sampled LoS state and fading power gain of one directed link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub los: bool,
    pub gain: f64,
}

/// One sampled network instance.
///
/// The per-link LoS states and fading gains are a pure function of the
/// realization's link seed and the two endpoints, so every link the SINR
/// engine consumes has exactly one state no matter how often, or in which
/// order, it is queried.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    nodes: Vec<Node>,
    tier_ranges: [(usize, usize); 6],
    pub user: Point3,
    link_seed: StreamSeed,
}

const STREAM_TBS: u64 = 1;
const STREAM_MDRU: u64 = 2;
const STREAM_USER: u64 = 3;
const STREAM_LINKS: u64 = 4;

impl Realization {
    fn from_groups(groups: Vec<(Tier, Vec<Point3>, bool)>, user: Point3, seed: StreamSeed) -> Self {
        let mut nodes = Vec::new();
        let mut tier_ranges = [(0, 0); 6];
        for (tier, points, core) in groups {
            let start = nodes.len();
            for (index, position) in points.into_iter().enumerate() {
                nodes.push(Node { id: nodes.len() as u32, tier, index: index as u32, position, core_connected: core });
            }
            tier_ranges[tier.slot()] = (start, nodes.len());
        }
        Realization { nodes, tier_ranges, user, link_seed: seed.child(STREAM_LINKS) }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn nodes_of(&self, tier: Tier) -> &[Node] {
        let (a, b) = self.tier_ranges[tier.slot()];
        &self.nodes[a..b]
    }

    pub fn count(&self, tier: Tier) -> usize {
        self.nodes_of(tier).len()
    }

    pub fn user_node(&self) -> Node {
        Node { id: u32::MAX, tier: Tier::User, index: 0, position: self.user, core_connected: false }
    }

    /// LoS state and fading gain of the link from `tx` to `rx`.
    pub fn link_state(&self, model: &ChannelModel, tx: &Node, rx: &Node) -> Result<LinkState, ScenarioError> {
        let geom = model.geometry(tx, rx)?;
        self.link_state_with(model, tx, rx, geom.los_probability)
    }

    pub(crate) fn link_state_with(
        &self,
        model: &ChannelModel,
        tx: &Node,
        rx: &Node,
        los_probability: Option<f64>,
    ) -> Result<LinkState, ScenarioError> {
        let key = (tx.tier.slot() as u64) << 60 | (tx.index as u64) << 32 | (rx.tier.slot() as u64) << 28 | rx.index as u64;
        let mut rng = self.link_seed.child(key).keyed();
        let u: f64 = rng.random();
        let los = los_probability.is_none_or(|p| u < p);
        let class = model.link_class(tx.tier, rx.tier);
        let gain = model.fading_law(class)?.sample(&mut rng)?;
        Ok(LinkState { los, gain })
    }
}

fn place_user<R: Rng + ?Sized>(rng: &mut R, disk: &DiskRegion, placement: UserPlacement) -> Point3 {
    match placement {
        UserPlacement::Uniform => sample_uniform_disk(rng, disk, 1)[0],
        UserPlacement::FixedRadius(r) => {
            let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            Point3::ground(r * phi.cos(), r * phi.sin())
        }
    }
}

fn tbs_positions(cfg: &ScenarioConfig, seed: StreamSeed) -> Result<Vec<Point3>, ScenarioError> {
    match &cfg.tbs_layout {
        TbsLayout::Field(count) => {
            let mut rng = seed.child(STREAM_TBS).rng();
            Ok(sample_tbs_field(&mut rng, cfg.r_d, cfg.r_s(), cfg.tbs_density_per_km2, *count)?)
        }
        TbsLayout::Pinned(points) => Ok(points.iter().map(|&(x, y)| Point3::ground(x, y)).collect()),
    }
}

/// One Setup-A realization: LAP at (0, 0, h_L), `n_m` MDRUs and the user uniform in the disk.
pub fn build_small_disaster(cfg: &ScenarioConfig, seed: StreamSeed) -> Result<Realization, ScenarioError> {
    let SetupParams::Small(small) = &cfg.setup else {
        return Err(ScenarioError::SetupMismatch { expected: Setup::SmallDisaster, found: cfg.setup_kind() });
    };
    cfg.validate()?;
    let disk = DiskRegion::centered(cfg.r_d)?;
    let lap = if cfg.aerial_enabled { vec![Point3::above_origin(small.lap.altitude)] } else { vec![] };
    let tbs = tbs_positions(cfg, seed)?;
    let mdru = sample_uniform_disk(&mut seed.child(STREAM_MDRU).rng(), &disk, small.n_m);
    let user = place_user(&mut seed.child(STREAM_USER).rng(), &disk, cfg.user);
    Ok(Realization::from_groups(
        vec![(Tier::Lap, lap, small.lap_ideal_backhaul), (Tier::Tbs, tbs, true), (Tier::Mdru, mdru, false)],
        user,
        seed,
    ))
}

/// One Setup-B realization: HAP at (0, 0, h_H) and, when enabled, the satellite at (0, 0, h_S).
pub fn build_large_disaster(cfg: &ScenarioConfig, seed: StreamSeed) -> Result<Realization, ScenarioError> {
    let SetupParams::Large(large) = &cfg.setup else {
        return Err(ScenarioError::SetupMismatch { expected: Setup::LargeDisaster, found: cfg.setup_kind() });
    };
    cfg.validate()?;
    let disk = DiskRegion::centered(cfg.r_d)?;
    let hap = if cfg.aerial_enabled { vec![Point3::above_origin(large.hap.altitude)] } else { vec![] };
    let sat = if large.satellite_enabled { vec![Point3::above_origin(large.sat.altitude)] } else { vec![] };
    let tbs = tbs_positions(cfg, seed)?;
    let user = place_user(&mut seed.child(STREAM_USER).rng(), &disk, cfg.user);
    Ok(Realization::from_groups(
        vec![(Tier::Hap, hap, false), (Tier::Sat, sat, true), (Tier::Tbs, tbs, true)],
        user,
        seed,
    ))
}

pub fn build_realization(cfg: &ScenarioConfig, seed: StreamSeed) -> Result<Realization, ScenarioError> {
    match cfg.setup_kind() {
        Setup::SmallDisaster => build_small_disaster(cfg, seed),
        Setup::LargeDisaster => build_large_disaster(cfg, seed),
    }
}
