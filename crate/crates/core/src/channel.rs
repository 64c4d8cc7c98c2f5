//! Deterministic link budget: LoS probability, power-law path loss and the
//! average received power that drives association.
//!
//! Path gain is `K * d^-alpha` with `d` in meters and a reference gain `K`
//! (default 1, i.e. unity gain at 1 m). Links that touch a LAP or HAP have a
//! LoS/NLoS exponent pair mixed by an elevation-angle sigmoid.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fading::FadingLaw;
use crate::geometry::{distance3d, elevation_angle, GeometryError, Point3};
use crate::scenario::Node;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("elevation angle {0} deg is outside [0, 90]")]
    AngleOutOfRange(f64),
    #[error("path loss is singular at distance {0} m")]
    ZeroDistance(f64),
    #[error("invalid tier parameters for {tier}: {reason}")]
    InvalidParams { tier: Tier, reason: String },
    #[error("no parameters configured for tier {0}")]
    MissingTier(Tier),
    #[error("invalid LoS model: {0}")]
    InvalidLosModel(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Node tiers, declared in hierarchy order (lowest first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tier {
    User,
    Mdru,
    Tbs,
    Lap,
    Hap,
    Sat,
}

impl Tier {
    pub const INFRASTRUCTURE: [Tier; 5] = [Tier::Mdru, Tier::Tbs, Tier::Lap, Tier::Hap, Tier::Sat];

    pub fn name(self) -> &'static str {
        match self {
            Tier::User => "user",
            Tier::Mdru => "mdru",
            Tier::Tbs => "tbs",
            Tier::Lap => "lap",
            Tier::Hap => "hap",
            Tier::Sat => "sat",
        }
    }

    pub fn from_name(s: &str) -> Option<Tier> {
        match s.to_ascii_lowercase().as_str() {
            "user" => Some(Tier::User),
            "mdru" => Some(Tier::Mdru),
            "tbs" => Some(Tier::Tbs),
            "lap" => Some(Tier::Lap),
            "hap" => Some(Tier::Hap),
            "sat" | "satellite" => Some(Tier::Sat),
            _ => None,
        }
    }

    /// Aerial platforms whose ground links switch between LoS and NLoS.
    pub fn has_los_split(self) -> bool {
        matches!(self, Tier::Lap | Tier::Hap)
    }

    pub(crate) fn slot(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Link-budget parameters of one tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierParams {
    pub tier: Tier,
    /// Watts.
    pub tx_power: f64,
    pub alpha_los: f64,
    /// Equal to `alpha_los` for tiers without a LoS/NLoS split.
    pub alpha_nlos: f64,
    pub nakagami_m: f64,
    /// Meters; 0 for ground tiers.
    pub altitude: f64,
}

impl TierParams {
    pub fn ground(tier: Tier, tx_power: f64, alpha: f64, nakagami_m: f64) -> Self {
        TierParams { tier, tx_power, alpha_los: alpha, alpha_nlos: alpha, nakagami_m, altitude: 0.0 }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |reason: String| Err(ChannelError::InvalidParams { tier: self.tier, reason });
        if self.tier == Tier::User {
            return bad("users do not carry tier parameters".into());
        }
        if !(self.tx_power > 0.0 && self.tx_power.is_finite()) {
            return bad(format!("tx_power must be > 0, got {}", self.tx_power));
        }
        if !(self.alpha_los >= 2.0 && self.alpha_los.is_finite()) {
            return bad(format!("alpha_los must be >= 2, got {}", self.alpha_los));
        }
        if !(self.alpha_nlos >= self.alpha_los && self.alpha_nlos.is_finite()) {
            return bad(format!("alpha_nlos ({}) must be >= alpha_los ({})", self.alpha_nlos, self.alpha_los));
        }
        if !self.tier.has_los_split() && self.alpha_nlos != self.alpha_los {
            return bad("tier has no LoS/NLoS split; alpha_nlos must equal alpha_los".into());
        }
        if !(self.nakagami_m >= 0.5 && self.nakagami_m.is_finite()) {
            return bad(format!("nakagami_m must be >= 0.5, got {}", self.nakagami_m));
        }
        let aerial = matches!(self.tier, Tier::Lap | Tier::Hap | Tier::Sat);
        if aerial && !(self.altitude > 0.0 && self.altitude.is_finite()) {
            return bad(format!("altitude must be > 0, got {}", self.altitude));
        }
        if !aerial && self.altitude != 0.0 {
            return bad("ground tiers sit at altitude 0".into());
        }
        Ok(())
    }
}

/// Elevation-angle sigmoid `P = 1 / (1 + a exp(-b (theta - a)))`, theta in degrees.
///
/// The urban constants (a = 9.61, b = 0.16) come from the widely used
/// closed-form air-to-ground LoS fit for urban environments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosModel {
    pub a: f64,
    pub b: f64,
    pub environment: String,
}

impl LosModel {
    pub fn urban() -> Self {
        LosModel { a: 9.61, b: 0.16, environment: "urban".into() }
    }

    pub fn new(a: f64, b: f64, environment: impl Into<String>) -> Result<Self, ChannelError> {
        let m = LosModel { a, b, environment: environment.into() };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.a > 0.0 && self.a.is_finite() && self.b > 0.0 && self.b.is_finite()) {
            return Err(ChannelError::InvalidLosModel(format!("a = {}, b = {} must both be > 0", self.a, self.b)));
        }
        Ok(())
    }
}

impl Default for LosModel {
    fn default() -> Self {
        Self::urban()
    }
}

pub fn los_probability(model: &LosModel, theta_deg: f64) -> Result<f64, ChannelError> {
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(ChannelError::AngleOutOfRange(theta_deg));
    }
    Ok(1.0 / (1.0 + model.a * (-model.b * (theta_deg - model.a)).exp()))
}

/// `d^-alpha`.
pub fn path_loss_gain(alpha: f64, d: f64) -> Result<f64, ChannelError> {
    if d.is_nan() || d <= 0.0 {
        return Err(ChannelError::ZeroDistance(d));
    }
    Ok(d.powf(-alpha))
}

/// Tier whose exponents, fading and power rules govern a link between `a` and `b`:
/// the endpoint highest in SAT > HAP > LAP > TBS > MDRU > User.
pub fn link_class(a: Tier, b: Tier) -> Tier {
    a.max(b)
}

/// Replaces the hierarchy rule for one unordered tier pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassOverride {
    pub a: Tier,
    pub b: Tier,
    pub class: Tier,
}

impl ClassOverride {
    fn matches(&self, a: Tier, b: Tier) -> bool {
        (self.a == a && self.b == b) || (self.a == b && self.b == a)
    }
}

/// Distance and (for split links) elevation of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub class: Tier,
    /// Clamped to the model's minimum link distance.
    pub distance: f64,
    pub los_probability: Option<f64>,
}

/// Everything needed to evaluate mean and instantaneous link gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    params: [Option<TierParams>; 6],
    pub los: LosModel,
    pub reference_gain: f64,
    pub min_distance: f64,
    pub overrides: Vec<ClassOverride>,
    /// Fading law used for satellite-class links instead of Nakagami.
    pub sat_fading: Option<FadingLaw>,
}

impl ChannelModel {
    pub fn new(tiers: impl IntoIterator<Item = TierParams>, los: LosModel) -> Result<Self, ChannelError> {
        los.validate()?;
        let mut params = [None; 6];
        for p in tiers {
            p.validate()?;
            params[p.tier.slot()] = Some(p);
        }
        Ok(ChannelModel {
            params,
            los,
            reference_gain: 1.0,
            min_distance: 1.0,
            overrides: Vec::new(),
            sat_fading: None,
        })
    }

    pub fn params(&self, tier: Tier) -> Result<&TierParams, ChannelError> {
        self.params[tier.slot()].as_ref().ok_or(ChannelError::MissingTier(tier))
    }

    pub fn tx_power(&self, tier: Tier) -> Result<f64, ChannelError> {
        Ok(self.params(tier)?.tx_power)
    }

    /// Scales every configured transmit power by `factor`.
    pub fn scale_powers(&mut self, factor: f64) {
        for p in self.params.iter_mut().flatten() {
            p.tx_power *= factor;
        }
    }

    pub fn link_class(&self, a: Tier, b: Tier) -> Tier {
        self.overrides
            .iter()
            .find(|o| o.matches(a, b))
            .map(|o| o.class)
            .unwrap_or_else(|| link_class(a, b))
    }

    pub fn geometry(&self, a: &Node, b: &Node) -> Result<LinkGeometry, ChannelError> {
        let class = self.link_class(a.tier, b.tier);
        let distance = distance3d(&a.position, &b.position).max(self.min_distance);
        let los_probability = if class.has_los_split() {
            let (ground, aerial) = lower_upper(&a.position, &b.position);
            let theta = if aerial.z > ground.z { elevation_angle(ground, aerial)? } else { 0.0 };
            Some(los_probability(&self.los, theta)?)
        } else {
            None
        };
        Ok(LinkGeometry { class, distance, los_probability })
    }

    /// Gain of the link in a given LoS state; links without a split ignore `los`.
    pub fn state_gain(&self, geom: &LinkGeometry, los: bool) -> Result<f64, ChannelError> {
        let p = self.params(geom.class)?;
        let alpha = if los || geom.los_probability.is_none() { p.alpha_los } else { p.alpha_nlos };
        Ok(self.reference_gain * path_loss_gain(alpha, geom.distance)?)
    }

    /// Path gain averaged over the LoS state (fading has unit mean).
    pub fn mean_gain(&self, geom: &LinkGeometry) -> Result<f64, ChannelError> {
        match geom.los_probability {
            None => self.state_gain(geom, true),
            Some(p_los) => {
                let los = self.state_gain(geom, true)?;
                let nlos = self.state_gain(geom, false)?;
                Ok(p_los * los + (1.0 - p_los) * nlos)
            }
        }
    }

    /// Average power received at `rx` from `tx`, in watts.
    pub fn avg_received_power(&self, tx: &Node, rx: &Node) -> Result<f64, ChannelError> {
        let geom = self.geometry(tx, rx)?;
        Ok(self.tx_power(tx.tier)? * self.mean_gain(&geom)?)
    }

    /// Small-scale fading law for links of `class`.
    pub fn fading_law(&self, class: Tier) -> Result<FadingLaw, ChannelError> {
        if class == Tier::Sat {
            if let Some(law) = self.sat_fading {
                return Ok(law);
            }
        }
        Ok(FadingLaw::Nakagami { m: self.params(class)?.nakagami_m })
    }
}

fn lower_upper<'a>(a: &'a Point3, b: &'a Point3) -> (&'a Point3, &'a Point3) {
    if a.z <= b.z {
        (a, b)
    } else {
        (b, a)
    }
}
