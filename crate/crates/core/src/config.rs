//! Flat `key = value` configuration documents.
//!
//! One key per line, `#` starts a comment. Absent keys keep the reference
//! defaults. Keys that only make sense for the other setup are rejected.
//! [`render_config`] writes every key, so `parse_config(render_config(c)) == c`.

use std::fmt;

use thiserror::Error;

use crate::channel::{ClassOverride, Tier};
use crate::geometry::FieldCount;
use crate::montecarlo::CiMethod;
use crate::scenario::{SatFading, ScenarioConfig, Setup, SetupParams, TbsLayout, UserPlacement};
use crate::sinr::PolicyMode;

/// Source line of a setting; `None` for command-line overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line(pub Option<usize>);

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(n) => write!(f, "line {n}"),
            None => f.write_str("override"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{line}: malformed entry `{text}` (expected `key = value`)")]
    Syntax { line: Line, text: String },
    #[error("{line}: unknown key `{key}`")]
    UnknownKey { key: String, line: Line },
    #[error("{line}: duplicate key `{key}`")]
    Duplicate { key: String, line: Line },
    #[error("{line}: `{key}` expects {expected}, got `{value}`")]
    TypeMismatch { key: String, line: Line, expected: &'static str, value: String },
    #[error("{line}: `{key}` {reason}")]
    Constraint { key: String, line: Line, reason: String },
    #[error("{line}: `{key}` does not apply to the {setup} setup")]
    SetupMismatch { key: String, line: Line, setup: &'static str },
}

impl ConfigError {
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Syntax { .. } => None,
            ConfigError::UnknownKey { key, .. }
            | ConfigError::Duplicate { key, .. }
            | ConfigError::TypeMismatch { key, .. }
            | ConfigError::Constraint { key, .. }
            | ConfigError::SetupMismatch { key, .. } => Some(key),
        }
    }
}

/// Failure of a single assignment, before key and line are attached.
#[derive(Debug, Clone, PartialEq)]
pub enum KeyError {
    Unknown,
    Type(&'static str),
    Constraint(String),
    SetupMismatch(Setup),
}

impl KeyError {
    pub fn at(self, key: &str, value: &str, line: Line) -> ConfigError {
        let key = key.to_string();
        match self {
            KeyError::Unknown => ConfigError::UnknownKey { key, line },
            KeyError::Type(expected) => ConfigError::TypeMismatch { key, line, expected, value: value.to_string() },
            KeyError::Constraint(reason) => ConfigError::Constraint { key, line, reason },
            KeyError::SetupMismatch(s) => ConfigError::SetupMismatch { key, line, setup: s.name() },
        }
    }
}

const COMMON_KEYS: &[&str] = &[
    "r_d_m",
    "r_s_margin_m",
    "tbs_density_per_km2",
    "tbs_layout",
    "p_t_w",
    "alpha_t",
    "m_t",
    "aerial",
    "los_a",
    "los_b",
    "los_environment",
    "reference_gain",
    "min_link_distance_m",
    "link_class_override",
    "policy",
    "tau_access",
    "tau_backhaul",
    "noise_w",
    "n_real",
    "seed",
    "user_radius_m",
    "ci_method",
];

const SMALL_KEYS: &[&str] =
    &["n_m", "h_l_m", "p_m_w", "p_l_w", "alpha_m", "alpha_l_los", "alpha_l_nlos", "m_m", "m_l", "lap_ideal_backhaul"];

const LARGE_KEYS: &[&str] = &[
    "h_h_m",
    "h_s_m",
    "satellite",
    "p_h_w",
    "p_s_w",
    "alpha_h_los",
    "alpha_h_nlos",
    "alpha_s",
    "m_h",
    "m_s",
    "sat_fading",
    "sr_b0",
    "sr_m",
    "sr_omega",
];

/// Every recognized key, `setup` first.
pub fn all_keys() -> impl Iterator<Item = &'static str> {
    ["setup"].into_iter().chain(COMMON_KEYS.iter().copied()).chain(SMALL_KEYS.iter().copied()).chain(LARGE_KEYS.iter().copied())
}

pub fn parse_setup(value: &str) -> Option<Setup> {
    match value {
        "small" => Some(Setup::SmallDisaster),
        "large" => Some(Setup::LargeDisaster),
        _ => None,
    }
}

fn float(v: &str) -> Result<f64, KeyError> {
    v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or(KeyError::Type("a finite number"))
}

fn positive(v: &str) -> Result<f64, KeyError> {
    let x = float(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(KeyError::Constraint(format!("must be > 0, got {x}")))
    }
}

fn exponent(v: &str) -> Result<f64, KeyError> {
    let x = float(v)?;
    if x >= 2.0 {
        Ok(x)
    } else {
        Err(KeyError::Constraint(format!("path-loss exponent must be >= 2, got {x}")))
    }
}

fn shape(v: &str) -> Result<f64, KeyError> {
    let x = float(v)?;
    if x >= 0.5 {
        Ok(x)
    } else {
        Err(KeyError::Constraint(format!("Nakagami shape must be >= 0.5, got {x}")))
    }
}

fn boolean(v: &str) -> Result<bool, KeyError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(KeyError::Type("`true` or `false`")),
    }
}

fn unsigned(v: &str) -> Result<u64, KeyError> {
    v.parse::<u64>().map_err(|_| KeyError::Type("a non-negative integer"))
}

fn tbs_layout(v: &str) -> Result<TbsLayout, KeyError> {
    const EXPECTED: &str = "`poisson`, `fixed_count` or `pinned: x,y; x,y ...`";
    match v {
        "poisson" => return Ok(TbsLayout::Field(FieldCount::Poisson)),
        "fixed_count" => return Ok(TbsLayout::Field(FieldCount::Fixed)),
        _ => {}
    }
    let rest = v.strip_prefix("pinned:").ok_or(KeyError::Type(EXPECTED))?;
    let mut points = Vec::new();
    for pair in rest.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (x, y) = pair.split_once(',').ok_or(KeyError::Type(EXPECTED))?;
        points.push((float(x.trim())?, float(y.trim())?));
    }
    Ok(TbsLayout::Pinned(points))
}

fn overrides(v: &str) -> Result<Vec<ClassOverride>, KeyError> {
    const EXPECTED: &str = "a list like `mdru-lap:mdru, tbs-hap:tbs`";
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (pair, class) = item.split_once(':').ok_or(KeyError::Type(EXPECTED))?;
        let (a, b) = pair.split_once('-').ok_or(KeyError::Type(EXPECTED))?;
        let tier = |s: &str| Tier::from_name(s.trim()).ok_or(KeyError::Type(EXPECTED));
        let o = ClassOverride { a: tier(a)?, b: tier(b)?, class: tier(class)? };
        if o.class != o.a && o.class != o.b {
            return Err(KeyError::Constraint(format!("override class {} must be one of {} and {}", o.class, o.a, o.b)));
        }
        out.push(o);
    }
    Ok(out)
}

/// Assigns one key. Only single-value constraints are checked here.
pub fn set_key(cfg: &mut ScenarioConfig, key: &str, value: &str) -> Result<(), KeyError> {
    let setup = cfg.setup_kind();
    if SMALL_KEYS.contains(&key) && setup != Setup::SmallDisaster || LARGE_KEYS.contains(&key) && setup != Setup::LargeDisaster {
        return Err(KeyError::SetupMismatch(setup));
    }
    match key {
        "setup" => {
            let s = parse_setup(value).ok_or(KeyError::Type("`small` or `large`"))?;
            if s != setup {
                return Err(KeyError::Constraint("the setup cannot change after other keys are applied".into()));
            }
        }
        "r_d_m" => cfg.r_d = positive(value)?,
        "r_s_margin_m" => cfg.r_s_margin = positive(value)?,
        "tbs_density_per_km2" => cfg.tbs_density_per_km2 = positive(value)?,
        "tbs_layout" => cfg.tbs_layout = tbs_layout(value)?,
        "p_t_w" => cfg.tbs.tx_power = positive(value)?,
        "alpha_t" => {
            let a = exponent(value)?;
            cfg.tbs.alpha_los = a;
            cfg.tbs.alpha_nlos = a;
        }
        "m_t" => cfg.tbs.nakagami_m = shape(value)?,
        "aerial" => cfg.aerial_enabled = boolean(value)?,
        "los_a" => cfg.los.a = positive(value)?,
        "los_b" => cfg.los.b = positive(value)?,
        "los_environment" => {
            if value.is_empty() {
                return Err(KeyError::Type("a non-empty label"));
            }
            cfg.los.environment = value.to_string();
        }
        "reference_gain" => cfg.reference_gain = positive(value)?,
        "min_link_distance_m" => cfg.min_link_distance = positive(value)?,
        "link_class_override" => cfg.class_overrides = overrides(value)?,
        "policy" => cfg.policy = PolicyMode::from_name(value).ok_or(KeyError::Type("`none`, `same_tier` or `all_tier`"))?,
        "tau_access" => cfg.tau_access = positive(value)?,
        "tau_backhaul" => cfg.tau_backhaul = positive(value)?,
        "noise_w" => {
            let x = float(value)?;
            if x < 0.0 {
                return Err(KeyError::Constraint(format!("must be >= 0, got {x}")));
            }
            cfg.noise = x;
        }
        "n_real" => {
            let n = unsigned(value)?;
            if n == 0 {
                return Err(KeyError::Constraint("must be >= 1".into()));
            }
            cfg.n_realizations = n;
        }
        "seed" => cfg.seed = unsigned(value)?,
        "user_radius_m" => {
            cfg.user = if value == "uniform" {
                UserPlacement::Uniform
            } else {
                let r = float(value).map_err(|_| KeyError::Type("`uniform` or a radius in meters"))?;
                if r < 0.0 {
                    return Err(KeyError::Constraint(format!("must be >= 0, got {r}")));
                }
                UserPlacement::FixedRadius(r)
            }
        }
        "ci_method" => cfg.ci_method = CiMethod::from_name(value).ok_or(KeyError::Type("`normal` or `clopper_pearson`"))?,
        _ => return set_setup_key(&mut cfg.setup, key, value),
    }
    Ok(())
}

fn set_setup_key(setup: &mut SetupParams, key: &str, value: &str) -> Result<(), KeyError> {
    match setup {
        SetupParams::Small(s) => match key {
            "n_m" => s.n_m = usize::try_from(unsigned(value)?).map_err(|_| KeyError::Constraint("too large".into()))?,
            "h_l_m" => s.lap.altitude = positive(value)?,
            "p_m_w" => s.mdru.tx_power = positive(value)?,
            "p_l_w" => s.lap.tx_power = positive(value)?,
            "alpha_m" => {
                let a = exponent(value)?;
                s.mdru.alpha_los = a;
                s.mdru.alpha_nlos = a;
            }
            "alpha_l_los" => s.lap.alpha_los = exponent(value)?,
            "alpha_l_nlos" => s.lap.alpha_nlos = exponent(value)?,
            "m_m" => s.mdru.nakagami_m = shape(value)?,
            "m_l" => s.lap.nakagami_m = shape(value)?,
            "lap_ideal_backhaul" => s.lap_ideal_backhaul = boolean(value)?,
            _ => return Err(KeyError::Unknown),
        },
        SetupParams::Large(l) => match key {
            "h_h_m" => l.hap.altitude = positive(value)?,
            "h_s_m" => l.sat.altitude = positive(value)?,
            "satellite" => l.satellite_enabled = boolean(value)?,
            "p_h_w" => l.hap.tx_power = positive(value)?,
            "p_s_w" => l.sat.tx_power = positive(value)?,
            "alpha_h_los" => l.hap.alpha_los = exponent(value)?,
            "alpha_h_nlos" => l.hap.alpha_nlos = exponent(value)?,
            "alpha_s" => {
                let a = exponent(value)?;
                l.sat.alpha_los = a;
                l.sat.alpha_nlos = a;
            }
            "m_h" => l.hap.nakagami_m = shape(value)?,
            "m_s" => l.sat.nakagami_m = shape(value)?,
            "sat_fading" => {
                l.sat_fading = match value {
                    "shadowed_rician" => SatFading::ShadowedRician,
                    "nakagami" => SatFading::Nakagami,
                    _ => return Err(KeyError::Type("`shadowed_rician` or `nakagami`")),
                }
            }
            "sr_b0" => l.shadowed_rician.b0 = positive(value)?,
            "sr_m" => l.shadowed_rician.m = positive(value)?,
            "sr_omega" => {
                let x = float(value)?;
                if x < 0.0 {
                    return Err(KeyError::Constraint(format!("must be >= 0, got {x}")));
                }
                l.shadowed_rician.omega = x;
            }
            _ => return Err(KeyError::Unknown),
        },
    }
    Ok(())
}

/// Constraints spanning several keys, attributed to the key that most likely needs fixing.
fn cross_check(cfg: &ScenarioConfig) -> Result<(), (&'static str, String)> {
    if let TbsLayout::Pinned(points) = &cfg.tbs_layout {
        if let Some((x, y)) = points.iter().find(|(x, y)| x.hypot(*y) <= cfg.r_d) {
            return Err(("tbs_layout", format!("pinned TBS ({x}, {y}) lies inside the disaster disk")));
        }
    }
    if let UserPlacement::FixedRadius(r) = cfg.user {
        if r > cfg.r_d {
            return Err(("user_radius_m", format!("{r} exceeds r_d = {}", cfg.r_d)));
        }
    }
    match &cfg.setup {
        SetupParams::Small(s) => {
            if s.lap.alpha_nlos < s.lap.alpha_los {
                return Err(("alpha_l_nlos", "must be >= alpha_l_los".into()));
            }
        }
        SetupParams::Large(l) => {
            if l.hap.alpha_nlos < l.hap.alpha_los {
                return Err(("alpha_h_nlos", "must be >= alpha_h_los".into()));
            }
            if l.sat.altitude <= l.hap.altitude {
                return Err(("h_s_m", "must exceed h_h_m".into()));
            }
        }
    }
    Ok(())
}

struct Entry<'a> {
    key: &'a str,
    value: &'a str,
    line: Line,
}

fn entries(text: &str) -> Result<Vec<Entry<'_>>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = Line(Some(i + 1));
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, _)| !k.is_empty())
            .ok_or_else(|| ConfigError::Syntax { line, text: raw.trim().to_string() })?;
        if out.iter().any(|e| e.key == key) {
            return Err(ConfigError::Duplicate { key: key.to_string(), line });
        }
        out.push(Entry { key, value, line });
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    parse_config_with(text, &[])
}

/// Parses a document, then applies `overrides` (command-line `key=value` pairs) on top.
///
/// The setup comes from the overrides, else the document, else `small`. The
/// disaster radius defaults to 1 km when neither sets `r_d_m`.
pub fn parse_config_with(text: &str, overrides: &[(String, String)]) -> Result<ScenarioConfig, ConfigError> {
    let doc = entries(text)?;
    let mut all: Vec<Entry> = doc;
    all.extend(overrides.iter().map(|(k, v)| Entry { key: k.as_str(), value: v.as_str(), line: Line(None) }));

    let mut setup = Setup::SmallDisaster;
    for e in all.iter().filter(|e| e.key == "setup") {
        setup = parse_setup(e.value).ok_or_else(|| KeyError::Type("`small` or `large`").at(e.key, e.value, e.line))?;
    }
    let mut cfg = ScenarioConfig::new(setup, 1000.0);
    let mut lines = std::collections::HashMap::new();
    for e in all.iter().filter(|e| e.key != "setup") {
        set_key(&mut cfg, e.key, e.value).map_err(|err| err.at(e.key, e.value, e.line))?;
        lines.insert(e.key, e.line);
    }
    if let Err((key, reason)) = cross_check(&cfg) {
        let line = lines.get(key).copied().unwrap_or(Line(None));
        return Err(ConfigError::Constraint { key: key.to_string(), line, reason });
    }
    cfg.validate()
        .map_err(|e| ConfigError::Constraint { key: "config".into(), line: Line(None), reason: e.to_string() })?;
    Ok(cfg)
}

fn render_layout(layout: &TbsLayout) -> String {
    match layout {
        TbsLayout::Field(FieldCount::Poisson) => "poisson".into(),
        TbsLayout::Field(FieldCount::Fixed) => "fixed_count".into(),
        TbsLayout::Pinned(points) => {
            let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x},{y}")).collect();
            format!("pinned: {}", pts.join("; "))
        }
    }
}

/// Full document with every default materialized.
pub fn render_config(cfg: &ScenarioConfig) -> String {
    let mut kv: Vec<(&str, String)> = vec![
        ("setup", cfg.setup_kind().name().into()),
        ("r_d_m", cfg.r_d.to_string()),
        ("r_s_margin_m", cfg.r_s_margin.to_string()),
        ("tbs_density_per_km2", cfg.tbs_density_per_km2.to_string()),
        ("tbs_layout", render_layout(&cfg.tbs_layout)),
        ("p_t_w", cfg.tbs.tx_power.to_string()),
        ("alpha_t", cfg.tbs.alpha_los.to_string()),
        ("m_t", cfg.tbs.nakagami_m.to_string()),
        ("aerial", cfg.aerial_enabled.to_string()),
        ("los_a", cfg.los.a.to_string()),
        ("los_b", cfg.los.b.to_string()),
        ("los_environment", cfg.los.environment.clone()),
        ("reference_gain", cfg.reference_gain.to_string()),
        ("min_link_distance_m", cfg.min_link_distance.to_string()),
        (
            "link_class_override",
            cfg.class_overrides.iter().map(|o| format!("{}-{}:{}", o.a, o.b, o.class)).collect::<Vec<_>>().join(", "),
        ),
        ("policy", cfg.policy.name().into()),
        ("tau_access", cfg.tau_access.to_string()),
        ("tau_backhaul", cfg.tau_backhaul.to_string()),
        ("noise_w", cfg.noise.to_string()),
        ("n_real", cfg.n_realizations.to_string()),
        ("seed", cfg.seed.to_string()),
        (
            "user_radius_m",
            match cfg.user {
                UserPlacement::Uniform => "uniform".into(),
                UserPlacement::FixedRadius(r) => r.to_string(),
            },
        ),
        ("ci_method", cfg.ci_method.name().into()),
    ];
    match &cfg.setup {
        SetupParams::Small(s) => kv.extend([
            ("n_m", s.n_m.to_string()),
            ("h_l_m", s.lap.altitude.to_string()),
            ("p_m_w", s.mdru.tx_power.to_string()),
            ("p_l_w", s.lap.tx_power.to_string()),
            ("alpha_m", s.mdru.alpha_los.to_string()),
            ("alpha_l_los", s.lap.alpha_los.to_string()),
            ("alpha_l_nlos", s.lap.alpha_nlos.to_string()),
            ("m_m", s.mdru.nakagami_m.to_string()),
            ("m_l", s.lap.nakagami_m.to_string()),
            ("lap_ideal_backhaul", s.lap_ideal_backhaul.to_string()),
        ]),
        SetupParams::Large(l) => kv.extend([
            ("h_h_m", l.hap.altitude.to_string()),
            ("h_s_m", l.sat.altitude.to_string()),
            ("satellite", l.satellite_enabled.to_string()),
            ("p_h_w", l.hap.tx_power.to_string()),
            ("p_s_w", l.sat.tx_power.to_string()),
            ("alpha_h_los", l.hap.alpha_los.to_string()),
            ("alpha_h_nlos", l.hap.alpha_nlos.to_string()),
            ("alpha_s", l.sat.alpha_los.to_string()),
            ("m_h", l.hap.nakagami_m.to_string()),
            ("m_s", l.sat.nakagami_m.to_string()),
            (
                "sat_fading",
                match l.sat_fading {
                    SatFading::ShadowedRician => "shadowed_rician".into(),
                    SatFading::Nakagami => "nakagami".into(),
                },
            ),
            ("sr_b0", l.shadowed_rician.b0.to_string()),
            ("sr_m", l.shadowed_rician.m.to_string()),
            ("sr_omega", l.shadowed_rician.omega.to_string()),
        ]),
    }
    let mut out = String::from("# pdcsim scenario configuration\n");
    for (k, v) in kv {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_reference_defaults() {
        let cfg = parse_config_with("", &[("setup".into(), "large".into()), ("r_d_m".into(), "5000".into())]).unwrap();
        assert_eq!(cfg, ScenarioConfig::large_disaster(5000.0, 10_000.0, 500_000.0, true));
        let l = cfg.large().unwrap();
        assert_eq!((l.hap.tx_power, l.sat.tx_power, l.hap.nakagami_m), (20.0, 1000.0, 3.0));
        assert_eq!((cfg.tau_access, cfg.tau_backhaul, cfg.noise, cfg.n_realizations), (0.1, 0.2, 1e-12, 20_000));
        assert_eq!((cfg.tbs_density_per_km2, cfg.tbs.tx_power, cfg.tbs.alpha_los, cfg.r_s()), (10.0, 10.0, 2.9, 8000.0));

        let small = parse_config("setup = small\nr_d_m = 1000\n").unwrap();
        let s = small.small().unwrap();
        assert_eq!((s.lap.altitude, s.lap.tx_power, s.mdru.tx_power, s.lap.nakagami_m, s.mdru.nakagami_m), (200.0, 3.0, 10.0, 2.0, 1.0));
        assert_eq!((s.lap.alpha_los, s.lap.alpha_nlos, s.mdru.alpha_los), (2.5, 3.0, 3.0));
    }

    #[test]
    fn negative_threshold_rejected() {
        let err = parse_config("setup = small\n# comment\ntau_access = -1\n").unwrap_err();
        assert!(matches!(&err, ConfigError::Constraint { key, line: Line(Some(3)), .. } if key == "tau_access"), "{err}");
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn setup_mismatch_rejected() {
        let err = parse_config("setup = large\nn_m = 100\n").unwrap_err();
        assert!(matches!(err, ConfigError::SetupMismatch { ref key, .. } if key == "n_m"));
        let err = parse_config("h_h_m = 20000\n").unwrap_err();
        assert!(matches!(err, ConfigError::SetupMismatch { .. }));
    }

    #[test]
    fn unknown_and_malformed() {
        assert!(matches!(parse_config("foo = 1").unwrap_err(), ConfigError::UnknownKey { .. }));
        assert!(matches!(parse_config("n_m").unwrap_err(), ConfigError::Syntax { .. }));
        assert!(matches!(parse_config("n_m = x").unwrap_err(), ConfigError::TypeMismatch { .. }));
        assert!(matches!(parse_config("n_m = 1\nn_m = 2").unwrap_err(), ConfigError::Duplicate { .. }));
        assert!(matches!(parse_config("satellite = yes").unwrap_err(), ConfigError::SetupMismatch { .. }));
        assert!(matches!(parse_config("setup = large\nsatellite = yes").unwrap_err(), ConfigError::TypeMismatch { .. }));
    }

    #[test]
    fn cross_key_constraints() {
        let err = parse_config("setup = large\nh_h_m = 600000\n").unwrap_err();
        assert_eq!(err.key(), Some("h_s_m"));
        let err = parse_config("r_d_m = 1000\ntbs_layout = pinned: 10,0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Constraint { line: Line(Some(2)), .. }));
    }

    #[test]
    fn pinned_and_overrides_parse() {
        let cfg = parse_config("tbs_layout = pinned: 67206,0; 0,-5000\nlink_class_override = mdru-lap:mdru\nuser_radius_m = 0").unwrap();
        assert_eq!(cfg.tbs_layout, TbsLayout::Pinned(vec![(67206.0, 0.0), (0.0, -5000.0)]));
        assert_eq!(cfg.class_overrides, vec![ClassOverride { a: Tier::Mdru, b: Tier::Lap, class: Tier::Mdru }]);
        assert_eq!(cfg.user, UserPlacement::FixedRadius(0.0));
        assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);
        assert!(parse_config("link_class_override = mdru-lap:sat").is_err());
    }

    #[test]
    fn overrides_beat_document() {
        let cfg = parse_config_with("n_m = 5\nseed = 3", &[("seed".into(), "9".into())]).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.small().unwrap().n_m, 5);
    }

    #[test]
    fn all_keys_are_rendered() {
        for setup in [Setup::SmallDisaster, Setup::LargeDisaster] {
            let doc = render_config(&ScenarioConfig::new(setup, 1000.0));
            let rendered: Vec<&str> = doc.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(" = ").next().unwrap()).collect();
            let expected: Vec<&str> = all_keys()
                .filter(|k| match setup {
                    Setup::SmallDisaster => !LARGE_KEYS.contains(k),
                    Setup::LargeDisaster => !SMALL_KEYS.contains(k),
                })
                .collect();
            assert_eq!(rendered, expected);
        }
    }
}
