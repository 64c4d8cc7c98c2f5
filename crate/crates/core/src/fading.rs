//! Small-scale fading power gains.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FadingError {
    #[error("Nakagami shape must be >= 0.5, got {0}")]
    InvalidShape(f64),
    #[error("invalid shadowed-Rician parameters: {0}")]
    InvalidShadowedRician(String),
}

/// Shadowed-Rician satellite channel: diffuse scatter plus a Nakagami-shadowed LoS path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowedRicianParams {
    /// Half the average scattered power (per-dimension variance).
    pub b0: f64,
    /// Shadowing severity of the LoS amplitude.
    pub m: f64,
    /// Average LoS power.
    pub omega: f64,
}

impl ShadowedRicianParams {
    /// Average-shadowing land-mobile satellite fit.
    pub const AVERAGE_SHADOWING: ShadowedRicianParams = ShadowedRicianParams { b0: 0.126, m: 10.1, omega: 0.835 };

    pub fn validate(&self) -> Result<(), FadingError> {
        let ok = self.b0 > 0.0 && self.b0.is_finite() && self.m > 0.0 && self.m.is_finite() && self.omega >= 0.0 && self.omega.is_finite();
        if !ok {
            return Err(FadingError::InvalidShadowedRician(format!(
                "b0 = {}, m = {}, omega = {}",
                self.b0, self.m, self.omega
            )));
        }
        Ok(())
    }

    pub fn mean_power(&self) -> f64 {
        2.0 * self.b0 + self.omega
    }
}

impl Default for ShadowedRicianParams {
    fn default() -> Self {
        Self::AVERAGE_SHADOWING
    }
}

/// Power gain of a unit-mean Nakagami-m envelope: Gamma(shape m, scale 1/m).
pub fn nakagami_power_gain<R: Rng + ?Sized>(m: f64, rng: &mut R) -> Result<f64, FadingError> {
    if !(m >= 0.5 && m.is_finite()) {
        return Err(FadingError::InvalidShape(m));
    }
    Ok(gamma_unit_mean(m, rng))
}

fn gamma_unit_mean<R: Rng + ?Sized>(m: f64, rng: &mut R) -> f64 {
    if m == 1.0 {
        // Exponential; skips the rejection sampler on the hot Rayleigh path.
        return -(1.0 - rng.random::<f64>()).ln();
    }
    // Shape and scale are validated by the caller.
    Gamma::new(m, 1.0 / m).expect("valid gamma parameters").sample(rng)
}

/// `|A|^2` for one shadowed-Rician draw.
pub fn shadowed_rician_power_gain<R: Rng + ?Sized>(p: &ShadowedRicianParams, rng: &mut R) -> Result<f64, FadingError> {
    p.validate()?;
    let sigma = p.b0.sqrt();
    let xi: f64 = rng.sample(StandardNormal);
    let xq: f64 = rng.sample(StandardNormal);
    let los_power = if p.omega > 0.0 {
        Gamma::new(p.m, p.omega / p.m)
            .map_err(|e| FadingError::InvalidShadowedRician(e.to_string()))?
            .sample(rng)
    } else {
        0.0
    };
    let phase = 2.0 * PI * rng.random::<f64>();
    let amp = los_power.sqrt();
    let re = sigma * xi + amp * phase.cos();
    let im = sigma * xq + amp * phase.sin();
    Ok(re * re + im * im)
}

/// Fading family assigned to a link class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FadingLaw {
    Nakagami { m: f64 },
    ShadowedRician(ShadowedRicianParams),
}

impl FadingLaw {
    pub fn validate(&self) -> Result<(), FadingError> {
        match self {
            FadingLaw::Nakagami { m } if !(*m >= 0.5 && m.is_finite()) => Err(FadingError::InvalidShape(*m)),
            FadingLaw::Nakagami { .. } => Ok(()),
            FadingLaw::ShadowedRician(p) => p.validate(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, FadingError> {
        match self {
            FadingLaw::Nakagami { m } => nakagami_power_gain(*m, rng),
            FadingLaw::ShadowedRician(p) => shadowed_rician_power_gain(p, rng),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            FadingLaw::Nakagami { .. } => 1.0,
            FadingLaw::ShadowedRician(p) => p.mean_power(),
        }
    }
}
