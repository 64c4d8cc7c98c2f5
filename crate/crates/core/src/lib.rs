//! Monte Carlo coverage of post-disaster multi-tier networks.
//!
//! A typical user inside a disaster disk reaches the core network through
//! surviving terrestrial base stations (TBS), mobile relays (MDRU), a
//! low-altitude platform (LAP), a high-altitude platform (HAP) or a
//! satellite. [`montecarlo::estimate_coverage`] samples networks, associates
//! the user hop by hop, and counts trials where every hop clears its SINR
//! threshold.

pub mod association;
pub mod channel;
pub mod config;
pub mod fading;
pub mod geometry;
pub mod montecarlo;
pub mod output;
pub mod scenario;
pub mod selftest;
pub mod sinr;
pub mod stream;
pub mod sweep;

pub use association::{select_path, PathCounts, PathShares, PathSpec, PathType};
pub use channel::{ChannelModel, Tier};
pub use config::{parse_config, parse_config_with, render_config, ConfigError};
pub use montecarlo::{estimate_coverage, CiMethod, CoverageEstimate};
pub use output::{write_records, Format, RunManifest};
pub use scenario::{build_realization, ScenarioConfig, Setup};
pub use sinr::PolicyMode;
pub use sweep::{optimal_n_m, run_sweep, Axis, SweepRecord};
