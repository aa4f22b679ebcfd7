//! Run configuration: per-command records, filled from `--config` and then
//! overridden by flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub build_chain: Option<BuildChainConfig>,
    pub regular: Option<RegularConfig>,
    pub search: Option<SearchConfig>,
    pub iterate: Option<IterateConfig>,
    pub project: Option<ProjectConfig>,
    pub mesh: Option<MeshConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildChainConfig {
    pub r_b: f64,
    #[serde(rename = "R_b")]
    pub big_r_b: f64,
    /// Offset `A` of the second link; `None` picks `(3R_B - r_B)/2`.
    pub offset: Option<f64>,
    /// Half the link count; `None` picks the least admitted value.
    pub m: Option<usize>,
}

impl Default for BuildChainConfig {
    fn default() -> Self {
        Self {
            r_b: 1.0,
            big_r_b: 4.0,
            offset: None,
            m: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegularConfig {
    #[serde(rename = "R_T")]
    pub major: f64,
    #[serde(rename = "r_T")]
    pub minor: f64,
    pub m: usize,
    pub s: f64,
}

impl Default for RegularConfig {
    fn default() -> Self {
        Self {
            major: 1.0,
            minor: 0.27,
            m: 12,
            s: 0.196,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub rho_steps: usize,
    pub s_lo: f64,
    pub s_hi: f64,
    pub s_steps: usize,
    pub m: Vec<usize>,
    pub grid_n: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            rho_lo: 0.01,
            rho_hi: 0.5,
            rho_steps: 100,
            s_lo: 0.01,
            s_hi: 0.4,
            s_steps: 100,
            m: (9..=30).chain([40]).collect(),
            grid_n: 64,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IterateConfig {
    pub chain: Option<PathBuf>,
    pub lambda: usize,
    pub points: usize,
    pub depth: usize,
    pub phase: f64,
    pub budget: u128,
}

impl Default for IterateConfig {
    fn default() -> Self {
        Self {
            chain: None,
            lambda: 2,
            points: 10_000,
            depth: 8,
            phase: 0.0,
            budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Fibonacci hemisphere plus the three coordinate planes.
    Default,
    AxisAligned,
    Fibonacci,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProjectConfig {
    pub chain: Option<PathBuf>,
    pub scheme: Scheme,
    /// Plane count for the Fibonacci part.
    pub planes: usize,
    pub lambda: usize,
    pub raster_n: usize,
    pub points: usize,
    pub depth: usize,
    pub connect_depth: usize,
    pub phase: f64,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        Self {
            chain: None,
            scheme: Scheme::Default,
            planes: 200,
            lambda: 3,
            raster_n: 1024,
            points: 100_000,
            depth: 8,
            connect_depth: 2,
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshConfig {
    pub chain: Option<PathBuf>,
    pub seg_major: usize,
    pub seg_minor: usize,
    pub ambient: bool,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            chain: None,
            seg_major: 48,
            seg_minor: 16,
            ambient: false,
        }
    }
}

/// Overwrites `field` when the flag was given.
macro_rules! apply {
    ($cfg:ident, $args:ident, $($field:ident),+) => {
        $(if let Some(v) = $args.$field.clone() { $cfg.$field = v; })+
    };
}
pub(crate) use apply;
