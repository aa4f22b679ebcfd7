use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Chain, ChainKind};
use crate::error::{Error, Result};
use crate::geometry::{SolidTorus, Vec3};

/// Parameters of the regular family: ambient radii, `2m` links, common
/// similarity coefficient `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularChainParams {
    #[serde(rename = "R_T")]
    pub major: f64,
    #[serde(rename = "r_T")]
    pub minor: f64,
    pub m: usize,
    pub s: f64,
}

impl RegularChainParams {
    pub fn new(major: f64, minor: f64, m: usize, s: f64) -> Result<Self> {
        let p = Self { major, minor, m, s };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.major.is_finite() && self.minor > 0.0 && self.minor < self.major) {
            return Err(Error::InvalidParams(format!(
                "need 0 < r_T < R_T, got r_T = {}, R_T = {}",
                self.minor, self.major
            )));
        }
        if self.m < 2 {
            return Err(Error::InvalidParams(format!("need m >= 2, got {}", self.m)));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::InvalidParams(format!("need 0 < s < 1, got {}", self.s)));
        }
        Ok(())
    }

    pub fn rho(&self) -> f64 {
        self.minor / self.major
    }
}

/// The regular chain of `2m` links similar to the ambient torus.
///
/// The ambient torus is centered at the origin with axis `+z`. Link `j`
/// (0-based) is centered at the vertex at angle `πj/m` of `C_T`; even `j`
/// lie in the plane of `C_T`, odd `j` stand in the vertical plane through the
/// tangent line of `C_T` at their center, with the outward radial normal.
pub fn regular_chain_from_params(p: &RegularChainParams) -> Result<Chain> {
    p.check()?;
    let ambient = SolidTorus::from_parts(Vec3::zeros(), Vec3::z(), p.major, p.minor)?;
    let k = 2 * p.m;
    let links = (0..k)
        .map(|j| {
            let theta = PI * j as f64 / p.m as f64;
            let radial = Vec3::new(theta.cos(), theta.sin(), 0.0);
            let normal = if j % 2 == 0 { Vec3::z() } else { radial };
            SolidTorus::from_parts(radial * p.major, normal, p.s * p.major, p.s * p.minor)
        })
        .collect::<Result<Vec<_>>>()?;
    Chain::new(ambient, links, ChainKind::Regular)
}
