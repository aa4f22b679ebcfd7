//! Simple and regular simple chains of solid tori.

mod regular;
mod theorem2;
mod validate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SolidTorus;

pub use regular::{regular_chain_from_params, RegularChainParams};
pub use theorem2::{
    build_initial_link, build_theorem2_chain, certify_psi0, default_offset, enclosing_similar_torus,
    find_psi0, minimal_m, psi_center, BentChain, Psi0Certificate, Psi0Sample,
};
pub use validate::{
    has_step_two_symmetry, validate_chain, validate_chain_with, ChainVerdict, Failure, ValidateOpts,
    VerdictSummary,
};

/// Whether a chain claims the extra structure of a regular simple chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    Simple,
    Regular,
}

/// Ordered links `T_1..T_k` inside an ambient torus.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub ambient: SolidTorus,
    pub links: Vec<SolidTorus>,
    pub kind: ChainKind,
}

impl Chain {
    pub fn new(ambient: SolidTorus, links: Vec<SolidTorus>, kind: ChainKind) -> Result<Self> {
        if links.len() < 3 {
            return Err(Error::InvalidParams(format!(
                "a chain needs at least 3 links, got {}",
                links.len()
            )));
        }
        if kind == ChainKind::Regular && (!links.len().is_multiple_of(2) || links.len() < 4) {
            return Err(Error::InvalidParams(format!(
                "a regular chain has 2m >= 4 links, got {}",
                links.len()
            )));
        }
        if !ambient.is_valid() || links.iter().any(|t| !t.is_valid()) {
            return Err(Error::InvalidParams("chain contains an invalid torus".into()));
        }
        Ok(Self { ambient, links, kind })
    }

    pub fn k(&self) -> usize {
        self.links.len()
    }

    /// Cyclic neighbours must be linked, every other pair unlinked.
    pub fn should_link(&self, i: usize, j: usize) -> bool {
        let k = self.k();
        let d = (i + k - j) % k;
        d == 1 || d == k - 1
    }
}
