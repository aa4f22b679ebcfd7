//! Self-similar Antoine's necklaces in 3-space.
//!
//! - [`geometry`]: circles, solid tori, similarities, distance and linking predicates
//! - [`chain`]: regular simple chains, the bent-link construction, chain validation
//! - [`ifs`]: similarity systems, prelimit covers, attractor sampling, cover sums
//! - [`projection`]: shadow areas, box counting and connectivity of plane projections
//! - [`search`]: grid scans of the `(r/R, m, s)` parameter space
//! - [`io`]: JSON, CSV and OBJ formats

pub mod error;
pub mod chain;
pub mod geometry;
pub mod ifs;
pub mod projection;
pub mod search;
pub mod io;

pub use error::{Error, Result};
