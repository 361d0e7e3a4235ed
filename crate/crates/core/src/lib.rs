//! Minimum-cost edge removal that forces a chosen path, edge, or node onto the
//! unique shortest route between two nodes.

pub mod attack;
pub mod baselines;
pub mod cover;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod graph;
pub mod lp;
pub mod oracles;
pub mod paths;
pub mod target;

pub use error::{Error, Result};
