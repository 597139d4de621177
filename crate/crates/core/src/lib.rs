//! Power-cost simulator for pushing content from a data center to a cluster
//! of edge caches, either over terrestrial unicast or through LEO satellites
//! (immediate forward, relay and forward, store and forward).

pub mod allocation;
pub mod channel;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod optimizer;
pub mod scenarios;

pub use error::{Error, Result};
