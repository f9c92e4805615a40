//! Uniform spanning forests on plane networks: combinatorial maps,
//! electrical solvers, Wilson sampling, double circle packings and the
//! Monte-Carlo exponent experiments built from them.

pub mod electrical;
pub mod error;
pub mod experiments;
pub mod forest;
pub mod generators;
pub mod graph;
pub mod packing;

pub use error::{Error, Result};
pub use graph::PlaneNetwork;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
