pub mod error;
pub mod geometry;
pub mod lattice;
pub mod capacity;
pub mod flow;
pub mod cylinder;
pub mod continuum;
pub mod harness;
pub mod stats;

pub use error::{Error, Result};
