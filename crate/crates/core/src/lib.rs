pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod graphgen;
pub mod harness;
pub mod protocols;
pub mod stats;
pub mod treecount;

pub use error::{Error, Result};
