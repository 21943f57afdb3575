//! Samplers for the per-round communication graphs: uniform rooted trees,
//! rooted trees conditioned on a forest, and directed Erdős–Rényi edge sets.

mod er;
mod rng;
mod tree;

pub use er::{
    sample_directed_er, sample_directed_er_in, sample_er_with_replacement, DirectedEdgeSet, Edge,
    EdgePool,
};
pub use rng::{RngStream, SimRng};
pub use tree::{
    prufer_decode, sample_rooted_tree, sample_rooted_tree_containing,
    sample_rooted_tree_containing_rejection,
};
