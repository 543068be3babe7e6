//! Interventional Markov equivalence for loopless mixed graphs.
//!
//! Graph classes and m-separation, interventional graphs, maximal ancestral
//! completions, equivalence checks (exhaustive and graphical), the ADMG
//! head/tail factorization, and numeric checks on binary distributions.

pub mod admg_factor;
pub mod cli;
pub mod distribution;
pub mod equivalence;
pub mod error;
pub mod graph_core;
pub mod intervention;
pub mod maximality;
pub mod resources;
pub mod separation;
pub mod vset;

pub use error::{Error, Result};
pub use graph_core::{ClassLabel, Edge, EdgeKind, Mark, MixedGraph, VertexKind, V};
pub use intervention::TargetMultiset;
pub use separation::{IndependenceModel, SepTriple};
pub use vset::VSet;
