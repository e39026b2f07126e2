//! Symmetry-preserving reduction of vertex-colored graphs.
//!
//! The pipeline shrinks a colored graph while emitting generators for the
//! automorphisms it divides out, and keeps enough bookkeeping to lift
//! automorphisms of the reduced graph back to the input graph. A small
//! reference solver closes the loop for desk-scale inputs.

pub mod coloring;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod lifting;
pub mod perm;
pub mod probing;
pub mod quotient;
pub mod reductions;
pub mod refinement;
pub mod scheduler;
pub mod solver;
pub mod work;

pub use coloring::Coloring;
pub use graph::{ColoredGraph, GraphError, VertexRenaming};
pub use lifting::RepresentationMap;
pub use perm::SparseAutomorphism;
pub use scheduler::{preprocess, reconstruct_group, PreprocessReport, ScheduleConfig};

