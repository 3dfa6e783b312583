//! Toroidal grid graphs, abelian Cayley graphs, canonical double covers and
//! their stability.

pub mod abelian;
pub mod aut;
pub mod cayley;
pub mod graph;
pub mod graph6;
pub mod census;
pub mod exec;
mod snf;
pub mod stability;

pub use abelian::{AbelianGroup, GroupElement, GroupError};
pub use graph::{Graph, GraphError, StandardKind, StructuralFlags};
pub use cayley::{cayley_graph, grid_to_cayley, ConnectionSet, GridKind, GridParams};
pub use stability::{
    classify_grid, stability_verdict, ClassificationVerdict, StabilityError, StabilityVerdict,
    TrivialReason, Verdict,
};
