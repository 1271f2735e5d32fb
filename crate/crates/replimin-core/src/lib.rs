//! Exact lexico-minimum replica placement on the leaves of multitree
//! failure-domain models.
//!
//! A failure-domain model is a digraph whose internal vertices are failure
//! events and whose leaves are servers. Placing `rho` replicas on leaves
//! induces a *failure aggregate*: a vector counting, per severity bucket,
//! how many events would knock out that many replicas. This crate minimizes
//! the aggregate in the lexicographic order, exactly.
//!
//! The solver handles *untangled* multitrees with `k` roots via a two-phase
//! pipeline: a decomposition phase ([`decompose`]) that splits the model
//! into a full binary tree of subproblems, and an optimization phase
//! ([`dp`]) that runs a dynamic program bottom-up over that tree. Arbitrary
//! digraphs can be routed through [`model::canonicalize`] first. An
//! exhaustive [`oracle`] and a hardness-instance generator ([`hardness`])
//! round out the toolkit.

#![no_std]

extern crate alloc;

pub mod decompose;
pub mod dp;
pub mod gen;
pub mod graph;
pub mod hardness;
pub mod lexvec;
pub mod model;
pub mod oracle;
pub mod tree;

pub use graph::{Digraph, VertexId, VertexSet};
pub use lexvec::FailAgg;
pub use model::Placement;
