//! Exact crossing minimization on layered graphs.
//!
//! The crate provides:
//! - the layered-graph data model with weighted crossing counting
//!   ([`graph`]) and text codecs ([`codec`]);
//! - crossing-free drawability tests for 2 and 3 layers with endpoint and
//!   partial-order constraints ([`planarity`]);
//! - exhaustive oracles and an exact kernelize-then-search 3-layer solver
//!   ([`brute`]);
//! - kernelizations for 2 and 3 layers ([`kernel2`], [`kernel3`]);
//! - the recursive separator-based 2-layer solver ([`subexp2`]);
//! - lower-bound gadget builders and a Disjoint Factors solver
//!   ([`gadgets`]).

pub mod brute;
pub mod codec;
pub mod gadgets;
pub mod graph;
pub mod kernel2;
pub mod kernel3;
pub mod planarity;
pub mod sample;
pub mod subexp2;

pub use graph::{
    count_crossings, count_crossings_pairwise, count_crossings_weighted, CrossingReport, Drawing,
    Edge, EdgeId, Instance, LayeredGraph, VertexId,
};
