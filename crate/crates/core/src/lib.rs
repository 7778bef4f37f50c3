//! Enumeration, classification and random geometric realization of
//! triangulated closed surfaces on a small labeled vertex set.
//!
//! The pipeline has three stages:
//!
//! * [`enumerate`] runs a lexicographic backtracking search over sets of
//!   triangles and emits every closed surface it finds.
//! * [`classify`] removes duplicates up to relabeling, computes the
//!   topological type and the order of the combinatorial symmetry group.
//! * [`realize`] searches for straight-line embeddings of orientable surfaces
//!   in 3-space using random integer coordinates and exact predicates.
//!
//! [`catalog`] persists the results and [`cli`] wires everything to the
//! `trisurf` command line tool.

pub mod catalog;
pub mod classify;
pub mod cli;
pub mod complex;
pub mod enumerate;
pub mod error;
pub mod realize;

pub use complex::{Edge, EdgeSumVector, Triangle, TriangleSet, VertexId, VertexLink};
pub use error::{Error, Result};
