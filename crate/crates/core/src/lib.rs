//! Bond percolation on finite host graphs.
//!
//! The crate builds host graphs (complete graphs, hypercubes, random regular
//! graphs, clique families and a partitioned "anomaly" construction), checks
//! their expansion properties, and runs seeded Monte Carlo experiments that
//! compare the largest percolation cluster against the Galton-Watson survival
//! probability `y(eps)`.
//!
//! Everything random is keyed by explicit 64-bit seeds, so every result can be
//! regenerated bit-for-bit regardless of how work is split across threads.

pub mod branching;
pub mod error;
pub mod expansion;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod matching;
pub mod percolation;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{ComponentSummary, Graph, VertexSet};
