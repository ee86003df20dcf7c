//! Rooted-graph products, exact spectral moments, noncommutative convolutions
//! and quantum decompositions of adjacency operators.
//!
//! The crate is organised bottom-up:
//! - [`graph`] builds rooted graphs (standard families, star/comb/orthogonal
//!   products, m-free products and branches) and counts closed walks;
//! - [`series`] and [`transforms`] hold exact truncated-series arithmetic and
//!   the boolean, monotone, orthogonal, s-free, free and m-free convolutions;
//! - [`jacobi`] converts between moments and Jacobi parameters;
//! - [`measures`] turns Jacobi parameters into numerical spectral measures;
//! - [`qdecomp`] performs the distance-partition quantum decomposition;
//! - [`independence`] checks mixed-moment independence relations;
//! - [`crosscheck`] compares the decomposition pipelines of m-free products.

pub mod crosscheck;
pub mod error;
pub mod graph;
pub mod independence;
pub mod jacobi;
pub mod measures;
pub mod qdecomp;
pub mod rational;
pub mod report;
pub mod series;
pub mod transforms;

pub use error::{Error, Result};
pub use graph::{Letter, Radius, RootedGraph, Vertex, VertexState};
pub use jacobi::{JacobiParams, Tail};

pub use measures::SpectralMeasure;
pub use rational::Q;
pub use transforms::{Distribution, MomentSeq};
