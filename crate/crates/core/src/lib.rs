//! Exact graph-homomorphism partition functions on decorated graphs, their
//! Type I / Type II interpolation polynomials, truncated Taylor expansions of
//! `log Z(G(z))`, pseudo-marginals, and an exact checker for the statement
//! that pseudo-marginals conditioned on a distant boundary equal the
//! unconditional ones.
//!
//! All arithmetic is over [`rational::Q`]; floating point appears only when
//! rendering `exp` of an exact exponent.

pub mod elimination;
pub mod error;
pub mod exact;
pub mod graph;
pub mod io;
pub mod models;
pub mod poly;
pub mod pseudo;
pub mod rational;
pub mod subgraph;
pub mod taylor;

mod par;

pub use error::{Error, Result};
pub use graph::{disjoint_union, ColorAssignment, DecoratedGraph, Graph, Matrix, NodeSet};
pub use poly::{InterpolationKind, RationalPolynomial};
pub use rational::Q;
pub use taylor::{PowerSumTable, TaylorApprox};
