//! Multi-objective genetic programming for explainable manifold learning.
//!
//! Individuals are sets of symbolic expression trees, one tree per embedding
//! dimension. Evolution (MOEA/D with Tchebycheff decomposition) trades off two
//! objectives: how well the embedding preserves each point's neighbour
//! ordering, and a structural complexity score over the trees.
//!
//! Module map:
//!
//! - [`dataset`]: CSV loading, min-max normalization, neighbour orderings.
//! - [`expr`]: operators, expression trees, evaluation, s-expression and DOT I/O.
//! - [`complexity`]: the parameterisable tree complexity metric and the
//!   recursive baseline metric used for comparison.
//! - [`manifold_cost`]: Spearman-based neighbourhood preservation cost.
//! - [`evolution`]: initialisation, variation, decomposition and the archive.
//! - [`harness`]: KNN cross-validation, summary statistics and report files.
//! - [`config`] and [`cli`]: run configuration and the command-line front end.

pub mod cli;
pub mod complexity;
pub mod config;
pub mod dataset;
pub mod error;
pub mod evolution;
pub mod expr;
pub mod harness;
pub mod manifold_cost;
pub mod matrix;
pub mod rng;

pub use complexity::{CostClass, CostModel};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use evolution::{Archive, EvolutionConfig, FrontEntry, RunResult};
pub use expr::{ExprTree, Individual, Operator};
pub use matrix::Matrix;
