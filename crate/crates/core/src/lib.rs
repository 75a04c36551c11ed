//! Vote distributions, their expected frequency matrices, and the tooling
//! around them: positionwise (EMD + assignment) distances between elections
//! and matrices, random election samplers, distribution-parameter fitting,
//! and a 2-D map of distributions produced by stress-majorization MDS.
//!
//! The central object is the [`FrequencyMatrix`]: an `m`-by-`m` bistochastic
//! matrix whose `(i, j)` entry is the probability (or empirical frequency)
//! that candidate `j` sits at position `i` in a vote. Elections, votes and
//! parametric vote distributions (Mallows, group-separable trees,
//! single-peaked models, mixtures and filters of those) all map into this
//! representation, where they can be compared with a single metric.
//!
//! Candidates and positions are 0-based everywhere in this API. File formats
//! and the CLI speak the 1-based convention common in preference data.

pub mod compass;
pub mod election;
pub mod embedding;
pub mod error;
pub mod fitting;
pub mod io;
pub mod matrix;
pub mod metric;
pub mod models;
pub mod samplers;
pub mod structures;

mod scalar;

pub use election::{swap_distance, Election, Ranking};
pub use error::{Error, Result};
pub use matrix::FrequencyMatrix;
