//! Evolving hard Euclidean TSP instances against Lin-Kernighan solvers.
//!
//! The crate is organised around one data flow:
//!
//! * [`instance`], [`tour`], [`tsplib`]: city sets on an integer grid, tours
//!   and the segment-reversal primitive, TSPLIB I/O.
//! * [`lk`]: Chained Lin-Kernighan and Lin-Kernighan with cluster
//!   compensation, both reporting search effort as the number of edge
//!   exchanges performed.
//! * [`evolver`]: a generational EA whose fitness is that effort.
//! * [`exact`]: brute-force and Held-Karp optima for small instances.
//! * [`cluster`], [`analysis`]: density clustering sweeps, distance
//!   histograms, effort tables and optimality gaps for instance sets.
//! * [`cli`]: the `tspforge` command-line front end.
//!
//! See `examples/` for one runnable program per capability.

pub mod analysis;
pub mod cli;
pub mod cluster;
pub mod error;
pub mod evolver;
pub mod exact;
pub mod instance;
pub mod lk;
pub mod rng;
pub mod tour;
pub mod tsplib;

pub use error::{Error, Result};
pub use instance::{DistanceMatrix, Instance, Point};
pub use lk::{chained_lk, lk_cc, solve, SolveStats, SolverConfig, Variant};
pub use tour::Tour;

/// Tool version embedded in every artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
