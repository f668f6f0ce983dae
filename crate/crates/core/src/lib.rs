//! Unsplittable capacitated vehicle routing in the Euclidean plane.
//!
//! Every terminal carries a demand in (0, 1] and must be served by exactly one
//! depot-rooted tour of total demand at most 1. The crate provides:
//!
//! - [`big`]: snapping to a polar center grid, adaptive rounding, and an
//!   exact configuration search for instances whose demands are all at least ε;
//! - [`general`]: the dispatcher on total demand, with the clustering path
//!   for many tours and the rounding/splitting path for few tours;
//! - [`baselines`]: iterated tour partitioning, the assignment rounding of
//!   fractional bipartite weights, and an exact branch-and-bound oracle;
//! - [`io`], [`generate`], [`svg`] and [`report`] for files, random
//!   instances, plots and benchmark tables.

pub mod baselines;
pub mod bench;
pub mod big;
pub mod cli;
pub mod error;
pub mod general;
pub mod generate;
pub mod grid;
pub mod io;
pub mod model;
pub mod params;
pub mod report;
pub mod svg;
pub mod tsp;

pub use error::{Error, Result};
pub use model::{
    distance_extremes, tour_cost, verify_solution, Instance, Point, Solution, Stop, Terminal,
    TerminalId, Tour, VerifyReport, TOL,
};
pub use params::{derive_params, Overrides, Params};
