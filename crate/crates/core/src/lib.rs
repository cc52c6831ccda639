//! Circle bin packing with circular items.
//!
//! Packs a multiset of circles into the fewest identical circular bins. Two
//! solvers are provided: a deterministic constructive greedy that places each
//! item tangent to two already-placed objects ([`toa`]), and an adaptive
//! simulated annealer that perturbs and repacks pairs of bins ([`asags`]).
//! The [`bench`] module generates the benchmark families, runs experiments
//! and carries the statistics used to compare the two solvers.
//!
//! Coordinates are bin-local: every bin has its center at `(R, R)`.

pub mod asags;
pub mod bench;
pub mod error;
pub mod geometry;
pub mod model;
pub mod rng;
pub mod stats;
pub mod toa;

pub use error::{CbppError, Result};
pub use geometry::{CircleGeom, Point, SectorRegion, Tolerance};
pub use model::{
    BinState, Family, Instance, Item, Metrics, Placement, Solution, ValidationReport, Violation,
};
