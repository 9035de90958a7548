//! Grid-based point-feature labeling with leader lines.
//!
//! The pipeline is: lay a regular grid of candidate label boxes over the map
//! ([`grid`]), shift candidates away from nearby points, rank candidates per
//! point by squared distance to their nearest corner ([`matching`]), assign
//! one label per point level by level, and connect each point to its label
//! with a straight leader ([`leader`]). [`bench::solve`] runs the whole thing
//! with per-stage timing.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod grid;
pub mod instance;
pub mod leader;
pub mod matching;
pub mod render;

pub use error::{Error, Result};
pub use exec::Exec;
