//! fraclab: a desk-scale laboratory for fractal projections.
//!
//! The crate ties together four strands:
//!
//! - [`fractals`] generates dyadic grid covers of self-similar attractors
//!   with known similarity dimension, and projects them onto lines.
//! - [`dimension`] turns cover-count series into box-counting dimension
//!   estimates (least-squares, liminf and limsup flavors).
//! - [`toy`] hosts a finite prefix-free decoder on which shortest-program
//!   complexity, conditional and relativized variants are exactly computable
//!   by exhaustive enumeration, together with verifiers for the projection
//!   inequalities that drive the theory.
//! - [`estimators`] estimates the information density of individual points
//!   with an in-repo incremental-dictionary compressor.
//! - [`recovery`] recovers a projection direction from two approximate points
//!   on a common level set and verifies the quadratic error bound.
//!
//! The [`harness`] module and the `fraclab` binary batch these pieces into
//! seeded, reproducible experiments. Start with the runnable examples
//! (`cargo run --release --example box_dimension`, ...).

// dimension-indexed loops over fixed-size coordinate arrays read better than
// iterator chains here
#![allow(clippy::needless_range_loop)]

pub mod dimension;
pub mod error;
pub mod estimators;
pub mod fractals;
pub mod geometry;
pub mod harness;
pub mod recovery;
pub mod toy;

pub use dimension::{box_dimension, projection_dimension, CountSeries, DimensionEstimate, Mode};
pub use fractals::cover::GridCover;
pub use fractals::{catalog, similarity_dimension, IfsSpec, SimilarityMap};
pub use geometry::{
    dot, log_distance, nearest_on_level_set, sample_direction, Direction, DyadicPoint, LogDistance,
};
