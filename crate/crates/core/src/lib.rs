//! Computable gluing of hyperconvex metric spaces.
//!
//! The crate models metric spaces obtained by gluing closed half-planes of
//! the plane with the maximum norm along their boundary lines, and provides:
//!
//! * exact distance evaluation in glued spaces through the gluing set,
//! * exact ball traces and a polygon-based solver for ball-intersection
//!   (Helly-type) problems,
//! * randomized falsifiers for hyperconvexity, strong convexity, gatedness,
//!   external hyperconvexity and proximinality that emit re-checkable
//!   certificates,
//! * the existence arguments for intersections of externally hyperconvex sets
//!   run as iterative algorithms with convergence traces,
//! * the two-half-plane example family with its counterexample balls and a
//!   phase sweep over the slopes.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, figures and the
//! command line live in the companion `hyperglue` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod checkers;
pub mod constructions;
pub mod error;
pub mod gluing;
pub mod linf2;
pub mod metric;
pub mod report;
pub mod s5;
pub mod seed;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerance;
