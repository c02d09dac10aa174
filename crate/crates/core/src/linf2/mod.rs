//! Exact geometry of the plane with the maximum norm.
//!
//! Balls are axis-aligned squares, so every region the rest of the crate
//! needs (balls, half-planes, ball traces, neighborhoods of segments and
//! their intersections) is a convex polygon. Unbounded regions are clipped to
//! a square [`Window`].

mod pl;
mod planar;
mod polygon;
mod vec2;

pub use pl::{pl_minimize, AbsAffine, ConvexPl, MaxTerm, PlMin};
pub use planar::PlanarSpace;
pub use polygon::{ball_polygon, polygon_intersection, segment_neighborhood, ConvexPolygon, HalfPlane, Window};
pub use vec2::{linf_dist, Vec2};
