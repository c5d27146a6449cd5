//! Largest convex holes in random planar point sets.
//!
//! A convex hole of a point set is a convex polygon with vertices in the set
//! and no point of the set strictly inside it. This crate computes the
//! largest one exactly, evaluates the exact convex-position probabilities
//! for parallelograms and triangles, approximates convex polygons from inside
//! and outside by lattice quadrilaterals, and drives seeded Monte Carlo
//! experiments that check the Θ(log n / log log n) growth of the largest
//! hole at desk scale.
//!
//! Modules, bottom-up:
//! - [`geometry`]: exact predicates, hulls, areas, clipping.
//! - [`sampler`]: seeded uniform sampling over convex regions, strip partition.
//! - [`holes`]: largest-hole dynamic program, brute-force oracle, hole census.
//! - [`convex_stats`]: exact convex-position probabilities and tail bounds.
//! - [`lattice`]: inscribed/circumscribed lattice quadrilaterals.
//! - [`harness`]: experiment configuration, CSV/JSON output.

pub mod convex_stats;
pub mod geometry;
pub mod harness;
pub mod holes;
pub mod lattice;
pub mod sampler;

pub use geometry::{
    clip_convex, clip_to_region, contains_point, convex_hull, cross, diameter_pair,
    fan_triangulate, hull_vertices, is_convex_position, orient, polygon_area, rational_to_f64,
    supporting_extremes, ContainMode, ConvexPolygon, GeometryError, Orientation, Point, Rational,
    RationalPoint, COORD_LIMIT, GRID_SCALE,
};
pub use holes::{
    count_holes_of_size, count_holes_of_size_by_masks, is_hole, largest_hole_bruteforce,
    largest_hole_dp, largest_hole_dp_robust, HoleError, HoleMethod, HoleResult,
};
pub use lattice::{
    circumscribe, inscribe, verify_prop1, ApproxTrace, Lattice, LatticeQuadrilateral,
};
pub use sampler::{sample_uniform, strip_partition, PointSet, RegionSpec, SeedSpec, Strip};
