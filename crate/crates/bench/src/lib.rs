//! Fixed inputs shared by the benchmarks.

use convex_holes::{sample_uniform, ConvexPolygon, PointSet, RegionSpec, SeedSpec};

pub const SEED: u64 = 0x5eed;

/// Uniform points in the unit square.
pub fn square_points(n: usize) -> PointSet {
    sample_uniform(&RegionSpec::UnitSquare, n, SeedSpec::new(SEED), n as u64).expect("valid sample")
}

/// The largest hole of a uniform sample, as an exact polygon.
pub fn largest_hole_polygon(n: usize) -> ConvexPolygon {
    let ps = square_points(n);
    let hole = convex_holes::largest_hole_dp(&ps).expect("hole");
    let pts: Vec<_> = hole
        .vertices
        .iter()
        .map(|p| p.to_rational(ps.scale))
        .collect();
    ConvexPolygon::hull_of(&pts)
}
