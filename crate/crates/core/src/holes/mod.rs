//! Largest convex holes.
//!
//! A hole is a strictly convex polygon with vertices in the point set and no
//! point of the set in its open interior. Points lying on an edge without
//! being a vertex do not break emptiness.

mod brute;
mod dp;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{cross, hull_vertices, Point};

pub use brute::{count_holes_of_size, count_holes_of_size_by_masks, largest_hole_bruteforce};
pub use dp::{largest_hole_dp, largest_hole_dp_robust};

/// Point-count cap for the exhaustive oracle.
pub const BRUTE_FORCE_CAP: usize = 20;
/// Caps for the hole census.
pub const CENSUS_MAX_POINTS: usize = 32;
pub const CENSUS_MAX_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HoleError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("duplicate point {0}")]
    DuplicatePoint(Point),
    #[error("{0} points exceed the brute-force oracle cap of {BRUTE_FORCE_CAP}")]
    TooLargeForOracle(usize),
    #[error("census limited to {CENSUS_MAX_POINTS} points and sizes 3..={CENSUS_MAX_SIZE}, got n={n}, s={s}")]
    CensusCap { n: usize, s: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HoleMethod {
    Dp,
    BruteForce,
}

/// Size and witness of a largest hole.
///
/// When every input point is collinear there is no hole; `size` is then the
/// sentinel 2, `vertices` holds the two extreme points and `all_collinear` is set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleResult {
    pub size: usize,
    /// Counterclockwise, starting from the lexicographically smallest vertex.
    pub vertices: Vec<Point>,
    pub method: HoleMethod,
    pub all_collinear: bool,
}

impl HoleResult {
    fn collinear_sentinel(sorted: &[Point], method: HoleMethod) -> Self {
        HoleResult {
            size: 2,
            vertices: vec![sorted[0], sorted[sorted.len() - 1]],
            method,
            all_collinear: true,
        }
    }

    /// Checks the witness against the full input: vertices are input points in
    /// strictly convex position, and no input point is strictly inside.
    pub fn verify(&self, points: &[Point]) -> bool {
        if self.all_collinear {
            return self.size == 2;
        }
        let all: HashSet<Point> = points.iter().copied().collect();
        self.vertices.len() == self.size
            && self.vertices.iter().all(|v| all.contains(v))
            && is_hole(&self.vertices, points)
    }
}

/// Strict interior test against a counterclockwise convex cycle.
#[inline]
pub(crate) fn strictly_inside(cycle: &[Point], q: Point) -> bool {
    let n = cycle.len();
    (0..n).all(|i| cross(cycle[i], cycle[(i + 1) % n], q) > 0)
}

/// Whether `subset` (any order) is the vertex set of a hole of `points`.
pub fn is_hole(subset: &[Point], points: &[Point]) -> bool {
    if subset.len() < 3 {
        return false;
    }
    let hull = hull_vertices(subset);
    if hull.len() != subset.len() {
        return false;
    }
    points.iter().all(|&q| !strictly_inside(&hull, q))
}

/// Rejects inputs the hole routines cannot take; returns the points sorted.
pub(crate) fn prepare(points: &[Point]) -> Result<Vec<Point>, HoleError> {
    if points.len() < 3 {
        return Err(HoleError::TooFewPoints(points.len()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(HoleError::DuplicatePoint(w[0]));
    }
    Ok(sorted)
}
