use crate::geometry::{cross, hull_vertices, Point};
use crate::sampler::PointSet;

use super::{
    prepare, strictly_inside, HoleError, HoleMethod, HoleResult, BRUTE_FORCE_CAP,
    CENSUS_MAX_POINTS, CENSUS_MAX_SIZE,
};

/// Exhaustive largest hole over all subsets. Limited to [`BRUTE_FORCE_CAP`]
/// points. Among equal sizes the lexicographically smallest sorted vertex list
/// wins.
pub fn largest_hole_bruteforce(ps: &PointSet) -> Result<HoleResult, HoleError> {
    let sorted = prepare(&ps.points)?;
    let n = sorted.len();
    if n > BRUTE_FORCE_CAP {
        return Err(HoleError::TooLargeForOracle(n));
    }
    let mut best: Option<Vec<Point>> = None;
    let mut subset = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        let k = mask.count_ones() as usize;
        if k < 3 || best.as_ref().is_some_and(|b| b.len() > k) {
            continue;
        }
        subset.clear();
        subset.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| sorted[i]));
        let hull = hull_vertices(&subset);
        if hull.len() != k || sorted.iter().any(|&q| strictly_inside(&hull, q)) {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => k > b.len() || (k == b.len() && subset < *b),
        };
        if better {
            best = Some(subset.clone());
        }
    }
    Ok(match best {
        None => HoleResult::collinear_sentinel(&sorted, HoleMethod::BruteForce),
        Some(b) => HoleResult {
            size: b.len(),
            vertices: hull_vertices(&b),
            method: HoleMethod::BruteForce,
            all_collinear: false,
        },
    })
}

fn census_input(ps: &PointSet, s: usize) -> Result<Vec<Point>, HoleError> {
    let sorted = prepare(&ps.points)?;
    if sorted.len() > CENSUS_MAX_POINTS || !(3..=CENSUS_MAX_SIZE).contains(&s) {
        return Err(HoleError::CensusCap { n: sorted.len(), s });
    }
    Ok(sorted)
}

/// Number of holes with exactly `s` vertices.
///
/// Grows subsets in index order and prunes any prefix that is not already a
/// hole (or a pair), since every subset of a hole with at least three points
/// is itself a hole.
pub fn count_holes_of_size(ps: &PointSet, s: usize) -> Result<u64, HoleError> {
    let sorted = census_input(ps, s)?;
    let mut chosen = Vec::with_capacity(s);
    Ok(grow(&sorted, s, 0, &mut chosen))
}

fn grow(points: &[Point], s: usize, from: usize, chosen: &mut Vec<Point>) -> u64 {
    if chosen.len() == s {
        return 1;
    }
    let mut total = 0;
    for i in from..points.len() {
        if points.len() - i < s - chosen.len() {
            break;
        }
        chosen.push(points[i]);
        let ok = chosen.len() < 3 || {
            let hull = hull_vertices(chosen);
            hull.len() == chosen.len() && points.iter().all(|&q| !strictly_inside(&hull, q))
        };
        if ok {
            total += grow(points, s, i + 1, chosen);
        }
        chosen.pop();
    }
    total
}

/// Same count as [`count_holes_of_size`], computed independently: every
/// `s`-subset by bitmask, hull by gift wrapping.
pub fn count_holes_of_size_by_masks(ps: &PointSet, s: usize) -> Result<u64, HoleError> {
    let sorted = census_input(ps, s)?;
    let n = sorted.len();
    if s > n {
        return Ok(0);
    }
    let mut total = 0;
    let mut subset = Vec::with_capacity(s);
    let limit = 1u64 << n;
    let mut mask = (1u64 << s) - 1;
    while mask < limit {
        subset.clear();
        subset.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| sorted[i]));
        if let Some(hull) = gift_wrap_strict(&subset) {
            if sorted.iter().all(|&q| !strictly_inside(&hull, q)) {
                total += 1;
            }
        }
        // Next mask with the same popcount.
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    Ok(total)
}

/// Counterclockwise hull if every point is a strict vertex, else `None`.
fn gift_wrap_strict(v: &[Point]) -> Option<Vec<Point>> {
    let start = *v.iter().min()?;
    let mut hull = vec![start];
    let mut cur = start;
    loop {
        let mut next = if v[0] == cur { v[1] } else { v[0] };
        for &q in v {
            if q == cur || q == next {
                continue;
            }
            let o = cross(cur, next, q);
            // Collinear with the current edge: no strict convex position.
            if o == 0 {
                return None;
            }
            if o < 0 {
                next = q;
            }
        }
        if next == start {
            break;
        }
        hull.push(next);
        if hull.len() > v.len() {
            return None;
        }
        cur = next;
    }
    (hull.len() == v.len()).then_some(hull)
}
