use std::collections::BTreeSet;

use convex_holes::{
    clip_to_region, contains_point, convex_hull, count_holes_of_size, count_holes_of_size_by_masks,
    fan_triangulate, is_hole, largest_hole_bruteforce, largest_hole_dp, largest_hole_dp_robust,
    orient, verify_prop1, ContainMode, ConvexPolygon, Lattice, Orientation, Point, PointSet,
    Rational, RationalPoint, RegionSpec, GRID_SCALE,
};
use proptest::prelude::*;

/// Distinct points on a coarse grid, so collinear triples are common.
fn coarse_points(max_len: usize, side: i64) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::btree_set((0..side, 0..side), 3..=max_len).prop_map(
        move |set: BTreeSet<_>| {
            let step = GRID_SCALE / side;
            set.into_iter()
                .map(|(x, y)| Point::new((x - side / 2) * step, (y - side / 2) * step))
                .collect()
        },
    )
}

/// Rational points in the unit square with denominator `den`.
fn rational_points(den: i64) -> impl Strategy<Value = Vec<RationalPoint>> {
    prop::collection::vec((-den / 2..=den / 2, -den / 2..=den / 2), 1..12).prop_map(move |v| {
        v.into_iter()
            .map(|(x, y)| RationalPoint::from_fraction(x, y, den))
            .collect()
    })
}

fn strictly_convex_ccw(poly: &ConvexPolygon) -> bool {
    let v = poly.vertices();
    let m = v.len();
    m < 3
        || (0..m).all(|i| {
            orient(&v[i], &v[(i + 1) % m], &v[(i + 2) % m]) == Orientation::CounterClockwise
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hull_is_convex_and_covers_input(pts in coarse_points(40, 16)) {
        let hull = convex_hull(&pts, GRID_SCALE);
        prop_assert!(strictly_convex_ccw(&hull));
        let rs: Vec<RationalPoint> = pts.iter().map(|p| p.to_rational(GRID_SCALE)).collect();
        for v in hull.vertices() {
            prop_assert!(rs.contains(v));
        }
        if hull.len() >= 3 {
            for p in &rs {
                prop_assert!(contains_point(&hull, p, ContainMode::Closed));
            }
        }
    }

    #[test]
    fn dp_matches_bruteforce_with_collinear_points(pts in coarse_points(12, 6)) {
        let ps = PointSet::from_points(pts);
        let dp = largest_hole_dp(&ps).unwrap();
        let bf = largest_hole_bruteforce(&ps).unwrap();
        prop_assert_eq!(dp.size, bf.size);
        prop_assert_eq!(dp.all_collinear, bf.all_collinear);
        prop_assert!(dp.verify(&ps.points));
        prop_assert!(bf.verify(&ps.points));
    }

    #[test]
    fn fast_and_robust_dp_agree(pts in coarse_points(60, 10)) {
        let ps = PointSet::from_points(pts);
        let fast = largest_hole_dp(&ps).unwrap();
        let robust = largest_hole_dp_robust(&ps).unwrap();
        prop_assert_eq!(fast.size, robust.size);
        prop_assert!(robust.verify(&ps.points));
    }

    #[test]
    fn witness_is_invariant_under_point_order(pts in coarse_points(12, 8), rot in 0usize..12) {
        let mut shuffled = pts.clone();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let a = largest_hole_dp(&PointSet::from_points(pts)).unwrap();
        let b = largest_hole_dp(&PointSet::from_points(shuffled)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn enumerators_agree(pts in coarse_points(10, 6), s in 3usize..=6) {
        let ps = PointSet::from_points(pts);
        prop_assert_eq!(
            count_holes_of_size(&ps, s).unwrap(),
            count_holes_of_size_by_masks(&ps, s).unwrap()
        );
    }

    #[test]
    fn triangles_are_holes_iff_empty(pts in coarse_points(10, 8), i in 0usize..10, j in 0usize..10, k in 0usize..10) {
        let m = pts.len();
        let (a, b, c) = (pts[i % m], pts[j % m], pts[k % m]);
        prop_assume!(a != b && b != c && a != c);
        let tri = ConvexPolygon::hull_of(&[
            a.to_rational(GRID_SCALE), b.to_rational(GRID_SCALE), c.to_rational(GRID_SCALE),
        ]);
        prop_assume!(!tri.is_degenerate());
        let empty = pts.iter().all(|p| !contains_point(&tri, &p.to_rational(GRID_SCALE), ContainMode::StrictInterior));
        prop_assert_eq!(is_hole(&[a, b, c], &pts), empty);
    }

    #[test]
    fn clipped_lattice_quadrilateral_triangulates_exactly(
        n in 3u64..200,
        idx in prop::collection::vec((any::<u64>(), any::<u64>()), 4),
    ) {
        let lattice = Lattice::new(n).unwrap();
        let top = lattice.max_index();
        let pts: Vec<RationalPoint> = idx.iter().map(|&(i, j)| lattice.point(i % (top + 1), j % (top + 1))).collect();
        let quad = ConvexPolygon::hull_of(&pts);
        let clipped = clip_to_region(&quad, &RegionSpec::UnitSquare).unwrap();
        let tris = fan_triangulate(&clipped);
        prop_assert!(clipped.len() <= 8);
        prop_assert!(tris.len() <= 8);
        let total: Rational = tris.iter().map(|t| t.area()).sum();
        prop_assert_eq!(total, clipped.area());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_approximation_postconditions(pts in rational_points(4096), n in 4u64..3000) {
        let h = ConvexPolygon::hull_of(&pts);
        prop_assume!(h.len() >= 2);
        let report = verify_prop1(&h, n).unwrap();
        prop_assert!(report.passed(), "{:?}", report.violations());
        let lattice = Lattice { n };
        prop_assert!(report.q1.on_lattice(&lattice));
        if h.len() >= 3 {
            for v in h.vertices() {
                prop_assert!(contains_point(&report.q1.polygon(), v, ContainMode::Closed));
            }
        }
        if let Some(inner) = &report.inner {
            for v in inner.q0.polygon().vertices() {
                prop_assert!(contains_point(&h, v, ContainMode::Closed));
            }
        }
    }
}
