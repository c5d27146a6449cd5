use std::collections::HashSet;
use std::f64::consts::PI;

use convex_holes::sampler::strip_local_coords;
use convex_holes::{
    contains_point, sample_uniform, strip_partition, ContainMode, Rational, RationalPoint,
    RegionSpec, SeedSpec,
};
use num_traits::One;

const DRAWS: usize = 20_000;

/// Kolmogorov-Smirnov distance of `xs` from the uniform law on [0, 1].
fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

/// Critical value at the 0.1% level.
fn ks_critical(n: usize) -> f64 {
    1.95 / (n as f64).sqrt()
}

fn assert_uniform(label: &str, xs: Vec<f64>) {
    let n = xs.len();
    let d = ks_uniform(xs);
    assert!(
        d < ks_critical(n),
        "{label}: KS distance {d} over {n} draws"
    );
}

fn draw(region: &RegionSpec, seed: u64) -> Vec<(f64, f64)> {
    let ps = sample_uniform(region, DRAWS, SeedSpec::new(seed), 0).unwrap();
    ps.points.iter().map(|p| p.to_f64(ps.scale)).collect()
}

#[test]
fn square_marginals_are_uniform() {
    let pts = draw(&RegionSpec::UnitSquare, 1);
    assert_uniform("x", pts.iter().map(|p| p.0 + 0.5).collect());
    assert_uniform("y", pts.iter().map(|p| p.1 + 0.5).collect());
}

#[test]
fn disk_radius_and_angle_are_uniform() {
    let pts = draw(&RegionSpec::Disk, 2);
    // Unit area: radius 1/sqrt(pi), so pi r^2 is uniform on [0, 1].
    assert_uniform(
        "area fraction",
        pts.iter().map(|p| PI * (p.0 * p.0 + p.1 * p.1)).collect(),
    );
    assert_uniform(
        "angle",
        pts.iter()
            .map(|p| p.1.atan2(p.0) / (2.0 * PI) + 0.5)
            .collect(),
    );
}

#[test]
fn triangle_height_follows_linear_density() {
    // Apex at height 1/2 over a base at -1/2: the height u has CDF 1 - (1-u)^2.
    let pts = draw(&RegionSpec::triangle(), 3);
    assert_uniform(
        "height",
        pts.iter()
            .map(|p| {
                let u = p.1 + 0.5;
                1.0 - (1.0 - u) * (1.0 - u)
            })
            .collect(),
    );
    // Given the height, x is uniform across the section.
    assert_uniform(
        "section",
        pts.iter()
            .map(|p| {
                let half = 0.5 - p.1;
                (p.0 + half) / (2.0 * half)
            })
            .collect(),
    );
}

#[test]
fn polygon_samples_stay_inside_with_matching_centroid() {
    let region = RegionSpec::normalized_polygon(&[
        RationalPoint::from_fraction(-1, -1, 2),
        RationalPoint::from_fraction(1, -1, 2),
        RationalPoint::from_fraction(1, 0, 2),
        RationalPoint::from_fraction(0, 1, 2),
        RationalPoint::from_fraction(-1, 0, 2),
    ])
    .unwrap();
    let poly = region.polygon().unwrap();
    let ps = sample_uniform(&region, DRAWS, SeedSpec::new(4), 0).unwrap();
    assert!(ps.points.iter().all(|p| contains_point(
        &poly,
        &p.to_rational(ps.scale),
        ContainMode::Closed
    )));
    let (cx, cy) = region.centroid();
    let n = ps.len() as f64;
    let (mx, my) = ps.points.iter().fold((0.0, 0.0), |(sx, sy), p| {
        let (x, y) = p.to_f64(ps.scale);
        (sx + x / n, sy + y / n)
    });
    // Coordinates are bounded by 1/2 in absolute value, so 5 sigma is below 0.02.
    assert!(
        (mx - cx).abs() < 0.02 && (my - cy).abs() < 0.02,
        "mean ({mx}, {my}) vs ({cx}, {cy})"
    );
}

#[test]
fn seeding_is_reproducible_and_streams_differ() {
    let seed = SeedSpec::new(99);
    let a = sample_uniform(&RegionSpec::Disk, 200, seed, 7).unwrap();
    let b = sample_uniform(&RegionSpec::Disk, 200, seed, 7).unwrap();
    let c = sample_uniform(&RegionSpec::Disk, 200, seed, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.points, c.points);
    let d = sample_uniform(&RegionSpec::Disk, 200, SeedSpec::new(100), 7).unwrap();
    assert_ne!(a.points, d.points);
}

#[test]
fn abscissae_are_distinct() {
    for region in [
        RegionSpec::UnitSquare,
        RegionSpec::Disk,
        RegionSpec::triangle(),
    ] {
        let ps = sample_uniform(&region, 5000, SeedSpec::new(5), 0).unwrap();
        let xs: HashSet<i64> = ps.points.iter().map(|p| p.x).collect();
        assert_eq!(xs.len(), ps.len());
    }
}

#[test]
fn strips_tile_the_region() {
    for region in [RegionSpec::UnitSquare, RegionSpec::triangle()] {
        let ps = sample_uniform(&region, 600, SeedSpec::new(6), 0).unwrap();
        let strips = strip_partition(&ps, 6).unwrap();
        assert_eq!(strips.len(), 100);
        let total: Rational = strips.iter().map(|s| s.strip.area()).sum();
        assert!(total.is_one());
        for w in strips.windows(2) {
            assert_eq!(w[0].x_right, w[1].x_left);
            assert!(w[0].group.last().unwrap().x < w[1].group[0].x);
        }
        for s in &strips {
            assert_eq!(s.group.len(), 6);
            for p in &s.group {
                let q = p.to_rational(ps.scale);
                assert!(contains_point(&s.strip, &q, ContainMode::StrictInterior));
            }
        }
    }
}

#[test]
fn strip_groups_look_uniform_after_normalization() {
    let t = 5;
    let mut ys = Vec::new();
    let mut interior = Vec::new();
    for trial in 0..20 {
        let ps = sample_uniform(&RegionSpec::UnitSquare, 1000, SeedSpec::new(7), trial).unwrap();
        for s in strip_partition(&ps, t).unwrap() {
            for p in &s.group {
                ys.push(strip_local_coords(&s, *p, ps.scale).1);
            }
            // Given the outer two abscissae of a group, the rest are uniform between them.
            let lo = s.group[0].x as f64;
            let hi = s.group[t - 1].x as f64;
            for p in &s.group[1..t - 1] {
                interior.push((p.x as f64 - lo) / (hi - lo));
            }
        }
    }
    assert_uniform("strip y", ys);
    assert_uniform("strip interior x", interior);
}

#[test]
fn partition_rejects_bad_sizes() {
    let ps = sample_uniform(&RegionSpec::UnitSquare, 10, SeedSpec::new(8), 0).unwrap();
    assert!(strip_partition(&ps, 0).is_err());
    assert!(strip_partition(&ps, 3).is_err());
    let disk = sample_uniform(&RegionSpec::Disk, 10, SeedSpec::new(8), 0).unwrap();
    assert!(strip_partition(&disk, 5).is_err());
}
