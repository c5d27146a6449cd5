use convex_holes::convex_stats::{
    check_square_lower_bound, check_triangle_upper_bound, chernoff_tail, empirical_p_convex,
    ln_rational, lower_bound_failure_prob, p_convex_parallelogram, p_convex_triangle,
    triangle_bound_threshold, z_score, ChernoffParams, LowerBoundPlan,
};
use convex_holes::{rational_to_f64, Rational, RegionSpec, SeedSpec};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

fn q(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[test]
fn values_at_ten_match_hand_reduced_fractions() {
    // 2^10 27! / (9!^3 20!) and (C(18, 9) / 10!)^2, reduced by hand.
    assert_eq!(p_convex_triangle(10).unwrap().value, q(3289, 34_292_160));
    assert_eq!(
        p_convex_parallelogram(10).unwrap().value,
        q(5_909_761, 32_920_473_600)
    );
}

#[test]
fn small_values() {
    assert_eq!(p_convex_parallelogram(3).unwrap().value, q(1, 1));
    assert_eq!(p_convex_triangle(3).unwrap().value, q(1, 1));
    assert_eq!(p_convex_parallelogram(5).unwrap().value, q(49, 144));
    assert_eq!(p_convex_triangle(5).unwrap().value, q(11, 36));
    assert!(p_convex_parallelogram(2).is_err());
    assert!(p_convex_triangle(0).is_err());
}

#[test]
fn log_values_track_exact_values() {
    for r in [3, 4, 10, 50, 120, 200] {
        for p in [
            p_convex_parallelogram(r).unwrap(),
            p_convex_triangle(r).unwrap(),
        ] {
            let exact = ln_rational(&p.value);
            let tol = 1e-12 * exact.abs().max(1.0);
            assert!(
                (p.log_value - exact).abs() <= tol,
                "r={r}: {} vs {exact}",
                p.log_value
            );
        }
    }
}

#[test]
fn probabilities_decrease_in_r() {
    for r in 3..60 {
        assert!(
            p_convex_parallelogram(r + 1).unwrap().value < p_convex_parallelogram(r).unwrap().value
        );
        assert!(p_convex_triangle(r + 1).unwrap().value < p_convex_triangle(r).unwrap().value);
    }
}

#[test]
fn bound_sweeps() {
    assert!((3..=100).all(check_square_lower_bound));
    let t = triangle_bound_threshold(200).expect("threshold exists");
    assert!((t..=200).all(check_triangle_upper_bound));
    assert!(!check_triangle_upper_bound(t - 1));
}

#[test]
fn empirical_triangle_and_square_agree_at_five() {
    for (region, exact) in [
        (RegionSpec::UnitSquare, p_convex_parallelogram(5).unwrap()),
        (RegionSpec::triangle(), p_convex_triangle(5).unwrap()),
    ] {
        let (p, se) = empirical_p_convex(&region, 5, 40_000, SeedSpec::new(55)).unwrap();
        let z = z_score(p, se, rational_to_f64(&exact.value));
        assert!(z.abs() <= 4.0, "{}: z = {z}", region.label());
    }
}

#[test]
fn empirical_is_affine_invariant_across_parallelograms() {
    let sheared = RegionSpec::normalized_polygon(&[
        convex_holes::RationalPoint::from_fraction(-3, -1, 4),
        convex_holes::RationalPoint::from_fraction(1, -1, 4),
        convex_holes::RationalPoint::from_fraction(3, 1, 4),
        convex_holes::RationalPoint::from_fraction(-1, 1, 4),
    ])
    .unwrap();
    let exact = rational_to_f64(&p_convex_parallelogram(4).unwrap().value);
    let (p, se) = empirical_p_convex(&sheared, 4, 40_000, SeedSpec::new(56)).unwrap();
    assert!(z_score(p, se, exact).abs() <= 4.0);
}

#[test]
fn chernoff_tail_dominates_binomial_frequency() {
    let params = ChernoffParams::new(0.08, 0.1, 300, 400).unwrap();
    let bound = chernoff_tail(&params);
    let threshold = params.threshold();
    let trials = 50_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (n, p) in [(params.r, params.p), (params.s, params.q)] {
        let dist = Binomial::new(n, p).unwrap();
        let hits = (0..trials)
            .filter(|_| dist.sample(&mut rng) as f64 >= threshold)
            .count() as f64;
        let freq = hits / trials as f64;
        let se = (bound * (1.0 - bound) / trials as f64).sqrt();
        assert!(freq <= bound + 3.0 * se, "n={n}: {freq} above {bound}");
    }
}

#[test]
fn chernoff_rejects_invalid_parameters() {
    assert!(ChernoffParams::new(0.2, 0.1, 10, 20).is_err());
    assert!(ChernoffParams::new(0.1, 0.2, 30, 20).is_err());
    assert!(ChernoffParams::new(-0.1, 0.2, 10, 20).is_err());
    assert!(ChernoffParams::new(0.1, 1.5, 10, 20).is_err());
}

#[test]
fn lower_bound_plan_and_failure_bound() {
    let plan = LowerBoundPlan::with_t(2000, 5);
    assert_eq!((plan.t, plan.k), (5, 400));
    let b = lower_bound_failure_prob(&plan).unwrap();
    assert!(b.exact_form <= b.e_bound && b.e_bound < 1.0);
    // Brute-force product for (1 - t^(-2t))^(n/t).
    let step = 1.0 - 5f64.powi(-10);
    let product = (0..400).fold(1.0, |acc, _| acc * step);
    assert!((b.exact_form - product).abs() < 1e-12);
    assert!(lower_bound_failure_prob(&LowerBoundPlan::with_t(2000, 2)).is_err());
    assert_eq!(LowerBoundPlan::new(100_000_000).t, 3);
}
