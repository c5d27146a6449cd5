//! Exact convex-position probabilities and the tail bounds built on them.
//!
//! For `r` points drawn uniformly from a parallelogram the probability of
//! convex position is `(C(2r-2, r-1) / r!)^2`; from a triangle it is
//! `2^r (3r-3)! / (((r-1)!)^3 (2r)!)`. Both are evaluated exactly with big
//! integers. Logs come from the log-gamma function.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::geometry::{is_convex_position, Rational, GRID_SCALE};
use crate::sampler::{sample_compiled, RegionSpec, SamplerError, SeedSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("convex-position probabilities need r >= 3, got {0}")]
    RTooSmall(usize),
    #[error("failure bound needs strip size t >= 3, got {0}")]
    StripTooSmall(usize),
    #[error("invalid Chernoff parameters: {0}")]
    Chernoff(String),
    #[error("need at least one trial")]
    NoTrials,
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Exact probability with its natural log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactProbability {
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub log_value: f64,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn factorial(k: u64) -> BigInt {
    (2..=k).fold(BigInt::one(), |acc, i| acc * i)
}

fn check_r(r: usize) -> Result<u64, StatsError> {
    if r < 3 {
        return Err(StatsError::RTooSmall(r));
    }
    Ok(r as u64)
}

/// Probability that `r` uniform points in a parallelogram are in convex position.
pub fn p_convex_parallelogram(r: usize) -> Result<ExactProbability, StatsError> {
    let r = check_r(r)?;
    // C(2r-2, r-1) / r! = (2r-2)! / ((r-1)!^2 r!)
    let num = factorial(2 * r - 2);
    let fr1 = factorial(r - 1);
    let den = &fr1 * &fr1 * (fr1 * r);
    let base = Rational::new(num, den);
    let value = &base * &base;
    let rf = r as f64;
    let log_value = 2.0 * (ln_gamma(2.0 * rf - 1.0) - 2.0 * ln_gamma(rf) - ln_gamma(rf + 1.0));
    Ok(ExactProbability { value, log_value })
}

/// Probability that `r` uniform points in a triangle are in convex position.
pub fn p_convex_triangle(r: usize) -> Result<ExactProbability, StatsError> {
    let r = check_r(r)?;
    let num = (BigInt::one() << r) * factorial(3 * r - 3);
    let fr1 = factorial(r - 1);
    let den = &fr1 * &fr1 * &fr1 * factorial(2 * r);
    let value = Rational::new(num, den);
    let rf = r as f64;
    let log_value = rf * std::f64::consts::LN_2 + ln_gamma(3.0 * rf - 2.0)
        - 3.0 * ln_gamma(rf)
        - ln_gamma(2.0 * rf + 1.0);
    Ok(ExactProbability { value, log_value })
}

/// `r^(-k)` as an exact rational.
fn inv_power(r: usize, k: usize) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(r), k))
}

/// Exact check of `p_square(r) >= r^(-2r)`.
pub fn check_square_lower_bound(r: usize) -> bool {
    p_convex_parallelogram(r).is_ok_and(|p| p.value >= inv_power(r, 2 * r))
}

/// Exact check of `p_triangle(r) <= r^(-r)`.
pub fn check_triangle_upper_bound(r: usize) -> bool {
    p_convex_triangle(r).is_ok_and(|p| p.value <= inv_power(r, r))
}

/// Smallest `r0` such that the triangle bound holds for every `r0 <= r <= max_r`.
pub fn triangle_bound_threshold(max_r: usize) -> Option<usize> {
    let mut first = None;
    for r in (3..=max_r).rev() {
        if check_triangle_upper_bound(r) {
            first = Some(r);
        } else {
            break;
        }
    }
    first
}

/// Natural log of a positive exact rational, accurate for huge numerators.
pub fn ln_rational(x: &Rational) -> f64 {
    fn ln_big(v: &BigInt) -> f64 {
        let bits = v.bits();
        let shift = bits.saturating_sub(60);
        let top = (v >> shift).to_f64().unwrap_or(f64::NAN);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
    debug_assert!(x.is_positive());
    ln_big(x.numer()) - ln_big(x.denom())
}

/// Parameters of the Chernoff tail `Pr(X >= 3qs/2) < exp(-qs/16)` for a sum
/// of `r` Bernoulli(`p`) variables dominated by `s` Bernoulli(`q`) ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffParams {
    pub p: f64,
    pub q: f64,
    pub r: u64,
    pub s: u64,
}

impl ChernoffParams {
    pub fn new(p: f64, q: f64, r: u64, s: u64) -> Result<Self, StatsError> {
        let prob = |v: f64| (0.0..=1.0).contains(&v);
        if !prob(p) || !prob(q) {
            return Err(StatsError::Chernoff(format!(
                "p={p}, q={q} must lie in [0, 1]"
            )));
        }
        if q < p {
            return Err(StatsError::Chernoff(format!("q={q} < p={p}")));
        }
        if s < r {
            return Err(StatsError::Chernoff(format!("s={s} < r={r}")));
        }
        Ok(ChernoffParams { p, q, r, s })
    }

    /// The threshold `3qs/2`.
    pub fn threshold(&self) -> f64 {
        1.5 * self.q * self.s as f64
    }
}

pub fn chernoff_tail(params: &ChernoffParams) -> f64 {
    (-params.q * params.s as f64 / 16.0).exp()
}

/// Strip plan for the lower-bound construction: `k` groups of `t` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundPlan {
    pub n: usize,
    pub t: usize,
    pub k: usize,
}

impl LowerBoundPlan {
    /// `t = floor(ln n / (2 ln ln n))`, at least 1.
    pub fn new(n: usize) -> Self {
        let nf = n as f64;
        let t = if n >= 16 {
            (nf.ln() / (2.0 * nf.ln().ln())).floor() as usize
        } else {
            1
        };
        Self::with_t(n, t.max(1))
    }

    pub fn with_t(n: usize, t: usize) -> Self {
        let t = t.max(1);
        LowerBoundPlan { n, t, k: n / t }
    }
}

/// Failure probability that no strip group is in convex position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FailureBound {
    /// `(1 - t^(-2t))^(n/t)`.
    pub exact_form: f64,
    /// `exp(-n t^(-2t-1))`.
    pub e_bound: f64,
}

pub fn lower_bound_failure_prob(plan: &LowerBoundPlan) -> Result<FailureBound, StatsError> {
    if plan.t < 3 {
        return Err(StatsError::StripTooSmall(plan.t));
    }
    let t = plan.t as f64;
    let n = plan.n as f64;
    let q = (-2.0 * t * t.ln()).exp();
    Ok(FailureBound {
        exact_form: ((n / t) * (-q).ln_1p()).exp(),
        e_bound: (-n * q / t).exp(),
    })
}

/// Estimate and binomial standard error of the convex-position frequency of
/// `r` uniform points in `region`. Trial `i` draws from stream `i` of `seed`.
pub fn empirical_p_convex(
    region: &RegionSpec,
    r: usize,
    trials: u64,
    seed: SeedSpec,
) -> Result<(f64, f64), StatsError> {
    check_r(r)?;
    if trials == 0 {
        return Err(StatsError::NoTrials);
    }
    region.validate()?;
    let compiled = region.compile(GRID_SCALE)?;
    let mut hits = 0u64;
    for trial in 0..trials {
        let mut rng = seed.rng(trial);
        let ps = sample_compiled(&compiled, region, r, &mut rng);
        if is_convex_position(&ps.points) {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    Ok((p, (p * (1.0 - p) / trials as f64).sqrt()))
}

/// `(estimate - exact) / std_error`, zero when both agree with no spread.
pub fn z_score(estimate: f64, std_error: f64, exact: f64) -> f64 {
    let d = estimate - exact;
    if std_error > 0.0 {
        d / std_error
    } else if d.is_zero() {
        0.0
    } else {
        d.signum() * f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn small_values() {
        assert_eq!(p_convex_parallelogram(3).unwrap().value, q(1, 1));
        assert_eq!(p_convex_parallelogram(4).unwrap().value, q(25, 36));
        assert_eq!(p_convex_parallelogram(5).unwrap().value, q(49, 144));
        assert_eq!(p_convex_triangle(3).unwrap().value, q(1, 1));
        assert_eq!(p_convex_triangle(4).unwrap().value, q(2, 3));
        assert_eq!(p_convex_parallelogram(2), Err(StatsError::RTooSmall(2)));
        assert_eq!(p_convex_triangle(1), Err(StatsError::RTooSmall(1)));
    }

    #[test]
    fn logs_match_exact_values() {
        for r in 3..=200 {
            for p in [
                p_convex_parallelogram(r).unwrap(),
                p_convex_triangle(r).unwrap(),
            ] {
                let exact = ln_rational(&p.value);
                assert!(
                    (exact - p.log_value).abs() <= 1e-12 * exact.abs().max(1.0),
                    "r={r}: {exact} vs {}",
                    p.log_value
                );
            }
        }
    }

    #[test]
    fn chernoff() {
        let p = ChernoffParams::new(0.1, 0.2, 10, 80).unwrap();
        assert!((chernoff_tail(&p) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(ChernoffParams::new(0.3, 0.2, 1, 1).is_err());
        assert!(ChernoffParams::new(0.1, 0.2, 5, 4).is_err());
        assert!(ChernoffParams::new(0.1, 1.2, 5, 4).is_err());
    }

    #[test]
    fn failure_bound_shape() {
        assert_eq!(
            lower_bound_failure_prob(&LowerBoundPlan::with_t(100, 2)),
            Err(StatsError::StripTooSmall(2))
        );
        let b = lower_bound_failure_prob(&LowerBoundPlan::with_t(2000, 5)).unwrap();
        assert!(b.exact_form > 0.0 && b.exact_form < 1.0);
        assert!(b.e_bound >= b.exact_form);
    }

    #[test]
    fn plan_strip_size() {
        assert_eq!(LowerBoundPlan::new(2000).t, 1);
        let p = LowerBoundPlan::new(100_000_000);
        assert_eq!(p.t, 3);
        assert!(p.t * p.k <= p.n);
        assert_eq!(LowerBoundPlan::with_t(2003, 5).k, 400);
    }

    #[test]
    fn three_points_almost_always_convex() {
        let (p, _) =
            empirical_p_convex(&RegionSpec::UnitSquare, 3, 2000, SeedSpec::new(5)).unwrap();
        assert!(p >= 1.0 - 1e-4);
        assert!(empirical_p_convex(&RegionSpec::UnitSquare, 3, 0, SeedSpec::new(5)).is_err());
    }

    #[test]
    fn z_scores() {
        assert!((z_score(0.5, 0.1, 0.3) - 2.0).abs() < 1e-12);
        assert_eq!(z_score(1.0, 0.0, 1.0), 0.0);
        assert!(z_score(0.9, 0.0, 1.0).is_infinite());
    }
}
