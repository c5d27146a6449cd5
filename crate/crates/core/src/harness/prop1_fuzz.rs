use num_bigint::BigInt;
use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{
    cell_seed, fmt_f64, par_map, timed, Assertion, ExperimentConfig, HarnessError, RunOutput, Table,
};
use crate::geometry::{rational_to_f64, ConvexPolygon, Rational, RationalPoint, GRID_SCALE};
use crate::lattice::{verify_prop1, verify_prop1_with, Prop1Report, C_MIN_AREA};
use crate::sampler::{sample_uniform, RegionSpec, SeedSpec};

pub(crate) const DEFAULT_LATTICE_N: u64 = 2000;
/// Smaller area constants tried on the boundary triangles (reported only).
pub(crate) const PROBE_CONSTANTS: [u64; 3] = [8, 16, 32];
const MAX_DUMPED_FAILURES: usize = 10;

/// Unit directions with rational coordinates, from Pythagorean triples.
const TRIPLES: [(i64, i64, i64); 6] = [
    (1, 0, 1),
    (3, 4, 5),
    (5, 12, 13),
    (8, 15, 17),
    (7, 24, 25),
    (20, 21, 29),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    RandomHull,
    Sliver,
    ExtremeSliver,
    Segment,
    BoundaryTriangle,
    ThinTriangle,
}

impl Kind {
    fn of(i: u64) -> Self {
        match i % 10 {
            0..=5 => Kind::RandomHull,
            6 => Kind::Sliver,
            7 if (i / 10).is_multiple_of(2) => Kind::ExtremeSliver,
            7 => Kind::Segment,
            8 => Kind::BoundaryTriangle,
            _ => Kind::ThinTriangle,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Kind::RandomHull => "random_hull",
            Kind::Sliver => "sliver",
            Kind::ExtremeSliver => "extreme_sliver",
            Kind::Segment => "segment",
            Kind::BoundaryTriangle => "boundary_triangle",
            Kind::ThinTriangle => "thin_triangle",
        }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn qn(k: u64) -> Rational {
    Rational::from_integer(BigInt::from(k))
}

/// Uniform rational in `[lo, hi]` with denominator `2^20`.
fn rand_q<R: Rng>(rng: &mut R, lo: &Rational, hi: &Rational) -> Rational {
    let u = Rational::new(rng.random_range(0..=1i64 << 20).into(), (1i64 << 20).into());
    lo + (hi - lo) * u
}

fn rand_point<R: Rng>(rng: &mut R) -> RationalPoint {
    let (lo, hi) = (q(-1, 2), q(1, 2));
    RationalPoint::new(rand_q(rng, &lo, &hi), rand_q(rng, &lo, &hi))
}

fn in_region(p: &RationalPoint) -> bool {
    let half = q(1, 2);
    p.x.abs() <= half && p.y.abs() <= half
}

fn unit_direction<R: Rng>(rng: &mut R) -> RationalPoint {
    let (a, b, c) = TRIPLES[rng.random_range(0..TRIPLES.len())];
    let (a, b) = if rng.random::<bool>() { (a, b) } else { (b, a) };
    let sx = if rng.random::<bool>() { 1 } else { -1 };
    let sy = if rng.random::<bool>() { 1 } else { -1 };
    RationalPoint::from_fraction(sx * a, sy * b, c)
}

/// Rectangle centred at the origin along a rational unit direction. Its
/// length is 9/10 of the largest that fits in the unit square; its width is
/// `area / length`, or `length / aspect` when an aspect ratio is given,
/// halved until the rectangle fits.
fn sliver<R: Rng>(rng: &mut R, area: &Rational, aspect: Option<u64>) -> ConvexPolygon {
    let u = unit_direction(rng);
    let v = u.perp();
    let m = if u.x.abs() > u.y.abs() {
        u.x.abs()
    } else {
        u.y.abs()
    };
    let length = q(9, 10) / &m;
    let mut width = match aspect {
        Some(a) => &length / qn(a),
        None => area / &length,
    };
    let hl = &length / q(2, 1);
    loop {
        let hw = &width / q(2, 1);
        let corner = |sl: i64, sw: i64| u.scale(&(&hl * q(sl, 1))).add(&v.scale(&(&hw * q(sw, 1))));
        let cs = [corner(-1, -1), corner(1, -1), corner(1, 1), corner(-1, 1)];
        if cs.iter().all(in_region) {
            return ConvexPolygon::hull_of(&cs);
        }
        width /= q(2, 1);
    }
}

/// Triangle of exact area `area` on a random base `ab`, apex above the base.
fn triangle<R: Rng>(rng: &mut R, area: &Rational, min_base: f64) -> ConvexPolygon {
    loop {
        let a = rand_point(rng);
        let b = rand_point(rng);
        let d = b.sub(&a);
        if rational_to_f64(&d.norm2()).sqrt() < min_base {
            continue;
        }
        let lambda = rand_q(rng, &q(0, 1), &q(1, 1));
        let mu = area * q(2, 1) / d.norm2();
        let c = a.add(&d.scale(&lambda)).add(&d.perp().scale(&mu));
        if in_region(&c) {
            return ConvexPolygon::hull_of(&[a, b, c]);
        }
    }
}

fn instance(
    kind: Kind,
    n: u64,
    seed: SeedSpec,
    rng: &mut ChaCha8Rng,
) -> Result<ConvexPolygon, HarnessError> {
    let per_n = |c: u64| qn(c) / qn(n);
    Ok(match kind {
        Kind::RandomHull => {
            let k = rng.random_range(5..=50);
            let ps = sample_uniform(&RegionSpec::UnitSquare, k, seed, 0)
                .map_err(|e| HarnessError::Run(e.to_string()))?;
            ConvexPolygon::hull_of(
                &ps.points
                    .iter()
                    .map(|p| p.to_rational(GRID_SCALE))
                    .collect::<Vec<_>>(),
            )
        }
        Kind::Sliver => sliver(rng, &per_n(2 * C_MIN_AREA), None),
        Kind::ExtremeSliver => sliver(rng, &q(0, 1), Some(10_000)),
        Kind::Segment => ConvexPolygon::hull_of(&[rand_point(rng), rand_point(rng)]),
        Kind::BoundaryTriangle => triangle(rng, &per_n(C_MIN_AREA), 0.05),
        Kind::ThinTriangle => triangle(rng, &per_n(100), 0.8),
    })
}

struct FuzzCase {
    index: u64,
    kind: Kind,
    vertices: usize,
    report: Prop1Report,
    /// For each probe constant c: did the inner construction at area c/n pass?
    probes: Vec<Option<bool>>,
    runtime_ms: Option<f64>,
}

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let n = cfg.lattice_n.unwrap_or(DEFAULT_LATTICE_N);
    let seed = cell_seed(cfg, 0, n as usize);
    let indices: Vec<u64> = (0..cfg.trials).collect();
    let cases = par_map(cfg.worker_count, &indices, |&i| {
        let kind = Kind::of(i);
        let mut rng = seed.rng(i);
        let (res, runtime_ms) = timed(cfg.record_runtime, || -> Result<_, HarnessError> {
            let h = instance(kind, n, seed.derive(&[i]), &mut rng)?;
            let report = verify_prop1(&h, n).map_err(|e| HarnessError::Run(e.to_string()))?;
            let mut probes = Vec::new();
            if kind == Kind::BoundaryTriangle {
                for c in PROBE_CONSTANTS {
                    let t = triangle(&mut rng, &(qn(c) / qn(n)), 0.05);
                    let r = verify_prop1_with(&t, n, c)
                        .map_err(|e| HarnessError::Run(e.to_string()))?;
                    probes.push(Some(r.passed()));
                }
            }
            Ok((h.len(), report, probes))
        });
        let (vertices, report, probes) = res?;
        Ok(FuzzCase {
            index: i,
            kind,
            vertices,
            report,
            probes,
            runtime_ms,
        })
    })?;

    let mut table = Table::new(&[
        "experiment",
        "instance",
        "kind",
        "n",
        "seed",
        "vertices",
        "area_h",
        "area_q1",
        "q1_area_slack",
        "inner_applicable",
        "area_q0",
        "q0_area_slack",
        "chain_slack",
        "passed",
        "flags",
        "runtime_ms",
    ]);
    let mut worst_q1: Option<Rational> = None;
    let mut worst_q0: Option<Rational> = None;
    let mut worst_chain: Option<Rational> = None;
    let mut failures = Vec::new();
    let mut by_kind = std::collections::BTreeMap::<&str, (usize, usize, usize)>::new();
    let keep_min = |slot: &mut Option<Rational>, v: &Rational| {
        if slot.as_ref().is_none_or(|w| v < w) {
            *slot = Some(v.clone());
        }
    };
    for c in &cases {
        let r = &c.report;
        keep_min(&mut worst_q1, &r.q1_area_slack);
        if let Some(inner) = &r.inner {
            keep_min(&mut worst_q0, &inner.q0_area_slack);
            keep_min(&mut worst_chain, &inner.area_chain_slack);
        }
        let passed = r.passed();
        let entry = by_kind.entry(c.kind.name()).or_default();
        entry.0 += 1;
        entry.1 += usize::from(r.inner.is_some());
        entry.2 += usize::from(!passed);
        if !passed && failures.len() < MAX_DUMPED_FAILURES {
            failures.push(serde_json::to_value(r)?);
        }
        let opt = |v: Option<&Rational>| v.map(|x| fmt_f64(rational_to_f64(x))).unwrap_or_default();
        table.push(vec![
            cfg.experiment.to_string(),
            c.index.to_string(),
            c.kind.name().into(),
            n.to_string(),
            seed.master_seed.to_string(),
            c.vertices.to_string(),
            fmt_f64(rational_to_f64(&r.area_h)),
            fmt_f64(rational_to_f64(&r.area_q1)),
            fmt_f64(rational_to_f64(&r.q1_area_slack)),
            r.inner.is_some().to_string(),
            opt(r.inner.as_ref().map(|i| &i.area_q0)),
            opt(r.inner.as_ref().map(|i| &i.q0_area_slack)),
            opt(r.inner.as_ref().map(|i| &i.area_chain_slack)),
            passed.to_string(),
            r.violations().join(";"),
            c.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
        ]);
    }

    let violations: usize = by_kind.values().map(|e| e.2).sum();
    let boundary = cases
        .iter()
        .filter(|c| c.kind == Kind::BoundaryTriangle && c.report.inner.is_some())
        .count();
    let probes: Vec<_> = PROBE_CONSTANTS
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let runs: Vec<bool> = cases
                .iter()
                .filter_map(|x| x.probes.get(k).copied().flatten())
                .collect();
            json!({
                "constant": c,
                "instances": runs.len(),
                "passed": runs.iter().filter(|p| **p).count(),
            })
        })
        .collect();
    let assertions = vec![
        Assertion::new(
            "zero postcondition violations",
            violations == 0,
            format!(
                "{violations} of {} instances violated a postcondition",
                cases.len()
            ),
        ),
        Assertion::new(
            "boundary-area instances exercise the inner construction",
            boundary == by_kind.get("boundary_triangle").map_or(0, |e| e.0),
            format!("{boundary} boundary triangles with Q0"),
        ),
    ];
    let slack = |v: &Option<Rational>| {
        v.as_ref()
            .map(|x| json!({ "exact": x.to_string(), "decimal": rational_to_f64(x) }))
    };
    let kinds: serde_json::Map<String, serde_json::Value> = by_kind
        .iter()
        .map(|(k, (count, inner, bad))| {
            (
                k.to_string(),
                json!({ "instances": count, "inner_applicable": inner, "violations": bad }),
            )
        })
        .collect();
    RunOutput::new(
        cfg,
        table,
        json!({
            "lattice_n": n,
            "c_min_area": C_MIN_AREA,
            "kinds": kinds,
            "worst_slack": {
                "q1_area": slack(&worst_q1),
                "q0_area": slack(&worst_q0),
                "area_chain": slack(&worst_chain),
            },
            "smaller_constant_probes": probes,
            "failures": failures,
        }),
        assertions,
    )
}
