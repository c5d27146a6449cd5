//! Seeded uniform sampling over unit-area convex regions, and the vertical
//! strip partition of a sample into groups of equal size.
//!
//! Every trial draws from its own ChaCha stream keyed by `(master_seed, trial)`,
//! so a trial's points do not depend on which worker runs it or when.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geometry::{
    clip_convex, rational_to_f64, ConvexPolygon, Point, Rational, RationalPoint, GRID_SCALE,
};

/// Upper limit on points per sample; keeps duplicate-x resampling cheap.
pub const MAX_SAMPLE: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplerError {
    #[error("requested {0} points, grid capacity for distinct abscissae is {MAX_SAMPLE}")]
    TooManyPoints(usize),
    #[error("region polygon is not strictly convex")]
    NotConvex,
    #[error("region area must be exactly 1, got {0}")]
    NotUnitArea(String),
    #[error("region vertex outside the side-3 square")]
    OutOfBounds,
    #[error("triangle region needs exactly 3 vertices, got {0}")]
    TriangleArity(usize),
    #[error("strip size must be positive")]
    ZeroStripSize,
    #[error("strip size {t} does not divide point count {n}")]
    NotDivisible { n: usize, t: usize },
    #[error("two points share the abscissa {0}")]
    DuplicateAbscissa(i64),
    #[error("strip partition needs a polygonal region")]
    NonPolygonalRegion,
    #[error("cannot parse exact value {0:?}")]
    BadValue(String),
}

/// Exact coordinate as written in configs: `"3/8"`, `"-0.25"`, `"2"`, or a JSON number.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactValue(pub Rational);

impl FromStr for ExactValue {
    type Err = SamplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SamplerError::BadValue(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(ExactValue(Rational::new(n, d)));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        let v = Rational::new(num, den);
        Ok(ExactValue(if neg { -v } else { v }))
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(i) => Ok(ExactValue(Rational::from_integer(i.into()))),
            Raw::Float(f) => Rational::from_float(f)
                .map(ExactValue)
                .ok_or_else(|| serde::de::Error::custom("non-finite coordinate")),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Region the points are drawn from. Every kind has unit area.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawRegion")]
pub enum RegionSpec {
    /// The isothetic unit square centred at the origin.
    UnitSquare,
    /// Defaults to (-1, -1/2), (1, -1/2), (0, 1/2).
    Triangle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<[ExactValue; 2]>>,
    },
    /// Disk of radius 1/sqrt(pi) centred at the origin.
    Disk,
    /// Counterclockwise convex polygon of area exactly 1.
    ConvexPolygon { vertices: Vec<[ExactValue; 2]> },
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum RegionKind {
    UnitSquare,
    Triangle,
    Disk,
    ConvexPolygon,
}

// Internally tagged unit variants silently accept extra keys; a flat struct
// rejects them.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    kind: RegionKind,
    #[serde(default)]
    vertices: Option<Vec<[ExactValue; 2]>>,
}

impl TryFrom<RawRegion> for RegionSpec {
    type Error = String;

    fn try_from(raw: RawRegion) -> Result<Self, String> {
        match (raw.kind, raw.vertices) {
            (RegionKind::UnitSquare, None) => Ok(RegionSpec::UnitSquare),
            (RegionKind::Disk, None) => Ok(RegionSpec::Disk),
            (RegionKind::Triangle, vertices) => Ok(RegionSpec::Triangle { vertices }),
            (RegionKind::ConvexPolygon, Some(vertices)) => {
                Ok(RegionSpec::ConvexPolygon { vertices })
            }
            (RegionKind::ConvexPolygon, None) => Err("convex_polygon needs `vertices`".into()),
            (_, Some(_)) => Err("`vertices` only applies to triangle and convex_polygon".into()),
        }
    }
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn to_points(vs: &[[ExactValue; 2]]) -> Vec<RationalPoint> {
    vs.iter()
        .map(|[x, y]| RationalPoint::new(x.0.clone(), y.0.clone()))
        .collect()
}

impl RegionSpec {
    pub fn triangle() -> Self {
        RegionSpec::Triangle { vertices: None }
    }

    /// Polygon with its y-axis rescaled by the exact factor that makes its area 1.
    pub fn normalized_polygon(vertices: &[RationalPoint]) -> Result<Self, SamplerError> {
        let hull = ConvexPolygon::hull_of(vertices);
        if hull.len() < 3 {
            return Err(SamplerError::NotConvex);
        }
        let area = hull.area();
        let vs = hull
            .vertices()
            .iter()
            .map(|p| [ExactValue(p.x.clone()), ExactValue(&p.y / &area)])
            .collect();
        let spec = RegionSpec::ConvexPolygon { vertices: vs };
        spec.validate()?;
        Ok(spec)
    }

    pub fn label(&self) -> &'static str {
        match self {
            RegionSpec::UnitSquare => "square",
            RegionSpec::Triangle { .. } => "triangle",
            RegionSpec::Disk => "disk",
            RegionSpec::ConvexPolygon { .. } => "polygon",
        }
    }

    /// Exact polygon in unit lengths; `None` for the disk.
    pub fn polygon(&self) -> Option<ConvexPolygon> {
        let vs = match self {
            RegionSpec::UnitSquare => vec![
                RationalPoint::new(frac(-1, 2), frac(-1, 2)),
                RationalPoint::new(frac(1, 2), frac(-1, 2)),
                RationalPoint::new(frac(1, 2), frac(1, 2)),
                RationalPoint::new(frac(-1, 2), frac(1, 2)),
            ],
            RegionSpec::Triangle { vertices: None } => vec![
                RationalPoint::new(frac(-1, 1), frac(-1, 2)),
                RationalPoint::new(frac(1, 1), frac(-1, 2)),
                RationalPoint::new(frac(0, 1), frac(1, 2)),
            ],
            RegionSpec::Triangle { vertices: Some(vs) }
            | RegionSpec::ConvexPolygon { vertices: vs } => to_points(vs),
            RegionSpec::Disk => return None,
        };
        ConvexPolygon::from_ccw(vs).ok()
    }

    /// Checks convexity, exact unit area and bounds.
    pub fn validate(&self) -> Result<(), SamplerError> {
        if let RegionSpec::Triangle { vertices: Some(vs) } = self {
            if vs.len() != 3 {
                return Err(SamplerError::TriangleArity(vs.len()));
            }
        }
        if matches!(self, RegionSpec::Disk) {
            return Ok(());
        }
        let poly = self.polygon().ok_or(SamplerError::NotConvex)?;
        if poly.len() < 3 {
            return Err(SamplerError::NotConvex);
        }
        let area = poly.area();
        if !area.is_one() {
            return Err(SamplerError::NotUnitArea(area.to_string()));
        }
        let lim = frac(3, 2);
        if poly
            .vertices()
            .iter()
            .any(|p| p.x.abs() > lim || p.y.abs() > lim)
        {
            return Err(SamplerError::OutOfBounds);
        }
        Ok(())
    }

    /// Centroid in unit lengths (f64; used by statistical checks).
    pub fn centroid(&self) -> (f64, f64) {
        match self.polygon() {
            None => (0.0, 0.0),
            Some(poly) => {
                let v: Vec<(f64, f64)> = poly.vertices().iter().map(|p| p.to_f64()).collect();
                let n = v.len();
                let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    let (x0, y0) = v[i];
                    let (x1, y1) = v[(i + 1) % n];
                    let c = x0 * y1 - x1 * y0;
                    a += c;
                    cx += (x0 + x1) * c;
                    cy += (y0 + y1) * c;
                }
                (cx / (3.0 * a), cy / (3.0 * a))
            }
        }
    }

    pub fn compile(&self, scale: i64) -> Result<CompiledRegion, SamplerError> {
        self.validate()?;
        CompiledRegion::new(self, scale)
    }
}

/// Exact half-plane `a*x + b*y + c >= 0` over grid coordinates.
#[derive(Debug, Clone)]
struct HalfPlane {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    small: Option<(i128, i128, i128)>,
}

impl HalfPlane {
    /// Left side (closed) of the directed edge u -> v, in grid units of `scale`.
    fn left_of(u: &RationalPoint, v: &RationalPoint, scale: i64) -> Self {
        let den = [&u.x, &u.y, &v.x, &v.y]
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let int = |r: &Rational| (r * Rational::from_integer(den.clone())).to_integer();
        let (ux, uy, vx, vy) = (int(&u.x), int(&u.y), int(&v.x), int(&v.y));
        let s = BigInt::from(scale);
        let dx = &vx - &ux;
        let dy = &vy - &uy;
        let a = -&dy * &den;
        let b = &dx * &den;
        let c = -&dx * &uy * &s + &dy * &ux * &s;
        let fits = |x: &BigInt, bits: u64| x.bits() < bits;
        let small = if fits(&a, 90) && fits(&b, 90) && fits(&c, 124) {
            Some((
                a.to_i128().unwrap(),
                b.to_i128().unwrap(),
                c.to_i128().unwrap(),
            ))
        } else {
            None
        };
        HalfPlane { a, b, c, small }
    }

    fn contains(&self, p: Point) -> bool {
        match self.small {
            Some((a, b, c)) => a * p.x as i128 + b * p.y as i128 + c >= 0,
            None => {
                let v = &self.a * BigInt::from(p.x) + &self.b * BigInt::from(p.y) + &self.c;
                !v.is_negative()
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Square {
        half: i64,
    },
    Polygon {
        planes: Vec<HalfPlane>,
        fan: Vec<[(f64, f64); 3]>,
        cumulative: Vec<f64>,
    },
    Disk {
        radius: f64,
        radius2_grid: i128,
    },
}

/// A region prepared for sampling and exact grid containment.
#[derive(Debug, Clone)]
pub struct CompiledRegion {
    shape: Shape,
    scale: i64,
}

impl CompiledRegion {
    fn new(spec: &RegionSpec, scale: i64) -> Result<Self, SamplerError> {
        let shape = match spec {
            RegionSpec::UnitSquare => Shape::Square { half: scale / 2 },
            RegionSpec::Disk => {
                let s = scale as f64;
                Shape::Disk {
                    radius: 1.0 / std::f64::consts::PI.sqrt(),
                    radius2_grid: (s * s / std::f64::consts::PI).floor() as i128,
                }
            }
            _ => {
                let poly = spec.polygon().ok_or(SamplerError::NotConvex)?;
                let v = poly.vertices();
                let n = v.len();
                let planes = (0..n)
                    .map(|i| HalfPlane::left_of(&v[i], &v[(i + 1) % n], scale))
                    .collect();
                let vf: Vec<(f64, f64)> = v.iter().map(|p| p.to_f64()).collect();
                let mut fan = Vec::new();
                let mut cumulative = Vec::new();
                let mut total = 0.0;
                for k in 1..n - 1 {
                    let t = [vf[0], vf[k], vf[k + 1]];
                    let area = ((t[1].0 - t[0].0) * (t[2].1 - t[0].1)
                        - (t[1].1 - t[0].1) * (t[2].0 - t[0].0))
                        .abs()
                        / 2.0;
                    total += area;
                    fan.push(t);
                    cumulative.push(total);
                }
                for c in &mut cumulative {
                    *c /= total;
                }
                Shape::Polygon {
                    planes,
                    fan,
                    cumulative,
                }
            }
        };
        Ok(CompiledRegion { shape, scale })
    }

    /// Exact closed containment of a grid point.
    pub fn contains(&self, p: Point) -> bool {
        match &self.shape {
            Shape::Square { half } => p.x.abs() <= *half && p.y.abs() <= *half,
            Shape::Polygon { planes, .. } => planes.iter().all(|h| h.contains(p)),
            Shape::Disk { radius2_grid, .. } => {
                let (x, y) = (p.x as i128, p.y as i128);
                x * x + y * y <= *radius2_grid
            }
        }
    }

    fn snap(&self, x: f64, y: f64) -> Point {
        let s = self.scale as f64;
        Point::new((x * s).floor() as i64, (y * s).floor() as i64)
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Point {
        loop {
            let p = match &self.shape {
                Shape::Square { half } => Point::new(
                    rng.random_range(-*half..*half),
                    rng.random_range(-*half..*half),
                ),
                Shape::Polygon {
                    fan, cumulative, ..
                } => {
                    let w: f64 = rng.random();
                    let k = cumulative.partition_point(|&c| c <= w).min(fan.len() - 1);
                    let [a, b, c] = fan[k];
                    let mut u: f64 = rng.random();
                    let mut v: f64 = rng.random();
                    if u + v > 1.0 {
                        u = 1.0 - u;
                        v = 1.0 - v;
                    }
                    let x = a.0 + u * (b.0 - a.0) + v * (c.0 - a.0);
                    let y = a.1 + u * (b.1 - a.1) + v * (c.1 - a.1);
                    self.snap(x, y)
                }
                Shape::Disk { radius, .. } => {
                    let x = rng.random_range(-*radius..*radius);
                    let y = rng.random_range(-*radius..*radius);
                    if x * x + y * y > radius * radius {
                        continue;
                    }
                    self.snap(x, y)
                }
            };
            if self.contains(p) {
                return p;
            }
        }
    }
}

/// Master seed; trial `i` draws from the ChaCha stream `i` under this seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec { master_seed }
    }

    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(trial);
        rng
    }

    /// Sub-seed for a labelled family of trials (one experiment cell).
    pub fn derive(&self, tags: &[u64]) -> SeedSpec {
        let mut h = self.master_seed;
        for &t in tags {
            h = splitmix64(h ^ splitmix64(t.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        SeedSpec { master_seed: h }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sampled points on the grid, with the region they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub scale: i64,
    pub region: RegionSpec,
}

impl PointSet {
    /// Wraps explicit points (tests, synthetic inputs) with the default scale.
    pub fn from_points(points: Vec<Point>) -> Self {
        PointSet {
            points,
            scale: GRID_SCALE,
            region: RegionSpec::UnitSquare,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` distinct grid points drawn uniformly from `region`. Abscissae are
/// pairwise distinct (a colliding draw is replaced), which the strip
/// partition relies on.
pub fn sample_uniform(
    region: &RegionSpec,
    n: usize,
    seed: SeedSpec,
    trial: u64,
) -> Result<PointSet, SamplerError> {
    if n > MAX_SAMPLE {
        return Err(SamplerError::TooManyPoints(n));
    }
    let compiled = region.compile(GRID_SCALE)?;
    let mut rng = seed.rng(trial);
    Ok(sample_compiled(&compiled, region, n, &mut rng))
}

pub(crate) fn sample_compiled<R: Rng>(
    compiled: &CompiledRegion,
    region: &RegionSpec,
    n: usize,
    rng: &mut R,
) -> PointSet {
    let mut xs = HashSet::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let p = compiled.draw(rng);
        if xs.insert(p.x) {
            points.push(p);
        }
    }
    PointSet {
        points,
        scale: compiled.scale,
        region: region.clone(),
    }
}

/// One group of the strip partition and the strip of the region holding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strip {
    pub group: Vec<Point>,
    pub strip: ConvexPolygon,
    pub x_left: Rational,
    pub x_right: Rational,
}

/// Sorts by abscissa and cuts into consecutive groups of exactly `t` points.
/// Separating verticals sit halfway between the last point of one group and
/// the first of the next, so no line passes through a point.
pub fn strip_partition(ps: &PointSet, t: usize) -> Result<Vec<Strip>, SamplerError> {
    if t == 0 {
        return Err(SamplerError::ZeroStripSize);
    }
    if !ps.len().is_multiple_of(t) {
        return Err(SamplerError::NotDivisible { n: ps.len(), t });
    }
    let region = ps
        .region
        .polygon()
        .ok_or(SamplerError::NonPolygonalRegion)?;
    let mut sorted = ps.points.clone();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[0].x == w[1].x {
            return Err(SamplerError::DuplicateAbscissa(w[0].x));
        }
    }
    let rv = region.vertices();
    let min_of = |f: fn(&RationalPoint) -> &Rational| rv.iter().map(f).min().cloned().unwrap();
    let max_of = |f: fn(&RationalPoint) -> &Rational| rv.iter().map(f).max().cloned().unwrap();
    let (x_min, x_max) = (min_of(|p| &p.x), max_of(|p| &p.x));
    let (y_min, y_max) = (min_of(|p| &p.y), max_of(|p| &p.y));
    let scale = Rational::from_integer(ps.scale.into());
    let k = sorted.len() / t;
    let cut = |g: usize| -> Rational {
        // Between group g-1 and group g.
        let a = sorted[g * t - 1].x;
        let b = sorted[g * t].x;
        Rational::new(BigInt::from(a) + BigInt::from(b), BigInt::from(2)) / &scale
    };
    let mut strips = Vec::with_capacity(k);
    for g in 0..k {
        let x_left = if g == 0 { x_min.clone() } else { cut(g) };
        let x_right = if g + 1 == k {
            x_max.clone()
        } else {
            cut(g + 1)
        };
        let slab = ConvexPolygon::hull_of(&[
            RationalPoint::new(x_left.clone(), y_min.clone()),
            RationalPoint::new(x_right.clone(), y_min.clone()),
            RationalPoint::new(x_right.clone(), y_max.clone()),
            RationalPoint::new(x_left.clone(), y_max.clone()),
        ]);
        strips.push(Strip {
            group: sorted[g * t..(g + 1) * t].to_vec(),
            strip: clip_convex(&region, &slab),
            x_left,
            x_right,
        });
    }
    Ok(strips)
}

/// Affine image of a grid point in the unit square, with the strip's x-range
/// and the region's y-range mapped to [0, 1] (f64).
pub fn strip_local_coords(strip: &Strip, p: Point, scale: i64) -> (f64, f64) {
    let (x, y) = p.to_f64(scale);
    let xl = rational_to_f64(&strip.x_left);
    let xr = rational_to_f64(&strip.x_right);
    let ys: Vec<f64> = strip
        .strip
        .vertices()
        .iter()
        .map(|v| v.to_f64().1)
        .collect();
    let y0 = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let y1 = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ((x - xl) / (xr - xl), (y - y0) / (y1 - y0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ContainMode;

    #[test]
    fn exact_value_parsing() {
        let v = |s: &str| s.parse::<ExactValue>().unwrap().0;
        assert_eq!(v("3/8"), frac(3, 8));
        assert_eq!(v("-0.25"), frac(-1, 4));
        assert_eq!(v("2"), frac(2, 1));
        assert_eq!(v(".5"), frac(1, 2));
        assert!("1/0".parse::<ExactValue>().is_err());
        assert!("abc".parse::<ExactValue>().is_err());
        let j: ExactValue = serde_json::from_str("0.5").unwrap();
        assert_eq!(j.0, frac(1, 2));
    }

    #[test]
    fn builtin_regions_have_unit_area() {
        for r in [
            RegionSpec::UnitSquare,
            RegionSpec::triangle(),
            RegionSpec::Disk,
        ] {
            r.validate().unwrap();
        }
        let bad = RegionSpec::ConvexPolygon {
            vertices: vec![
                ["0".parse().unwrap(), "0".parse().unwrap()],
                ["1".parse().unwrap(), "0".parse().unwrap()],
                ["0".parse().unwrap(), "1".parse().unwrap()],
            ],
        };
        assert!(matches!(bad.validate(), Err(SamplerError::NotUnitArea(_))));
        let fixed = RegionSpec::normalized_polygon(&[
            RationalPoint::from_ints(-1, 0),
            RationalPoint::from_ints(1, 0),
            RationalPoint::from_ints(0, 2),
        ])
        .unwrap();
        assert!(fixed.polygon().unwrap().area().is_one());
    }

    #[test]
    fn region_json_roundtrip_and_unknown_keys() {
        let r: RegionSpec = serde_json::from_str(r#"{"kind":"unit_square"}"#).unwrap();
        assert_eq!(r, RegionSpec::UnitSquare);
        let t: RegionSpec = serde_json::from_str(
            r#"{"kind":"triangle","vertices":[["-1","-1/2"],[1,-0.5],["0","0.5"]]}"#,
        )
        .unwrap();
        assert_eq!(t.polygon(), RegionSpec::triangle().polygon());
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<RegionSpec>(&s).unwrap(), t);
        assert!(serde_json::from_str::<RegionSpec>(r#"{"kind":"disk","radius":2}"#).is_err());
    }

    #[test]
    fn empty_and_deterministic_samples() {
        let seed = SeedSpec::new(7);
        assert!(sample_uniform(&RegionSpec::UnitSquare, 0, seed, 0)
            .unwrap()
            .is_empty());
        for region in [
            RegionSpec::UnitSquare,
            RegionSpec::triangle(),
            RegionSpec::Disk,
        ] {
            let a = sample_uniform(&region, 200, seed, 3).unwrap();
            let b = sample_uniform(&region, 200, seed, 3).unwrap();
            let c = sample_uniform(&region, 200, seed, 4).unwrap();
            assert_eq!(a, b);
            assert_ne!(a.points, c.points);
        }
    }

    #[test]
    fn samples_lie_in_region_with_distinct_abscissae() {
        for region in [
            RegionSpec::UnitSquare,
            RegionSpec::triangle(),
            RegionSpec::Disk,
        ] {
            let ps = sample_uniform(&region, 2000, SeedSpec::new(11), 0).unwrap();
            let compiled = region.compile(GRID_SCALE).unwrap();
            let mut xs: Vec<i64> = ps.points.iter().map(|p| p.x).collect();
            xs.sort();
            xs.dedup();
            assert_eq!(xs.len(), 2000);
            assert!(ps.points.iter().all(|&p| compiled.contains(p)));
            if let Some(poly) = region.polygon() {
                assert!(ps
                    .points
                    .iter()
                    .all(|p| poly.contains(&p.to_rational(ps.scale), ContainMode::Closed)));
            }
        }
    }

    #[test]
    fn too_many_points_is_an_error() {
        let r = sample_uniform(&RegionSpec::UnitSquare, MAX_SAMPLE + 1, SeedSpec::new(0), 0);
        assert_eq!(r, Err(SamplerError::TooManyPoints(MAX_SAMPLE + 1)));
    }

    #[test]
    fn strip_partition_groups() {
        let ps = sample_uniform(&RegionSpec::UnitSquare, 12, SeedSpec::new(5), 0).unwrap();
        let strips = strip_partition(&ps, 4).unwrap();
        assert_eq!(strips.len(), 3);
        for w in strips.windows(2) {
            let a_max = w[0].group.iter().map(|p| p.x).max().unwrap();
            let b_min = w[1].group.iter().map(|p| p.x).min().unwrap();
            assert!(a_max < b_min);
            assert_eq!(w[0].x_right, w[1].x_left);
        }
        for s in &strips {
            assert_eq!(s.group.len(), 4);
            for p in &s.group {
                assert!(s
                    .strip
                    .contains(&p.to_rational(ps.scale), ContainMode::Closed));
            }
        }
        let one = strip_partition(&ps, 12).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(Some(one[0].strip.clone()), RegionSpec::UnitSquare.polygon());
        assert_eq!(strip_partition(&ps, 0), Err(SamplerError::ZeroStripSize));
        assert_eq!(
            strip_partition(&ps, 5),
            Err(SamplerError::NotDivisible { n: 12, t: 5 })
        );
    }

    #[test]
    fn strip_partition_on_triangle_clips_the_region() {
        let ps = sample_uniform(&RegionSpec::triangle(), 30, SeedSpec::new(2), 0).unwrap();
        let strips = strip_partition(&ps, 10).unwrap();
        let total: Rational = strips.iter().map(|s| s.strip.area()).sum();
        assert!(total.is_one());
        let disk = sample_uniform(&RegionSpec::Disk, 10, SeedSpec::new(2), 0).unwrap();
        assert_eq!(
            strip_partition(&disk, 5),
            Err(SamplerError::NonPolygonalRegion)
        );
    }
}
