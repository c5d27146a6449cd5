//! Exact planar primitives.
//!
//! Sampled points live on an integer grid (`GRID_SCALE` units per unit
//! length) and every predicate on them is evaluated with 128-bit products.
//! Constructed geometry (hulls handed to the lattice approximation, clipped
//! polygons, strips) uses arbitrary-precision rationals in unit lengths.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational number in unit lengths.
pub type Rational = BigRational;

/// Grid units per unit length.
pub const GRID_SCALE: i64 = 1 << 30;

/// Largest admissible absolute grid coordinate (half the side of the side-3 square).
pub const COORD_LIMIT: i64 = 3 * (1 << 30);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("polygon has fewer than two distinct vertices")]
    DegeneratePolygon,
    #[error("vertex list is not a strictly convex counterclockwise cycle")]
    NotConvex,
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("region is not polygonal")]
    NonPolygonalRegion,
}

/// Sign of the turn p -> q -> r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    fn from_sign(ord: Ordering) -> Self {
        match ord {
            Ordering::Greater => Orientation::CounterClockwise,
            Ordering::Less => Orientation::Clockwise,
            Ordering::Equal => Orientation::Collinear,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// Point on the integer sampling grid. The derived order is lexicographic (x, then y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// Converts to unit lengths given the grid scale.
    pub fn to_rational(self, scale: i64) -> RationalPoint {
        RationalPoint {
            x: Rational::new(BigInt::from(self.x), BigInt::from(scale)),
            y: Rational::new(BigInt::from(self.y), BigInt::from(scale)),
        }
    }

    pub fn to_f64(self, scale: i64) -> (f64, f64) {
        (self.x as f64 / scale as f64, self.y as f64 / scale as f64)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Twice the signed area of the triangle (o, a, b).
#[inline]
pub fn cross(o: Point, a: Point, b: Point) -> i128 {
    let ax = (a.x - o.x) as i128;
    let ay = (a.y - o.y) as i128;
    let bx = (b.x - o.x) as i128;
    let by = (b.y - o.y) as i128;
    ax * by - ay * bx
}

/// Point with exact rational coordinates, in unit lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RationalPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        RationalPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RationalPoint {
            x: Rational::from_integer(x.into()),
            y: Rational::from_integer(y.into()),
        }
    }

    /// Builds a point from `(num_x/den, num_y/den)`.
    pub fn from_fraction(num_x: i64, num_y: i64, den: i64) -> Self {
        RationalPoint {
            x: Rational::new(num_x.into(), den.into()),
            y: Rational::new(num_y.into(), den.into()),
        }
    }

    pub fn sub(&self, other: &RationalPoint) -> RationalPoint {
        RationalPoint::new(&self.x - &other.x, &self.y - &other.y)
    }

    pub fn add(&self, other: &RationalPoint) -> RationalPoint {
        RationalPoint::new(&self.x + &other.x, &self.y + &other.y)
    }

    pub fn scale(&self, k: &Rational) -> RationalPoint {
        RationalPoint::new(&self.x * k, &self.y * k)
    }

    pub fn dot(&self, other: &RationalPoint) -> Rational {
        &self.x * &other.x + &self.y * &other.y
    }

    /// z-component of the cross product of two vectors.
    pub fn cross(&self, other: &RationalPoint) -> Rational {
        &self.x * &other.y - &self.y * &other.x
    }

    /// Counterclockwise perpendicular of a vector.
    pub fn perp(&self) -> RationalPoint {
        RationalPoint::new(-&self.y, self.x.clone())
    }

    pub fn norm2(&self) -> Rational {
        self.dot(self)
    }

    pub fn midpoint(&self, other: &RationalPoint) -> RationalPoint {
        let half = Rational::new(1.into(), 2.into());
        self.add(other).scale(&half)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.x), rational_to_f64(&self.y))
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Nearest-ish `f64` of a rational; exact decisions never go through this.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerator/denominator: shift both down to 64 significant bits.
    let shift = |b: &BigInt| b.bits().saturating_sub(64);
    let s = shift(r.numer()).max(shift(r.denom()));
    let n = (r.numer() >> s).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> s).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Serializable view of an exact rational: numerator and denominator as
/// decimal strings plus a floating approximation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactNumber {
    pub num: String,
    pub den: String,
    pub decimal: f64,
}

impl From<&Rational> for ExactNumber {
    fn from(r: &Rational) -> Self {
        ExactNumber {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            decimal: rational_to_f64(r),
        }
    }
}

/// `serialize_with` helper for rational fields.
pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    ExactNumber::from(r).serialize(s)
}

impl Serialize for RationalPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RationalPoint", 2)?;
        st.serialize_field("x", &ExactNumber::from(&self.x))?;
        st.serialize_field("y", &ExactNumber::from(&self.y))?;
        st.end()
    }
}

impl Serialize for ConvexPolygon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.vertices.serialize(s)
    }
}

/// Exact orientation, implemented for grid and rational points.
pub trait Orient {
    fn orient(&self, q: &Self, r: &Self) -> Orientation;
}

impl Orient for Point {
    #[inline]
    fn orient(&self, q: &Self, r: &Self) -> Orientation {
        Orientation::from_sign(cross(*self, *q, *r).cmp(&0))
    }
}

impl Orient for RationalPoint {
    fn orient(&self, q: &Self, r: &Self) -> Orientation {
        let c = q.sub(self).cross(&r.sub(self));
        Orientation::from_sign(c.cmp(&Rational::zero()))
    }
}

/// Sign of (q - p) x (r - p).
#[inline]
pub fn orient<P: Orient>(p: &P, q: &P, r: &P) -> Orientation {
    p.orient(q, r)
}

/// Andrew's monotone chain. Returns the strictly convex hull in counterclockwise
/// order starting at the lexicographically smallest point; collinear boundary
/// points and duplicates are dropped.
pub fn hull_vertices<P: Orient + Ord + Clone>(ps: &[P]) -> Vec<P> {
    let mut pts: Vec<P> = ps.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<P> = Vec::with_capacity(pts.len());
    for p in &pts {
        while lower.len() >= 2
            && orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p)
                != Orientation::CounterClockwise
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<P> = Vec::with_capacity(pts.len());
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p)
                != Orientation::CounterClockwise
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // All points collinear: the chains collapse to the two extremes.
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.truncate(1);
    }
    lower
}

/// Convex hull of grid points as an exact polygon in unit lengths.
pub fn convex_hull(ps: &[Point], scale: i64) -> ConvexPolygon {
    let hull = hull_vertices(ps);
    ConvexPolygon {
        vertices: hull.into_iter().map(|p| p.to_rational(scale)).collect(),
    }
}

/// True iff every point is a vertex of the hull. Duplicates and collinear
/// triples on the hull boundary make the answer false.
pub fn is_convex_position<P: Orient + Ord + Clone>(ps: &[P]) -> bool {
    if ps.len() < 3 {
        return false;
    }
    hull_vertices(ps).len() == ps.len()
}

/// Closed or open containment test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContainMode {
    StrictInterior,
    Closed,
}

/// Vertex cycle in counterclockwise order with no collinear triples.
/// Polygons with 0, 1 or 2 vertices are allowed and reported as degenerate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConvexPolygon {
    vertices: Vec<RationalPoint>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        ConvexPolygon {
            vertices: Vec::new(),
        }
    }

    /// Validates a counterclockwise, strictly convex vertex cycle.
    pub fn from_ccw(vertices: Vec<RationalPoint>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n == 2 && vertices[0] == vertices[1] {
            return Err(GeometryError::NotConvex);
        }
        if n >= 3 {
            for i in 0..n {
                let o = orient(&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]);
                if o != Orientation::CounterClockwise {
                    return Err(GeometryError::NotConvex);
                }
            }
            // A strictly convex turn at every vertex can still wind twice, so
            // every other vertex must lie strictly left of every edge.
            for i in 0..n {
                let a = &vertices[i];
                let b = &vertices[(i + 1) % n];
                for k in 2..n {
                    let c = &vertices[(i + k) % n];
                    if orient(a, b, c) != Orientation::CounterClockwise {
                        return Err(GeometryError::NotConvex);
                    }
                }
            }
        }
        Ok(ConvexPolygon { vertices })
    }

    /// Hull of an arbitrary rational point list.
    pub fn hull_of(points: &[RationalPoint]) -> Self {
        ConvexPolygon {
            vertices: hull_vertices(points),
        }
    }

    pub fn vertices(&self) -> &[RationalPoint] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<RationalPoint> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Fewer than three vertices.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Exact shoelace area; zero for degenerate polygons.
    pub fn area(&self) -> Rational {
        polygon_area(self)
    }

    pub fn contains(&self, p: &RationalPoint, mode: ContainMode) -> bool {
        contains_point(self, p, mode)
    }

    pub fn contains_polygon(&self, other: &ConvexPolygon) -> bool {
        other
            .vertices
            .iter()
            .all(|v| self.contains(v, ContainMode::Closed))
    }
}

/// Exact shoelace area in unit lengths squared.
pub fn polygon_area(poly: &ConvexPolygon) -> Rational {
    let v = &poly.vertices;
    let n = v.len();
    if n < 3 {
        return Rational::zero();
    }
    let twice: Rational = (0..n).map(|i| v[i].cross(&v[(i + 1) % n])).sum();
    twice / Rational::from_integer(2.into())
}

fn lex_pair(a: &RationalPoint, b: &RationalPoint) -> (RationalPoint, RationalPoint) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Pair of vertices at maximum distance, found by rotating calipers over the
/// antipodal pairs. Ties resolve to the lexicographically smallest (min, max) pair.
pub fn diameter_pair(
    poly: &ConvexPolygon,
) -> Result<(RationalPoint, RationalPoint), GeometryError> {
    let v = &poly.vertices;
    let n = v.len();
    match n {
        0 | 1 => return Err(GeometryError::DegeneratePolygon),
        2 => return Ok(lex_pair(&v[0], &v[1])),
        _ => {}
    }
    let twice_area = |i: usize, j: usize, k: usize| v[j].sub(&v[i]).cross(&v[k].sub(&v[i]));

    let mut best: Option<(Rational, (RationalPoint, RationalPoint))> = None;
    let mut consider = |a: usize, b: usize| {
        if a == b {
            return;
        }
        let d = v[a].sub(&v[b]).norm2();
        let pair = lex_pair(&v[a], &v[b]);
        let better = match &best {
            None => true,
            Some((bd, bp)) => d > *bd || (d == *bd && pair < *bp),
        };
        if better {
            best = Some((d, pair));
        }
    };

    let mut j = 1;
    for i in 0..n {
        let ni = (i + 1) % n;
        loop {
            let nj = (j + 1) % n;
            if twice_area(i, ni, nj) > twice_area(i, ni, j) {
                j = nj;
            } else {
                break;
            }
        }
        consider(i, j);
        consider(ni, j);
        let nj = (j + 1) % n;
        if twice_area(i, ni, nj) == twice_area(i, ni, j) {
            consider(i, nj);
            consider(ni, nj);
        }
    }
    Ok(best
        .expect("polygon with >= 3 vertices has an antipodal pair")
        .1)
}

/// Touch points of the two supporting lines parallel to `direction`: the
/// first returned vertex minimises `direction x (v - origin)` (right-hand side),
/// the second maximises it. Ties resolve lexicographically.
pub fn supporting_extremes(
    poly: &ConvexPolygon,
    direction: &RationalPoint,
) -> Result<(RationalPoint, RationalPoint), GeometryError> {
    if direction.x.is_zero() && direction.y.is_zero() {
        return Err(GeometryError::ZeroDirection);
    }
    let v = &poly.vertices;
    if v.is_empty() {
        return Err(GeometryError::DegeneratePolygon);
    }
    let key = |p: &RationalPoint| direction.cross(p);
    let mut lo = &v[0];
    let mut hi = &v[0];
    let mut lo_k = key(lo);
    let mut hi_k = lo_k.clone();
    for p in &v[1..] {
        let k = key(p);
        if k < lo_k || (k == lo_k && p < lo) {
            lo = p;
            lo_k = k.clone();
        }
        if k > hi_k || (k == hi_k && p < hi) {
            hi = p;
            hi_k = k;
        }
    }
    Ok((lo.clone(), hi.clone()))
}

/// Exact side tests against every edge.
pub fn contains_point(poly: &ConvexPolygon, p: &RationalPoint, mode: ContainMode) -> bool {
    let v = &poly.vertices;
    match v.len() {
        0 => false,
        1 => mode == ContainMode::Closed && v[0] == *p,
        2 => {
            if mode == ContainMode::StrictInterior {
                return false;
            }
            if orient(&v[0], &v[1], p) != Orientation::Collinear {
                return false;
            }
            let d = v[1].sub(&v[0]);
            let t = p.sub(&v[0]).dot(&d);
            !t.is_negative() && t <= d.norm2()
        }
        n => (0..n).all(|i| match orient(&v[i], &v[(i + 1) % n], p) {
            Orientation::CounterClockwise => true,
            Orientation::Collinear => mode == ContainMode::Closed,
            Orientation::Clockwise => false,
        }),
    }
}

/// Intersection of two convex polygons (Sutherland–Hodgman against each edge
/// of `clip`, exact). An empty intersection yields the empty polygon; a
/// lower-dimensional one yields a degenerate polygon.
pub fn clip_convex(subject: &ConvexPolygon, clip: &ConvexPolygon) -> ConvexPolygon {
    if subject.is_empty() || clip.is_degenerate() {
        return ConvexPolygon::empty();
    }
    let c = &clip.vertices;
    let m = c.len();
    let mut out: Vec<RationalPoint> = subject.vertices.clone();
    for i in 0..m {
        if out.is_empty() {
            break;
        }
        let a = &c[i];
        let b = &c[(i + 1) % m];
        let edge = b.sub(a);
        let side = |p: &RationalPoint| edge.cross(&p.sub(a));
        let input = std::mem::take(&mut out);
        let k = input.len();
        for j in 0..k {
            let cur = &input[j];
            let prev = &input[(j + k - 1) % k];
            let sc = side(cur);
            let sp = side(prev);
            let cur_in = !sc.is_negative();
            let prev_in = !sp.is_negative();
            if cur_in != prev_in {
                // Segment prev -> cur crosses the clip line strictly.
                let t = &sp / (&sp - &sc);
                out.push(prev.add(&cur.sub(prev).scale(&t)));
            }
            if cur_in {
                out.push(cur.clone());
            }
        }
    }
    ConvexPolygon::hull_of(&out)
}

/// Clip against a polygonal region.
pub fn clip_to_region(
    poly: &ConvexPolygon,
    region: &crate::sampler::RegionSpec,
) -> Result<ConvexPolygon, GeometryError> {
    let r = region.polygon().ok_or(GeometryError::NonPolygonalRegion)?;
    Ok(clip_convex(poly, &r))
}

/// Fan triangulation from the lexicographically smallest vertex.
pub fn fan_triangulate(poly: &ConvexPolygon) -> Vec<ConvexPolygon> {
    let v = &poly.vertices;
    let n = v.len();
    if n < 3 {
        return Vec::new();
    }
    let start = (0..n).min_by(|&a, &b| v[a].cmp(&v[b])).unwrap_or(0);
    let at = |k: usize| v[(start + k) % n].clone();
    (1..n - 1)
        .map(|k| ConvexPolygon {
            vertices: vec![at(0), at(k), at(k + 1)],
        })
        .collect()
}
