//! Lattice quadrilaterals approximating a convex polygon from outside (`Q1`)
//! and from inside (`Q0`).
//!
//! The lattice has spacing `1/(3n)` and covers the side-3 square centred at
//! the origin. Inputs lie in the unit square `R = [-1/2, 1/2]^2`.
//!
//! Both constructions work in the frame of a diametral pair `(a, b)`: a point
//! is `a + s (b - a) + h perp(b - a)`, so `s` runs along `ab` and `h` across.
//! All coordinates in this frame are rational. Only the centres of the corner
//! squares use floating point, and each chosen lattice point is checked
//! exactly against its square.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    contains_point, diameter_pair, rational_to_f64, serialize_rational, ContainMode, ConvexPolygon,
    Rational, RationalPoint,
};

/// `inscribe` needs `area(H) >= C_MIN_AREA / n`.
pub const C_MIN_AREA: u64 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("polygon has no vertices")]
    EmptyPolygon,
    #[error("lattice parameter n must be positive")]
    ZeroN,
    #[error("polygon is not contained in the unit square")]
    OutsideRegion,
    #[error("area {area} is below {min}")]
    HoleTooSmall { area: f64, min: f64 },
    #[error("postcondition violated: {0}")]
    Verification(String),
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn qn(k: u64) -> Rational {
    Rational::from_integer(BigInt::from(k))
}

/// Points `(-3/2 + i/(3n), -3/2 + j/(3n))` for `0 <= i, j <= 9n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lattice {
    pub n: u64,
}

impl Lattice {
    pub fn new(n: u64) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::ZeroN);
        }
        Ok(Lattice { n })
    }

    pub fn spacing(&self) -> Rational {
        Rational::new(BigInt::one(), BigInt::from(3 * self.n))
    }

    pub fn max_index(&self) -> u64 {
        9 * self.n
    }

    pub fn point(&self, i: u64, j: u64) -> RationalPoint {
        let coord = |k: u64| q(-3, 2) + qn(k) * self.spacing();
        RationalPoint::new(coord(i), coord(j))
    }

    /// Lattice indices of `p`, if it is a lattice point.
    pub fn index_of(&self, p: &RationalPoint) -> Option<(u64, u64)> {
        let idx = |c: &Rational| {
            let t = (c + q(3, 2)) * qn(3 * self.n);
            if !t.is_integer() || t.is_negative() {
                return None;
            }
            let k: u64 = t.to_integer().try_into().ok()?;
            (k <= self.max_index()).then_some(k)
        };
        Some((idx(&p.x)?, idx(&p.y)?))
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        self.index_of(p).is_some()
    }

    /// Indices of the lattice point nearest to `(x, y)`, clamped to the lattice.
    pub fn nearest(&self, x: f64, y: f64) -> (i64, i64) {
        let k = 3.0 * self.n as f64;
        let m = self.max_index() as f64;
        let f = |c: f64| ((c + 1.5) * k).round().clamp(0.0, m) as i64;
        (f(x), f(y))
    }
}

/// Four lattice points in counterclockwise order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeQuadrilateral {
    pub vertices: [RationalPoint; 4],
}

impl LatticeQuadrilateral {
    pub fn polygon(&self) -> ConvexPolygon {
        ConvexPolygon::hull_of(&self.vertices)
    }

    pub fn area(&self) -> Rational {
        self.polygon().area()
    }

    pub fn on_lattice(&self, lattice: &Lattice) -> bool {
        self.vertices.iter().all(|v| lattice.contains(v))
    }
}

/// Which triangle of `J` the inner construction uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TriangleChoice {
    Abd,
    Abc,
}

/// Intermediate objects of one construction, for debugging failed cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxTrace {
    pub n: u64,
    /// Diametral pair.
    pub a: RationalPoint,
    pub b: RationalPoint,
    /// Touch points of the supporting lines parallel to `ab`, right then left.
    pub c: RationalPoint,
    pub d: RationalPoint,
    /// Rectangle `K` (w, x, y, z), counterclockwise.
    pub k_rect: Vec<RationalPoint>,
    /// Quadrilateral `J = a c b d`.
    pub j_quad: ConvexPolygon,
    #[serde(serialize_with = "serialize_rational")]
    pub area_k: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub area_j: Rational,
    pub inner: Option<InnerTrace>,
    /// Floating-point centres of the corner squares (search hints only).
    pub square_centres: Vec<(f64, f64)>,
    /// Lattice point chosen in each corner square.
    pub selected: Vec<RationalPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerTrace {
    pub choice: TriangleChoice,
    pub triangle: ConvexPolygon,
    /// Foot of the perpendicular from the apex to `ab`.
    pub e: RationalPoint,
    /// Midline rectangle `f, h, k, j`.
    pub u_rect: ConvexPolygon,
    #[serde(serialize_with = "serialize_rational")]
    pub area_triangle: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub area_u: Rational,
}

/// Diametral frame of a polygon.
struct Frame {
    a: RationalPoint,
    dir: RationalPoint,
    norm2: Rational,
}

impl Frame {
    fn new(a: RationalPoint, b: &RationalPoint) -> Self {
        let mut dir = b.sub(&a);
        if dir.x.is_zero() && dir.y.is_zero() {
            dir = RationalPoint::from_ints(1, 0);
        }
        let norm2 = dir.norm2();
        Frame { a, dir, norm2 }
    }

    fn coords(&self, p: &RationalPoint) -> (Rational, Rational) {
        let r = p.sub(&self.a);
        (
            r.dot(&self.dir) / &self.norm2,
            self.dir.cross(&r) / &self.norm2,
        )
    }

    fn point(&self, s: &Rational, h: &Rational) -> RationalPoint {
        self.a
            .add(&self.dir.scale(s))
            .add(&self.dir.perp().scale(h))
    }

    /// Lattice point strictly inside the square of side `2/n` with corner
    /// `corner`, extending in direction `sign_s` along and `sign_h` across.
    fn pick_in_square(
        &self,
        lattice: &Lattice,
        corner: &RationalPoint,
        sign_s: i8,
        sign_h: i8,
    ) -> Result<(RationalPoint, (f64, f64)), LatticeError> {
        let n = lattice.n as f64;
        let (dx, dy) = self.dir.to_f64();
        let len = dx.hypot(dy);
        let (ux, uy) = (dx / len, dy / len);
        let (vx, vy) = (-uy, ux);
        let (ss, sh) = (sign_s as f64, sign_h as f64);
        let (cx, cy) = corner.to_f64();
        let centre = (cx + (ss * ux + sh * vx) / n, cy + (ss * uy + sh * vy) / n);
        let bound = q(4, 1) / qn(lattice.n * lattice.n) * &self.norm2;
        let inside = |g: &RationalPoint| {
            let delta = g.sub(corner);
            let along = delta.dot(&self.dir) * Rational::from_integer(sign_s.into());
            let across = self.dir.cross(&delta) * Rational::from_integer(sign_h.into());
            along.is_positive()
                && across.is_positive()
                && &along * &along < bound
                && &across * &across < bound
        };
        let (i0, j0) = lattice.nearest(centre.0, centre.1);
        let m = lattice.max_index() as i64;
        let mut candidates: Vec<(i64, i64)> = Vec::new();
        for r in 0..=3i64 {
            for di in -r..=r {
                for dj in -r..=r {
                    if di.abs().max(dj.abs()) == r {
                        candidates.push((i0 + di, j0 + dj));
                    }
                }
            }
        }
        for (i, j) in candidates {
            if !(0..=m).contains(&i) || !(0..=m).contains(&j) {
                continue;
            }
            let g = lattice.point(i as u64, j as u64);
            if inside(&g) {
                return Ok((g, centre));
            }
        }
        Err(LatticeError::Verification(format!(
            "no lattice point found in the corner square at {:?}",
            corner.to_f64()
        )))
    }
}

fn check_input(h: &ConvexPolygon, n: u64) -> Result<Lattice, LatticeError> {
    let lattice = Lattice::new(n)?;
    if h.is_empty() {
        return Err(LatticeError::EmptyPolygon);
    }
    let half = q(1, 2);
    if h.vertices()
        .iter()
        .any(|v| v.x.abs() > half || v.y.abs() > half)
    {
        return Err(LatticeError::OutsideRegion);
    }
    Ok(lattice)
}

/// Shared first stage: diametral pair, supporting points, `K` and `J`.
fn outer_frame(h: &ConvexPolygon, n: u64) -> (Frame, ApproxTrace, [Rational; 4]) {
    let vs = h.vertices();
    let (a, b) = match diameter_pair(h) {
        Ok(pair) => pair,
        Err(_) => (vs[0].clone(), vs[0].clone()),
    };
    let frame = Frame::new(a.clone(), &b);
    let coords: Vec<(Rational, Rational)> = vs.iter().map(|v| frame.coords(v)).collect();
    let mut s_lo = coords[0].0.clone();
    let mut s_hi = s_lo.clone();
    // Touch points: extreme h, ties to the lexicographically smaller vertex.
    let (mut c_idx, mut d_idx) = (0, 0);
    for (i, (s, hh)) in coords.iter().enumerate() {
        if *s < s_lo {
            s_lo = s.clone();
        }
        if *s > s_hi {
            s_hi = s.clone();
        }
        let (hc, hd) = (&coords[c_idx].1, &coords[d_idx].1);
        if hh < hc || (hh == hc && vs[i] < vs[c_idx]) {
            c_idx = i;
        }
        if hh > hd || (hh == hd && vs[i] < vs[d_idx]) {
            d_idx = i;
        }
    }
    let h_lo = coords[c_idx].1.clone();
    let h_hi = coords[d_idx].1.clone();
    let k_rect = vec![
        frame.point(&s_lo, &h_lo),
        frame.point(&s_hi, &h_lo),
        frame.point(&s_hi, &h_hi),
        frame.point(&s_lo, &h_hi),
    ];
    let (c, d) = (vs[c_idx].clone(), vs[d_idx].clone());
    let j_quad = ConvexPolygon::hull_of(&[a.clone(), c.clone(), b.clone(), d.clone()]);
    let area_k = (&s_hi - &s_lo) * (&h_hi - &h_lo) * &frame.norm2;
    let trace = ApproxTrace {
        n,
        a,
        b,
        c,
        d,
        k_rect,
        area_j: j_quad.area(),
        j_quad,
        area_k,
        inner: None,
        square_centres: Vec::new(),
        selected: Vec::new(),
    };
    (frame, trace, [s_lo, s_hi, h_lo, h_hi])
}

/// Builds `Q1` without checking its postconditions.
pub fn circumscribe_unchecked(
    h: &ConvexPolygon,
    n: u64,
) -> Result<(LatticeQuadrilateral, ApproxTrace), LatticeError> {
    let lattice = check_input(h, n)?;
    let (frame, mut trace, [s_lo, s_hi, h_lo, h_hi]) = outer_frame(h, n);
    let corners = [
        (&s_lo, &h_lo, -1, -1),
        (&s_hi, &h_lo, 1, -1),
        (&s_hi, &h_hi, 1, 1),
        (&s_lo, &h_hi, -1, 1),
    ];
    let mut picked = Vec::with_capacity(4);
    for (s, hh, ss, sh) in corners {
        let corner = frame.point(s, hh);
        let (g, centre) = frame.pick_in_square(&lattice, &corner, ss, sh)?;
        trace.square_centres.push(centre);
        trace.selected.push(g.clone());
        picked.push(g);
    }
    let quad = LatticeQuadrilateral {
        vertices: picked.try_into().expect("four corners"),
    };
    Ok((quad, trace))
}

/// Builds `Q0` without checking its postconditions. Fails only when `H` is
/// degenerate.
pub fn inscribe_unchecked(
    h: &ConvexPolygon,
    n: u64,
) -> Result<(LatticeQuadrilateral, ApproxTrace), LatticeError> {
    let lattice = check_input(h, n)?;
    if h.is_degenerate() {
        return Err(LatticeError::HoleTooSmall {
            area: 0.0,
            min: C_MIN_AREA as f64 / n as f64,
        });
    }
    let (frame, mut trace, _) = outer_frame(h, n);
    let (_, hc) = frame.coords(&trace.c);
    let (_, hd) = frame.coords(&trace.d);
    let (choice, apex) = if hd >= -hc.clone() {
        (TriangleChoice::Abd, trace.d.clone())
    } else {
        (TriangleChoice::Abc, trace.c.clone())
    };
    let (s_apex, h_apex) = frame.coords(&apex);
    let zero = Rational::zero();
    let half = q(1, 2);
    let s_f = &s_apex * &half;
    let s_h = (Rational::one() + &s_apex) * &half;
    let h_top = &h_apex * &half;
    let f = frame.point(&s_f, &zero);
    let hp = frame.point(&s_h, &zero);
    let k = frame.point(&s_h, &h_top);
    let j = frame.point(&s_f, &h_top);
    let up: i8 = if h_apex.is_positive() { 1 } else { -1 };
    let corners = [(&f, 1, up), (&hp, -1, up), (&k, -1, -up), (&j, 1, -up)];
    let mut picked = Vec::with_capacity(4);
    for (corner, ss, sh) in corners {
        let (g, centre) = frame.pick_in_square(&lattice, corner, ss, sh)?;
        trace.square_centres.push(centre);
        trace.selected.push(g.clone());
        picked.push(g);
    }
    if up < 0 {
        picked.reverse();
    }
    let triangle = ConvexPolygon::hull_of(&[trace.a.clone(), trace.b.clone(), apex]);
    let u_rect = ConvexPolygon::hull_of(&[f, hp, k, j]);
    trace.inner = Some(InnerTrace {
        choice,
        e: frame.point(&s_apex, &zero),
        area_triangle: triangle.area(),
        area_u: u_rect.area(),
        triangle,
        u_rect,
    });
    let quad = LatticeQuadrilateral {
        vertices: picked.try_into().expect("four corners"),
    };
    Ok((quad, trace))
}

/// Circumscribed lattice quadrilateral `Q1 ⊇ H` with
/// `area(Q1) <= 2 area(H) + 40/n`, both checked exactly.
pub fn circumscribe(
    h: &ConvexPolygon,
    n: u64,
) -> Result<(LatticeQuadrilateral, ApproxTrace), LatticeError> {
    let (quad, trace) = circumscribe_unchecked(h, n)?;
    let report = outer_checks(h, &quad, n);
    if let Some(v) = report.first_violation() {
        return Err(LatticeError::Verification(v.to_string()));
    }
    Ok((quad, trace))
}

/// Inscribed lattice quadrilateral `Q0 ⊆ H` with `area(Q0) >= area(H)/32`,
/// for `area(H) >= C_MIN_AREA/n`.
pub fn inscribe(
    h: &ConvexPolygon,
    n: u64,
) -> Result<(LatticeQuadrilateral, ApproxTrace), LatticeError> {
    check_input(h, n)?;
    let area = h.area();
    let min = qn(C_MIN_AREA) / qn(n);
    if area < min {
        return Err(LatticeError::HoleTooSmall {
            area: rational_to_f64(&area),
            min: rational_to_f64(&min),
        });
    }
    let (quad, trace) = inscribe_unchecked(h, n)?;
    let report = inner_checks(h, &quad, &trace, n);
    if let Some(v) = report.first_violation() {
        return Err(LatticeError::Verification(v.to_string()));
    }
    Ok((quad, trace))
}

#[derive(Debug, Clone, PartialEq)]
struct OuterChecks {
    contains: bool,
    on_lattice: bool,
    slack: Rational,
}

impl OuterChecks {
    fn first_violation(&self) -> Option<&'static str> {
        if !self.on_lattice {
            Some("Q1 vertex off the lattice")
        } else if !self.contains {
            Some("H not inside Q1")
        } else if self.slack.is_negative() {
            Some("area(Q1) > 2 area(H) + 40/n")
        } else {
            None
        }
    }
}

fn outer_checks(h: &ConvexPolygon, q1: &LatticeQuadrilateral, n: u64) -> OuterChecks {
    let poly = q1.polygon();
    OuterChecks {
        contains: h
            .vertices()
            .iter()
            .all(|v| contains_point(&poly, v, ContainMode::Closed)),
        on_lattice: q1.on_lattice(&Lattice { n }),
        slack: h.area() * q(2, 1) + q(40, 1) / qn(n) - poly.area(),
    }
}

#[derive(Debug, Clone, PartialEq)]
struct InnerChecks {
    inside: bool,
    chain: bool,
    on_lattice: bool,
    slack: Rational,
}

impl InnerChecks {
    fn first_violation(&self) -> Option<&'static str> {
        if !self.on_lattice {
            Some("Q0 vertex off the lattice")
        } else if !self.inside {
            Some("Q0 not inside H")
        } else if !self.chain {
            Some("containment chain Q0 ⊆ U ⊆ Δ ⊆ H broken")
        } else if self.slack.is_negative() {
            Some("area(Q0) < area(H)/32")
        } else {
            None
        }
    }
}

fn inside_all(outer: &ConvexPolygon, pts: &[RationalPoint]) -> bool {
    pts.iter()
        .all(|p| contains_point(outer, p, ContainMode::Closed))
}

fn inner_checks(
    h: &ConvexPolygon,
    q0: &LatticeQuadrilateral,
    trace: &ApproxTrace,
    n: u64,
) -> InnerChecks {
    let inner = trace.inner.as_ref().expect("inner trace");
    let chain = inside_all(&inner.u_rect, &q0.vertices)
        && inside_all(&inner.triangle, inner.u_rect.vertices())
        && inside_all(h, inner.triangle.vertices());
    InnerChecks {
        inside: inside_all(h, &q0.vertices),
        chain,
        on_lattice: q0.on_lattice(&Lattice { n }),
        slack: q0.area() - h.area() / q(32, 1),
    }
}

/// Exact outcome of both constructions on one polygon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop1Report {
    pub n: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub area_h: Rational,
    pub q1: LatticeQuadrilateral,
    #[serde(serialize_with = "serialize_rational")]
    pub area_q1: Rational,
    pub q1_contains_h: bool,
    pub q1_on_lattice: bool,
    /// `2 area(H) + 40/n - area(Q1)`.
    #[serde(serialize_with = "serialize_rational")]
    pub q1_area_slack: Rational,
    /// Present when `area(H) >= C_MIN_AREA/n`.
    pub inner: Option<InnerReport>,
    pub outer_trace: ApproxTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerReport {
    pub q0: LatticeQuadrilateral,
    #[serde(serialize_with = "serialize_rational")]
    pub area_q0: Rational,
    pub q0_inside_h: bool,
    pub q0_on_lattice: bool,
    /// `Q0 ⊆ U ⊆ Δ ⊆ H`.
    pub containment_chain: bool,
    /// `area(Q0) - area(H)/32`.
    #[serde(serialize_with = "serialize_rational")]
    pub q0_area_slack: Rational,
    /// `area(Q1) <= 3 area(H) <= 96 area(Q0)`.
    pub area_chain: bool,
    /// `96 area(Q0) - area(Q1)`.
    #[serde(serialize_with = "serialize_rational")]
    pub area_chain_slack: Rational,
    pub trace: ApproxTrace,
}

impl Prop1Report {
    /// Names of the violated postconditions.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.q1_contains_h {
            out.push("q1_contains_h");
        }
        if !self.q1_on_lattice {
            out.push("q1_on_lattice");
        }
        if self.q1_area_slack.is_negative() {
            out.push("q1_area");
        }
        if let Some(inner) = &self.inner {
            if !inner.q0_inside_h {
                out.push("q0_inside_h");
            }
            if !inner.q0_on_lattice {
                out.push("q0_on_lattice");
            }
            if !inner.containment_chain {
                out.push("containment_chain");
            }
            if inner.q0_area_slack.is_negative() {
                out.push("q0_area");
            }
            if !inner.area_chain {
                out.push("area_chain");
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Runs the outer construction always and the inner one when
/// `area(H) >= min_area_const / n`, recording every postcondition exactly.
pub fn verify_prop1_with(
    h: &ConvexPolygon,
    n: u64,
    min_area_const: u64,
) -> Result<Prop1Report, LatticeError> {
    let (q1, outer_trace) = circumscribe_unchecked(h, n)?;
    let outer = outer_checks(h, &q1, n);
    let area_h = h.area();
    let area_q1 = q1.area();
    let inner = if !h.is_degenerate() && area_h >= qn(min_area_const) / qn(n) {
        let (q0, trace) = inscribe_unchecked(h, n)?;
        let checks = inner_checks(h, &q0, &trace, n);
        let area_q0 = q0.area();
        let three_h = &area_h * q(3, 1);
        let ninety_six_q0 = &area_q0 * q(96, 1);
        Some(InnerReport {
            area_chain: area_q1 <= three_h && three_h <= ninety_six_q0,
            area_chain_slack: &ninety_six_q0 - &area_q1,
            q0,
            area_q0,
            q0_inside_h: checks.inside,
            q0_on_lattice: checks.on_lattice,
            containment_chain: checks.chain,
            q0_area_slack: checks.slack,
            trace,
        })
    } else {
        None
    };
    Ok(Prop1Report {
        n,
        area_h,
        q1,
        area_q1,
        q1_contains_h: outer.contains,
        q1_on_lattice: outer.on_lattice,
        q1_area_slack: outer.slack,
        inner,
        outer_trace,
    })
}

pub fn verify_prop1(h: &ConvexPolygon, n: u64) -> Result<Prop1Report, LatticeError> {
    verify_prop1_with(h, n, C_MIN_AREA)
}

/// Reduces `num/den` and checks that the denominator divides `3n`.
pub fn denominator_divides(r: &Rational, n: u64) -> bool {
    (BigInt::from(3 * n)).is_multiple_of(r.denom())
}
