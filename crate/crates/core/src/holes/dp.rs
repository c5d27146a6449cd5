//! Largest convex hole by dynamic programming over empty fan triangles.
//!
//! Every hole is counted once, at its lexicographically smallest vertex `p`.
//! Points above `p` (lexicographically) are sorted by angle around `p`; a hole
//! with bottom vertex `p` is then a chain `v1 < v2 < ... < vk` in angular order
//! whose fan triangles `(p, vi, vi+1)` are empty and whose inner turns are
//! strictly convex. Turns at `p`, `v1` and `vk` are convex automatically
//! because all candidates lie in an open half-plane.
//!
//! Two edge generators feed the same chain DP:
//! - general position: the visibility graph of the star-shaped polygon around
//!   `p`, built with one queue per vertex (total work proportional to the
//!   number of empty triangles);
//! - degenerate input (some three points collinear): an exact quadratic scan
//!   per bottom vertex that also enforces the boundary conventions. A farther
//!   point on a ray from `p` may still be the first or last vertex, because the
//!   nearer point then sits on a hole edge rather than inside.

use std::cmp::Ordering;

use crate::geometry::Point;
use crate::sampler::PointSet;

use super::{prepare, HoleError, HoleMethod, HoleResult};

const NONE: u32 = u32::MAX;

/// Size and witness of a largest convex hole, in `O(n^2 log n + T)` for `T`
/// empty triangles when no three points are collinear, and `O(n^3)` otherwise.
pub fn largest_hole_dp(ps: &PointSet) -> Result<HoleResult, HoleError> {
    largest_hole_dp_points(&ps.points)
}

pub(crate) fn largest_hole_dp_points(points: &[Point]) -> Result<HoleResult, HoleError> {
    let sorted = prepare(points)?;
    let mut solver = Solver::default();
    let best = match solver.run(&sorted, Mode::General) {
        Some(best) => best,
        None => solver
            .run(&sorted, Mode::Degenerate)
            .expect("degenerate mode never bails out"),
    };
    Ok(finish(best, &sorted))
}

/// Same result as [`largest_hole_dp`] using only the quadratic-scan edge
/// generator, whatever the input.
pub fn largest_hole_dp_robust(ps: &PointSet) -> Result<HoleResult, HoleError> {
    largest_hole_dp_robust_points(&ps.points)
}

fn largest_hole_dp_robust_points(points: &[Point]) -> Result<HoleResult, HoleError> {
    let sorted = prepare(points)?;
    let mut solver = Solver::default();
    let best = solver
        .run(&sorted, Mode::Degenerate)
        .expect("degenerate mode never bails out");
    Ok(finish(best, &sorted))
}

fn finish(best: Vec<Point>, sorted: &[Point]) -> HoleResult {
    if best.is_empty() {
        return HoleResult::collinear_sentinel(sorted, HoleMethod::Dp);
    }
    HoleResult {
        size: best.len(),
        vertices: best,
        method: HoleMethod::Dp,
        all_collinear: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    General,
    Degenerate,
}

/// Vector from the bottom vertex; at most 2^33 per coordinate.
#[derive(Debug, Clone, Copy)]
struct Rel {
    x: i64,
    y: i64,
}

#[inline]
fn cross(a: Rel, b: Rel) -> i128 {
    a.x as i128 * b.y as i128 - a.y as i128 * b.x as i128
}

#[inline]
fn sub(a: Rel, b: Rel) -> Rel {
    Rel {
        x: a.x - b.x,
        y: a.y - b.y,
    }
}

/// Reusable buffers, sized for the largest bottom vertex seen so far.
#[derive(Default)]
struct Solver {
    cand: Vec<(Rel, Point)>,
    rel: Vec<Rel>,
    extendable: Vec<bool>,
    queues: Vec<Vec<u32>>,
    heads: Vec<usize>,
    edges: Vec<(u32, u32)>,
    in_start: Vec<u32>,
    out_start: Vec<u32>,
    in_list: Vec<u32>,
    out_list: Vec<u32>,
    fill: Vec<u32>,
    len: Vec<u32>,
    pred: Vec<u32>,
}

impl Solver {
    /// Best chain over all bottom vertices, as points in counterclockwise
    /// order. `None` in general mode means a collinear triple was found.
    fn run(&mut self, sorted: &[Point], mode: Mode) -> Option<Vec<Point>> {
        let n = sorted.len();
        let mut best: Vec<Point> = Vec::new();
        for (pi, &p) in sorted.iter().enumerate() {
            let m = n - pi - 1;
            if m < 2 {
                break;
            }
            // With general-position checks still pending, every bottom vertex
            // must be visited so that a collinear triple cannot go unnoticed.
            if mode == Mode::Degenerate && m < best.len() {
                break;
            }
            if !self.sort_around(p, &sorted[pi + 1..], mode) {
                return None;
            }
            if m < best.len() {
                continue;
            }
            match mode {
                Mode::General => self.visibility_edges(),
                Mode::Degenerate => self.scan_edges(),
            }
            if let Some(chain) = self.longest_chain(best.len()) {
                best.clear();
                best.push(p);
                best.extend(chain.into_iter().map(|k| self.cand[k as usize].1));
            }
        }
        Some(best)
    }

    /// Angular sort around `p`; ties on a ray by distance. Returns false in
    /// general mode when two candidates share a ray.
    fn sort_around(&mut self, p: Point, above: &[Point], mode: Mode) -> bool {
        self.cand.clear();
        self.cand.extend(above.iter().map(|&q| {
            (
                Rel {
                    x: q.x - p.x,
                    y: q.y - p.y,
                },
                q,
            )
        }));
        self.cand.sort_unstable_by(|a, b| {
            match cross(a.0, b.0).cmp(&0) {
                Ordering::Greater => Ordering::Less,
                Ordering::Less => Ordering::Greater,
                // Same ray (opposite rays cannot occur in the half-plane).
                Ordering::Equal => (a.0.x.abs() + a.0.y.abs()).cmp(&(b.0.x.abs() + b.0.y.abs())),
            }
        });
        self.rel.clear();
        self.rel.extend(self.cand.iter().map(|c| c.0));
        let m = self.rel.len();
        self.extendable.clear();
        self.extendable.resize(m, true);
        for k in 1..m {
            if cross(self.rel[k - 1], self.rel[k]) == 0 {
                if mode == Mode::General {
                    return false;
                }
                self.extendable[k] = false;
            }
        }
        true
    }

    /// Visibility graph of the star-shaped polygon p, c0, ..., c(m-1): edge
    /// (i, j) with i < j iff the triangle (p, ci, cj) is empty.
    fn visibility_edges(&mut self) {
        let m = self.rel.len();
        if self.queues.len() < m {
            self.queues.resize_with(m, Vec::new);
        }
        for q in &mut self.queues[..m] {
            q.clear();
        }
        self.heads.clear();
        self.heads.resize(m, 0);
        self.edges.clear();
        let mut vg = Visibility {
            rel: &self.rel,
            queues: &mut self.queues,
            heads: &mut self.heads,
            edges: &mut self.edges,
        };
        for i in 0..m - 1 {
            vg.proceed(i, i + 1);
        }
    }

    /// Exact quadratic scan: for each `a`, sweep later rays keeping the
    /// candidate that is most counterclockwise as seen from `a`; the triangle
    /// (p, a, b) is empty iff that candidate is not strictly beyond `b`.
    fn scan_edges(&mut self) {
        let rel = &self.rel;
        let m = rel.len();
        self.edges.clear();
        let mut group_end = vec![m; m];
        let mut k = m;
        while k > 0 {
            let end = k;
            let mut start = k - 1;
            while start > 0 && cross(rel[start - 1], rel[start]) == 0 {
                start -= 1;
            }
            for g in &mut group_end[start..end] {
                *g = end;
            }
            k = start;
        }
        for a in 0..m {
            let ra = rel[a];
            let mut blocker: Option<Rel> = None;
            let mut g = group_end[a];
            while g < m {
                let end = group_end[g];
                for (b, &rb) in rel.iter().enumerate().take(end).skip(g) {
                    let db = sub(rb, ra);
                    let empty = match blocker {
                        None => true,
                        Some(c) => cross(db, c) <= 0,
                    };
                    if empty {
                        self.edges.push((a as u32, b as u32));
                    }
                }
                for &rc in &rel[g..end] {
                    let dc = sub(rc, ra);
                    blocker = match blocker {
                        Some(cur) if cross(cur, dc) <= 0 => Some(cur),
                        _ => Some(dc),
                    };
                }
                g = end;
            }
        }
    }

    /// Longest strictly convex chain over the current edge set. Returns the
    /// chain (candidate indices, angular order) if it has more than `beat - 1`
    /// vertices besides `p`, i.e. yields a hole larger than `beat`.
    fn longest_chain(&mut self, beat: usize) -> Option<Vec<u32>> {
        let m = self.rel.len();
        let e = self.edges.len();
        if e == 0 {
            return None;
        }
        let rel = &self.rel;

        // Compressed adjacency, incoming and outgoing per vertex.
        self.in_start.clear();
        self.in_start.resize(m + 1, 0);
        self.out_start.clear();
        self.out_start.resize(m + 1, 0);
        for &(a, b) in &self.edges {
            self.out_start[a as usize + 1] += 1;
            self.in_start[b as usize + 1] += 1;
        }
        for v in 0..m {
            self.in_start[v + 1] += self.in_start[v];
            self.out_start[v + 1] += self.out_start[v];
        }
        self.in_list.clear();
        self.in_list.resize(e, 0);
        self.out_list.clear();
        self.out_list.resize(e, 0);
        self.fill.clear();
        self.fill.extend_from_slice(&self.in_start[..m]);
        for (id, &(_, b)) in self.edges.iter().enumerate() {
            let slot = &mut self.fill[b as usize];
            self.in_list[*slot as usize] = id as u32;
            *slot += 1;
        }
        self.fill.clear();
        self.fill.extend_from_slice(&self.out_start[..m]);
        for (id, &(a, _)) in self.edges.iter().enumerate() {
            let slot = &mut self.fill[a as usize];
            self.out_list[*slot as usize] = id as u32;
            *slot += 1;
        }

        self.len.clear();
        self.len.resize(e, 2);
        self.pred.clear();
        self.pred.resize(e, NONE);
        let edges = &self.edges;

        for v in 0..m {
            let rv = rel[v];
            let ins = &mut self.in_list[self.in_start[v] as usize..self.in_start[v + 1] as usize];
            let outs =
                &mut self.out_list[self.out_start[v] as usize..self.out_start[v + 1] as usize];
            if outs.is_empty() {
                continue;
            }
            // All of these directions lie in the open half-plane left of rv,
            // where the cross product is a total order.
            ins.sort_unstable_by(|&x, &y| {
                let dx = sub(rv, rel[edges[x as usize].0 as usize]);
                let dy = sub(rv, rel[edges[y as usize].0 as usize]);
                0.cmp(&cross(dx, dy))
            });
            outs.sort_unstable_by(|&x, &y| {
                let dx = sub(rel[edges[x as usize].1 as usize], rv);
                let dy = sub(rel[edges[y as usize].1 as usize], rv);
                0.cmp(&cross(dx, dy))
            });
            let extendable = self.extendable[v];
            let mut ptr = 0;
            let mut best_len = 0u32;
            let mut best_edge = NONE;
            for &out in outs.iter() {
                let w = sub(rel[edges[out as usize].1 as usize], rv);
                if extendable {
                    while ptr < ins.len() {
                        let inc = ins[ptr];
                        let u = sub(rv, rel[edges[inc as usize].0 as usize]);
                        if cross(u, w) <= 0 {
                            break;
                        }
                        if self.len[inc as usize] > best_len {
                            best_len = self.len[inc as usize];
                            best_edge = inc;
                        }
                        ptr += 1;
                    }
                }
                if best_edge != NONE {
                    self.len[out as usize] = best_len + 1;
                    self.pred[out as usize] = best_edge;
                }
            }
        }

        // Chain vertices = len, hole size = len + 1 (the bottom vertex).
        let (top, &top_len) =
            self.len.iter().enumerate().fold(
                (0, &0u32),
                |acc, (i, l)| if *l > *acc.1 { (i, l) } else { acc },
            );
        if (top_len as usize) < beat {
            return None;
        }
        let mut chain = Vec::with_capacity(top_len as usize);
        let mut cur = top as u32;
        chain.push(self.edges[cur as usize].1);
        loop {
            let (a, _) = self.edges[cur as usize];
            chain.push(a);
            let p = self.pred[cur as usize];
            if p == NONE {
                break;
            }
            cur = p;
        }
        chain.reverse();
        Some(chain)
    }
}

struct Visibility<'a> {
    rel: &'a [Rel],
    queues: &'a mut [Vec<u32>],
    heads: &'a mut [usize],
    edges: &'a mut Vec<(u32, u32)>,
}

impl Visibility<'_> {
    /// `(i, j)` is known visible. Every pending `k` waiting at `i` that turns
    /// left at `i` towards `j` sees `j` as well; the first one that turns
    /// right is shadowed by `i` and stays queued for later targets.
    fn proceed(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.rel[i], self.rel[j]);
        while self.heads[i] < self.queues[i].len() {
            let k = self.queues[i][self.heads[i]] as usize;
            let rk = self.rel[k];
            if cross(sub(ri, rk), sub(rj, ri)) > 0 {
                self.proceed(k, j);
                self.heads[i] += 1;
            } else {
                break;
            }
        }
        self.edges.push((i as u32, j as u32));
        self.queues[j].push(i as u32);
    }
}
