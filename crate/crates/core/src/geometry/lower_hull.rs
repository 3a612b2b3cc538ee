//! Lower convex hull of lifted points `(x_j, z_j)` with `x_j` in R^1 or R^2.

use alloc::vec::Vec;

use super::hull2d::hull2d;
use super::quickhull::{hull3, Hull3};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::types::AffineFunction;

const LIFT_EPS: f64 = 1e-10;
const BARY_TOL: f64 = 1e-9;

/// The facet of a lower hull above a query point, with barycentric weights
/// on the support indices of its vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Location {
    pub facet: usize,
    pub weights: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
enum Kind {
    Single(usize),
    /// Points on a line `origin + t * dir`; `verts` are support indices of
    /// the lower chain sorted by `ts`.
    Chain {
        origin: Point,
        dir: Point,
        ts: Vec<f64>,
        verts: Vec<usize>,
        width: f64,
    },
    Triangles {
        tris: Vec<[usize; 3]>,
        buckets: Buckets,
    },
}

#[derive(Clone, Debug)]
pub struct LowerHull {
    points: Vec<Point>,
    values: Vec<f64>,
    kind: Kind,
}

impl LowerHull {
    /// `points` must share one dimension (1 or 2); `values` must be finite.
    pub fn new(points: Vec<Point>, values: Vec<f64>) -> Result<LowerHull> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let dim = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        if dim > 2 {
            return Err(Error::DimensionTooHigh { max: 2, found: dim });
        }
        debug_assert!(values.iter().all(|v| v.is_finite()));
        let kind = if points.len() == 1 {
            Kind::Single(0)
        } else if dim == 1 {
            chain(&points, &values, Point::zero(1), Point::new(&[1.0]))
        } else {
            lower_2d(&points, &values)
        };
        Ok(LowerHull {
            points,
            values,
            kind,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Support indices that are vertices of the lower hull.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = match &self.kind {
            Kind::Single(i) => alloc::vec![*i],
            Kind::Chain { verts, .. } => verts.clone(),
            Kind::Triangles { tris, .. } => tris.iter().flatten().copied().collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Facet above `x` and the barycentric weights of `x` in it, or `None`
    /// when `x` is outside the projected hull.
    pub fn locate(&self, x: &Point) -> Option<Location> {
        match &self.kind {
            Kind::Single(i) => {
                let tol = 1e-12 * (1.0 + self.points[*i].norm());
                (self.points[*i].dist(x) <= tol).then(|| Location {
                    facet: 0,
                    weights: alloc::vec![(*i, 1.0)],
                })
            }
            Kind::Chain {
                origin,
                dir,
                ts,
                verts,
                width,
            } => {
                let r = *x - *origin;
                let t = r.dot(dir);
                let off = (r - *dir * t).norm();
                let tol = BARY_TOL * width.max(1e-300);
                if off > tol || t < ts[0] - tol || t > ts[ts.len() - 1] + tol {
                    return None;
                }
                if verts.len() == 1 {
                    return Some(Location {
                        facet: 0,
                        weights: alloc::vec![(verts[0], 1.0)],
                    });
                }
                let t = t.clamp(ts[0], ts[ts.len() - 1]);
                // first k with ts[k+1] > t, capped at the last segment
                let k = ts.partition_point(|&s| s <= t).saturating_sub(1).min(ts.len() - 2);
                let w = (t - ts[k]) / (ts[k + 1] - ts[k]);
                Some(Location {
                    facet: k,
                    weights: alloc::vec![(verts[k], 1.0 - w), (verts[k + 1], w)],
                })
            }
            Kind::Triangles { tris, buckets } => {
                let p = [x[0], x[1]];
                let min3 = |l: [f64; 3]| l[0].min(l[1]).min(l[2]);
                let mut best: Option<(usize, [f64; 3])> = None;
                let consider = |ti: usize, best: &mut Option<(usize, [f64; 3])>| {
                    if let Some(l) = self.barycentric(tris[ti], p) {
                        let better = match *best {
                            None => true,
                            Some((bi, bl)) => min3(l) > min3(bl) || (min3(l) == min3(bl) && ti < bi),
                        };
                        if better {
                            *best = Some((ti, l));
                        }
                    }
                };
                for &ti in buckets.candidates(p) {
                    consider(ti, &mut best);
                }
                if best.is_none_or(|(_, l)| min3(l) < -BARY_TOL) {
                    for ti in 0..tris.len() {
                        consider(ti, &mut best);
                    }
                }
                let (ti, l) = best?;
                if min3(l) < -BARY_TOL {
                    return None;
                }
                let t = tris[ti];
                Some(Location {
                    facet: ti,
                    weights: alloc::vec![(t[0], l[0]), (t[1], l[1]), (t[2], l[2])],
                })
            }
        }
    }

    /// Height of the lower hull above `x`.
    pub fn height(&self, x: &Point) -> Option<f64> {
        self.locate(x).map(|loc| self.interpolate(&loc))
    }

    pub fn interpolate(&self, loc: &Location) -> f64 {
        loc.weights.iter().map(|&(i, w)| w * self.values[i]).sum()
    }

    /// The affine function whose graph contains the located facet.
    pub fn facet_affine(&self, loc: &Location) -> AffineFunction {
        let dim = self.points[0].dim();
        match &self.kind {
            Kind::Single(i) => AffineFunction::new(Point::zero(dim), self.values[*i]),
            Kind::Chain {
                origin, dir, ts, ..
            } => {
                if loc.weights.len() == 1 {
                    let (i, _) = loc.weights[0];
                    return AffineFunction::new(Point::zero(dim), self.values[i]);
                }
                let k = loc.facet;
                let (i0, _) = loc.weights[0];
                let (i1, _) = loc.weights[1];
                let s = (self.values[i1] - self.values[i0]) / (ts[k + 1] - ts[k]);
                let slope = *dir * s;
                AffineFunction::new(slope, self.values[i0] - s * (origin.dot(dir) + ts[k]))
            }
            Kind::Triangles { .. } => {
                let [a, b, c] = [0, 1, 2].map(|j| loc.weights[j].0);
                let (pa, pb, pc) = (self.points[a], self.points[b], self.points[c]);
                let (u, v) = (pb - pa, pc - pa);
                let (du, dv) = (
                    self.values[b] - self.values[a],
                    self.values[c] - self.values[a],
                );
                let det = u[0] * v[1] - u[1] * v[0];
                let g = Point::new(&[
                    (du * v[1] - dv * u[1]) / det,
                    (u[0] * dv - v[0] * du) / det,
                ]);
                AffineFunction::new(g, self.values[a] - g.dot(&pa))
            }
        }
    }

    /// Gradients of all facets of the lower hull. Triangles whose projection
    /// is degenerate are skipped.
    pub fn facet_slopes(&self) -> Vec<Point> {
        let dim = self.points[0].dim();
        match &self.kind {
            Kind::Single(_) => alloc::vec![Point::zero(dim)],
            Kind::Chain { dir, ts, verts, .. } => {
                if verts.len() == 1 {
                    return alloc::vec![Point::zero(dim)];
                }
                (0..verts.len() - 1)
                    .map(|k| {
                        let s = (self.values[verts[k + 1]] - self.values[verts[k]]) / (ts[k + 1] - ts[k]);
                        *dir * s
                    })
                    .collect()
            }
            Kind::Triangles { tris, .. } => {
                let scale = self.points.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
                tris.iter()
                    .filter_map(|&t| {
                        let (a, b, c) = (self.points[t[0]], self.points[t[1]], self.points[t[2]]);
                        let (u, v) = (b - a, c - a);
                        let det = u[0] * v[1] - u[1] * v[0];
                        if det.abs() <= 1e-12 * scale * scale {
                            return None;
                        }
                        let (du, dv) = (self.values[t[1]] - self.values[t[0]], self.values[t[2]] - self.values[t[0]]);
                        Some(Point::new(&[
                            (du * v[1] - dv * u[1]) / det,
                            (u[0] * dv - v[0] * du) / det,
                        ]))
                    })
                    .collect()
            }
        }
    }

    fn barycentric(&self, t: [usize; 3], x: [f64; 2]) -> Option<[f64; 3]> {
        let (a, b, c) = (self.points[t[0]], self.points[t[1]], self.points[t[2]]);
        let (u0, u1) = (b[0] - a[0], b[1] - a[1]);
        let (v0, v1) = (c[0] - a[0], c[1] - a[1]);
        let (r0, r1) = (x[0] - a[0], x[1] - a[1]);
        let det = u0 * v1 - u1 * v0;
        if det == 0.0 {
            return None;
        }
        let lb = (r0 * v1 - r1 * v0) / det;
        let lc = (u0 * r1 - u1 * r0) / det;
        Some([1.0 - lb - lc, lb, lc])
    }
}

fn chain(points: &[Point], values: &[f64], origin: Point, dir: Point) -> Kind {
    let mut items: Vec<(f64, f64, usize)> = points
        .iter()
        .zip(values)
        .enumerate()
        .map(|(i, (p, &z))| ((*p - origin).dot(&dir), z, i))
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // equal abscissae keep only the lowest value
    items.dedup_by(|later, first| later.0 == first.0);
    let width = items[items.len() - 1].0 - items[0].0;
    let mut stack: Vec<(f64, f64, usize)> = Vec::new();
    for it in items {
        while stack.len() >= 2 {
            let (t0, z0, _) = stack[stack.len() - 2];
            let (t1, z1, _) = stack[stack.len() - 1];
            // pop the middle point unless it lies strictly below the chord
            if (t1 - t0) * (it.1 - z0) - (z1 - z0) * (it.0 - t0) <= 0.0 {
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(it);
    }
    Kind::Chain {
        origin,
        dir,
        ts: stack.iter().map(|s| s.0).collect(),
        verts: stack.iter().map(|s| s.2).collect(),
        width,
    }
}

fn lower_2d(points: &[Point], values: &[f64]) -> Kind {
    let flat: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    let (lo, hi) = bbox(&flat);
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let outline = hull2d(&flat, 1e-12 * extent.max(f64::MIN_POSITIVE));
    if outline.len() <= 2 {
        // projected points are collinear: a one-dimensional problem along that line
        let a = points[outline[0]];
        let b = points[*outline.last().unwrap()];
        let d = b - a;
        let n = d.norm();
        let dir = if n > 0.0 { d * (1.0 / n) } else { Point::new(&[1.0, 0.0]) };
        return chain(points, values, a, dir);
    }
    let lifted: Vec<[f64; 3]> = points
        .iter()
        .zip(values)
        .map(|(p, &z)| [p[0], p[1], z])
        .collect();
    let tris: Vec<[usize; 3]> = match hull3(&lifted, LIFT_EPS) {
        Hull3::Planar(poly) => (1..poly.len() - 1)
            .map(|k| [poly[0], poly[k], poly[k + 1]])
            .collect(),
        Hull3::Solid(faces) => faces
            .into_iter()
            .filter(|f| {
                let [a, b, c] = f.map(|i| lifted[i]);
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let n = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let len = libm::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
                n[2] < -1e-12 * len
            })
            .collect(),
        Hull3::Point(_) | Hull3::Segment(..) => unreachable!("projected hull is two-dimensional"),
    };
    let buckets = Buckets::new(&flat, &tris);
    Kind::Triangles { tris, buckets }
}

fn bbox(pts: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Uniform bucket grid over the bounding box; each triangle is listed in
/// every cell its bounding box touches.
#[derive(Clone, Debug)]
struct Buckets {
    lo: [f64; 2],
    cell: [f64; 2],
    n: [usize; 2],
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(pts: &[[f64; 2]], tris: &[[usize; 3]]) -> Buckets {
        let (lo, hi) = bbox(pts);
        let side = ((libm::sqrt(tris.len() as f64) as usize) / 2).max(1);
        let n = [side, side];
        let cell = [0, 1].map(|k| ((hi[k] - lo[k]) / side as f64).max(f64::MIN_POSITIVE));
        let mut b = Buckets {
            lo,
            cell,
            n,
            cells: alloc::vec![Vec::new(); side * side],
        };
        for (ti, t) in tris.iter().enumerate() {
            let (tlo, thi) = bbox(&t.map(|i| pts[i]));
            let (c0, c1) = (b.cell_of(tlo), b.cell_of(thi));
            for i in c0[0]..=c1[0] {
                for j in c0[1]..=c1[1] {
                    b.cells[i * n[1] + j].push(ti);
                }
            }
        }
        b
    }

    fn cell_of(&self, p: [f64; 2]) -> [usize; 2] {
        [0, 1].map(|k| {
            let c = libm::floor((p[k] - self.lo[k]) / self.cell[k]);
            if c.is_nan() || c < 0.0 {
                0
            } else {
                (c as usize).min(self.n[k] - 1)
            }
        })
    }

    fn candidates(&self, p: [f64; 2]) -> &[usize] {
        let c = self.cell_of(p);
        &self.cells[c[0] * self.n[1] + c[1]]
    }
}
