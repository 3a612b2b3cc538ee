//! Convex hulls, membership and distances for small point clouds in R^1..R^3,
//! plus lower hulls of lifted samples and the finite representing measures
//! read off them.

mod hull2d;
mod lower_hull;
mod quickhull;

use alloc::vec::Vec;

pub use lower_hull::{Location, LowerHull};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::point::Point;
use crate::types::{ConvexBody, DiscreteMeasure, PointSet};
use hull2d::hull2d;
use quickhull::{hull3, Hull3};

fn common_dim(points: &[Point]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyPointSet)?;
    let dim = first.dim();
    match points.iter().find(|p| p.dim() != dim) {
        Some(p) => Err(Error::DimensionMismatch {
            expected: dim,
            found: p.dim(),
        }),
        None => Ok(dim),
    }
}

fn extent(points: &[Point]) -> f64 {
    let dim = points[0].dim();
    (0..dim)
        .map(|k| {
            let lo = points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Convex hull of `points`. Points within `eps` of the hull of the others
/// (or of another point) are not vertices.
pub fn convex_hull(points: &[Point], eps: f64) -> Result<ConvexBody> {
    let dim = common_dim(points)?;
    let vertices: Vec<Point> = match dim {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= eps {
                alloc::vec![Point::new(&[lo])]
            } else {
                alloc::vec![Point::new(&[lo]), Point::new(&[hi])]
            }
        }
        2 => {
            let flat: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            hull2d(&flat, eps).into_iter().map(|i| points[i]).collect()
        }
        _ => {
            let flat: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
            let scale = extent(points);
            let rel = if scale > 0.0 { eps / scale } else { eps };
            let mut v: Vec<Point> = hull3(&flat, rel)
                .vertices()
                .into_iter()
                .map(|i| points[i])
                .collect();
            v.sort_by(|a, b| a.lex_cmp(b));
            v
        }
    };
    Ok(ConvexBody { vertices, dim })
}

/// Convex hull of a [`PointSet`].
pub fn convex_hull_of(set: &PointSet, eps: f64) -> Result<ConvexBody> {
    convex_hull(set.points(), eps)
}

/// The extreme points of `body`, which are exactly its vertices.
pub fn extreme_points(body: &ConvexBody) -> PointSet {
    PointSet::new(body.vertices().to_vec(), 0.0)
}

fn segment_distance(a: &Point, b: &Point, x: &Point) -> f64 {
    let d = *b - *a;
    let len2 = d.dot(&d);
    if len2 == 0.0 {
        return a.dist(x);
    }
    let t = ((*x - *a).dot(&d) / len2).clamp(0.0, 1.0);
    (*a + d * t).dist(x)
}

fn cross3(u: Point, v: Point) -> Point {
    Point::new(&[
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ])
}

/// Distance from `x` to a planar polygon in R^3 given in cyclic order.
fn polygon3_distance(poly: &[Point], x: &Point) -> f64 {
    let n = poly.len();
    let mut normal = Point::zero(3);
    for k in 1..n - 1 {
        normal = normal + cross3(poly[k] - poly[0], poly[k + 1] - poly[0]);
    }
    let len = normal.norm();
    let edges = || (0..n).map(|i| segment_distance(&poly[i], &poly[(i + 1) % n], x));
    if len == 0.0 {
        return edges().fold(f64::INFINITY, f64::min);
    }
    let normal = normal * (1.0 / len);
    let offset = (*x - poly[0]).dot(&normal);
    let proj = *x - normal * offset;
    let inside = (0..n).all(|i| {
        let e = poly[(i + 1) % n] - poly[i];
        cross3(e, proj - poly[i]).dot(&normal) >= 0.0
    });
    if inside {
        offset.abs()
    } else {
        edges().fold(f64::INFINITY, f64::min)
    }
}

/// Euclidean distance from `x` to `body` (zero inside).
pub fn distance(body: &ConvexBody, x: &Point) -> f64 {
    let v = body.vertices();
    match v.len() {
        1 => return v[0].dist(x),
        2 => return segment_distance(&v[0], &v[1], x),
        _ => {}
    }
    if body.dim() == 2 {
        let n = v.len();
        let p = [x[0], x[1]];
        if (0..n).all(|i| {
            crate::grid::edge_signed_dist([v[i][0], v[i][1]], [v[(i + 1) % n][0], v[(i + 1) % n][1]], p)
                >= 0.0
        }) {
            return 0.0;
        }
        return (0..n)
            .map(|i| segment_distance(&v[i], &v[(i + 1) % n], x))
            .fold(f64::INFINITY, f64::min);
    }
    let flat: Vec<[f64; 3]> = v.iter().map(|p| [p[0], p[1], p[2]]).collect();
    match hull3(&flat, 1e-12) {
        Hull3::Point(i) => v[i].dist(x),
        Hull3::Segment(i, j) => segment_distance(&v[i], &v[j], x),
        Hull3::Planar(poly) => {
            let pts: Vec<Point> = poly.iter().map(|&i| v[i]).collect();
            polygon3_distance(&pts, x)
        }
        Hull3::Solid(faces) => {
            let outside = faces.iter().any(|f| {
                let n = cross3(v[f[1]] - v[f[0]], v[f[2]] - v[f[0]]);
                (*x - v[f[0]]).dot(&n) > 0.0
            });
            if !outside {
                return 0.0;
            }
            faces
                .iter()
                .map(|f| polygon3_distance(&[v[f[0]], v[f[1]], v[f[2]]], x))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// True iff `x` is within `tol` of `body`.
pub fn contains(body: &ConvexBody, x: &Point, tol: f64) -> bool {
    x.dim() == body.dim() && distance(body, x) <= tol
}

/// Symmetric Hausdorff distance. For polytopes the farthest point of one body
/// from the other is attained at a vertex, so this is exact.
pub fn hausdorff(a: &ConvexBody, b: &ConvexBody) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let one_sided = |from: &ConvexBody, to: &ConvexBody| {
        from.vertices()
            .iter()
            .map(|v| distance(to, v))
            .fold(0.0, f64::max)
    };
    Ok(one_sided(a, b).max(one_sided(b, a)))
}

/// Measure supported on the vertices of a located facet, dropping zero weights.
pub fn measure_at(hull: &LowerHull, loc: &Location) -> DiscreteMeasure {
    let mut kept: Vec<(Point, f64)> = loc
        .weights
        .iter()
        .filter(|&&(_, w)| w > 0.0)
        .map(|&(i, w)| (hull.points()[i], w))
        .collect();
    let total: f64 = kept.iter().map(|(_, w)| w).sum();
    for (_, w) in &mut kept {
        *w /= total;
    }
    DiscreteMeasure::new(kept)
}

/// Writes `x` as a convex combination of at most `dim + 1` support points
/// that span the facet of the lower hull of the lifted finite support above
/// `x`. Integrating the support values against the result gives the height
/// of that lower hull at `x`.
pub fn caratheodory(support: &[(Point, ExtReal)], x: &Point) -> Result<DiscreteMeasure> {
    let (points, values): (Vec<Point>, Vec<f64>) = support
        .iter()
        .filter_map(|(p, v)| v.to_finite().map(|v| (*p, v)))
        .unzip();
    if let Ok(d) = common_dim(&points) {
        if d != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.dim(),
            });
        }
    }
    let hull = LowerHull::new(points, values)?;
    let loc = hull.locate(x).ok_or(Error::OutsideHull)?;
    Ok(measure_at(&hull, &loc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(x: f64) -> Point {
        Point::new(&[x])
    }

    fn p2(x: f64, y: f64) -> Point {
        Point::new(&[x, y])
    }

    #[test]
    fn interval_hull() {
        let b = convex_hull(&[p1(0.2), p1(0.9), p1(0.5)], 1e-9).unwrap();
        assert_eq!(b.vertices(), &[p1(0.2), p1(0.9)]);
    }

    #[test]
    fn interior_point_removed() {
        let pts = [p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0), p2(0.25, 0.25)];
        let b = convex_hull(&pts, 1e-9).unwrap();
        assert_eq!(b.vertices(), &[p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0)]);
        assert_eq!(extreme_points(&b).len(), 3);
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        assert!(matches!(
            convex_hull(&[p1(0.0), p2(0.0, 0.0)], 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(convex_hull(&[], 1e-9), Err(Error::EmptyPointSet));
    }

    #[test]
    fn membership() {
        let seg = convex_hull(&[p1(-1.0), p1(1.0)], 0.0).unwrap();
        assert!(contains(&seg, &p1(0.0), 0.0));
        assert!(contains(&seg, &p1(1.05), 0.1));
        assert!(!contains(&seg, &p1(1.05), 0.01));
        let tri = convex_hull(&[p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0)], 0.0).unwrap();
        assert!(!contains(&tri, &p2(0.6, 0.6), 0.05));
        let d = distance(&tri, &p2(0.6, 0.6));
        assert!((d - 0.2 / libm::sqrt(2.0)).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_examples() {
        let a = convex_hull(&[p1(-1.0), p1(1.0)], 0.0).unwrap();
        let b = convex_hull(&[p1(-1.0), p1(0.9)], 0.0).unwrap();
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        assert!((hausdorff(&a, &b).unwrap() - 0.1).abs() < 1e-15);
        let sq = convex_hull(
            &[p2(0.0, 0.0), p2(1.0, 0.0), p2(1.0, 1.0), p2(0.0, 1.0)],
            0.0,
        )
        .unwrap();
        let tri = convex_hull(&[p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0)], 0.0).unwrap();
        let h = hausdorff(&sq, &tri).unwrap();
        assert!((h - 1.0 / libm::sqrt(2.0)).abs() < 1e-15);
        assert!(hausdorff(&a, &tri).is_err());
    }

    #[test]
    fn cube_membership() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(Point::new(&[
                (i & 1) as f64,
                ((i >> 1) & 1) as f64,
                ((i >> 2) & 1) as f64,
            ]));
        }
        pts.push(Point::new(&[0.5, 0.5, 0.5]));
        let cube = convex_hull(&pts, 1e-12).unwrap();
        assert_eq!(cube.vertices().len(), 8);
        assert_eq!(distance(&cube, &Point::new(&[0.5, 0.2, 0.9])), 0.0);
        assert!((distance(&cube, &Point::new(&[2.0, 0.5, 0.5])) - 1.0).abs() < 1e-15);
        assert!((distance(&cube, &Point::new(&[2.0, 2.0, 0.5])) - libm::sqrt(2.0)).abs() < 1e-15);
        let square = convex_hull(
            &[
                Point::new(&[0.0, 0.0, 1.0]),
                Point::new(&[1.0, 0.0, 1.0]),
                Point::new(&[1.0, 1.0, 1.0]),
                Point::new(&[0.0, 1.0, 1.0]),
            ],
            1e-12,
        )
        .unwrap();
        assert_eq!(distance(&square, &Point::new(&[0.5, 0.5, 3.0])), 2.0);
    }

    #[test]
    fn double_well_measure() {
        let support: Vec<(Point, ExtReal)> = (0..=40)
            .map(|i| {
                let x = -2.0 + 0.1 * i as f64;
                (p1(x), ExtReal::finite((x * x - 1.0) * (x * x - 1.0)))
            })
            .collect();
        let mu = caratheodory(&support, &p1(0.0)).unwrap();
        assert_eq!(mu.support().len(), 2);
        for ((x, w), want) in mu.support().iter().zip([-1.0, 1.0]) {
            assert!((x[0] - want).abs() < 1e-12);
            assert!((w - 0.5).abs() < 1e-9);
        }
        assert!(matches!(caratheodory(&support, &p1(3.0)), Err(Error::OutsideHull)));
    }

    #[test]
    fn vertex_gets_a_dirac() {
        let support: Vec<(Point, ExtReal)> = (0..=10)
            .map(|i| {
                let x = i as f64 / 10.0;
                (p1(x), ExtReal::finite(x * x))
            })
            .collect();
        let mu = caratheodory(&support, &p1(0.3)).unwrap();
        assert_eq!(mu.support(), &[(p1(0.3), 1.0)]);
    }

    #[test]
    fn affine_data_keeps_the_value() {
        let support: Vec<(Point, ExtReal)> = (0..=4)
            .map(|i| (p1(i as f64 / 4.0), ExtReal::finite(i as f64 / 4.0)))
            .collect();
        let mu = caratheodory(&support, &p1(0.5)).unwrap();
        assert!((mu.barycenter()[0] - 0.5).abs() < 1e-15);
        assert!((mu.integrate(|x| x[0]) - 0.5).abs() < 1e-15);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    }
}
