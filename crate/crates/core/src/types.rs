//! Value types shared across modules: affine functions, point sets, convex
//! bodies and finitely supported measures.

use core::cmp::Ordering;

use alloc::vec::Vec;

use crate::point::Point;

/// `x -> slope . x + intercept`. A linear functional has zero intercept.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineFunction {
    pub slope: Point,
    pub intercept: f64,
}

impl AffineFunction {
    pub fn new(slope: Point, intercept: f64) -> Self {
        AffineFunction { slope, intercept }
    }

    pub fn linear(slope: Point) -> Self {
        AffineFunction::new(slope, 0.0)
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.slope.dot(x) + self.intercept
    }

    pub fn dim(&self) -> usize {
        self.slope.dim()
    }
}

/// Finite point set, deduplicated within a tolerance and sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(mut points: Vec<Point>, eps: f64) -> Self {
        points.sort_by(|a, b| a.lex_cmp(b));
        let mut kept: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            // kept is sorted by first coordinate, so only a trailing window can be within eps
            let dup = kept
                .iter()
                .rev()
                .take_while(|q| p[0] - q[0] <= eps)
                .any(|q| q.cheb_dist(&p) <= eps);
            if !dup {
                kept.push(p);
            }
        }
        PointSet { points: kept }
    }

    pub fn empty() -> Self {
        PointSet::default()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Distance from `x` to the nearest member; `inf` for the empty set.
    pub fn distance_to(&self, x: &Point) -> f64 {
        self.points
            .iter()
            .map(|p| p.dist(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains_within(&self, x: &Point, tol: f64) -> bool {
        self.distance_to(x) <= tol
    }

    pub fn union(&self, other: &PointSet, eps: f64) -> PointSet {
        let mut all = self.points.clone();
        all.extend_from_slice(&other.points);
        PointSet::new(all, eps)
    }

    /// Largest distance between two members.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d = d.max(a.dist(b));
            }
        }
        d
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = core::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// A compact convex polytope held by its extreme points.
///
/// Built by [`crate::geometry::convex_hull`]; vertices are canonically ordered
/// (ascending in 1D, counter-clockwise from the lexicographic minimum for
/// full-dimensional 2D bodies, lexicographic otherwise).
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexBody {
    pub(crate) vertices: Vec<Point>,
    pub(crate) dim: usize,
}

impl ConvexBody {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(b));
            }
        }
        d
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len() as f64;
        self.vertices
            .iter()
            .fold(Point::zero(self.dim), |acc, v| acc + *v)
            * (1.0 / n)
    }
}

/// Finitely supported probability measure.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    support: Vec<(Point, f64)>,
}

impl DiscreteMeasure {
    /// Support points are sorted lexicographically; weights must be nonnegative.
    pub fn new(mut support: Vec<(Point, f64)>) -> Self {
        debug_assert!(support.iter().all(|(_, w)| *w >= 0.0));
        support.sort_by(|a, b| a.0.lex_cmp(&b.0).then(Ordering::Equal));
        DiscreteMeasure { support }
    }

    pub fn dirac(x: Point) -> Self {
        DiscreteMeasure {
            support: alloc::vec![(x, 1.0)],
        }
    }

    pub fn support(&self) -> &[(Point, f64)] {
        &self.support
    }

    pub fn total_mass(&self) -> f64 {
        self.support.iter().map(|(_, w)| w).sum()
    }

    /// `sum_j w_j x_j`.
    pub fn barycenter(&self) -> Point {
        let dim = self.support[0].0.dim();
        self.support
            .iter()
            .fold(Point::zero(dim), |acc, (x, w)| acc + *x * *w)
    }

    /// `sum_j w_j f(x_j)`.
    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.support.iter().map(|(x, w)| w * f(x)).sum()
    }
}
