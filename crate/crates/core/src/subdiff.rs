//! Subdifferentials of the conjugate through tilted minimization, and the
//! gradient limits that generate them.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::function::SampledFunction;
use crate::geometry::{convex_hull, distance};
use crate::minimize::{default_minimizer_tol, generalized_minimizer_nodes};
use crate::point::Point;
use crate::transform::DualGrid;
use crate::types::{AffineFunction, ConvexBody, PointSet};

/// `h - xstar` node by node. `xstar` must be linear.
pub fn tilt(h: &SampledFunction, xstar: &AffineFunction) -> Result<SampledFunction> {
    if xstar.intercept != 0.0 {
        return Err(Error::NonlinearTilt(xstar.intercept));
    }
    let grid = h.grid();
    if xstar.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: xstar.dim(),
        });
    }
    let values = h
        .values()
        .iter()
        .zip(grid.nodes())
        .map(|(v, x)| v.sub_finite(xstar.eval(x)))
        .collect();
    h.with_values(values)
}

/// Subdifferential of `h*` at `xstar` together with the point retained as its
/// gradient when the subdifferential is small.
#[derive(Clone, Debug, PartialEq)]
pub struct TiltedMinimum {
    pub body: ConvexBody,
    /// Centroid of the nodes where the tilted function itself attains its
    /// infimum within tolerance; falls back to the body centroid.
    pub gradient: Point,
    pub tol: f64,
}

/// Convex hull of the generalized minimizers of `h - xstar`. `tol` defaults to
/// the minimizer tolerance of the tilted function.
pub fn subdifferential(h: &SampledFunction, xstar: &AffineFunction, tol: Option<f64>) -> Result<ConvexBody> {
    tilted_minimum(h, xstar, tol).map(|t| t.body)
}

pub fn tilted_minimum(h: &SampledFunction, xstar: &AffineFunction, tol: Option<f64>) -> Result<TiltedMinimum> {
    let g = tilt(h, xstar)?;
    let tol = tol.unwrap_or_else(|| default_minimizer_tol(&g));
    let grid = g.grid();
    let nodes = generalized_minimizer_nodes(&g, tol);
    let pts: Vec<Point> = nodes.iter().map(|&n| grid.node(n)).collect();
    let body = convex_hull(&pts, grid.eps_geom())?;
    let cut = ExtReal::finite(g.infimum().value() + tol);
    let exact: Vec<Point> = nodes
        .iter()
        .filter(|&&n| g.value(n) <= cut)
        .map(|&n| grid.node(n))
        .collect();
    let gradient = if exact.is_empty() {
        body.centroid()
    } else {
        let k = exact.len() as f64;
        exact.iter().fold(Point::zero(grid.dim()), |a, p| a + *p) * (1.0 / k)
    };
    Ok(TiltedMinimum { body, gradient, tol })
}

/// A dual node where the conjugate is (numerically) differentiable.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanEntry {
    pub node: usize,
    pub slope: Point,
    pub gradient: Point,
    pub diameter: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DifferentiabilityScan {
    /// Dual nodes whose subdifferential has diameter at most `width_tol`, in node order.
    pub entries: Vec<ScanEntry>,
    pub scanned: usize,
    pub width_tol: f64,
}

impl DifferentiabilityScan {
    /// The slopes in the scan (the differentiability set).
    pub fn slopes(&self, eps: f64) -> PointSet {
        PointSet::new(self.entries.iter().map(|e| e.slope).collect(), eps)
    }
}

/// Default width below which a subdifferential counts as a single gradient:
/// three primal spacings.
pub fn default_width_tol(h: &SampledFunction) -> f64 {
    3.0 * h.grid().max_spacing()
}

/// Tests one dual node for differentiability of `h*`.
pub fn scan_node(h: &SampledFunction, dual: &DualGrid, node: usize, width_tol: f64) -> Result<Option<ScanEntry>> {
    let slope = dual.slope(node);
    let t = tilted_minimum(h, &AffineFunction::linear(slope), None)?;
    let diameter = t.body.diameter();
    Ok((diameter <= width_tol + h.grid().eps_geom()).then_some(ScanEntry {
        node,
        slope,
        gradient: t.gradient,
        diameter,
    }))
}

/// Scans `nodes` of `dual` (all nodes when `None`).
pub fn differentiability_scan_nodes(
    h: &SampledFunction,
    dual: &DualGrid,
    nodes: Option<&[usize]>,
    width_tol: Option<f64>,
) -> Result<DifferentiabilityScan> {
    let width_tol = width_tol.unwrap_or_else(|| default_width_tol(h));
    let all: Vec<usize>;
    let nodes = match nodes {
        Some(n) => n,
        None => {
            all = (0..dual.len()).collect();
            &all
        }
    };
    let mut entries = Vec::new();
    for &n in nodes {
        if let Some(e) = scan_node(h, dual, n, width_tol)? {
            entries.push(e);
        }
    }
    Ok(DifferentiabilityScan {
        entries,
        scanned: nodes.len(),
        width_tol,
    })
}

/// Dual nodes where the subdifferential of `h*` has diameter at most
/// `width_tol` (default three primal spacings), with their gradients.
pub fn differentiability_scan(
    h: &SampledFunction,
    dual: &DualGrid,
    width_tol: Option<f64>,
) -> Result<DifferentiabilityScan> {
    differentiability_scan_nodes(h, dual, None, width_tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitingGradients {
    pub radii: Vec<f64>,
    /// Gradients at differentiability points within each radius.
    pub per_radius: Vec<PointSet>,
    /// Points of the smallest-radius set that appear, within two primal
    /// spacings, in every set.
    pub intersection: PointSet,
    /// Number of differentiability points within each radius.
    pub counts: Vec<usize>,
}

fn check_radii(radii: &[f64], dual: &DualGrid) -> Result<()> {
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::RadiiNotDecreasing);
    }
    let spacing = dual.max_spacing();
    match radii.iter().find(|&&r| r < spacing) {
        Some(&radius) => Err(Error::RadiusBelowResolution { radius, spacing }),
        None => Ok(()),
    }
}

/// Dual nodes strictly inside the largest ball `|p - xstar| < radii[0]`, after
/// checking that `radii` is strictly decreasing and no radius is below the
/// dual spacing.
pub fn ball_nodes(dual: &DualGrid, xstar: &AffineFunction, radii: &[f64]) -> Result<Vec<usize>> {
    check_radii(radii, dual)?;
    let Some(&outer) = radii.first() else {
        return Ok(Vec::new());
    };
    let center = xstar.slope;
    Ok((0..dual.len())
        .filter(|&j| dual.slope(j).dist(&center) < outer)
        .collect())
}

/// Gradients of `h*` collected from the differentiability points in balls
/// `|p - xstar| < r` for each radius in the strictly decreasing `radii`.
pub fn limiting_gradients(
    h: &SampledFunction,
    dual: &DualGrid,
    xstar: &AffineFunction,
    radii: &[f64],
    width_tol: Option<f64>,
) -> Result<LimitingGradients> {
    let near = ball_nodes(dual, xstar, radii)?;
    let scan = differentiability_scan_nodes(h, dual, Some(&near), width_tol)?;
    limiting_gradients_from(h, &scan, xstar, radii)
}

/// [`limiting_gradients`] from an existing scan.
pub fn limiting_gradients_from(
    h: &SampledFunction,
    scan: &DifferentiabilityScan,
    xstar: &AffineFunction,
    radii: &[f64],
) -> Result<LimitingGradients> {
    let eps = h.grid().eps_geom();
    let match_tol = 2.0 * h.grid().max_spacing();
    let center = xstar.slope;
    let mut per_radius = Vec::with_capacity(radii.len());
    let mut counts = Vec::with_capacity(radii.len());
    for &r in radii {
        let inside: Vec<Point> = scan
            .entries
            .iter()
            .filter(|e| e.slope.dist(&center) < r)
            .map(|e| e.gradient)
            .collect();
        counts.push(inside.len());
        per_radius.push(PointSet::new(inside, eps));
    }
    let intersection = match per_radius.last() {
        None => PointSet::empty(),
        Some(last) => PointSet::new(
            last.iter()
                .filter(|p| per_radius.iter().all(|s| s.contains_within(p, match_tol)))
                .copied()
                .collect(),
            eps,
        ),
    };
    Ok(LimitingGradients {
        radii: radii.to_vec(),
        per_radius,
        intersection,
        counts,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LrReport {
    pub included: bool,
    /// Largest distance from a vertex of the subdifferential to the hull of
    /// the limiting gradients.
    pub excess: f64,
    pub subdifferential: ConvexBody,
    pub limiting_hull: ConvexBody,
    pub gradients: LimitingGradients,
    pub set_tol: f64,
}

/// Checks that the subdifferential of `h*` at `xstar` lies, within two primal
/// spacings, in the convex hull of the limiting gradients. Every ball must
/// contain a differentiability point.
pub fn check_corollary_lr(
    h: &SampledFunction,
    dual: &DualGrid,
    xstar: &AffineFunction,
    radii: &[f64],
    width_tol: Option<f64>,
) -> Result<LrReport> {
    let gradients = limiting_gradients(h, dual, xstar, radii, width_tol)?;
    corollary_from_gradients(h, xstar, gradients)
}

/// [`check_corollary_lr`] from already collected gradients.
pub fn corollary_from_gradients(
    h: &SampledFunction,
    xstar: &AffineFunction,
    gradients: LimitingGradients,
) -> Result<LrReport> {
    if let Some(k) = gradients.counts.iter().position(|&c| c == 0) {
        return Err(Error::DensityHypothesisFails {
            radius: gradients.radii[k],
        });
    }
    if gradients.intersection.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let sub = subdifferential(h, xstar, None)?;
    let hull = convex_hull(gradients.intersection.points(), h.grid().eps_geom())?;
    let excess = sub
        .vertices()
        .iter()
        .map(|v| distance(&hull, v))
        .fold(0.0, f64::max);
    let set_tol = 2.0 * h.grid().max_spacing();
    Ok(LrReport {
        included: excess <= set_tol,
        excess,
        subdifferential: sub,
        limiting_hull: hull,
        gradients,
        set_tol,
    })
}
