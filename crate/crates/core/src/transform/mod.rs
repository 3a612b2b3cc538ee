//! Legendre-Fenchel conjugates, convex envelopes and the lower semi-continuous hull.

mod envelope;
mod legendre;

use alloc::sync::Arc;
use alloc::vec::Vec;

pub use envelope::{
    affine_minorant_at, envelope_biconjugate, envelope_biconjugate_with, envelope_hull, lsc_hull,
    Envelope,
};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::function::SampledFunction;
use crate::geometry::LowerHull;
use crate::grid::{Domain, DomainKind, Grid};
use crate::point::Point;

/// A box lattice of slope vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct DualGrid {
    grid: Arc<Grid>,
}

impl DualGrid {
    /// Per-axis resolution used when none is given: 1024, 64 and 16 cells
    /// per axis in one, two and three dimensions.
    pub fn default_resolution(dim: usize) -> usize {
        match dim {
            1 => 1024,
            2 => 64,
            _ => 16,
        }
    }

    pub fn new(lower: &[f64], upper: &[f64], resolution: usize) -> Result<DualGrid> {
        let domain = Domain::new_box(lower, upper)?;
        let res = alloc::vec![resolution; lower.len()];
        Ok(DualGrid {
            grid: Arc::new(Grid::build(domain, &res)?),
        })
    }

    /// Box covering the extreme finite-difference slopes of `h` on each axis
    /// and, in one and two dimensions, the slopes of every facet of the lower
    /// hull of its finite samples, padded by one dual cell. Bounds that are
    /// symmetric up to rounding are made exactly symmetric, so that an even
    /// resolution puts 0 on the grid. A range that is a single slope up to
    /// rounding is widened by 1 on each side.
    pub fn for_function(h: &SampledFunction, resolution: Option<usize>) -> Result<DualGrid> {
        let dim = h.grid().dim();
        let res = resolution.unwrap_or_else(|| DualGrid::default_resolution(dim));
        if res < 2 {
            return Err(Error::ResolutionTooSmall);
        }
        let mut ranges = h.axis_slopes();
        if dim <= 2 {
            let (points, values): (Vec<_>, Vec<f64>) = (0..h.len())
                .filter_map(|n| h.value(n).to_finite().map(|v| (h.grid().node(n), v)))
                .unzip();
            for g in LowerHull::new(points, values)?.facet_slopes() {
                for (k, r) in ranges.iter_mut().enumerate() {
                    r.0 = r.0.min(g[k]);
                    r.1 = r.1.max(g[k]);
                }
            }
        }
        let mut lower = Vec::with_capacity(dim);
        let mut upper = Vec::with_capacity(dim);
        for (lo, hi) in ranges {
            let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (0.0, 0.0) };
            let m = lo.abs().max(hi.abs());
            if (lo + hi).abs() <= 1e-12 * m {
                lo = -m;
                hi = m;
            }
            let pad = if hi - lo > 1e-9 * (1.0 + m) { (hi - lo) / res as f64 } else { 1.0 };
            lower.push(lo - pad);
            upper.push(hi + pad);
        }
        DualGrid::new(&lower, &upper, res)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn slope(&self, i: usize) -> Point {
        self.grid.node(i)
    }

    pub fn max_spacing(&self) -> f64 {
        self.grid.max_spacing()
    }
}

/// `h*(p) = max over nodes x with finite h(x) of p.x - h(x)`, node by node.
pub fn conjugate_naive(h: &SampledFunction, dual: &DualGrid) -> Result<SampledFunction> {
    let finite: Vec<(Point, f64)> = h
        .grid()
        .nodes()
        .iter()
        .zip(h.values())
        .filter_map(|(x, v)| v.to_finite().map(|v| (*x, v)))
        .collect();
    if finite.is_empty() {
        return Err(Error::AllInfinite);
    }
    check_dims(h, dual)?;
    let values = dual
        .grid
        .nodes()
        .iter()
        .map(|p| {
            let best = finite
                .iter()
                .map(|(x, v)| p.dot(x) - v)
                .fold(f64::NEG_INFINITY, f64::max);
            ExtReal::finite(best)
        })
        .collect();
    SampledFunction::new(dual.grid.clone(), values)
}

fn check_dims(h: &SampledFunction, dual: &DualGrid) -> Result<()> {
    if h.grid().dim() != dual.grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.grid().dim(),
            found: dual.grid.dim(),
        });
    }
    Ok(())
}

/// Values of `h` on the full lattice of its grid, `+inf` where the lattice
/// point is not a node.
fn lattice_values(h: &SampledFunction) -> Vec<f64> {
    let grid = h.grid();
    let total: usize = grid.lattice_shape().iter().product();
    (0..total)
        .map(|flat| grid.lattice_node(flat).map_or(f64::INFINITY, |n| h.value(n).value()))
        .collect()
}

/// Same values as [`conjugate_naive`] up to rounding, via per-axis sweeps.
///
/// Polygon grids are embedded in their bounding lattice with `+inf` outside
/// the polygon; vertices that are not lattice points are folded in directly.
pub fn conjugate_fast(h: &SampledFunction, dual: &DualGrid) -> Result<SampledFunction> {
    check_dims(h, dual)?;
    let grid = h.grid();
    let mut c = legendre::lattice_conjugate(grid.axes(), &lattice_values(h), dual.grid.axes());
    for v in grid.off_lattice_nodes() {
        if let Some(hv) = h.value(v).to_finite() {
            let x = grid.node(v);
            for (j, p) in dual.grid.nodes().iter().enumerate() {
                c[j] = c[j].max(p.dot(&x) - hv);
            }
        }
    }
    if c.first().is_some_and(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::AllInfinite);
    }
    SampledFunction::new(dual.grid.clone(), c.into_iter().map(ExtReal::finite).collect())
}

/// Sum of the domain's extents along the coordinate axes.
fn l1_extent(domain: &Domain) -> f64 {
    let (lo, hi) = domain.bounds();
    match domain.kind() {
        DomainKind::Box { .. } => lo.iter().zip(&hi).map(|(l, u)| u - l).sum(),
        DomainKind::Polytope2D { vertices } => {
            let mut d: f64 = 0.0;
            for a in vertices {
                for b in vertices {
                    d = d.max((a[0] - b[0]).abs() + (a[1] - b[1]).abs());
                }
            }
            d
        }
    }
}

/// Slack allowed between the biconjugate on `dual` and the exact envelope of
/// the sampled data:
/// `(finite range / diameter) * max spacing + (max dual spacing / 2) * L1 extent`.
///
/// The second term bounds the loss from replacing a supporting slope by the
/// nearest dual node, since `|(p - q).(y - x)| <= max|p_k - q_k| * sum_k |y_k - x_k|`.
/// The first covers supporting slopes clipped by the dual box.
pub fn envelope_tolerance(h: &SampledFunction, dual: &DualGrid) -> f64 {
    let grid = h.grid();
    let domain = grid.domain();
    h.finite_range() / domain.diameter() * grid.max_spacing()
        + 0.5 * dual.max_spacing() * l1_extent(domain)
}

/// Relative tolerance for comparing values of `h`: `1e-9 * (1 + max |h|)`.
pub fn value_tolerance(h: &SampledFunction) -> f64 {
    1e-9 * (1.0 + h.max_abs_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(lo: f64, hi: f64, res: usize) -> Arc<Grid> {
        Arc::new(Grid::build(Domain::new_box(&[lo], &[hi]).unwrap(), &[res]).unwrap())
    }

    #[test]
    fn quadratic_conjugate_closed_form() {
        let h = SampledFunction::sample(interval(-1.0, 1.0, 2000), |p| {
            ExtReal::finite(p[0] * p[0] / 2.0)
        })
        .unwrap();
        let dual = DualGrid::new(&[-2.0], &[2.0], 8).unwrap();
        let naive = conjugate_naive(&h, &dual).unwrap();
        let fast = conjugate_fast(&h, &dual).unwrap();
        for (i, p) in dual.grid().nodes().iter().enumerate() {
            let p = p[0];
            let want = if p.abs() <= 1.0 { p * p / 2.0 } else { p.abs() - 0.5 };
            assert!((naive.value(i).value() - want).abs() < 1e-12, "p={p}");
            assert!((fast.value(i).value() - naive.value(i).value()).abs() < 1e-15);
        }
    }

    #[test]
    fn support_function_of_interval() {
        let h = SampledFunction::sample(interval(0.0, 1.0, 4), |_| ExtReal::ZERO).unwrap();
        let dual = DualGrid::new(&[-1.0], &[1.0], 4).unwrap();
        let c = conjugate_fast(&h, &dual).unwrap();
        let got: Vec<f64> = c.values().iter().map(|v| v.value()).collect();
        assert_eq!(got, alloc::vec![0.0, 0.0, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn affine_cancels_at_its_slope() {
        let h = SampledFunction::sample(interval(-1.0, 2.0, 6), |p| ExtReal::finite(1.5 * p[0])).unwrap();
        let dual = DualGrid::new(&[0.5], &[2.5], 4).unwrap();
        assert_eq!(conjugate_naive(&h, &dual).unwrap().value(2), ExtReal::ZERO);
        assert_eq!(conjugate_fast(&h, &dual).unwrap().value(2), ExtReal::ZERO);
    }

    #[test]
    fn dual_bounds_cover_slopes() {
        let h = SampledFunction::sample(interval(-2.0, 2.0, 400), |p| {
            let x = p[0];
            ExtReal::finite((x * x - 1.0) * (x * x - 1.0))
        })
        .unwrap();
        let dual = DualGrid::for_function(&h, None).unwrap();
        let (lo, hi) = dual.grid().domain().bounds();
        let (smin, smax) = h.axis_slopes()[0];
        assert!(lo[0] < smin && hi[0] > smax);
        assert_eq!(lo[0], -hi[0]);
        assert_eq!(dual.slope(512)[0], 0.0);
        assert!(envelope_tolerance(&h, &dual) <= 0.15);
    }

    #[test]
    fn constant_function_gets_a_unit_dual_box() {
        let h = SampledFunction::sample(interval(0.0, 1.0, 4), |_| ExtReal::finite(3.0)).unwrap();
        let dual = DualGrid::for_function(&h, Some(4)).unwrap();
        assert_eq!(dual.grid().domain().bounds(), (alloc::vec![-1.0], alloc::vec![1.0]));
    }

    #[test]
    fn rounded_affine_slopes_still_get_a_unit_box() {
        let h = SampledFunction::sample(interval(0.0, 2.0, 1000), |p| ExtReal::finite(2.0 * p[0] - 1.0)).unwrap();
        let (smin, smax) = h.axis_slopes()[0];
        assert!(smin < smax);
        let dual = DualGrid::for_function(&h, None).unwrap();
        let (lo, hi) = dual.grid().domain().bounds();
        assert!(lo[0] < 1.0 + 1e-9 && hi[0] > 3.0 - 1e-9);
    }

    #[test]
    fn polygon_embedding_matches_naive() {
        let tri = Domain::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.1, 0.95]]).unwrap();
        let grid = Arc::new(Grid::build(tri, &[7, 9]).unwrap());
        assert!(grid.off_lattice_nodes().count() > 0);
        let h = SampledFunction::sample(grid, |p| ExtReal::finite((p[0] - 0.3).abs() + p[1] * p[1]))
            .unwrap();
        let dual = DualGrid::for_function(&h, Some(12)).unwrap();
        let a = conjugate_naive(&h, &dual).unwrap();
        let b = conjugate_fast(&h, &dual).unwrap();
        for i in 0..dual.len() {
            assert!((a.value(i).value() - b.value(i).value()).abs() < 1e-14);
        }
    }
}
