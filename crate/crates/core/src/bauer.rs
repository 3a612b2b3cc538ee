//! Maxima of convex sums over extreme points of the domain.
//!
//! On a finite grid every function is both lower and upper semi-continuous, so
//! the only hypothesis left to check on the two summands is convexity.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::function::SampledFunction;
use crate::transform::value_tolerance;

/// Hypothesis actually tested by [`check_bauer`].
pub const HYPOTHESIS: &str =
    "both summands grid-convex; semicontinuity is vacuous on a finite grid";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexityReport {
    pub is_grid_convex: bool,
    /// Most negative `h(x - d) + h(x + d) - 2 h(x)` over all tested triples
    /// (0 when every slack is non-negative, `-inf` when a finite chord passes
    /// over an infinite middle value).
    pub worst_violation: f64,
    pub tol: f64,
}

/// Lex-positive half of the nonzero `{-1, 0, 1}^dim` stencil.
fn directions(dim: usize) -> Vec<[isize; 3]> {
    let count = 3usize.pow(dim as u32);
    (0..count)
        .filter_map(|mut c| {
            let mut d = [0isize; 3];
            for k in (0..dim).rev() {
                d[k] = (c % 3) as isize - 1;
                c /= 3;
            }
            let first = d[..dim].iter().find(|&&v| v != 0)?;
            (*first > 0).then_some(d)
        })
        .collect()
}

/// Discrete midpoint convexity along every lattice line through three
/// consecutive nodes: axis lines and diagonals of the unit stencil. Triples
/// with an infinite endpoint are skipped; polygon vertices off the lattice are
/// not tested. Passes when the worst slack is at least `-1e-9 * (1 + max |h|)`.
pub fn check_convexity(h: &SampledFunction) -> ConvexityReport {
    let grid = h.grid();
    let dim = grid.dim();
    let dirs = directions(dim);
    let mut worst: f64 = 0.0;
    for node in 0..grid.len() {
        let Some(idx) = grid.node_multi_index(node) else {
            continue;
        };
        let mid = h.value(node);
        for d in &dirs {
            let step = |sign: isize| -> Option<usize> {
                let mut j = [0usize; 3];
                for k in 0..dim {
                    let v = idx[k] as isize + sign * d[k];
                    if v < 0 {
                        return None;
                    }
                    j[k] = v as usize;
                }
                grid.node_at(&j[..dim])
            };
            let (Some(a), Some(b)) = (step(-1), step(1)) else {
                continue;
            };
            let (Some(va), Some(vb)) = (h.value(a).to_finite(), h.value(b).to_finite()) else {
                continue;
            };
            let slack = match mid.to_finite() {
                Some(vm) => va + vb - 2.0 * vm,
                None => f64::NEG_INFINITY,
            };
            worst = worst.min(slack);
        }
    }
    let tol = value_tolerance(h);
    ConvexityReport {
        is_grid_convex: worst >= -tol,
        worst_violation: worst,
        tol,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BauerReport {
    /// Maximum of `h_minus + h_plus` over all nodes.
    pub sup_k: ExtReal,
    /// Maximum over the nodes on extreme points of the domain.
    pub sup_extreme: ExtReal,
    pub gap: f64,
    /// Sum of the finite-difference Lipschitz estimates of both summands.
    pub lipschitz: f64,
    /// `lipschitz * max spacing`.
    pub bound: f64,
    /// First node attaining `sup_k`.
    pub argmax: usize,
    pub passed: bool,
}

/// Compares the maximum of `h_minus + h_plus` over the grid with its maximum
/// over the extreme points of the domain. Both summands must be grid-convex.
/// The gap must lie in `[-1e-9, lipschitz * max spacing]`.
pub fn check_bauer(h_minus: &SampledFunction, h_plus: &SampledFunction) -> Result<BauerReport> {
    if h_minus.grid() != h_plus.grid() {
        return Err(Error::GridMismatch);
    }
    for (which, h) in [("h_minus", h_minus), ("h_plus", h_plus)] {
        let c = check_convexity(h);
        if !c.is_grid_convex {
            return Err(Error::ConvexityHypothesisFails {
                which,
                slack: c.worst_violation,
            });
        }
    }
    let grid = h_minus.grid();
    let sum = |n: usize| h_minus.value(n) + h_plus.value(n);
    let mut argmax = 0;
    for n in 1..grid.len() {
        if sum(n) > sum(argmax) {
            argmax = n;
        }
    }
    let sup_k = sum(argmax);
    let sup_extreme = grid
        .extreme_nodes()
        .iter()
        .map(|&n| sum(n))
        .max()
        .expect("every domain has an extreme point");
    let gap = match (sup_k.to_finite(), sup_extreme.to_finite()) {
        (Some(a), Some(b)) => a - b,
        (None, None) => 0.0,
        (None, Some(_)) => f64::INFINITY,
        (Some(_), None) => unreachable!("extreme nodes are nodes"),
    };
    let lipschitz = h_minus.lipschitz_estimate() + h_plus.lipschitz_estimate();
    let bound = lipschitz * grid.max_spacing();
    Ok(BauerReport {
        sup_k,
        sup_extreme,
        gap,
        lipschitz,
        bound,
        argmax,
        passed: gap >= -1e-9 && gap <= bound + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Domain, Grid};
    use alloc::sync::Arc;

    fn interval(res: usize) -> Arc<Grid> {
        Arc::new(Grid::build(Domain::new_box(&[-1.0], &[1.0]).unwrap(), &[res]).unwrap())
    }

    fn sample(g: &Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> SampledFunction {
        SampledFunction::sample(g.clone(), |p| ExtReal::finite(f(p.coords()))).unwrap()
    }

    #[test]
    fn stencil_halves() {
        assert_eq!(directions(1).len(), 1);
        assert_eq!(directions(2).len(), 4);
        assert_eq!(directions(3).len(), 13);
    }

    #[test]
    fn convexity_examples() {
        let g = interval(20);
        let s = g.max_spacing();
        let sq = check_convexity(&sample(&g, |x| x[0] * x[0]));
        assert!(sq.is_grid_convex);
        let neg = check_convexity(&sample(&g, |x| -x[0] * x[0]));
        assert!(!neg.is_grid_convex);
        assert!((neg.worst_violation + 2.0 * s * s).abs() < 1e-12);
        let aff = check_convexity(&sample(&g, |x| 3.0 * x[0] - 1.0));
        assert!(aff.is_grid_convex);
        assert!(aff.worst_violation.abs() < 1e-12);
    }

    #[test]
    fn infinite_middle_breaks_convexity() {
        let g = interval(4);
        let z = ExtReal::ZERO;
        let vals = alloc::vec![z, z, ExtReal::INFINITY, z, z];
        let h = SampledFunction::new(g, vals).unwrap();
        let r = check_convexity(&h);
        assert!(!r.is_grid_convex);
        assert_eq!(r.worst_violation, f64::NEG_INFINITY);
    }

    #[test]
    fn diagonal_saddle_is_caught() {
        let g = Arc::new(Grid::build(Domain::new_box(&[-1.0; 2], &[1.0; 2]).unwrap(), &[10, 10]).unwrap());
        // convex along both axes, concave along a diagonal
        let h = sample(&g, |x| x[0] * x[0] + x[1] * x[1] - 3.0 * x[0] * x[1]);
        assert!(!check_convexity(&h).is_grid_convex);
    }

    #[test]
    fn square_plus_identity_peaks_at_an_endpoint() {
        let g = interval(40);
        let r = check_bauer(&sample(&g, |x| x[0] * x[0]), &sample(&g, |x| x[0])).unwrap();
        assert_eq!(r.sup_k, ExtReal::finite(2.0));
        assert_eq!(r.gap, 0.0);
        assert_eq!(g.node(r.argmax)[0], 1.0);
        assert!(r.passed);
    }

    #[test]
    fn triangle_example() {
        let tri = Domain::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let g = Arc::new(Grid::build(tri, &[16, 16]).unwrap());
        let r = check_bauer(
            &sample(&g, |x| x[0] * x[0] + x[1] * x[1]),
            &sample(&g, |x| x[0] - x[1]),
        )
        .unwrap();
        assert_eq!(r.sup_extreme, ExtReal::finite(2.0));
        let brute = (0..g.len())
            .map(|n| {
                let p = g.node(n);
                p[0] * p[0] + p[1] * p[1] + p[0] - p[1]
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.sup_k.value(), brute);
        assert!(r.gap >= 0.0 && r.gap <= r.bound);
        assert!(r.passed);
    }

    #[test]
    fn constants_have_no_gap() {
        let g = interval(8);
        let r = check_bauer(&sample(&g, |_| 0.0), &sample(&g, |_| 4.5)).unwrap();
        assert_eq!(r.gap, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn hypotheses_are_checked() {
        let g = interval(8);
        let err = check_bauer(&sample(&g, |x| -x[0] * x[0]), &sample(&g, |_| 0.0)).unwrap_err();
        assert!(matches!(err, Error::ConvexityHypothesisFails { which: "h_minus", .. }));
        let err = check_bauer(&sample(&g, |_| 0.0), &sample(&g, |x| -x[0] * x[0])).unwrap_err();
        assert!(matches!(err, Error::ConvexityHypothesisFails { which: "h_plus", .. }));
        let other = interval(10);
        assert_eq!(
            check_bauer(&sample(&g, |_| 0.0), &sample(&other, |_| 0.0)).unwrap_err(),
            Error::GridMismatch
        );
    }
}
