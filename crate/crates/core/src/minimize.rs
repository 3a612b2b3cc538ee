//! Generalized minimizers, minimizer bodies of the envelope, and the checks
//! relating the two.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::function::SampledFunction;
use crate::geometry::{contains, convex_hull, hausdorff};
use crate::point::Point;
use crate::transform::{
    envelope_biconjugate_with, envelope_tolerance, lsc_hull, value_tolerance, DualGrid, Envelope,
};
use crate::types::{ConvexBody, DiscreteMeasure, PointSet};

/// Default tolerance for "attains the infimum": `1e-9 * (1 + max |h|)`.
///
/// Grid values are compared directly, so the tolerance only absorbs rounding.
pub fn default_minimizer_tol(h: &SampledFunction) -> f64 {
    value_tolerance(h)
}

/// Nodes where `f` is within `tol` of its infimum.
pub fn near_minimal_nodes(f: &SampledFunction, tol: f64) -> Vec<usize> {
    let Some(inf) = f.infimum().to_finite() else {
        return Vec::new();
    };
    let cut = ExtReal::finite(inf + tol);
    (0..f.len()).filter(|&n| f.value(n) <= cut).collect()
}

fn points_of(f: &SampledFunction, nodes: &[usize]) -> Vec<Point> {
    nodes.iter().map(|&n| f.grid().node(n)).collect()
}

/// Nodes where the lsc hull of `h` is within `tol` of `inf h`.
pub fn generalized_minimizer_nodes(h: &SampledFunction, tol: f64) -> Vec<usize> {
    let h0 = lsc_hull(h);
    let cut = ExtReal::finite(h.infimum().value() + tol);
    (0..h.len()).filter(|&n| h0.value(n) <= cut).collect()
}

/// Limit points of approximate minimizers, realized as the near-minimizers of
/// the lsc hull.
pub fn generalized_minimizers(h: &SampledFunction, tol: f64) -> PointSet {
    let nodes = generalized_minimizer_nodes(h, tol);
    PointSet::new(points_of(h, &nodes), h.grid().eps_geom())
}

/// Convex hull of the nodes where `envelope` is within `tol` of its infimum.
pub fn minimizer_body(envelope: &SampledFunction, tol: f64) -> Result<ConvexBody> {
    let nodes = near_minimal_nodes(envelope, tol);
    convex_hull(&points_of(envelope, &nodes), envelope.grid().eps_geom())
}

/// The minimizer set of the convex envelope of `h`.
pub fn envelope_minimizers(h: &SampledFunction, tol: f64) -> Result<ConvexBody> {
    minimizer_body(Envelope::new(h)?.function(), tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Report {
    pub inf_h: f64,
    /// Infimum of the hull envelope.
    pub inf_envelope: f64,
    /// Infimum of the biconjugate on the default dual grid.
    pub inf_biconjugate: f64,
    /// `max(|inf h - inf envelope|, |inf h - inf biconjugate|)`.
    pub inf_gap: f64,
    /// Hausdorff distance between the envelope minimizer body and the hull of
    /// the generalized minimizers.
    pub set_gap: f64,
    pub envelope_minimizers: ConvexBody,
    pub generalized_minimizers: PointSet,
    pub delta_env: f64,
    pub tol: f64,
    /// `2 * max spacing`.
    pub set_tol: f64,
}

impl Theorem1Report {
    pub fn inf_ok(&self) -> bool {
        self.inf_gap <= self.delta_env
    }

    pub fn set_ok(&self) -> bool {
        self.set_gap <= self.set_tol
    }
}

/// Measures how far the grid data is from `inf h = inf envelope` and from
/// "the envelope minimizers are the hull of the generalized minimizers".
pub fn check_theorem1(h: &SampledFunction, tol: f64) -> Result<Theorem1Report> {
    check_theorem1_with(h, &DualGrid::for_function(h, None)?, tol)
}

pub fn check_theorem1_with(h: &SampledFunction, dual: &DualGrid, tol: f64) -> Result<Theorem1Report> {
    let env = Envelope::new(h)?;
    let bi = envelope_biconjugate_with(h, dual)?;
    let inf_h = h.infimum().value();
    let inf_envelope = env.function().infimum().value();
    let inf_biconjugate = bi.infimum().value();
    let m = minimizer_body(env.function(), tol)?;
    let omega = generalized_minimizers(h, tol);
    let co_omega = convex_hull(omega.points(), h.grid().eps_geom())?;
    Ok(Theorem1Report {
        inf_h,
        inf_envelope,
        inf_biconjugate,
        inf_gap: (inf_h - inf_envelope).abs().max((inf_h - inf_biconjugate).abs()),
        set_gap: hausdorff(&m, &co_omega)?,
        envelope_minimizers: m,
        generalized_minimizers: omega,
        delta_env: envelope_tolerance(h, dual),
        tol,
        set_tol: 2.0 * h.grid().max_spacing(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem3Report {
    /// Vertices of the envelope minimizer body and their distance to the
    /// generalized minimizers.
    pub extreme_points: Vec<(Point, f64)>,
    /// Extreme points farther than `set_tol` from the generalized minimizers.
    pub violations: Vec<(Point, f64)>,
    /// Generalized minimizers farther than `set_tol` from every extreme point.
    pub beyond_extreme: Vec<Point>,
    pub set_tol: f64,
}

impl Theorem3Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// The inclusion of the extreme points in the generalized minimizers is strict.
    pub fn strict(&self) -> bool {
        !self.beyond_extreme.is_empty()
    }
}

/// Checks that every extreme point of the envelope minimizer body is (within
/// two spacings) a generalized minimizer.
pub fn check_theorem3_extreme(h: &SampledFunction, tol: f64) -> Result<Theorem3Report> {
    let m = envelope_minimizers(h, tol)?;
    let omega = generalized_minimizers(h, tol);
    let set_tol = 2.0 * h.grid().max_spacing();
    let extreme_points: Vec<(Point, f64)> = m
        .vertices()
        .iter()
        .map(|v| (*v, omega.distance_to(v)))
        .collect();
    let violations = extreme_points
        .iter()
        .filter(|(_, d)| *d > set_tol)
        .copied()
        .collect();
    let ext = PointSet::new(m.vertices().to_vec(), 0.0);
    let beyond_extreme = omega
        .iter()
        .filter(|w| ext.distance_to(w) > set_tol)
        .copied()
        .collect();
    Ok(Theorem3Report {
        extreme_points,
        violations,
        beyond_extreme,
        set_tol,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemberReport {
    /// Infimum of `h` over the nodes inside the member (`+inf` if none).
    pub inf_restricted: ExtReal,
    /// `|inf_restricted - inf h| <= tol`.
    pub gated_in: bool,
    /// Extreme points of the minimizer body of the restricted envelope;
    /// empty when the member holds no finite node.
    pub extreme_points: PointSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustionReport {
    pub members: Vec<MemberReport>,
    /// Union of the extreme-point sets of the gated-in members.
    pub recovered: PointSet,
    /// Distance of each recovered point to the generalized minimizers.
    pub certification: Vec<f64>,
    pub set_tol: f64,
}

impl ExhaustionReport {
    pub fn certified(&self) -> bool {
        self.certification.iter().all(|&d| d <= self.set_tol)
    }
}

/// Restricts `h` to each member of `family` (nodes outside become `+inf`) and
/// collects the extreme points of the restricted envelope minimizers of every
/// member on which the restricted infimum equals the global one.
///
/// Each member must lie in the envelope minimizer body of `h` up to one grid
/// spacing.
pub fn nested_exhaustion(
    h: &SampledFunction,
    family: &[ConvexBody],
    tol: f64,
) -> Result<ExhaustionReport> {
    let grid = h.grid();
    let eps = grid.eps_geom();
    let set_tol = 2.0 * grid.max_spacing();
    let m = envelope_minimizers(h, tol)?;
    for (index, member) in family.iter().enumerate() {
        if member.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: member.dim(),
            });
        }
        if !member
            .vertices()
            .iter()
            .all(|v| contains(&m, v, grid.max_spacing()))
        {
            return Err(Error::SubsetNotInM { index });
        }
    }
    let inf_h = h.infimum().value();
    let omega = generalized_minimizers(h, tol);
    let mut members = Vec::with_capacity(family.len());
    let mut recovered: Vec<Point> = Vec::new();
    for member in family {
        let values: Vec<ExtReal> = (0..grid.len())
            .map(|n| {
                if contains(member, &grid.node(n), eps) {
                    h.value(n)
                } else {
                    ExtReal::INFINITY
                }
            })
            .collect();
        let report = match h.with_values(values) {
            Err(Error::AllInfinite) => MemberReport {
                inf_restricted: ExtReal::INFINITY,
                gated_in: false,
                extreme_points: PointSet::empty(),
            },
            Err(e) => return Err(e),
            Ok(restricted) => {
                let inf_r = restricted.infimum();
                let body = envelope_minimizers(&restricted, tol)?;
                let gated_in = (inf_r.value() - inf_h).abs() <= tol;
                let ext = PointSet::new(body.vertices().to_vec(), eps);
                if gated_in {
                    recovered.extend(ext.iter().copied());
                }
                MemberReport {
                    inf_restricted: inf_r,
                    gated_in,
                    extreme_points: ext,
                }
            }
        };
        members.push(report);
    }
    let recovered = PointSet::new(recovered, eps);
    let certification = recovered.iter().map(|p| omega.distance_to(p)).collect();
    Ok(ExhaustionReport {
        members,
        recovered,
        certification,
        set_tol,
    })
}

/// A finite probability measure with barycenter at `node` whose integral of
/// `h` equals the envelope of `h` there.
pub fn representing_measure(h: &SampledFunction, node: usize) -> Result<DiscreteMeasure> {
    Envelope::new(h)?.measure_at(node)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Domain, Grid};
    use alloc::sync::Arc;

    fn sample(lo: f64, hi: f64, res: usize, f: impl Fn(f64) -> f64) -> SampledFunction {
        let g = Arc::new(Grid::build(Domain::new_box(&[lo], &[hi]).unwrap(), &[res]).unwrap());
        SampledFunction::sample(g, |p| ExtReal::finite(f(p[0]))).unwrap()
    }

    fn double_well() -> SampledFunction {
        sample(-2.0, 2.0, 400, |x| (x * x - 1.0) * (x * x - 1.0))
    }

    fn three_well() -> SampledFunction {
        sample(-2.0, 2.0, 400, |x| x * x * (x * x - 1.0) * (x * x - 1.0))
    }

    fn xs(s: &PointSet) -> Vec<f64> {
        s.iter().map(|p| p[0]).collect()
    }

    fn segment(a: f64, b: f64) -> ConvexBody {
        convex_hull(&[Point::new(&[a]), Point::new(&[b])], 0.0).unwrap()
    }

    #[test]
    fn double_well_minimizers() {
        let h = double_well();
        let tol = default_minimizer_tol(&h);
        let argmin: Vec<f64> = h.argmin().iter().map(|&n| h.grid().node(n)[0]).collect();
        assert_eq!(argmin, [-1.0, 1.0]);
        // the lsc hull widens each well by one node on either side
        let omega = xs(&generalized_minimizers(&h, tol));
        assert_eq!(omega.len(), 6);
        for (w, want) in omega.iter().zip([-1.01, -1.0, -0.99, 0.99, 1.0, 1.01]) {
            assert!((w - want).abs() < 1e-12);
        }
        let m = envelope_minimizers(&h, tol).unwrap();
        assert_eq!(m.vertices(), &[Point::new(&[-1.0]), Point::new(&[1.0])]);
    }

    #[test]
    fn constant_minimizes_everywhere() {
        let h = sample(0.0, 1.0, 4, |_| 3.0);
        assert_eq!(generalized_minimizers(&h, 0.0).len(), 5);
        assert_eq!(envelope_minimizers(&h, 0.0).unwrap(), segment(0.0, 1.0));
    }

    #[test]
    fn strictly_convex_has_one_minimizer() {
        let h = sample(-1.0, 1.0, 10, |x| x * x);
        assert_eq!(envelope_minimizers(&h, 1e-12).unwrap().vertices(), &[Point::new(&[0.0])]);
    }

    #[test]
    fn theorem1_on_double_well() {
        let h = double_well();
        let r = check_theorem1(&h, default_minimizer_tol(&h)).unwrap();
        assert!(r.inf_gap <= 1e-6, "{}", r.inf_gap);
        assert!(r.delta_env <= 0.15);
        assert!(r.set_gap <= 0.01 + 1e-12, "{}", r.set_gap);
        assert!(r.inf_ok() && r.set_ok());
    }

    #[test]
    fn theorem3_strict_on_three_wells() {
        let h = three_well();
        let r = check_theorem3_extreme(&h, default_minimizer_tol(&h)).unwrap();
        assert!(r.passed());
        assert!(r.strict());
        assert!(r.beyond_extreme.iter().any(|p| p[0] == 0.0));
    }

    #[test]
    fn exhaustion_recovers_the_middle_well() {
        let h = three_well();
        let tol = default_minimizer_tol(&h);
        let r = nested_exhaustion(&h, &[segment(-0.5, 0.5)], tol).unwrap();
        assert!(r.members[0].gated_in);
        assert_eq!(xs(&r.recovered), [0.0]);
        assert!(r.certified());

        let empty = nested_exhaustion(&h, &[], tol).unwrap();
        assert!(empty.recovered.is_empty());

        let dw = double_well();
        let r = nested_exhaustion(&dw, &[segment(-1.0, 0.0)], tol).unwrap();
        assert_eq!(xs(&r.recovered), [-1.0]);

        assert_eq!(
            nested_exhaustion(&dw, &[segment(-1.5, 0.0)], tol),
            Err(Error::SubsetNotInM { index: 0 })
        );
    }

    #[test]
    fn gating_rejects_shallow_members() {
        let h = sample(-2.0, 2.0, 40, |x| (x * x - 1.0) * (x * x - 1.0) + 0.1 * (x + 1.0) * (x + 1.0));
        // the only minimizer is near -1, so the envelope minimizer body is a point
        let m = envelope_minimizers(&h, 1e-12).unwrap();
        let r = nested_exhaustion(&h, core::slice::from_ref(&m), 1e-12).unwrap();
        assert!(r.members[0].gated_in);
        let three = three_well();
        let r = nested_exhaustion(&three, &[segment(0.3, 0.7)], 1e-12).unwrap();
        assert!(!r.members[0].gated_in);
        assert!(r.recovered.is_empty());
    }

    #[test]
    fn measure_at_the_origin_splits_between_the_wells() {
        let h = double_well();
        let mu = representing_measure(&h, 200).unwrap();
        let s = mu.support();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].0[0], s[1].0[0]), (-1.0, 1.0));
        assert!((s[0].1 - 0.5).abs() < 1e-9 && (s[1].1 - 0.5).abs() < 1e-9);
    }
}
