use alloc::vec::Vec;

use super::{legendre, value_tolerance, DualGrid};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::function::SampledFunction;
use crate::geometry::{measure_at, LowerHull};
use crate::types::{AffineFunction, DiscreteMeasure};

/// Biconjugate `h**` on the primal nodes, through the default dual grid.
pub fn envelope_biconjugate(h: &SampledFunction) -> Result<SampledFunction> {
    envelope_biconjugate_with(h, &DualGrid::for_function(h, None)?)
}

/// Biconjugate `h**(x) = max_p (p.x - h*(p))` with `p` ranging over `dual`.
pub fn envelope_biconjugate_with(h: &SampledFunction, dual: &DualGrid) -> Result<SampledFunction> {
    let star = super::conjugate_fast(h, dual)?;
    let dual_vals: Vec<f64> = star.values().iter().map(|v| v.value()).collect();
    let grid = h.grid();
    let on_lattice = legendre::lattice_conjugate(dual.grid().axes(), &dual_vals, grid.axes());
    let values = (0..grid.len())
        .map(|n| {
            let v = match grid.node_lattice_index(n) {
                Some(flat) => on_lattice[flat],
                None => {
                    let x = grid.node(n);
                    dual.grid()
                        .nodes()
                        .iter()
                        .zip(&dual_vals)
                        .map(|(p, c)| p.dot(&x) - c)
                        .fold(f64::NEG_INFINITY, f64::max)
                }
            };
            ExtReal::finite(v)
        })
        .collect();
    SampledFunction::new(grid.clone(), values)
}

/// Convex envelope of the sampled data, as the lower convex hull of the lifted
/// finite samples. Kept together with the hull so that supporting minorants
/// and representing measures can be read off at any node.
#[derive(Clone, Debug)]
pub struct Envelope {
    function: SampledFunction,
    hull: LowerHull,
}

impl Envelope {
    /// Node values are the hull heights, capped by `h` and snapped to `h`
    /// where they agree to within `1e-9 * (1 + max |h|)`. Nodes outside the
    /// hull of the finite samples get `+inf`. Domains of dimension 3 are not
    /// supported.
    pub fn new(h: &SampledFunction) -> Result<Envelope> {
        let grid = h.grid();
        if grid.dim() > 2 {
            return Err(Error::DimensionTooHigh {
                max: 2,
                found: grid.dim(),
            });
        }
        let (points, values): (Vec<_>, Vec<f64>) = (0..grid.len())
            .filter_map(|n| h.value(n).to_finite().map(|v| (grid.node(n), v)))
            .unzip();
        let hull = LowerHull::new(points, values)?;
        let snap = value_tolerance(h);
        let env: Vec<ExtReal> = (0..grid.len())
            .map(|n| match hull.height(&grid.node(n)) {
                None => ExtReal::INFINITY,
                Some(hgt) => match h.value(n).to_finite() {
                    Some(hv) if hgt >= hv - snap => ExtReal::finite(hv),
                    _ => ExtReal::finite(hgt),
                },
            })
            .collect();
        Ok(Envelope {
            function: SampledFunction::new(grid.clone(), env)?,
            hull,
        })
    }

    pub fn function(&self) -> &SampledFunction {
        &self.function
    }

    pub fn into_function(self) -> SampledFunction {
        self.function
    }

    pub fn hull(&self) -> &LowerHull {
        &self.hull
    }

    /// Affine function through the hull facet above `node`.
    pub fn minorant_at(&self, node: usize) -> Result<AffineFunction> {
        let grid = self.function.grid();
        if node >= grid.len() {
            return Err(Error::NodeOutOfRange(node));
        }
        let loc = self.hull.locate(&grid.node(node)).ok_or(Error::OutsideHull)?;
        Ok(self.hull.facet_affine(&loc))
    }

    /// Finite measure on at most `dim + 1` nodes with barycenter `node` whose
    /// integral of `h` is the envelope value there.
    pub fn measure_at(&self, node: usize) -> Result<DiscreteMeasure> {
        let grid = self.function.grid();
        if node >= grid.len() {
            return Err(Error::NodeOutOfRange(node));
        }
        let loc = self.hull.locate(&grid.node(node)).ok_or(Error::OutsideHull)?;
        Ok(measure_at(&self.hull, &loc))
    }
}

/// Exact convex envelope of the grid data (see [`Envelope::new`]).
pub fn envelope_hull(h: &SampledFunction) -> Result<SampledFunction> {
    Envelope::new(h).map(Envelope::into_function)
}

/// A supporting affine minorant of `h` that touches the envelope at `node`.
pub fn affine_minorant_at(h: &SampledFunction, node: usize) -> Result<AffineFunction> {
    Envelope::new(h)?.minorant_at(node)
}

/// Minimum of `h` over each node's closed lattice neighborhood (the node and
/// its neighbors within 1.01 spacings per axis, diagonals included).
pub fn lsc_hull(h: &SampledFunction) -> SampledFunction {
    let grid = h.grid();
    let mut nb = Vec::new();
    let values = (0..grid.len())
        .map(|n| {
            grid.neighborhood(n, &mut nb);
            nb.iter().map(|&j| h.value(j)).min().unwrap()
        })
        .collect();
    h.with_values(values).expect("a node holding the minimum keeps it")
}
