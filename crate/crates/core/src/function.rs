use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::funclang::Expr;
use crate::grid::Grid;
use crate::point::Point;

/// One extended-real value per grid node, with at least one finite value.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: Arc<Grid>,
    values: Vec<ExtReal>,
    lower_bound: f64,
}

impl SampledFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<ExtReal>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        let lower_bound = values
            .iter()
            .filter_map(|v| v.to_finite())
            .reduce(f64::min)
            .ok_or(Error::AllInfinite)?;
        Ok(SampledFunction {
            grid,
            values,
            lower_bound,
        })
    }

    /// Evaluates `f` at every node.
    pub fn sample(grid: Arc<Grid>, f: impl Fn(&Point) -> ExtReal) -> Result<Self> {
        let values = grid.nodes().iter().map(f).collect();
        SampledFunction::new(grid, values)
    }

    pub fn try_sample<E>(
        grid: Arc<Grid>,
        f: impl Fn(&Point) -> core::result::Result<ExtReal, E>,
    ) -> Result<Self>
    where
        Error: From<E>,
    {
        let values = grid
            .nodes()
            .iter()
            .map(|p| f(p).map_err(Error::from))
            .collect::<Result<Vec<_>>>()?;
        SampledFunction::new(grid, values)
    }

    pub fn from_expr(grid: Arc<Grid>, expr: &Expr) -> Result<Self> {
        if expr.dimension_needed() > grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: expr.dimension_needed(),
            });
        }
        SampledFunction::try_sample(grid, |p| expr.eval(p.coords()))
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<ExtReal>) -> Result<Self> {
        SampledFunction::new(self.grid.clone(), values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value(&self, node: usize) -> ExtReal {
        self.values[node]
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Minimum over the nodes; finite by construction.
    pub fn infimum(&self) -> ExtReal {
        self.values.iter().copied().min().unwrap_or(ExtReal::INFINITY)
    }

    /// Nodes attaining the minimum exactly.
    pub fn argmin(&self) -> Vec<usize> {
        let m = self.infimum();
        (0..self.len()).filter(|&i| self.values[i] == m).collect()
    }

    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .filter_map(|v| v.to_finite())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max - min` over finite values.
    pub fn finite_range(&self) -> f64 {
        self.max_finite() - self.lower_bound
    }

    pub fn max_abs_finite(&self) -> f64 {
        self.values
            .iter()
            .filter_map(|v| v.to_finite())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest finite-difference slope magnitude between lattice neighbors along each axis.
    pub fn axis_slopes(&self) -> Vec<(f64, f64)> {
        let grid = &self.grid;
        let dim = grid.dim();
        let mut out = alloc::vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
        for node in 0..grid.len() {
            let Some(idx) = grid.node_multi_index(node) else {
                continue;
            };
            let Some(v0) = self.values[node].to_finite() else {
                continue;
            };
            for k in 0..dim {
                let mut nb = idx;
                nb[k] += 1;
                let Some(n1) = grid.node_at(&nb[..dim]) else {
                    continue;
                };
                let Some(v1) = self.values[n1].to_finite() else {
                    continue;
                };
                let s = (v1 - v0) / (grid.node(n1)[k] - grid.node(node)[k]);
                out[k].0 = out[k].0.min(s);
                out[k].1 = out[k].1.max(s);
            }
        }
        out
    }

    /// Euclidean norm of the per-axis maximal finite-difference slopes.
    pub fn lipschitz_estimate(&self) -> f64 {
        let s: f64 = self
            .axis_slopes()
            .iter()
            .map(|&(lo, hi)| {
                let m = if lo <= hi { lo.abs().max(hi.abs()) } else { 0.0 };
                m * m
            })
            .sum();
        libm::sqrt(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;
    use alloc::vec;

    fn unit(res: usize) -> Arc<Grid> {
        Arc::new(Grid::build(Domain::new_box(&[0.0], &[1.0]).unwrap(), &[res]).unwrap())
    }

    #[test]
    fn samples_square() {
        let h = SampledFunction::sample(unit(4), |p| ExtReal::finite(p[0] * p[0])).unwrap();
        let v: Vec<f64> = h.values().iter().map(|v| v.value()).collect();
        assert_eq!(v, vec![0.0, 0.0625, 0.25, 0.5625, 1.0]);
        assert_eq!(h.lower_bound(), 0.0);
    }

    #[test]
    fn all_infinite_is_rejected() {
        assert_eq!(
            SampledFunction::sample(unit(4), |_| ExtReal::INFINITY),
            Err(Error::AllInfinite)
        );
    }

    #[test]
    fn half_infinite_convention() {
        let h = SampledFunction::sample(unit(4), |p| {
            if p[0] < 0.5 {
                ExtReal::INFINITY
            } else {
                ExtReal::ZERO
            }
        })
        .unwrap();
        assert_eq!(
            h.values(),
            &[ExtReal::INFINITY, ExtReal::INFINITY, ExtReal::ZERO, ExtReal::ZERO, ExtReal::ZERO]
        );
    }

    #[test]
    fn infimum_cases() {
        let g = unit(3);
        let c = SampledFunction::sample(g.clone(), |_| ExtReal::finite(3.0)).unwrap();
        assert_eq!(c.infimum(), ExtReal::finite(3.0));
        let vals = vec![ExtReal::INFINITY, ExtReal::INFINITY, ExtReal::ZERO, ExtReal::finite(1.0)];
        let h = SampledFunction::new(g, vals).unwrap();
        assert_eq!(h.infimum(), ExtReal::ZERO);
        assert!(h.infimum().value() >= h.lower_bound());
    }

    #[test]
    fn double_well_infimum_brute_force() {
        let g = Arc::new(Grid::build(Domain::new_box(&[-2.0], &[2.0]).unwrap(), &[400]).unwrap());
        let h = SampledFunction::sample(g.clone(), |p| {
            let x = p[0];
            ExtReal::finite((x * x - 1.0) * (x * x - 1.0))
        })
        .unwrap();
        let brute = g
            .nodes()
            .iter()
            .map(|p| (p[0] * p[0] - 1.0) * (p[0] * p[0] - 1.0))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(brute, 0.0);
        assert_eq!(h.infimum(), ExtReal::finite(brute));
        let arg: Vec<f64> = h.argmin().iter().map(|&i| g.node(i)[0]).collect();
        assert_eq!(arg, vec![-1.0, 1.0]);
    }
}
