#![allow(dead_code)]

use std::sync::Arc;

use gammareg_core::{Domain, ExtReal, Grid, SampledFunction};
use proptest::prelude::*;

pub fn interval(lo: f64, hi: f64, res: usize) -> Arc<Grid> {
    Arc::new(Grid::build(Domain::new_box(&[lo], &[hi]).unwrap(), &[res]).unwrap())
}

pub fn square(lo: f64, hi: f64, res: usize) -> Arc<Grid> {
    Arc::new(Grid::build(Domain::new_box(&[lo; 2], &[hi; 2]).unwrap(), &[res, res]).unwrap())
}

pub fn finite(g: &Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> SampledFunction {
    SampledFunction::sample(g.clone(), |p| ExtReal::finite(f(p.coords()))).unwrap()
}

pub fn grid_1d() -> impl Strategy<Value = Arc<Grid>> {
    (-3.0f64..1.0, 0.5f64..4.0, 2usize..60).prop_map(|(lo, w, res)| interval(lo, lo + w, res))
}

pub fn grid_2d() -> impl Strategy<Value = Arc<Grid>> {
    prop_oneof![
        (-2.0f64..0.0, 0.5f64..3.0, 0.5f64..3.0, 2usize..9, 2usize..9).prop_map(
            |(lo, wx, wy, rx, ry)| {
                let d = Domain::new_box(&[lo, lo], &[lo + wx, lo + wy]).unwrap();
                Arc::new(Grid::build(d, &[rx, ry]).unwrap())
            }
        ),
        (0.6f64..1.4, 0.1f64..0.9, 0.7f64..1.3, 3usize..9).prop_map(|(a, b, c, res)| {
            let d = Domain::polygon(&[[0.0, 0.0], [a, 0.05], [b, c]]).unwrap();
            Arc::new(Grid::build(d, &[res, res + 1]).unwrap())
        }),
    ]
}

/// Random values on `grid`; roughly `inf_pct` percent of the nodes are `+inf`
/// (node 0 is kept finite).
pub fn values_on(grid: Arc<Grid>, inf_pct: u32) -> impl Strategy<Value = SampledFunction> {
    let n = grid.len();
    prop::collection::vec((-5.0f64..5.0, 0u32..100), n).prop_map(move |raw| {
        let vals = raw
            .iter()
            .enumerate()
            .map(|(i, &(v, roll))| {
                if i > 0 && roll < inf_pct {
                    ExtReal::INFINITY
                } else {
                    ExtReal::finite(v)
                }
            })
            .collect();
        SampledFunction::new(grid.clone(), vals).unwrap()
    })
}

pub fn fn_1d(inf_pct: u32) -> impl Strategy<Value = SampledFunction> {
    grid_1d().prop_flat_map(move |g| values_on(g, inf_pct))
}

pub fn fn_2d(inf_pct: u32) -> impl Strategy<Value = SampledFunction> {
    grid_2d().prop_flat_map(move |g| values_on(g, inf_pct))
}

/// Convex in the continuum: a quadratic plus a maximum of affine pieces.
pub fn convex_2d() -> impl Strategy<Value = SampledFunction> {
    (
        grid_2d(),
        0.0f64..2.0,
        0.0f64..2.0,
        -0.9f64..0.9,
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -1.0f64..1.0), 1..4),
    )
        .prop_map(|(g, a, c, r, pieces)| {
            let b = r * (a * c).sqrt();
            finite(&g, |x| {
                let q = a * x[0] * x[0] + 2.0 * b * x[0] * x[1] + c * x[1] * x[1];
                let m = pieces
                    .iter()
                    .map(|(s, t, u)| s * x[0] + t * x[1] + u)
                    .fold(f64::NEG_INFINITY, f64::max);
                q + m
            })
        })
}

/// Lower convex envelope of the finite 1D samples by brute force over chords.
pub fn envelope_1d_brute(h: &SampledFunction) -> Vec<f64> {
    let g = h.grid();
    let fin: Vec<(f64, f64)> = (0..g.len())
        .filter_map(|n| h.value(n).to_finite().map(|v| (g.node(n)[0], v)))
        .collect();
    (0..g.len())
        .map(|n| {
            let x = g.node(n)[0];
            let mut best = f64::INFINITY;
            for &(a, va) in &fin {
                for &(b, vb) in &fin {
                    if a <= x && x <= b {
                        let v = if b == a { va } else { va + (vb - va) * (x - a) / (b - a) };
                        best = best.min(v);
                    }
                }
            }
            best
        })
        .collect()
}

/// Lower convex envelope of finite 2D samples by brute force over triangles
/// and segments of sample points.
pub fn envelope_2d_brute(h: &SampledFunction) -> Vec<f64> {
    let g = h.grid();
    let fin: Vec<([f64; 2], f64)> = (0..g.len())
        .filter_map(|n| {
            let p = g.node(n);
            h.value(n).to_finite().map(|v| ([p[0], p[1]], v))
        })
        .collect();
    let tol = 1e-12;
    (0..g.len())
        .map(|n| {
            let p = g.node(n);
            let x = [p[0], p[1]];
            let mut best = f64::INFINITY;
            for i in 0..fin.len() {
                let (a, va) = fin[i];
                if (a[0] - x[0]).abs() < tol && (a[1] - x[1]).abs() < tol {
                    best = best.min(va);
                }
                for j in i + 1..fin.len() {
                    let (b, vb) = fin[j];
                    // segment
                    let d = [b[0] - a[0], b[1] - a[1]];
                    let e = [x[0] - a[0], x[1] - a[1]];
                    let cross = d[0] * e[1] - d[1] * e[0];
                    let len2 = d[0] * d[0] + d[1] * d[1];
                    if cross.abs() <= tol * len2.sqrt() {
                        let t = (d[0] * e[0] + d[1] * e[1]) / len2;
                        if (-tol..=1.0 + tol).contains(&t) {
                            best = best.min(va + t * (vb - va));
                        }
                    }
                    for &(c, vc) in &fin[j + 1..] {
                        let f = [c[0] - a[0], c[1] - a[1]];
                        let det = d[0] * f[1] - d[1] * f[0];
                        if det.abs() < 1e-14 {
                            continue;
                        }
                        let s = (e[0] * f[1] - e[1] * f[0]) / det;
                        let t = (d[0] * e[1] - d[1] * e[0]) / det;
                        if s >= -tol && t >= -tol && s + t <= 1.0 + tol {
                            best = best.min(va + s * (vb - va) + t * (vc - va));
                        }
                    }
                }
            }
            best
        })
        .collect()
}
