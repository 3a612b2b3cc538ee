//! Discrete Legendre-Fenchel transform on tensor lattices.

use alloc::vec::Vec;

/// `out[j] = max_i (p[j] * x[i] - y[i])` over the finite `y[i]`, or `-inf`
/// when every `y[i]` is `+inf`. Both `x` and `p` must be ascending.
///
/// Only vertices of the lower convex hull of `(x_i, y_i)` can attain the
/// maximum, and the maximizing vertex moves right as the slope grows, so one
/// pass over the hull answers all queries.
pub(crate) fn legendre_1d(x: &[f64], y: &[f64], p: &[f64], out: &mut [f64], hull: &mut Vec<usize>) {
    hull.clear();
    for i in 0..x.len() {
        if y[i] == f64::INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    if hull.is_empty() {
        out.fill(f64::NEG_INFINITY);
        return;
    }
    let mut j = 0;
    for (k, &pk) in p.iter().enumerate() {
        let mut best = pk * x[hull[j]] - y[hull[j]];
        while j + 1 < hull.len() {
            let next = pk * x[hull[j + 1]] - y[hull[j + 1]];
            if next >= best {
                best = next;
                j += 1;
            } else {
                break;
            }
        }
        out[k] = best;
    }
}

/// Conjugate of a function on the tensor lattice `in_axes` (row-major values,
/// `+inf` allowed) evaluated on the tensor lattice `out_axes`.
///
/// The supremum over a product factorizes, so the transform runs as one
/// partial conjugation per axis: after transforming an axis the partial
/// result is negated and fed to the next axis as new data.
pub(crate) fn lattice_conjugate(in_axes: &[Vec<f64>], y: &[f64], out_axes: &[Vec<f64>]) -> Vec<f64> {
    let dim = in_axes.len();
    debug_assert_eq!(out_axes.len(), dim);
    let mut shape: Vec<usize> = in_axes.iter().map(Vec::len).collect();
    debug_assert_eq!(shape.iter().product::<usize>(), y.len());
    let mut cur = y.to_vec();
    let mut hull = Vec::new();
    for k in (0..dim).rev() {
        let n_in = shape[k];
        let n_out = out_axes[k].len();
        let stride: usize = shape[k + 1..].iter().product();
        let outer: usize = shape[..k].iter().product();
        let mut next = alloc::vec![0.0; outer * n_out * stride];
        let mut line = alloc::vec![0.0; n_in];
        let mut res = alloc::vec![0.0; n_out];
        let last = k == 0;
        for o in 0..outer {
            for inner in 0..stride {
                let base_in = o * n_in * stride + inner;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = cur[base_in + i * stride];
                }
                legendre_1d(&in_axes[k], &line, &out_axes[k], &mut res, &mut hull);
                let base_out = o * n_out * stride + inner;
                for (j, &c) in res.iter().enumerate() {
                    next[base_out + j * stride] = if last { c } else { -c };
                }
            }
        }
        shape[k] = n_out;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn brute(x: &[f64], y: &[f64], p: &[f64]) -> Vec<f64> {
        p.iter()
            .map(|&pk| {
                x.iter()
                    .zip(y)
                    .filter(|(_, &yi)| yi < f64::INFINITY)
                    .map(|(&xi, &yi)| pk * xi - yi)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    #[test]
    fn matches_brute_force_on_nonconvex_data() {
        let x: Vec<f64> = (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, &t)| if i % 7 == 3 { f64::INFINITY } else { (t * t - 0.25).abs() + 0.1 * t })
            .collect();
        let p: Vec<f64> = (0..=30).map(|i| -3.0 + 0.2 * i as f64).collect();
        let mut out = vec![0.0; p.len()];
        legendre_1d(&x, &y, &p, &mut out, &mut Vec::new());
        assert_eq!(out, brute(&x, &y, &p));
    }

    #[test]
    fn all_infinite_line_gives_minus_infinity() {
        let mut out = vec![0.0; 2];
        legendre_1d(&[0.0, 1.0], &[f64::INFINITY; 2], &[0.0, 1.0], &mut out, &mut Vec::new());
        assert_eq!(out, vec![f64::NEG_INFINITY; 2]);
    }

    #[test]
    fn separable_lattice() {
        let ax: Vec<f64> = (0..=10).map(|i| -1.0 + 0.2 * i as f64).collect();
        let y: Vec<f64> = ax
            .iter()
            .flat_map(|&a| ax.iter().map(move |&b| a * a + b * b))
            .collect();
        let px: Vec<f64> = (0..=8).map(|i| -2.0 + 0.5 * i as f64).collect();
        let c = lattice_conjugate(&[ax.clone(), ax.clone()], &y, &[px.clone(), px.clone()]);
        let one = brute(&ax, &ax.iter().map(|a| a * a).collect::<Vec<_>>(), &px);
        for i in 0..px.len() {
            for j in 0..px.len() {
                assert!((c[i * px.len() + j] - (one[i] + one[j])).abs() < 1e-14);
            }
        }
    }
}
