use alloc::vec::Vec;

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    libm::hypot(a[0] - b[0], a[1] - b[1])
}

/// Monotone-chain convex hull. Returns indices of the extreme points in
/// counter-clockwise order starting at the lexicographically smallest point.
///
/// A point within `eps` of the segment joining its chain neighbours is not a
/// vertex. Collinear input yields its two endpoints, a cluster within `eps`
/// yields one index.
pub(crate) fn hull2d(points: &[[f64; 2]], eps: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i][0]
            .total_cmp(&points[j][0])
            .then(points[i][1].total_cmp(&points[j][1]))
    });
    if order.is_empty() {
        return order;
    }
    let first = order[0];
    let last = *order.last().unwrap();
    if dist(points[first], points[last]) <= eps
        && order.iter().all(|&i| dist(points[i], points[first]) <= eps)
    {
        return alloc::vec![first];
    }

    let keeps_turn = |chain: &[usize], p: usize| -> bool {
        let o = points[chain[chain.len() - 2]];
        let a = points[chain[chain.len() - 1]];
        let b = points[p];
        cross(o, a, b) > eps * dist(o, b)
    };

    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2 && !keeps_turn(&lower, i) {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2 && !keeps_turn(&upper, i) {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        // collinear within eps: keep the two endpoints of the lexicographic sweep
        return alloc::vec![first, last];
    }
    lower
}
