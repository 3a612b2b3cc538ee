//! Three-dimensional quickhull with explicit handling of lower-dimensional input.
//!
//! Predicates run on coordinates rescaled to the unit cube, so `eps` is
//! relative to the extent of the input along each axis. A point is only ever
//! added to the hull when it lies more than `eps` outside a face; points within
//! `eps` of the surface are dropped and never become vertices.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::hull2d::hull2d;

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: V3) -> f64 {
    libm::sqrt(dot(a, a))
}

fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Hull3 {
    Point(usize),
    Segment(usize, usize),
    /// Coplanar input; polygon vertices in cyclic order.
    Planar(Vec<usize>),
    /// Triangular faces, counter-clockwise seen from outside.
    Solid(Vec<[usize; 3]>),
}

impl Hull3 {
    pub(crate) fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = match self {
            Hull3::Point(i) => alloc::vec![*i],
            Hull3::Segment(i, j) => alloc::vec![*i, *j],
            Hull3::Planar(p) => p.clone(),
            Hull3::Solid(faces) => faces.iter().flatten().copied().collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

struct Face {
    v: [usize; 3],
    normal: V3,
    offset: f64,
    nb: [usize; 3],
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn new(v: [usize; 3], pts: &[V3]) -> Face {
        let n = cross(sub(pts[v[1]], pts[v[0]]), sub(pts[v[2]], pts[v[0]]));
        let len = norm(n);
        let normal = if len > 0.0 { scale(n, 1.0 / len) } else { [0.0; 3] };
        Face {
            v,
            normal,
            offset: dot(normal, pts[v[0]]),
            nb: [usize::MAX; 3],
            outside: Vec::new(),
            alive: true,
        }
    }

    fn dist(&self, p: V3) -> f64 {
        dot(self.normal, p) - self.offset
    }
}

pub(crate) fn hull3(input: &[[f64; 3]], eps: f64) -> Hull3 {
    assert!(!input.is_empty(), "hull of an empty point set");
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in input {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let ext: V3 = core::array::from_fn(|k| if hi[k] > lo[k] { hi[k] - lo[k] } else { 1.0 });
    let pts: Vec<V3> = input
        .iter()
        .map(|p| core::array::from_fn(|k| (p[k] - lo[k]) / ext[k]))
        .collect();

    let i0 = (0..pts.len())
        .min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]))
        .unwrap();
    let far = |f: &dyn Fn(V3) -> f64| -> (usize, f64) {
        (0..pts.len())
            .map(|i| (i, f(pts[i])))
            .fold((i0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
    };
    let (i1, d1) = far(&|p| norm(sub(p, pts[i0])));
    if d1 <= eps {
        return Hull3::Point(i0);
    }
    let u = scale(sub(pts[i1], pts[i0]), 1.0 / d1);
    let (i2, d2) = far(&|p| norm(cross(sub(p, pts[i0]), u)));
    if d2 <= eps {
        let t = |i: usize| dot(sub(pts[i], pts[i0]), u);
        let a = (0..pts.len()).min_by(|&a, &b| t(a).total_cmp(&t(b))).unwrap();
        let b = (0..pts.len()).max_by(|&a, &b| t(a).total_cmp(&t(b))).unwrap();
        return Hull3::Segment(a, b);
    }
    let n = cross(sub(pts[i1], pts[i0]), sub(pts[i2], pts[i0]));
    let n = scale(n, 1.0 / norm(n));
    let (i3, d3) = far(&|p| dot(sub(p, pts[i0]), n).abs());
    if d3 <= eps {
        let e2 = cross(n, u);
        let flat: Vec<[f64; 2]> = pts
            .iter()
            .map(|&p| {
                let r = sub(p, pts[i0]);
                [dot(r, u), dot(r, e2)]
            })
            .collect();
        return Hull3::Planar(hull2d(&flat, eps));
    }

    let mut faces: Vec<Face> = Vec::new();
    let centroid = scale(
        [0, 1, 2].map(|k| pts[i0][k] + pts[i1][k] + pts[i2][k] + pts[i3][k]),
        0.25,
    );
    for tri in [[i0, i1, i2], [i0, i3, i1], [i1, i3, i2], [i0, i2, i3]] {
        let mut f = Face::new(tri, &pts);
        if f.dist(centroid) > 0.0 {
            f = Face::new([tri[0], tri[2], tri[1]], &pts);
        }
        faces.push(f);
    }
    link(&mut faces);

    for i in 0..pts.len() {
        if [i0, i1, i2, i3].contains(&i) {
            continue;
        }
        assign(&mut faces, 0..4, i, &pts, eps);
    }

    let mut stack: Vec<usize> = (0..4).collect();
    let mut visible_mark: Vec<bool> = alloc::vec![false; faces.len()];
    while let Some(fi) = stack.pop() {
        if !faces[fi].alive || faces[fi].outside.is_empty() {
            continue;
        }
        let (pos, eye) = faces[fi]
            .outside
            .iter()
            .enumerate()
            .map(|(k, &p)| (k, p))
            .max_by(|a, b| faces[fi].dist(pts[a.1]).total_cmp(&faces[fi].dist(pts[b.1])))
            .unwrap();
        let eye_p = pts[eye];

        visible_mark.resize(faces.len(), false);
        let mut visible = alloc::vec![fi];
        visible_mark[fi] = true;
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        // (face, first edge, edges visited, edges to visit)
        let mut frames: Vec<(usize, usize, usize, usize)> = alloc::vec![(fi, 0, 0, 3)];
        while let Some(frame) = frames.last_mut() {
            if frame.2 == frame.3 {
                frames.pop();
                continue;
            }
            let face = frame.0;
            let e = (frame.1 + frame.2) % 3;
            frame.2 += 1;
            let n = faces[face].nb[e];
            if visible_mark[n] {
                continue;
            }
            if faces[n].dist(eye_p) > eps {
                visible_mark[n] = true;
                visible.push(n);
                let back = edge_towards(&faces[n], faces[face].v[(e + 1) % 3]);
                frames.push((n, back + 1, 0, 2));
            } else {
                horizon.push((face, e));
            }
        }

        let closed = horizon.len() >= 3
            && (0..horizon.len()).all(|k| {
                let (f, e) = horizon[k];
                let (g, d) = horizon[(k + 1) % horizon.len()];
                faces[f].v[(e + 1) % 3] == faces[g].v[d]
            });
        if !closed {
            // inconsistent visibility from rounding: drop this point
            for &v in &visible {
                visible_mark[v] = false;
            }
            faces[fi].outside.swap_remove(pos);
            stack.push(fi);
            continue;
        }

        let first_new = faces.len();
        let h = horizon.len();
        for (k, &(f, e)) in horizon.iter().enumerate() {
            let a = faces[f].v[e];
            let b = faces[f].v[(e + 1) % 3];
            let across = faces[f].nb[e];
            let mut nf = Face::new([a, b, eye], &pts);
            nf.nb = [
                across,
                first_new + (k + 1) % h,
                first_new + (k + h - 1) % h,
            ];
            let j = edge_towards(&faces[across], b);
            faces[across].nb[j] = first_new + k;
            faces.push(nf);
        }

        let mut orphans = Vec::new();
        for &v in &visible {
            faces[v].alive = false;
            visible_mark[v] = false;
            orphans.append(&mut faces[v].outside);
        }
        for p in orphans {
            if p != eye {
                assign(&mut faces, first_new..first_new + h, p, &pts, eps);
            }
        }
        stack.extend(first_new..first_new + h);
    }

    Hull3::Solid(faces.iter().filter(|f| f.alive).map(|f| f.v).collect())
}

/// Index of the edge of `face` that starts at vertex `start`.
fn edge_towards(face: &Face, start: usize) -> usize {
    (0..3)
        .find(|&j| face.v[j] == start)
        .expect("adjacent faces share an edge")
}

fn link(faces: &mut [Face]) {
    let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for e in 0..3 {
            edges.insert((f.v[e], f.v[(e + 1) % 3]), fi);
        }
    }
    for f in faces.iter_mut() {
        for e in 0..3 {
            f.nb[e] = edges[&(f.v[(e + 1) % 3], f.v[e])];
        }
    }
}

fn assign(
    faces: &mut [Face],
    range: core::ops::Range<usize>,
    p: usize,
    pts: &[V3],
    eps: f64,
) {
    let mut best = (usize::MAX, eps);
    for fi in range {
        let d = faces[fi].dist(pts[p]);
        if d > best.1 {
            best = (fi, d);
        }
    }
    if best.0 != usize::MAX {
        faces[best.0].outside.push(p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_convex(pts: &[[f64; 3]], faces: &[[usize; 3]], tol: f64) {
        for f in faces {
            let face = Face::new(*f, pts);
            for p in pts {
                assert!(face.dist(*p) <= tol, "point outside face {:?}", f);
            }
        }
        // closed manifold: every directed edge has its reverse
        let mut edges = BTreeMap::new();
        for f in faces {
            for e in 0..3 {
                *edges.entry((f[e], f[(e + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &edges {
            assert_eq!(c, 1);
            assert_eq!(edges.get(&(b, a)), Some(&1));
        }
    }

    #[test]
    fn cube_with_interior_points() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        pts.push([0.5, 0.5, 0.5]);
        pts.push([0.2, 0.7, 0.4]);
        pts.push([0.5, 0.5, 1.0]); // on a face
        let h = hull3(&pts, 1e-10);
        let Hull3::Solid(faces) = &h else { panic!("{h:?}") };
        assert_eq!(h.vertices(), (0..8).collect::<Vec<_>>());
        assert_eq!(faces.len(), 12);
        check_convex(&pts, faces, 1e-12);
    }

    #[test]
    fn lattice_paraboloid() {
        let mut pts = Vec::new();
        for i in 0..=20 {
            for j in 0..=20 {
                let (x, y) = (i as f64 / 10.0 - 1.0, j as f64 / 10.0 - 1.0);
                pts.push([x, y, x * x + y * y]);
            }
        }
        let h = hull3(&pts, 1e-10);
        let Hull3::Solid(faces) = &h else { panic!() };
        check_convex(&pts, faces, 1e-12);
        assert_eq!(h.vertices().len(), pts.len());
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(hull3(&[[1.0, 2.0, 3.0]; 4], 1e-10), Hull3::Point(0));
        let seg = [[0.0, 0.0, 0.0], [2.0, 2.0, 2.0], [1.0, 1.0, 1.0]];
        assert_eq!(hull3(&seg, 1e-10), Hull3::Segment(0, 1));
        let plane = [
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.5, 0.5, 1.0],
        ];
        let Hull3::Planar(poly) = hull3(&plane, 1e-10) else { panic!() };
        let mut v = poly.clone();
        v.sort();
        assert_eq!(v, alloc::vec![0, 1, 2, 3]);
    }
}
