//! Compact convex domains and their lattice discretizations.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::point::Point;

/// Relative geometric tolerance; multiplied by the domain diameter.
pub const EPS_GEOM_REL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind {
    /// Axis-aligned box in one to three dimensions.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Strictly convex polygon, vertices in counter-clockwise order.
    Polytope2D { vertices: Vec<[f64; 2]> },
}

/// A non-empty compact convex subset of R^n, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    kind: DomainKind,
}

impl Domain {
    pub fn new(kind: DomainKind) -> Result<Self> {
        match &kind {
            DomainKind::Box { lower, upper } => validate_box(lower, upper)?,
            DomainKind::Polytope2D { vertices } => validate_polygon(vertices)?,
        }
        Ok(Domain { kind })
    }

    pub fn new_box(lower: &[f64], upper: &[f64]) -> Result<Self> {
        Domain::new(DomainKind::Box {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
        })
    }

    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        Domain::new(DomainKind::Polytope2D {
            vertices: vertices.to_vec(),
        })
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn is_box(&self) -> bool {
        matches!(self.kind, DomainKind::Box { .. })
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            DomainKind::Box { lower, .. } => lower.len(),
            DomainKind::Polytope2D { .. } => 2,
        }
    }

    /// Bounding box `(lower, upper)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            DomainKind::Box { lower, upper } => (lower.clone(), upper.clone()),
            DomainKind::Polytope2D { vertices } => polygon_bounds(vertices),
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.kind {
            DomainKind::Box { lower, upper } => libm::sqrt(
                lower
                    .iter()
                    .zip(upper)
                    .map(|(l, u)| (u - l) * (u - l))
                    .sum::<f64>(),
            ),
            DomainKind::Polytope2D { vertices } => polygon_diameter(vertices),
        }
    }

    /// Global geometric tolerance for deduplication and membership.
    pub fn eps_geom(&self) -> f64 {
        EPS_GEOM_REL * self.diameter()
    }

    /// Box corners (in binary counting order) or polygon vertices.
    pub fn extreme_points(&self) -> Vec<Point> {
        match &self.kind {
            DomainKind::Box { lower, upper } => {
                let d = lower.len();
                (0..1usize << d)
                    .map(|mask| {
                        let mut c = [0.0; 3];
                        for k in 0..d {
                            // axis 0 is the most significant bit, so corners come out lexicographically
                            c[k] = if mask >> (d - 1 - k) & 1 == 1 {
                                upper[k]
                            } else {
                                lower[k]
                            };
                        }
                        Point::new(&c[..d])
                    })
                    .collect()
            }
            DomainKind::Polytope2D { vertices } => vertices.iter().map(|&v| v.into()).collect(),
        }
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        if p.dim() != self.dim() {
            return false;
        }
        match &self.kind {
            DomainKind::Box { lower, upper } => (0..lower.len())
                .all(|k| p[k] >= lower[k] - tol && p[k] <= upper[k] + tol),
            DomainKind::Polytope2D { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| edge_signed_dist(vertices[i], vertices[(i + 1) % n], [p[0], p[1]]) >= -tol)
            }
        }
    }
}

fn validate_box(lower: &[f64], upper: &[f64]) -> Result<()> {
    if lower.len() != upper.len() {
        return Err(Error::InvalidDomain(format!(
            "lower has {} coordinates, upper has {}",
            lower.len(),
            upper.len()
        )));
    }
    if !(1..=3).contains(&lower.len()) {
        return Err(Error::InvalidDomain(format!(
            "box dimension must be 1, 2 or 3, got {}",
            lower.len()
        )));
    }
    for (k, (l, u)) in lower.iter().zip(upper).enumerate() {
        if !(l.is_finite() && u.is_finite() && l < u) {
            return Err(Error::InvalidDomain(format!(
                "axis {k}: need finite lower < upper, got [{l}, {u}]"
            )));
        }
    }
    Ok(())
}

fn validate_polygon(vertices: &[[f64; 2]]) -> Result<()> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::InvalidDomain(format!(
            "polygon needs at least 3 vertices, got {n}"
        )));
    }
    if vertices.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidDomain("non-finite polygon vertex".into()));
    }
    let eps = EPS_GEOM_REL * polygon_diameter(vertices);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (vertices[i], vertices[j]);
            if libm::hypot(a[0] - b[0], a[1] - b[1]) <= eps {
                return Err(Error::InvalidDomain(format!(
                    "duplicate polygon vertices {i} and {j}"
                )));
            }
        }
    }
    // strictly convex and counter-clockwise: every other vertex strictly left of every edge
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        for (j, &v) in vertices.iter().enumerate() {
            if j == i || j == (i + 1) % n {
                continue;
            }
            if edge_signed_dist(a, b, v) <= eps {
                return Err(Error::InvalidDomain(format!(
                    "polygon is not strictly convex counter-clockwise at edge {i}"
                )));
            }
        }
    }
    Ok(())
}

fn polygon_bounds(vertices: &[[f64; 2]]) -> (Vec<f64>, Vec<f64>) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in vertices {
        for k in 0..2 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    (lo.to_vec(), hi.to_vec())
}

fn polygon_diameter(vertices: &[[f64; 2]]) -> f64 {
    let mut d: f64 = 0.0;
    for a in vertices {
        for b in vertices {
            d = d.max(libm::hypot(a[0] - b[0], a[1] - b[1]));
        }
    }
    d
}

/// Signed distance of `p` from the line through `a -> b`, positive on the left.
pub(crate) fn edge_signed_dist(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let cross = ex * (p[1] - a[1]) - ey * (p[0] - a[0]);
    cross / libm::hypot(ex, ey)
}

/// Coordinate of lattice line `i` of `r` on `[lower, upper]`; both ends are hit exactly.
pub(crate) fn lattice_coord(lower: f64, upper: f64, i: usize, r: usize) -> f64 {
    if i == r {
        upper
    } else {
        lower + (upper - lower) * (i as f64) / (r as f64)
    }
}

/// A lattice discretization of a [`Domain`].
///
/// Box grids hold every lattice point in row-major order (axis 0 slowest).
/// Polygon grids hold the lattice points of the bounding box that lie in the
/// polygon, in the same order, followed by any polygon vertex that is not
/// itself a lattice point. Every extreme point of the domain is a node.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    domain: Domain,
    resolution: Vec<usize>,
    axes: Vec<Vec<f64>>,
    spacing: Vec<f64>,
    nodes: Vec<Point>,
    node_lattice: Vec<Option<usize>>,
    lattice_node: Vec<Option<usize>>,
    extreme_nodes: Vec<usize>,
    extra_adjacency: BTreeMap<usize, Vec<usize>>,
    eps_geom: f64,
}

impl Grid {
    pub fn build(domain: Domain, resolution: &[usize]) -> Result<Grid> {
        let dim = domain.dim();
        if resolution.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: resolution.len(),
            });
        }
        if resolution.iter().any(|&r| r < 2) {
            return Err(Error::ResolutionTooSmall);
        }
        let (lower, upper) = domain.bounds();
        let axes: Vec<Vec<f64>> = (0..dim)
            .map(|k| {
                (0..=resolution[k])
                    .map(|i| lattice_coord(lower[k], upper[k], i, resolution[k]))
                    .collect()
            })
            .collect();
        let spacing: Vec<f64> = (0..dim)
            .map(|k| (upper[k] - lower[k]) / resolution[k] as f64)
            .collect();
        let eps_geom = domain.eps_geom();
        let shape: Vec<usize> = resolution.iter().map(|r| r + 1).collect();
        let total: usize = shape.iter().product();

        let mut nodes = Vec::new();
        let mut node_lattice = Vec::new();
        let mut lattice_node = alloc::vec![None; total];
        let mut idx = [0usize; 3];
        for flat in 0..total {
            unflatten(flat, &shape, &mut idx);
            let mut c = [0.0; 3];
            for k in 0..dim {
                c[k] = axes[k][idx[k]];
            }
            let p = Point::new(&c[..dim]);
            if domain.is_box() || domain.contains(&p, eps_geom) {
                lattice_node[flat] = Some(nodes.len());
                nodes.push(p);
                node_lattice.push(Some(flat));
            }
        }

        let mut grid = Grid {
            domain,
            resolution: resolution.to_vec(),
            axes,
            spacing,
            nodes,
            node_lattice,
            lattice_node,
            extreme_nodes: Vec::new(),
            extra_adjacency: BTreeMap::new(),
            eps_geom,
        };

        let mut extreme_nodes = Vec::new();
        let mut off_lattice = Vec::new();
        for v in grid.domain.extreme_points() {
            match grid.find_lattice_node(&v) {
                Some(i) => extreme_nodes.push(i),
                None => {
                    let i = grid.nodes.len();
                    grid.nodes.push(v);
                    grid.node_lattice.push(None);
                    extreme_nodes.push(i);
                    off_lattice.push(i);
                }
            }
        }
        grid.extreme_nodes = extreme_nodes;

        for &v in &off_lattice {
            for j in 0..grid.nodes.len() {
                if j != v && grid.within_cell(&grid.nodes[v], &grid.nodes[j]) {
                    grid.extra_adjacency.entry(v).or_default().push(j);
                    if grid.node_lattice[j].is_some() {
                        grid.extra_adjacency.entry(j).or_default().push(v);
                    }
                }
            }
        }
        Ok(grid)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> Point {
        self.nodes[i]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(0.0, f64::max)
    }

    pub fn eps_geom(&self) -> f64 {
        self.eps_geom
    }

    /// Lattice coordinates per axis (of the bounding box for polygons).
    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    /// Number of lattice points per axis.
    pub fn lattice_shape(&self) -> Vec<usize> {
        self.resolution.iter().map(|r| r + 1).collect()
    }

    /// Node at a flat (row-major) lattice index, if that lattice point is a node.
    pub fn lattice_node(&self, flat: usize) -> Option<usize> {
        self.lattice_node.get(flat).copied().flatten()
    }

    /// Flat lattice index of a node; `None` for off-lattice polygon vertices.
    pub fn node_lattice_index(&self, node: usize) -> Option<usize> {
        self.node_lattice[node]
    }

    /// Multi-index of a node on the lattice.
    pub fn node_multi_index(&self, node: usize) -> Option<[usize; 3]> {
        let shape = self.lattice_shape();
        self.node_lattice[node].map(|flat| {
            let mut idx = [0; 3];
            unflatten(flat, &shape, &mut idx);
            idx
        })
    }

    /// Node at a lattice multi-index.
    pub fn node_at(&self, idx: &[usize]) -> Option<usize> {
        let shape = self.lattice_shape();
        let mut flat = 0;
        for (k, &i) in idx.iter().enumerate() {
            if i >= shape[k] {
                return None;
            }
            flat = flat * shape[k] + i;
        }
        self.lattice_node(flat)
    }

    /// Nodes sitting on extreme points of the domain, in domain order.
    pub fn extreme_nodes(&self) -> &[usize] {
        &self.extreme_nodes
    }

    pub fn is_extreme_node(&self, node: usize) -> bool {
        self.extreme_nodes.contains(&node)
    }

    /// Nodes that are not lattice points (polygon vertices off the lattice).
    pub fn off_lattice_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.node_lattice[i].is_none())
    }

    /// Node within `eps_geom` of `p`.
    pub fn find_node(&self, p: &Point) -> Option<usize> {
        if p.dim() != self.dim() {
            return None;
        }
        self.find_lattice_node(p).or_else(|| {
            self.off_lattice_nodes()
                .find(|&i| self.nodes[i].dist(p) <= self.eps_geom)
        })
    }

    fn find_lattice_node(&self, p: &Point) -> Option<usize> {
        let mut idx = [0usize; 3];
        for k in 0..self.dim() {
            let t = (p[k] - self.axes[k][0]) / self.spacing[k];
            let i = libm::round(t);
            if i < 0.0 || i > self.resolution[k] as f64 {
                return None;
            }
            idx[k] = i as usize;
        }
        let node = self.node_at(&idx[..self.dim()])?;
        (self.nodes[node].dist(p) <= self.eps_geom).then_some(node)
    }

    fn within_cell(&self, a: &Point, b: &Point) -> bool {
        (0..self.dim()).all(|k| (a[k] - b[k]).abs() <= 1.01 * self.spacing[k])
    }

    /// Closed node neighborhood: the node itself and every node within 1.01
    /// spacings on each axis (lattice neighbors including diagonals).
    pub fn neighborhood(&self, node: usize, out: &mut Vec<usize>) {
        out.clear();
        out.push(node);
        if let Some(idx) = self.node_multi_index(node) {
            let dim = self.dim();
            let shape = self.lattice_shape();
            let count = 3usize.pow(dim as u32);
            let mut nb = [0usize; 3];
            'offsets: for code in 0..count {
                let mut c = code;
                let mut all_zero = true;
                for k in 0..dim {
                    let off = (c % 3) as isize - 1;
                    c /= 3;
                    all_zero &= off == 0;
                    let j = idx[k] as isize + off;
                    if j < 0 || j >= shape[k] as isize {
                        continue 'offsets;
                    }
                    nb[k] = j as usize;
                }
                if all_zero {
                    continue;
                }
                if let Some(n) = self.node_at(&nb[..dim]) {
                    out.push(n);
                }
            }
        }
        if let Some(extra) = self.extra_adjacency.get(&node) {
            out.extend_from_slice(extra);
        }
    }
}

pub(crate) fn unflatten(mut flat: usize, shape: &[usize], idx: &mut [usize; 3]) {
    for k in (0..shape.len()).rev() {
        idx[k] = flat % shape[k];
        flat /= shape[k];
    }
}
