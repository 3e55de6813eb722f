//! Conforming triangular meshes of simply connected polygonal domains.
//!
//! A [`TriMesh`] is immutable once built. Construction validates orientation,
//! conformity and boundary labelling, and records edge adjacency together with
//! the counterclockwise boundary cycle that the boundary partition walks.

mod generate;
mod io;
mod locate;
mod topology;

pub use generate::{criss_cross_square, generate_lshape, generate_unit_square, refine_barycentric, refine_uniform};
pub use io::{read_mesh, read_mesh_str, write_mesh, write_mesh_string};
pub use locate::{PointLocator, LOCATE_TOL};
pub use topology::{
    classify_boundary, mesh_xi, singular_vertices, vertex_star, vertex_stars, BoundaryClass,
    BoundaryPartition, Chain, ChainEdge, VertexLocation, VertexStar, COLLINEAR_TOL,
};

use std::collections::HashMap;
use thiserror::Error;

pub type Point = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("vertices {0} and {1} coincide")]
    DuplicateVertex(usize, usize),
    #[error("mesh is not conforming: {0}")]
    NonConformingMesh(String),
    #[error("boundary edge ({0}, {1}) has no label")]
    UnlabeledBoundaryEdge(usize, usize),
    #[error("label given for ({0}, {1}), which is not a boundary edge")]
    LabelNotOnBoundary(usize, usize),
    #[error("triangle {tri} references vertex {index} but only {count} vertices exist")]
    IndexOutOfRange { tri: usize, index: usize, count: usize },
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("no clamped or simply supported boundary edge")]
    EmptyEssentialBoundary,
    #[error("boundary label {0} has no rule")]
    UnmappedLabel(i32),
    #[error("mesh file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Endpoints with `v[0] < v[1]`.
    pub v: [usize; 2],
    pub tris: [usize; 2],
    pub n_tris: u8,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.n_tris == 1
    }
}

/// One edge of the boundary cycle, traversed counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
    pub label: i32,
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    tri_edges: Vec<[usize; 3]>,
    edge_labels: Vec<Option<i32>>,
    boundary_cycle: Vec<BoundarySegment>,
    edge_lookup: HashMap<(usize, usize), usize>,
}

const AREA_TOL: f64 = 1e-14;

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Builds a mesh from raw nodes, triangles and boundary labels.
///
/// Clockwise triangles are reoriented. Every boundary edge must carry a label
/// and the boundary must form a single closed cycle.
pub fn build_mesh(
    nodes: &[Point],
    tris: &[[usize; 3]],
    boundary_labels: &[(usize, usize, i32)],
) -> Result<TriMesh, MeshError> {
    let nv = nodes.len();
    check_duplicates(nodes)?;

    let mut triangles = Vec::with_capacity(tris.len());
    for (t, tri) in tris.iter().enumerate() {
        for &i in tri {
            if i >= nv {
                return Err(MeshError::IndexOutOfRange { tri: t, index: i, count: nv });
            }
        }
        let [a, b, c] = *tri;
        let scale = edge_len(nodes[a], nodes[b])
            .max(edge_len(nodes[b], nodes[c]))
            .max(edge_len(nodes[c], nodes[a]));
        let area = signed_area(nodes[a], nodes[b], nodes[c]);
        if area.abs() <= AREA_TOL * scale * scale || a == b || b == c || a == c {
            return Err(MeshError::DegenerateTriangle(t));
        }
        triangles.push(if area > 0.0 { [a, b, c] } else { [a, c, b] });
    }

    let mut edge_lookup: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut tri_edges = Vec::with_capacity(triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        let mut te = [0usize; 3];
        for (i, slot) in te.iter_mut().enumerate() {
            let k = key(tri[(i + 1) % 3], tri[(i + 2) % 3]);
            let e = *edge_lookup.entry(k).or_insert_with(|| {
                edges.push(Edge { v: [k.0, k.1], tris: [usize::MAX; 2], n_tris: 0 });
                edges.len() - 1
            });
            let edge = &mut edges[e];
            if edge.n_tris == 2 {
                return Err(MeshError::NonConformingMesh(format!(
                    "edge ({}, {}) is shared by more than two triangles",
                    k.0, k.1
                )));
            }
            edge.tris[edge.n_tris as usize] = t;
            edge.n_tris += 1;
            *slot = e;
        }
        tri_edges.push(te);
    }

    let mut edge_labels = vec![None; edges.len()];
    for &(i, j, label) in boundary_labels {
        match edge_lookup.get(&key(i, j)) {
            Some(&e) if edges[e].is_boundary() => edge_labels[e] = Some(label),
            _ => return Err(MeshError::LabelNotOnBoundary(i, j)),
        }
    }

    // Hanging nodes show up as vertices lying inside a boundary edge.
    for e in edges.iter().filter(|e| e.is_boundary()) {
        let (a, b) = (nodes[e.v[0]], nodes[e.v[1]]);
        let len = edge_len(a, b);
        for (k, &x) in nodes.iter().enumerate() {
            if k == e.v[0] || k == e.v[1] {
                continue;
            }
            let cross = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
            if cross.abs() > 1e-12 * len * len {
                continue;
            }
            let s = ((x[0] - a[0]) * (b[0] - a[0]) + (x[1] - a[1]) * (b[1] - a[1])) / (len * len);
            if s > 1e-12 && s < 1.0 - 1e-12 {
                return Err(MeshError::NonConformingMesh(format!(
                    "vertex {} hangs on edge ({}, {})",
                    k, e.v[0], e.v[1]
                )));
            }
        }
    }

    for (e, edge) in edges.iter().enumerate() {
        if edge.is_boundary() && edge_labels[e].is_none() {
            return Err(MeshError::UnlabeledBoundaryEdge(edge.v[0], edge.v[1]));
        }
    }

    let boundary_cycle = trace_boundary(&triangles, &edges, &edge_lookup, &edge_labels, nv)?;

    Ok(TriMesh {
        vertices: nodes.to_vec(),
        triangles,
        edges,
        tri_edges,
        edge_labels,
        boundary_cycle,
        edge_lookup,
    })
}

fn edge_len(a: Point, b: Point) -> f64 {
    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
}

fn check_duplicates(nodes: &[Point]) -> Result<(), MeshError> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in nodes {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let tol = 1e-12 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a][0].total_cmp(&nodes[b][0]));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if nodes[j][0] - nodes[i][0] > tol {
                break;
            }
            if (nodes[j][1] - nodes[i][1]).abs() <= tol {
                return Err(MeshError::DuplicateVertex(i.min(j), i.max(j)));
            }
        }
    }
    Ok(())
}

fn trace_boundary(
    triangles: &[[usize; 3]],
    edges: &[Edge],
    lookup: &HashMap<(usize, usize), usize>,
    labels: &[Option<i32>],
    nv: usize,
) -> Result<Vec<BoundarySegment>, MeshError> {
    // Boundary edges inherit the counterclockwise direction of their triangle.
    let mut next: Vec<Option<BoundarySegment>> = vec![None; nv];
    let mut count = 0;
    for tri in triangles {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            let e = lookup[&key(a, b)];
            if !edges[e].is_boundary() {
                continue;
            }
            if next[a].is_some() {
                return Err(MeshError::NonConformingMesh(format!(
                    "boundary is pinched at vertex {a}"
                )));
            }
            next[a] = Some(BoundarySegment { edge: e, from: a, to: b, label: labels[e].unwrap() });
            count += 1;
        }
    }
    if count == 0 {
        return Err(MeshError::NonConformingMesh("mesh has no boundary".into()));
    }
    let start = next.iter().position(|s| s.is_some()).unwrap();
    let mut cycle = Vec::with_capacity(count);
    let mut v = start;
    loop {
        let seg = next[v].ok_or_else(|| {
            MeshError::NonConformingMesh(format!("boundary is open at vertex {v}"))
        })?;
        cycle.push(seg);
        v = seg.to;
        if v == start || cycle.len() > count {
            break;
        }
    }
    if cycle.len() != count {
        return Err(MeshError::NonConformingMesh(
            "boundary has more than one cycle (domain not simply connected)".into(),
        ));
    }
    Ok(cycle)
}

impl TriMesh {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge opposite local vertex `i` of each triangle.
    pub fn tri_edges(&self) -> &[[usize; 3]] {
        &self.tri_edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_label(&self, e: usize) -> Option<i32> {
        self.edge_labels[e]
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&key(a, b)).copied()
    }

    /// Boundary edges in counterclockwise order.
    pub fn boundary_cycle(&self) -> &[BoundarySegment] {
        &self.boundary_cycle
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.boundary_cycle.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].v;
        edge_len(self.vertices[a], self.vertices[b])
    }

    /// Mesh size `h`: the largest triangle diameter.
    pub fn h(&self) -> f64 {
        (0..self.num_edges()).map(|e| self.edge_length(e)).fold(0.0, f64::max)
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut m = f64::INFINITY;
        for t in 0..self.num_triangles() {
            let p = self.triangle_points(t);
            for i in 0..3 {
                let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let ang = (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]).abs();
                m = m.min(ang);
            }
        }
        m
    }

    pub fn is_boundary_vertex(&self) -> Vec<bool> {
        let mut on = vec![false; self.num_vertices()];
        for s in &self.boundary_cycle {
            on[s.from] = true;
        }
        on
    }

    /// Affine map data for triangle `t`: origin and Jacobian columns.
    pub fn affine(&self, t: usize) -> Affine {
        let [a, b, c] = self.triangle_points(t);
        Affine::new(a, b, c)
    }

    /// Applies `f` to every vertex; used for rigid motions in tests.
    pub fn map_vertices(&self, f: impl Fn(Point) -> Point) -> TriMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            *v = f(*v);
        }
        m
    }
}

/// Affine map from the reference triangle (0,0), (1,0), (0,1).
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub origin: Point,
    /// `jac[i][j] = d x_i / d xi_j`.
    pub jac: [[f64; 2]; 2],
    /// Inverse transpose, maps reference gradients to physical ones.
    pub inv_t: [[f64; 2]; 2],
    pub det: f64,
}

impl Affine {
    pub fn new(a: Point, b: Point, c: Point) -> Self {
        let jac = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        // (J^{-1})^T
        let inv_t = [
            [jac[1][1] / det, -jac[1][0] / det],
            [-jac[0][1] / det, jac[0][0] / det],
        ];
        Affine { origin: a, jac, inv_t, det }
    }

    pub fn map(&self, xi: Point) -> Point {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn pullback(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        // J^{-1} d, with J^{-1} = inv_t^T
        [
            self.inv_t[0][0] * d[0] + self.inv_t[1][0] * d[1],
            self.inv_t[0][1] * d[0] + self.inv_t[1][1] * d[1],
        ]
    }

    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }

    /// Physical Hessian from the reference one: `G H G^T` with `G = J^{-T}`.
    pub fn hessian(&self, h: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let g = self.inv_t;
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        s += g[i][k] * h[k][l] * g[j][l];
                    }
                }
                out[i][j] = s;
            }
        }
        out
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_labels() -> Vec<(usize, usize, i32)> {
        vec![(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 0, 4)]
    }

    #[test]
    fn unit_square_two_triangles() {
        let nodes = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let m = build_mesh(&nodes, &[[0, 1, 2], [0, 2, 3]], &square_labels()).unwrap();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_edges(), 5);
        assert_eq!(m.num_triangles(), 2);
        assert_eq!(m.num_boundary_edges(), 4);
        assert_eq!(m.num_vertices() + m.num_triangles() - m.num_edges(), 1);
    }

    #[test]
    fn clockwise_triangle_is_reoriented() {
        let nodes = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let a = build_mesh(&nodes, &[[0, 1, 2], [0, 2, 3]], &square_labels()).unwrap();
        let b = build_mesh(&nodes, &[[0, 1, 2], [0, 3, 2]], &square_labels()).unwrap();
        assert_eq!(a.num_edges(), b.num_edges());
        for t in 0..2 {
            assert!(b.area(t) > 0.0);
            let mut x = a.triangles()[t];
            let mut y = b.triangles()[t];
            x.sort();
            y.sort();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn partial_edge_overlap_is_nonconforming() {
        // Second triangle sits on half of the first one's top edge.
        let nodes = [[0.0, 0.0], [2.0, 0.0], [1.0, 1.0], [0.5, 0.5], [0.0, 1.0]];
        let tris = [[0, 1, 2], [0, 3, 4]];
        let labels = [(0, 1, 1), (1, 2, 1), (0, 4, 1), (3, 4, 1), (2, 3, 1)];
        let err = build_mesh(&nodes, &tris, &labels).unwrap_err();
        assert!(matches!(
            err,
            MeshError::NonConformingMesh(_) | MeshError::LabelNotOnBoundary(..)
        ));
        let labels = [(0, 1, 1), (1, 2, 1), (0, 2, 1), (0, 4, 1), (3, 4, 1), (0, 3, 1)];
        let err = build_mesh(&nodes, &tris, &labels).unwrap_err();
        assert!(matches!(err, MeshError::NonConformingMesh(_)), "{err:?}");
    }

    #[test]
    fn rejects_bad_input() {
        let nodes = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let e = build_mesh(&nodes, &[[0, 1, 2], [0, 2, 3]], &square_labels()[..3]).unwrap_err();
        assert_eq!(e, MeshError::UnlabeledBoundaryEdge(0, 3));
        let dup = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [1.0, 1.0]];
        assert_eq!(
            build_mesh(&dup, &[[0, 1, 2]], &[]).unwrap_err(),
            MeshError::DuplicateVertex(2, 3)
        );
        assert!(matches!(
            build_mesh(&nodes, &[[0, 1, 7]], &[]).unwrap_err(),
            MeshError::IndexOutOfRange { index: 7, .. }
        ));
        let flat = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert_eq!(
            build_mesh(&flat, &[[0, 1, 2]], &[]).unwrap_err(),
            MeshError::DegenerateTriangle(0)
        );
        let e = build_mesh(&nodes, &[[0, 1, 2], [0, 2, 3]], &[(0, 2, 9)]).unwrap_err();
        assert_eq!(e, MeshError::LabelNotOnBoundary(0, 2));
    }

    #[test]
    fn boundary_cycle_is_counterclockwise() {
        let m = generate_unit_square(2);
        let signed: f64 = m
            .boundary_cycle()
            .iter()
            .map(|s| {
                let (a, b) = (m.vertices()[s.from], m.vertices()[s.to]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum();
        assert!((0.5 * signed - 1.0).abs() < 1e-14);
        for w in m.boundary_cycle().windows(2) {
            assert_eq!(w[0].to, w[1].from);
        }
    }

    #[test]
    fn affine_roundtrip() {
        let af = Affine::new([0.3, 0.1], [1.2, 0.4], [0.5, 0.9]);
        let x = af.map([0.2, 0.3]);
        let xi = af.pullback(x);
        assert!((xi[0] - 0.2).abs() < 1e-14 && (xi[1] - 0.3).abs() < 1e-14);
    }
}
