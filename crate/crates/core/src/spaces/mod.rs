//! Continuous Lagrange spaces on a [`TriMesh`]: the scalar space of degree `p`
//! vanishing on the essential boundary, and the vector space of degree `p - 1`
//! with clamped and tangential constraints.

mod lagrange;

pub use lagrange::{LagrangeElement, Tabulation};

use crate::mesh::{BoundaryClass, BoundaryPartition, Point, TriMesh, COLLINEAR_TOL};
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_MAX_DEGREE: usize = 8;
/// Highest degree the quadrature tables support for mass-type integrands.
pub const HARD_MAX_DEGREE: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("degree {degree} not supported (allowed {min}..={max})")]
    UnsupportedDegree { degree: usize, min: usize, max: usize },
}

fn check_degree(p: usize, min: usize, max: usize) -> Result<(), SpaceError> {
    if p < min || p > max.min(HARD_MAX_DEGREE) {
        return Err(SpaceError::UnsupportedDegree { degree: p, min, max: max.min(HARD_MAX_DEGREE) });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSite {
    Vertex(usize),
    Edge(usize),
    Interior(usize),
}

/// Global numbering of the degree-`p` Lagrange nodes: vertices, then `p - 1`
/// nodes per edge (ordered from the lower to the higher vertex index), then
/// interior nodes triangle by triangle.
#[derive(Debug, Clone)]
pub struct NodeLayout {
    pub element: LagrangeElement,
    /// `tri_nodes[t * n_local + i]` is the global node of local node `i` of triangle `t`.
    pub tri_nodes: Vec<usize>,
    pub points: Vec<Point>,
    pub sites: Vec<NodeSite>,
}

impl NodeLayout {
    pub fn new(mesh: &TriMesh, p: usize) -> Self {
        let element = LagrangeElement::new(p);
        let nv = mesh.num_vertices();
        let ne = mesh.num_edges();
        let per_edge = p - 1;
        let n_int = element.num_interior();
        let n_nodes = nv + ne * per_edge + mesh.num_triangles() * n_int;
        let nl = element.num_basis();

        let mut points = vec![[0.0; 2]; n_nodes];
        let mut sites = Vec::with_capacity(n_nodes);
        sites.extend((0..nv).map(NodeSite::Vertex));
        for e in 0..ne {
            sites.extend(std::iter::repeat_n(NodeSite::Edge(e), per_edge));
        }
        for t in 0..mesh.num_triangles() {
            sites.extend(std::iter::repeat_n(NodeSite::Interior(t), n_int));
        }

        let ref_nodes = element.reference_nodes();
        let mut tri_nodes = Vec::with_capacity(mesh.num_triangles() * nl);
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let te = mesh.tri_edges()[t];
            let map = mesh.affine(t);
            let start = tri_nodes.len();
            tri_nodes.extend_from_slice(tri);
            for k in 0..3 {
                let a = tri[(k + 1) % 3];
                let e = te[k];
                let forward = mesh.edges()[e].v[0] == a;
                for j in 1..p {
                    let jg = if forward { j } else { p - j };
                    tri_nodes.push(nv + e * per_edge + jg - 1);
                }
            }
            let base = nv + ne * per_edge + t * n_int;
            tri_nodes.extend(base..base + n_int);
            for (i, r) in ref_nodes.iter().enumerate() {
                points[tri_nodes[start + i]] = map.map(*r);
            }
        }
        NodeLayout { element, tri_nodes, points, sites }
    }

    pub fn num_nodes(&self) -> usize {
        self.points.len()
    }

    pub fn num_local(&self) -> usize {
        self.element.num_basis()
    }

    pub fn local_nodes(&self, t: usize) -> &[usize] {
        let nl = self.num_local();
        &self.tri_nodes[t * nl..(t + 1) * nl]
    }
}

/// Boundary class of each vertex's two incident boundary edges, in CCW order
/// (incoming, outgoing), or `None` for interior vertices.
fn vertex_boundary_edges(mesh: &TriMesh) -> Vec<Option<(usize, usize)>> {
    let mut out = vec![None; mesh.num_vertices()];
    let cyc = mesh.boundary_cycle();
    let m = cyc.len();
    for k in 0..m {
        let next = (k + 1) % m;
        out[cyc[k].to] = Some((cyc[k].edge, cyc[next].edge));
    }
    out
}

/// Counterclockwise unit tangent and outward unit normal of a boundary edge.
fn boundary_frame(mesh: &TriMesh, edge: usize) -> ([f64; 2], [f64; 2]) {
    let seg = mesh
        .boundary_cycle()
        .iter()
        .find(|s| s.edge == edge)
        .expect("edge on boundary cycle");
    let (a, b) = (mesh.vertices()[seg.from], mesh.vertices()[seg.to]);
    let d = [b[0] - a[0], b[1] - a[1]];
    let l = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let t = [d[0] / l, d[1] / l];
    (t, [t[1], -t[0]])
}

#[derive(Debug, Clone)]
pub struct ScalarSpace {
    mesh: Arc<TriMesh>,
    layout: NodeLayout,
    node_dof: Vec<Option<usize>>,
    ndof: usize,
}

pub fn build_scalar_space(
    mesh: &Arc<TriMesh>,
    p: usize,
    partition: &BoundaryPartition,
) -> Result<ScalarSpace, SpaceError> {
    build_scalar_space_with_max(mesh, p, partition, DEFAULT_MAX_DEGREE)
}

pub fn build_scalar_space_with_max(
    mesh: &Arc<TriMesh>,
    p: usize,
    partition: &BoundaryPartition,
    max_degree: usize,
) -> Result<ScalarSpace, SpaceError> {
    check_degree(p, 1, max_degree)?;
    let layout = NodeLayout::new(mesh, p);
    let essential = |e: usize| partition.class_of(e).is_some_and(|c| c.is_essential());
    let vb = vertex_boundary_edges(mesh);
    let mut node_dof = Vec::with_capacity(layout.num_nodes());
    let mut ndof = 0;
    for site in &layout.sites {
        let fixed = match *site {
            NodeSite::Vertex(v) => vb[v].is_some_and(|(a, b)| essential(a) || essential(b)),
            NodeSite::Edge(e) => essential(e),
            NodeSite::Interior(_) => false,
        };
        if fixed {
            node_dof.push(None);
        } else {
            node_dof.push(Some(ndof));
            ndof += 1;
        }
    }
    Ok(ScalarSpace { mesh: mesh.clone(), layout, node_dof, ndof })
}

impl ScalarSpace {
    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }
    pub fn degree(&self) -> usize {
        self.layout.element.degree()
    }
    pub fn layout(&self) -> &NodeLayout {
        &self.layout
    }
    pub fn element(&self) -> &LagrangeElement {
        &self.layout.element
    }
    pub fn dim(&self) -> usize {
        self.ndof
    }
    pub fn node_dof(&self, node: usize) -> Option<usize> {
        self.node_dof[node]
    }

    /// Free DOF (if any) of each local node of triangle `t`.
    pub fn local_dofs(&self, t: usize) -> Vec<Option<usize>> {
        self.layout.local_nodes(t).iter().map(|&n| self.node_dof[n]).collect()
    }

    pub fn tabulate_basis(&self, points: &[Point]) -> Tabulation {
        self.layout.element.tabulate(points)
    }

    /// Nodal interpolant; nodes on the Dirichlet set are zero by construction.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        let mut c = vec![0.0; self.ndof];
        for (n, d) in self.node_dof.iter().enumerate() {
            if let Some(d) = d {
                c[*d] = f(self.layout.points[n]);
            }
        }
        c
    }

    /// Local coefficients of triangle `t` (zeros at constrained nodes).
    pub fn local_coefficients(&self, t: usize, coeffs: &[f64]) -> Vec<f64> {
        self.layout
            .local_nodes(t)
            .iter()
            .map(|&n| self.node_dof[n].map_or(0.0, |d| coeffs[d]))
            .collect()
    }
}

/// How the Cartesian components of a vector node relate to the free DOFs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeConstraint {
    /// Both components free: `theta = (d0, d1)`.
    Free { dofs: [usize; 2] },
    /// Tangential component zero: `theta = d * normal`.
    Normal { dof: usize, tangent: [f64; 2], normal: [f64; 2] },
    Fixed,
}

#[derive(Debug, Clone)]
pub struct VectorSpace {
    mesh: Arc<TriMesh>,
    partition: BoundaryPartition,
    layout: NodeLayout,
    constraints: Vec<NodeConstraint>,
    ndof: usize,
}

pub fn build_vector_space(
    mesh: &Arc<TriMesh>,
    q: usize,
    partition: &BoundaryPartition,
) -> Result<VectorSpace, SpaceError> {
    build_vector_space_with_max(mesh, q, partition, DEFAULT_MAX_DEGREE - 1)
}

pub fn build_vector_space_with_max(
    mesh: &Arc<TriMesh>,
    q: usize,
    partition: &BoundaryPartition,
    max_degree: usize,
) -> Result<VectorSpace, SpaceError> {
    check_degree(q, 1, max_degree)?;
    let layout = NodeLayout::new(mesh, q);
    let vb = vertex_boundary_edges(mesh);

    enum Kind {
        Free,
        Normal(usize),
        Fixed,
    }
    let edge_kind = |e: usize| match partition.class_of(e) {
        Some(BoundaryClass::Clamped) => Kind::Fixed,
        Some(BoundaryClass::SimplySupported) => Kind::Normal(e),
        _ => Kind::Free,
    };
    let vertex_kind = |v: usize| {
        let Some((e_in, e_out)) = vb[v] else { return Kind::Free };
        use BoundaryClass::*;
        match (partition.class_of(e_in).unwrap(), partition.class_of(e_out).unwrap()) {
            (Clamped, _) | (_, Clamped) => Kind::Fixed,
            (SimplySupported, SimplySupported) => {
                let (t1, _) = boundary_frame(mesh, e_in);
                let (t2, _) = boundary_frame(mesh, e_out);
                if (t1[0] * t2[1] - t1[1] * t2[0]).abs() < COLLINEAR_TOL {
                    Kind::Normal(e_in)
                } else {
                    Kind::Fixed
                }
            }
            (SimplySupported, Free) => Kind::Normal(e_in),
            (Free, SimplySupported) => Kind::Normal(e_out),
            (Free, Free) => Kind::Free,
        }
    };

    let mut constraints = Vec::with_capacity(layout.num_nodes());
    let mut ndof = 0;
    for site in &layout.sites {
        let kind = match *site {
            NodeSite::Vertex(v) => vertex_kind(v),
            NodeSite::Edge(e) => edge_kind(e),
            NodeSite::Interior(_) => Kind::Free,
        };
        constraints.push(match kind {
            Kind::Free => {
                ndof += 2;
                NodeConstraint::Free { dofs: [ndof - 2, ndof - 1] }
            }
            Kind::Normal(e) => {
                let (tangent, normal) = boundary_frame(mesh, e);
                ndof += 1;
                NodeConstraint::Normal { dof: ndof - 1, tangent, normal }
            }
            Kind::Fixed => NodeConstraint::Fixed,
        });
    }
    Ok(VectorSpace { mesh: mesh.clone(), partition: partition.clone(), layout, constraints, ndof })
}

impl VectorSpace {
    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }
    pub fn partition(&self) -> &BoundaryPartition {
        &self.partition
    }
    pub fn degree(&self) -> usize {
        self.layout.element.degree()
    }
    pub fn layout(&self) -> &NodeLayout {
        &self.layout
    }
    pub fn element(&self) -> &LagrangeElement {
        &self.layout.element
    }
    pub fn dim(&self) -> usize {
        self.ndof
    }
    pub fn constraint(&self, node: usize) -> NodeConstraint {
        self.constraints[node]
    }

    /// DOF contributions to Cartesian component `c` of a node: `theta_c = coeff * x[dof]`.
    pub fn component(&self, node: usize, c: usize) -> Option<(usize, f64)> {
        match self.constraints[node] {
            NodeConstraint::Free { dofs } => Some((dofs[c], 1.0)),
            NodeConstraint::Normal { dof, normal, .. } if normal[c] != 0.0 => Some((dof, normal[c])),
            _ => None,
        }
    }

    /// For each local node of triangle `t` and component, the DOF map entry.
    /// Index `2 * i + c`.
    pub fn local_dofs(&self, t: usize) -> Vec<Option<(usize, f64)>> {
        let mut out = Vec::with_capacity(2 * self.layout.num_local());
        for &n in self.layout.local_nodes(t) {
            out.push(self.component(n, 0));
            out.push(self.component(n, 1));
        }
        out
    }

    pub fn tabulate_basis(&self, points: &[Point]) -> Tabulation {
        self.layout.element.tabulate(points)
    }

    /// Nodal interpolant. Constrained components take their constrained value:
    /// zero at fixed nodes, and only the normal part at tangential nodes.
    pub fn interpolate(&self, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
        let mut c = vec![0.0; self.ndof];
        for (n, con) in self.constraints.iter().enumerate() {
            let v = || f(self.layout.points[n]);
            match *con {
                NodeConstraint::Free { dofs } => {
                    let v = v();
                    c[dofs[0]] = v[0];
                    c[dofs[1]] = v[1];
                }
                NodeConstraint::Normal { dof, normal, .. } => {
                    let v = v();
                    c[dof] = v[0] * normal[0] + v[1] * normal[1];
                }
                NodeConstraint::Fixed => {}
            }
        }
        c
    }

    /// Cartesian nodal values of a coefficient vector.
    pub fn node_values(&self, coeffs: &[f64]) -> Vec<[f64; 2]> {
        (0..self.layout.num_nodes())
            .map(|n| {
                let get = |c| self.component(n, c).map_or(0.0, |(d, w)| w * coeffs[d]);
                [get(0), get(1)]
            })
            .collect()
    }

    /// Local Cartesian coefficients of triangle `t`, index `2 * i + c`.
    pub fn local_coefficients(&self, t: usize, coeffs: &[f64]) -> Vec<f64> {
        self.local_dofs(t).iter().map(|e| e.map_or(0.0, |(d, w)| w * coeffs[d])).collect()
    }
}

/// Number of free DOFs of either space.
pub trait SpaceDim {
    fn space_dimension(&self) -> usize;
}

impl SpaceDim for ScalarSpace {
    fn space_dimension(&self) -> usize {
        self.ndof
    }
}

impl SpaceDim for VectorSpace {
    fn space_dimension(&self) -> usize {
        self.ndof
    }
}

pub fn space_dimension(space: &impl SpaceDim) -> usize {
    space.space_dimension()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{classify_boundary, generate_lshape, generate_unit_square, refine_uniform};
    use std::collections::BTreeMap;
    use BoundaryClass::*;

    fn square(n: usize, classes: [BoundaryClass; 4]) -> (Arc<TriMesh>, BoundaryPartition) {
        let m = generate_unit_square(n);
        let rules: BTreeMap<i32, BoundaryClass> = (1..=4).zip(classes).collect();
        let part = classify_boundary(&m, &rules).unwrap();
        (Arc::new(m), part)
    }

    #[test]
    fn scalar_dimensions() {
        let (m, part) = square(1, [SimplySupported; 4]);
        assert_eq!(build_scalar_space(&m, 1, &part).unwrap().dim(), 0);
        assert_eq!(build_scalar_space(&m, 3, &part).unwrap().dim(), 4);
        let s3 = build_scalar_space(&m, 3, &part).unwrap();
        assert_eq!(s3.layout().num_nodes(), 16);
        let (m2, part2) = square(2, [SimplySupported; 4]);
        assert_eq!(build_scalar_space(&m2, 1, &part2).unwrap().dim(), 1);
        assert!(matches!(
            build_scalar_space(&m, 9, &part),
            Err(SpaceError::UnsupportedDegree { degree: 9, .. })
        ));
        assert!(build_scalar_space_with_max(&m, 9, &part, 10).is_ok());
    }

    #[test]
    fn scalar_free_boundary_keeps_nodes() {
        let (m, part) = square(2, [Free, Clamped, Free, Clamped]);
        let s = build_scalar_space(&m, 2, &part).unwrap();
        // 25 nodes; x = 0 and x = 1 each carry 5
        assert_eq!(s.dim(), 25 - 10);
    }

    #[test]
    fn shared_nodes_have_same_location() {
        let m = Arc::new(generate_lshape(1));
        let rules: BTreeMap<i32, _> = (1..=8).map(|l| (l, Clamped)).collect();
        let part = classify_boundary(&m, &rules).unwrap();
        for p in 1..=6 {
            let s = build_scalar_space(&m, p, &part).unwrap();
            let lay = s.layout();
            for t in 0..m.num_triangles() {
                let map = m.affine(t);
                for (i, r) in lay.element.reference_nodes().iter().enumerate() {
                    let x = map.map(*r);
                    let g = lay.points[lay.local_nodes(t)[i]];
                    assert!((x[0] - g[0]).abs() < 1e-14 && (x[1] - g[1]).abs() < 1e-14);
                }
            }
            let expected = m.num_vertices() + m.num_edges() * (p - 1) + m.num_triangles() * lay.element.num_interior();
            assert_eq!(lay.num_nodes(), expected);
        }
    }

    #[test]
    fn vector_clamped_everywhere() {
        let (m, part) = square(2, [Clamped; 4]);
        let v = build_vector_space(&m, 2, &part).unwrap();
        // interior nodes: 1 vertex + 8 interior edges' midpoints
        let interior = 1 + (m.num_edges() - m.num_boundary_edges());
        assert_eq!(v.dim(), 2 * interior);
    }

    #[test]
    fn vector_simply_supported_frames() {
        let (m, part) = square(2, [SimplySupported; 4]);
        let v = build_vector_space(&m, 2, &part).unwrap();
        for (n, site) in v.layout().sites.iter().enumerate() {
            let x = v.layout().points[n];
            match v.constraint(n) {
                NodeConstraint::Normal { tangent, normal, .. } => {
                    let dot = tangent[0] * normal[0] + tangent[1] * normal[1];
                    assert!(dot.abs() < 1e-14);
                    assert!((tangent[0].hypot(tangent[1]) - 1.0).abs() < 1e-14);
                    if x[1] == 0.0 {
                        // bottom edge: theta_1 constrained, theta_2 free
                        assert_eq!(tangent, [1.0, 0.0]);
                        assert!(v.component(n, 0).is_none());
                        assert!(v.component(n, 1).is_some());
                    }
                }
                NodeConstraint::Fixed => {
                    // only the four corners
                    assert!(matches!(site, NodeSite::Vertex(_)));
                    assert!((x[0] == 0.0 || x[0] == 1.0) && (x[1] == 0.0 || x[1] == 1.0));
                }
                NodeConstraint::Free { .. } => {
                    assert!(x[0] > 0.0 && x[0] < 1.0 && x[1] > 0.0 && x[1] < 1.0)
                }
            }
        }
        // Corner: the two tangential constraints have rank 2.
        let t1 = [1.0, 0.0];
        let t2 = [0.0, 1.0];
        assert_ne!(t1[0] * t2[1] - t1[1] * t2[0], 0.0);
    }

    #[test]
    fn vector_dimension_counting() {
        let (m, part) = square(2, [Free, SimplySupported, Free, Clamped]);
        let free = build_vector_space(&m, 3, &part).unwrap();
        let nodes = free.layout().num_nodes();
        let mut expected = 2 * nodes;
        for n in 0..nodes {
            expected -= match free.constraint(n) {
                NodeConstraint::Free { .. } => 0,
                NodeConstraint::Normal { .. } => 1,
                NodeConstraint::Fixed => 2,
            };
        }
        assert_eq!(space_dimension(&free), expected);
        // S-F corners at (1,0) and (1,1) keep the normal component
        let corner = (0..nodes).find(|&n| free.layout().points[n] == [1.0, 0.0]).unwrap();
        assert!(matches!(free.constraint(corner), NodeConstraint::Normal { .. }));
        let clamped_corner = (0..nodes).find(|&n| free.layout().points[n] == [0.0, 1.0]).unwrap();
        assert_eq!(free.constraint(clamped_corner), NodeConstraint::Fixed);
        let (m2, part2) = square(3, [Free, SimplySupported, Free, Clamped]);
        assert!(build_vector_space(&m2, 3, &part2).unwrap().dim() > free.dim());
        let r = Arc::new(refine_uniform(&m));
        let part_r = classify_boundary(&r, &(1..=4).zip([Clamped; 4]).collect()).unwrap();
        assert!(build_scalar_space(&r, 2, &part_r).unwrap().dim() > 0);
    }

    #[test]
    fn interpolation() {
        let (m, part) = square(2, [Free, Free, Free, Clamped]);
        let s = build_scalar_space(&m, 3, &part).unwrap();
        assert!(s.interpolate(|_| 0.0).iter().all(|&v| v == 0.0));
        let c = s.interpolate(|x| x[0]);
        for n in 0..s.layout().num_nodes() {
            if s.layout().points[n][0] == 0.0 {
                assert!(s.node_dof(n).is_none());
            } else {
                assert_eq!(c[s.node_dof(n).unwrap()], s.layout().points[n][0]);
            }
        }
        let (m, part) = square(1, [SimplySupported; 4]);
        let v = build_vector_space(&m, 2, &part).unwrap();
        let c = v.interpolate(|x| [1.0 + x[0], 2.0 - x[1]]);
        for (n, val) in v.node_values(&c).iter().enumerate() {
            if let NodeConstraint::Normal { tangent, .. } = v.constraint(n) {
                assert!((val[0] * tangent[0] + val[1] * tangent[1]).abs() == 0.0);
            }
            if v.constraint(n) == NodeConstraint::Fixed {
                assert_eq!(*val, [0.0, 0.0]);
            }
        }
    }
}
