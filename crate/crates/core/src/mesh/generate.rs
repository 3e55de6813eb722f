//! Structured mesh generators and refinement.

use super::{build_mesh, Point, TriMesh};

/// Unit square `(0,1)^2`: two triangles for `n = 1`, then `n - 1` uniform
/// refinements. Sides are labelled bottom = 1, right = 2, top = 3, left = 4.
pub fn generate_unit_square(n: usize) -> TriMesh {
    assert!(n >= 1, "unit square level must be at least 1");
    let nodes = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let tris = [[0, 1, 2], [0, 2, 3]];
    let labels = [(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 0, 4)];
    let mut mesh = build_mesh(&nodes, &tris, &labels).expect("unit square is valid");
    for _ in 1..n {
        mesh = refine_uniform(&mesh);
    }
    mesh
}

/// L-shaped domain `(0,1)^2 \ [0.5,1]^2` built from three half-unit squares,
/// each cut along its lower-left to upper-right diagonal, refined `n` times.
///
/// Boundary labels 1..=8 run counterclockwise from the origin; the bottom and
/// left sides are split at their midpoints.
pub fn generate_lshape(n: usize) -> TriMesh {
    let nodes: Vec<Point> = vec![
        [0.0, 0.0],
        [0.5, 0.0],
        [1.0, 0.0],
        [0.0, 0.5],
        [0.5, 0.5],
        [1.0, 0.5],
        [0.0, 1.0],
        [0.5, 1.0],
    ];
    let tris = [[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4], [3, 4, 7], [3, 7, 6]];
    let labels = [
        (0, 1, 1),
        (1, 2, 2),
        (2, 5, 3),
        (5, 4, 4),
        (4, 7, 5),
        (7, 6, 6),
        (6, 3, 7),
        (3, 0, 8),
    ];
    let mut mesh = build_mesh(&nodes, &tris, &labels).expect("L-shape is valid");
    for _ in 0..n {
        mesh = refine_uniform(&mesh);
    }
    mesh
}

/// Splits every triangle into four congruent children through its edge midpoints.
pub fn refine_uniform(mesh: &TriMesh) -> TriMesh {
    let mut nodes = mesh.vertices().to_vec();
    let nv = nodes.len();
    // Midpoint of edge e gets index nv + e.
    for e in mesh.edges() {
        let (a, b) = (nodes[e.v[0]], nodes[e.v[1]]);
        nodes.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
    }
    let mut tris = Vec::with_capacity(4 * mesh.num_triangles());
    for (t, &[a, b, c]) in mesh.triangles().iter().enumerate() {
        let te = mesh.tri_edges()[t];
        // Edge opposite a is (b, c), and so on.
        let (mbc, mca, mab) = (nv + te[0], nv + te[1], nv + te[2]);
        tris.push([a, mab, mca]);
        tris.push([mab, b, mbc]);
        tris.push([mca, mbc, c]);
        tris.push([mab, mbc, mca]);
    }
    let mut labels = Vec::with_capacity(2 * mesh.num_boundary_edges());
    for seg in mesh.boundary_cycle() {
        let mid = nv + seg.edge;
        labels.push((seg.from, mid, seg.label));
        labels.push((mid, seg.to, seg.label));
    }
    build_mesh(&nodes, &tris, &labels).expect("uniform refinement of a valid mesh")
}

/// Splits every triangle into three by joining its barycenter to its vertices.
pub fn refine_barycentric(mesh: &TriMesh) -> TriMesh {
    let mut nodes = mesh.vertices().to_vec();
    let mut tris = Vec::with_capacity(3 * mesh.num_triangles());
    for &[a, b, c] in mesh.triangles() {
        let (pa, pb, pc) = (nodes[a], nodes[b], nodes[c]);
        nodes.push([(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0]);
        let g = nodes.len() - 1;
        tris.push([a, b, g]);
        tris.push([b, c, g]);
        tris.push([c, a, g]);
    }
    let labels: Vec<_> = mesh.boundary_cycle().iter().map(|s| (s.from, s.to, s.label)).collect();
    build_mesh(&nodes, &tris, &labels).expect("barycentric refinement of a valid mesh")
}

/// Square cut by both diagonals: four triangles around a center vertex.
pub fn criss_cross_square(center: Point) -> TriMesh {
    let nodes = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], center];
    let tris = [[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
    let labels = [(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 0, 4)];
    build_mesh(&nodes, &tris, &labels).expect("criss-cross square is valid")
}
