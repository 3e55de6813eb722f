//! Boundary partition into clamped / simply supported / free parts, and the
//! vertex-patch quantities that govern the rot operator's range: singular
//! vertices and the mesh quality measure `xi`.

use super::{MeshError, Point, TriMesh};
use std::collections::{BTreeMap, BTreeSet};

/// Two directions lie on one line when `|sin(angle)|` is below this.
pub const COLLINEAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryClass {
    Clamped,
    SimplySupported,
    Free,
}

impl BoundaryClass {
    /// Part of `Gamma_cs`, where the displacement vanishes.
    pub fn is_essential(self) -> bool {
        !matches!(self, BoundaryClass::Free)
    }
}

impl std::str::FromStr for BoundaryClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "clamped" | "c" => Ok(BoundaryClass::Clamped),
            "simply_supported" | "simply-supported" | "s" => Ok(BoundaryClass::SimplySupported),
            "free" | "f" => Ok(BoundaryClass::Free),
            other => Err(format!("unknown boundary class `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainEdge {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
}

/// Connected run of boundary edges, in counterclockwise order.
pub type Chain = Vec<ChainEdge>;

#[derive(Debug, Clone)]
pub struct BoundaryPartition {
    /// Indexed by mesh edge; `None` for interior edges.
    pub edge_class: Vec<Option<BoundaryClass>>,
    /// `Gamma_cs^(i)`, i = 1..N (0-based here).
    pub cs_components: Vec<Chain>,
    /// `Gamma_f^(i)` lies between `cs_components[i]` and `cs_components[i + 1]`.
    /// Empty when there are no free edges.
    pub f_components: Vec<Chain>,
}

impl BoundaryPartition {
    /// Number of connected components of `Gamma_cs`.
    pub fn n(&self) -> usize {
        self.cs_components.len()
    }

    pub fn class_of(&self, edge: usize) -> Option<BoundaryClass> {
        self.edge_class[edge]
    }

    pub fn has_free(&self) -> bool {
        !self.f_components.is_empty()
    }

    /// Free components that carry a circulation constraint (all but the last).
    pub fn constrained_free_components(&self) -> &[Chain] {
        let n = self.f_components.len();
        &self.f_components[..n.saturating_sub(1)]
    }
}

/// Assigns a class to every boundary edge and splits the boundary into its
/// `Gamma_cs` / `Gamma_f` components.
///
/// The first essential component is the one containing the lexicographically
/// smallest boundary vertex (smallest x, then y). If that vertex touches only
/// free edges, the first essential component met counterclockwise from it is used.
pub fn classify_boundary(
    mesh: &TriMesh,
    rules: &BTreeMap<i32, BoundaryClass>,
) -> Result<BoundaryPartition, MeshError> {
    let cycle = mesh.boundary_cycle();
    let mut edge_class = vec![None; mesh.num_edges()];
    let mut classes = Vec::with_capacity(cycle.len());
    for seg in cycle {
        let c = *rules.get(&seg.label).ok_or(MeshError::UnmappedLabel(seg.label))?;
        edge_class[seg.edge] = Some(c);
        classes.push(c);
    }
    if !classes.iter().any(|c| c.is_essential()) {
        return Err(MeshError::EmptyEssentialBoundary);
    }

    let m = cycle.len();
    let as_chain_edge = |k: usize| ChainEdge { edge: cycle[k].edge, from: cycle[k].from, to: cycle[k].to };

    if classes.iter().all(|c| c.is_essential()) {
        let anchor = lexicographic_min_position(mesh, (0..m).map(|k| cycle[k].from));
        let chain: Chain = (0..m).map(|i| as_chain_edge((anchor + i) % m)).collect();
        return Ok(BoundaryPartition { edge_class, cs_components: vec![chain], f_components: vec![] });
    }

    // Rotate so the walk starts at the first edge of an essential run.
    let start = (0..m)
        .find(|&k| classes[k].is_essential() && !classes[(k + m - 1) % m].is_essential())
        .expect("mixed boundary has an essential run start");
    let mut cs: Vec<Chain> = Vec::new();
    let mut fs: Vec<Chain> = Vec::new();
    for i in 0..m {
        let k = (start + i) % m;
        let essential = classes[k].is_essential();
        let prev_essential = i > 0 && classes[(k + m - 1) % m].is_essential();
        let target = if essential { &mut cs } else { &mut fs };
        if i == 0 || essential != prev_essential {
            target.push(Vec::new());
        }
        target.last_mut().unwrap().push(as_chain_edge(k));
    }
    debug_assert_eq!(cs.len(), fs.len());

    let vmin = lexicographic_min(mesh, cycle.iter().map(|s| s.from));
    let anchor = cs
        .iter()
        .position(|chain| chain.iter().any(|e| e.from == vmin || e.to == vmin))
        .unwrap_or_else(|| {
            // vmin sits strictly inside a free run; take the next essential run.
            let f = fs
                .iter()
                .position(|chain| chain.iter().any(|e| e.from == vmin || e.to == vmin))
                .unwrap();
            (f + 1) % cs.len()
        });
    cs.rotate_left(anchor);
    fs.rotate_left(anchor);
    Ok(BoundaryPartition { edge_class, cs_components: cs, f_components: fs })
}

fn lexicographic_min(mesh: &TriMesh, verts: impl Iterator<Item = usize>) -> usize {
    let p = mesh.vertices();
    verts
        .min_by(|&a, &b| p[a][0].total_cmp(&p[b][0]).then(p[a][1].total_cmp(&p[b][1])))
        .unwrap()
}

fn lexicographic_min_position(mesh: &TriMesh, verts: impl Iterator<Item = usize> + Clone) -> usize {
    let v = lexicographic_min(mesh, verts.clone());
    verts.into_iter().position(|u| u == v).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexLocation {
    Interior,
    /// On the boundary with both incident boundary edges clamped.
    ClampedInterior,
    Other,
}

/// Triangles around a vertex, ordered counterclockwise. For a boundary vertex
/// the first triangle touches the outgoing boundary edge and the last touches
/// the incoming one.
#[derive(Debug, Clone)]
pub struct VertexStar {
    pub vertex: usize,
    pub triangles: Vec<usize>,
    pub angles: Vec<f64>,
    pub on_boundary: bool,
    pub location: VertexLocation,
    /// Unit directions of every mesh edge incident to the vertex.
    pub edge_directions: Vec<Point>,
}

fn angle_between(u: Point, v: Point) -> f64 {
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    cross.atan2(dot)
}

pub fn vertex_stars(mesh: &TriMesh, partition: &BoundaryPartition) -> Vec<VertexStar> {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); mesh.num_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for &v in tri {
            incident[v].push(t);
        }
    }
    let on_boundary = mesh.is_boundary_vertex();
    let mut boundary_edges_at: Vec<Vec<usize>> = vec![Vec::new(); mesh.num_vertices()];
    for seg in mesh.boundary_cycle() {
        boundary_edges_at[seg.from].push(seg.edge);
        boundary_edges_at[seg.to].push(seg.edge);
    }
    (0..mesh.num_vertices())
        .map(|a| {
            build_star(mesh, partition, a, &incident[a], on_boundary[a], &boundary_edges_at[a])
        })
        .collect()
}

pub fn vertex_star(mesh: &TriMesh, partition: &BoundaryPartition, vertex: usize) -> VertexStar {
    vertex_stars(mesh, partition).swap_remove(vertex)
}

fn build_star(
    mesh: &TriMesh,
    partition: &BoundaryPartition,
    a: usize,
    tris: &[usize],
    on_boundary: bool,
    boundary_edges: &[usize],
) -> VertexStar {
    let p = mesh.vertices();
    // For each triangle, the other two vertices in counterclockwise order.
    let spans: Vec<(usize, usize, usize)> = tris
        .iter()
        .map(|&t| {
            let tri = mesh.triangles()[t];
            let i = tri.iter().position(|&v| v == a).unwrap();
            (t, tri[(i + 1) % 3], tri[(i + 2) % 3])
        })
        .collect();
    let first = if on_boundary {
        spans.iter().position(|s| !spans.iter().any(|o| o.2 == s.1)).unwrap_or(0)
    } else {
        0
    };
    let mut ordered = vec![spans[first]];
    while ordered.len() < spans.len() {
        let last = ordered.last().unwrap().2;
        match spans.iter().find(|s| s.1 == last) {
            Some(&s) if s.0 != ordered[0].0 => ordered.push(s),
            _ => break,
        }
    }
    let dir = |v: usize| {
        let d = [p[v][0] - p[a][0], p[v][1] - p[a][1]];
        let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
        [d[0] / n, d[1] / n]
    };
    let angles = ordered.iter().map(|&(_, u, w)| angle_between(dir(u), dir(w))).collect();

    let mut nbrs: BTreeSet<usize> = BTreeSet::new();
    for &(_, u, w) in &ordered {
        nbrs.insert(u);
        nbrs.insert(w);
    }
    let edge_directions = nbrs.into_iter().map(dir).collect();

    let location = if !on_boundary {
        VertexLocation::Interior
    } else if !boundary_edges.is_empty()
        && boundary_edges
            .iter()
            .all(|&e| partition.class_of(e) == Some(BoundaryClass::Clamped))
    {
        VertexLocation::ClampedInterior
    } else {
        VertexLocation::Other
    };

    VertexStar {
        vertex: a,
        triangles: ordered.iter().map(|s| s.0).collect(),
        angles,
        on_boundary,
        location,
        edge_directions,
    }
}

/// Number of distinct lines through the vertex spanned by its edges.
fn count_lines(dirs: &[Point]) -> usize {
    let mut reps: Vec<Point> = Vec::new();
    for d in dirs {
        if !reps.iter().any(|r| (r[0] * d[1] - r[1] * d[0]).abs() < COLLINEAR_TOL) {
            reps.push(*d);
        }
    }
    reps.len()
}

impl VertexStar {
    /// Candidate for the singular set: interior vertex, or vertex interior to `Gamma_c`.
    pub fn is_candidate(&self) -> bool {
        self.location != VertexLocation::Other
    }

    pub fn is_singular(&self) -> bool {
        self.is_candidate() && count_lines(&self.edge_directions) == 2
    }

    /// Sum of `|sin(theta_i + theta_{i+1})|` over the patch, cyclic for
    /// interior vertices. Terms below [`COLLINEAR_TOL`] count as zero.
    pub fn xi(&self) -> f64 {
        let m = self.angles.len();
        let terms = if self.on_boundary { m.saturating_sub(1) } else { m };
        (0..terms)
            .map(|i| {
                let s = (self.angles[i] + self.angles[(i + 1) % m]).sin().abs();
                if s < COLLINEAR_TOL {
                    0.0
                } else {
                    s
                }
            })
            .sum()
    }
}

/// Vertices in the interior of the domain or of `Gamma_c` whose incident edges
/// lie on exactly two lines.
pub fn singular_vertices(mesh: &TriMesh, partition: &BoundaryPartition) -> BTreeSet<usize> {
    vertex_stars(mesh, partition)
        .iter()
        .filter(|s| s.is_singular())
        .map(|s| s.vertex)
        .collect()
}

/// Minimum of `xi(a)` over non-singular candidate vertices; `+inf` when there are none.
pub fn mesh_xi(mesh: &TriMesh, partition: &BoundaryPartition) -> f64 {
    vertex_stars(mesh, partition)
        .iter()
        .filter(|s| s.is_candidate() && !s.is_singular())
        .map(|s| s.xi())
        .fold(f64::INFINITY, f64::min)
}
