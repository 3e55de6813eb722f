//! Plain-text mesh format.
//!
//! ```text
//! V T B
//! x y          (V lines)
//! i j k        (T lines, 0-based vertex indices)
//! i j label    (B lines, one per boundary edge)
//! ```
//!
//! Blank lines and anything after `#` are ignored.

use super::{build_mesh, MeshError, Point, TriMesh};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

pub fn read_mesh(path: &Path) -> Result<TriMesh, MeshError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| MeshError::Parse(format!("{}: {e}", path.display())))?;
    read_mesh_str(&text)
}

pub fn read_mesh_str(text: &str) -> Result<TriMesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut next_row = |what: &str, n: usize| -> Result<(usize, Vec<&str>), MeshError> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| MeshError::Parse(format!("unexpected end of file, expected {what}")))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != n {
            return Err(MeshError::Parse(format!("line {no}: expected {n} fields for {what}")));
        }
        Ok((no, fields))
    };

    fn field<T: FromStr>(no: usize, s: &str) -> Result<T, MeshError> {
        s.parse().map_err(|_| MeshError::Parse(format!("line {no}: cannot parse `{s}`")))
    }

    let (no, header) = next_row("header `V T B`", 3)?;
    let nv: usize = field(no, header[0])?;
    let nt: usize = field(no, header[1])?;
    let nb: usize = field(no, header[2])?;

    let mut nodes: Vec<Point> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (no, f) = next_row("vertex", 2)?;
        nodes.push([field(no, f[0])?, field(no, f[1])?]);
    }
    let mut tris = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (no, f) = next_row("triangle", 3)?;
        tris.push([field(no, f[0])?, field(no, f[1])?, field(no, f[2])?]);
    }
    let mut labels = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (no, f) = next_row("boundary edge", 3)?;
        labels.push((field(no, f[0])?, field(no, f[1])?, field(no, f[2])?));
    }
    if let Some((no, _)) = lines.next() {
        return Err(MeshError::Parse(format!("line {no}: trailing data")));
    }
    build_mesh(&nodes, &tris, &labels)
}

pub fn write_mesh_string(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {}",
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.num_boundary_edges()
    );
    for p in mesh.vertices() {
        let _ = writeln!(out, "{:.17e} {:.17e}", p[0], p[1]);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
    }
    for s in mesh.boundary_cycle() {
        let _ = writeln!(out, "{} {} {}", s.from, s.to, s.label);
    }
    out
}

pub fn write_mesh(mesh: &TriMesh, path: &Path) -> Result<(), MeshError> {
    std::fs::write(path, write_mesh_string(mesh))
        .map_err(|e| MeshError::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_lshape;

    #[test]
    fn roundtrip() {
        let m = generate_lshape(1);
        let back = read_mesh_str(&write_mesh_string(&m)).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.boundary_cycle(), m.boundary_cycle());
    }

    #[test]
    fn parse_errors() {
        let bad = "4 2 4\n0 0\n1 0\n1 1\n";
        assert!(matches!(read_mesh_str(bad), Err(MeshError::Parse(_))));
        let bad = "1 0 0\n0 x\n";
        assert!(matches!(read_mesh_str(bad), Err(MeshError::Parse(_))));
        let ok = "# square\n4 2 4\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n";
        assert_eq!(read_mesh_str(ok).unwrap().num_triangles(), 2);
        let missing = "4 2 3\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 1 1\n1 2 1\n2 3 1\n";
        assert_eq!(read_mesh_str(missing).unwrap_err(), MeshError::UnlabeledBoundaryEdge(0, 3));
    }
}
