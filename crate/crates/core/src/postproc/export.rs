//! Sampled field output as CSV and legacy ASCII VTK.

use super::moments::{MomentField, VonMisesField};
use super::PostprocError;
use crate::assembly::{scalar_on_element, vector_on_element};
use crate::mesh::{Point, TriMesh};
use crate::spaces::{ScalarSpace, VectorSpace};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

/// A piecewise polynomial field that can be evaluated inside each triangle.
pub trait ElementField {
    fn mesh(&self) -> &Arc<TriMesh>;
    /// Polynomial degree on each element, used as the sampling resolution.
    fn degree(&self) -> usize;
    fn names(&self) -> Vec<String>;
    fn eval(&self, t: usize, xi: Point) -> Vec<f64>;
}

pub struct ScalarField<'a> {
    pub space: &'a ScalarSpace,
    pub coeffs: &'a [f64],
    pub name: &'a str,
}

impl ElementField for ScalarField<'_> {
    fn mesh(&self) -> &Arc<TriMesh> {
        self.space.mesh()
    }
    fn degree(&self) -> usize {
        self.space.degree()
    }
    fn names(&self) -> Vec<String> {
        vec![self.name.to_string()]
    }
    fn eval(&self, t: usize, xi: Point) -> Vec<f64> {
        vec![scalar_on_element(self.space, t, self.coeffs, xi).value]
    }
}

pub struct VectorField<'a> {
    pub space: &'a VectorSpace,
    pub coeffs: &'a [f64],
    pub name: &'a str,
}

impl ElementField for VectorField<'_> {
    fn mesh(&self) -> &Arc<TriMesh> {
        self.space.mesh()
    }
    fn degree(&self) -> usize {
        self.space.degree()
    }
    fn names(&self) -> Vec<String> {
        vec![format!("{}_x", self.name), format!("{}_y", self.name)]
    }
    fn eval(&self, t: usize, xi: Point) -> Vec<f64> {
        vector_on_element(self.space, t, self.coeffs, xi).value.to_vec()
    }
}

impl ElementField for MomentField {
    fn mesh(&self) -> &Arc<TriMesh> {
        self.space.mesh()
    }
    fn degree(&self) -> usize {
        self.space.degree().saturating_sub(1).max(1)
    }
    fn names(&self) -> Vec<String> {
        ["m11", "m22", "m12"].map(String::from).to_vec()
    }
    fn eval(&self, t: usize, xi: Point) -> Vec<f64> {
        let m = self.at(t, xi);
        vec![m[0][0], m[1][1], m[0][1]]
    }
}

impl ElementField for VonMisesField {
    fn mesh(&self) -> &Arc<TriMesh> {
        self.moments.space.mesh()
    }
    fn degree(&self) -> usize {
        ElementField::degree(&self.moments)
    }
    fn names(&self) -> Vec<String> {
        vec!["von_mises".to_string()]
    }
    fn eval(&self, t: usize, xi: Point) -> Vec<f64> {
        vec![self.at(t, xi)]
    }
}

/// Reference points `(i/k, j/k)`, `i + j <= k`, and the `k^2` sub-triangles.
fn lattice(k: usize) -> (Vec<Point>, Vec<[usize; 3]>) {
    let k = k.max(1);
    let mut pts = Vec::new();
    let mut index = vec![vec![usize::MAX; k + 1]; k + 1];
    for j in 0..=k {
        for i in 0..=k - j {
            index[i][j] = pts.len();
            pts.push([i as f64 / k as f64, j as f64 / k as f64]);
        }
    }
    let mut tris = Vec::with_capacity(k * k);
    for j in 0..k {
        for i in 0..k - j {
            tris.push([index[i][j], index[i + 1][j], index[i][j + 1]]);
            if i + j + 1 < k {
                tris.push([index[i + 1][j], index[i + 1][j + 1], index[i][j + 1]]);
            }
        }
    }
    (pts, tris)
}

pub fn field_to_csv(field: &dyn ElementField) -> String {
    let mesh = field.mesh();
    let (pts, _) = lattice(field.degree());
    let mut s = String::from("element,x,y");
    for n in field.names() {
        s.push(',');
        s.push_str(&n);
    }
    s.push('\n');
    for t in 0..mesh.num_triangles() {
        let map = mesh.affine(t);
        for xi in &pts {
            let x = map.map(*xi);
            write!(s, "{t},{:.16e},{:.16e}", x[0], x[1]).expect("writing to a string");
            for v in field.eval(t, *xi) {
                write!(s, ",{v:.16e}").expect("writing to a string");
            }
            s.push('\n');
        }
    }
    s
}

pub fn field_to_vtk(field: &dyn ElementField, title: &str) -> String {
    let mesh = field.mesh();
    let (pts, subs) = lattice(field.degree());
    let nt = mesh.num_triangles();
    let (np, nc) = (nt * pts.len(), nt * subs.len());
    let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(np); field.names().len()];
    let mut s = format!("# vtk DataFile Version 2.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS {np} double\n");
    for t in 0..nt {
        let map = mesh.affine(t);
        for xi in &pts {
            let x = map.map(*xi);
            writeln!(s, "{:.16e} {:.16e} 0", x[0], x[1]).expect("writing to a string");
            for (c, v) in field.eval(t, *xi).into_iter().enumerate() {
                values[c].push(v);
            }
        }
    }
    writeln!(s, "CELLS {nc} {}", 4 * nc).expect("writing to a string");
    for t in 0..nt {
        let off = t * pts.len();
        for tri in &subs {
            writeln!(s, "3 {} {} {}", off + tri[0], off + tri[1], off + tri[2]).expect("writing to a string");
        }
    }
    writeln!(s, "CELL_TYPES {nc}").expect("writing to a string");
    for _ in 0..nc {
        s.push_str("5\n");
    }
    writeln!(s, "POINT_DATA {np}").expect("writing to a string");
    for (name, vals) in field.names().iter().zip(&values) {
        writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default").expect("writing to a string");
        for v in vals {
            writeln!(s, "{v:.16e}").expect("writing to a string");
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Vtk,
}

impl ExportFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(ExportFormat::Csv),
            "vtk" => Some(ExportFormat::Vtk),
            _ => None,
        }
    }
}

pub fn export_field(field: &dyn ElementField, path: &Path, format: ExportFormat) -> Result<(), PostprocError> {
    let text = match format {
        ExportFormat::Csv => field_to_csv(field),
        ExportFormat::Vtk => field_to_vtk(field, &field.names().join(" ")),
    };
    std::fs::write(path, text).map_err(|e| PostprocError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::eval_field;
    use crate::mesh::{classify_boundary, generate_lshape, BoundaryClass};
    use crate::spaces::build_scalar_space;
    use std::collections::BTreeMap;

    fn space() -> ScalarSpace {
        let m = Arc::new(generate_lshape(1));
        let rules: BTreeMap<i32, BoundaryClass> = (1..=8).map(|l| (l, BoundaryClass::SimplySupported)).collect();
        build_scalar_space(&m, 3, &classify_boundary(&m, &rules).unwrap()).unwrap()
    }

    #[test]
    fn lattice_covers_the_triangle() {
        for k in 1..6 {
            let (p, t) = lattice(k);
            assert_eq!(p.len(), (k + 1) * (k + 2) / 2);
            assert_eq!(t.len(), k * k);
            let area: f64 = t
                .iter()
                .map(|&[a, b, c]| {
                    let (a, b, c) = (p[a], p[b], p[c]);
                    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
                })
                .sum();
            assert!((area - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn csv_round_trip() {
        let s = space();
        let c = s.interpolate(|p| p[0] * p[1] * (1.0 - p[0]) * (1.0 - p[1]));
        let csv = field_to_csv(&ScalarField { space: &s, coeffs: &c, name: "w" });
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("element,x,y,w"));
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
        let pts: Vec<Point> = rows.iter().map(|r| [r[1], r[2]]).collect();
        let ev = eval_field(&s, &c, &pts).unwrap();
        for (r, e) in rows.iter().zip(&ev) {
            assert!((r[3] - e.value).abs() < 1e-12);
        }
        let zero = vec![0.0; s.dim()];
        let csv = field_to_csv(&ScalarField { space: &s, coeffs: &zero, name: "w" });
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",0.0000000000000000e0")));
    }

    #[test]
    fn vtk_layout() {
        let s = space();
        let c = s.interpolate(|p| p[0]);
        let vtk = field_to_vtk(&ScalarField { space: &s, coeffs: &c, name: "w" }, "w");
        let lines: Vec<&str> = vtk.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 2.0");
        assert_eq!(lines[2], "ASCII");
        let nt = s.mesh().num_triangles();
        assert_eq!(lines[4], format!("POINTS {} double", nt * 10));
        assert!(vtk.contains(&format!("CELLS {} {}", nt * 9, nt * 36)));
        assert!(vtk.contains(&format!("POINT_DATA {}", nt * 10)));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.vtk");
        export_field(&ScalarField { space: &s, coeffs: &c, name: "w" }, &path, ExportFormat::from_path(&path).unwrap())
            .unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), vtk);
    }
}
