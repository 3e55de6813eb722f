//! Point location through a uniform bucket grid over triangle bounding boxes.

use super::{Point, TriMesh};

/// Barycentric coordinates down to `-LOCATE_TOL` count as inside.
pub const LOCATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct PointLocator {
    origin: Point,
    cell: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl PointLocator {
    pub fn new(mesh: &TriMesh) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in mesh.vertices() {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        let k = ((mesh.num_triangles() as f64).sqrt().ceil() as usize).max(1);
        let dims = [k, k];
        let cell = [
            ((hi[0] - lo[0]) / k as f64).max(f64::MIN_POSITIVE),
            ((hi[1] - lo[1]) / k as f64).max(f64::MIN_POSITIVE),
        ];
        let mut loc = PointLocator { origin: lo, cell, dims, buckets: vec![Vec::new(); k * k] };
        for t in 0..mesh.num_triangles() {
            let p = mesh.triangle_points(t);
            let (mut a, mut b) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for q in &p {
                for d in 0..2 {
                    a[d] = a[d].min(q[d]);
                    b[d] = b[d].max(q[d]);
                }
            }
            let (i0, j0) = loc.cell_of(a);
            let (i1, j1) = loc.cell_of(b);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    loc.buckets[j * dims[0] + i].push(t);
                }
            }
        }
        loc
    }

    fn cell_of(&self, x: Point) -> (usize, usize) {
        let c = |d: usize| {
            let f = ((x[d] - self.origin[d]) / self.cell[d]).floor();
            (f.max(0.0) as usize).min(self.dims[d] - 1)
        };
        (c(0), c(1))
    }

    /// Lowest-index triangle containing `x`, with the reference coordinates of `x`.
    pub fn locate(&self, mesh: &TriMesh, x: Point) -> Option<(usize, Point)> {
        if !x[0].is_finite() || !x[1].is_finite() {
            return None;
        }
        // A point on a cell boundary may sit in either neighboring bucket.
        let (i, j) = self.cell_of(x);
        let mut best: Option<(usize, Point)> = None;
        for di in [-1i64, 0, 1] {
            for dj in [-1i64, 0, 1] {
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                if ii < 0 || jj < 0 || ii >= self.dims[0] as i64 || jj >= self.dims[1] as i64 {
                    continue;
                }
                for &t in &self.buckets[jj as usize * self.dims[0] + ii as usize] {
                    if best.is_some_and(|b| b.0 <= t) {
                        continue;
                    }
                    let r = mesh.affine(t).pullback(x);
                    let l0 = 1.0 - r[0] - r[1];
                    if r[0] >= -LOCATE_TOL && r[1] >= -LOCATE_TOL && l0 >= -LOCATE_TOL {
                        best = Some((t, r));
                    }
                }
            }
        }
        best
    }
}
