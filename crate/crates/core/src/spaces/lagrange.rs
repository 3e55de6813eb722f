//! Equispaced Lagrange basis of degree `p` on the reference triangle
//! `(0,0), (1,0), (0,1)`.
//!
//! Local node order: the three vertices, then `p - 1` nodes on each edge
//! (edge `k` is opposite vertex `k`, walked from vertex `k+1` to vertex `k+2`),
//! then interior nodes.

use crate::mesh::Point;

/// Barycentric gradients on the reference triangle.
const GRAD_LAMBDA: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

#[derive(Debug, Clone)]
pub struct LagrangeElement {
    p: usize,
    /// Barycentric multi-indices `(i0, i1, i2)` with `i0 + i1 + i2 = p`.
    nodes: Vec<[usize; 3]>,
}

/// Values, reference gradients and reference Hessians (`[xx, xy, yy]`) of
/// every local basis function at a set of points, stored point-major.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub n_basis: usize,
    pub n_points: usize,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
    pub hessians: Vec<[f64; 3]>,
}

impl Tabulation {
    pub fn value(&self, q: usize, i: usize) -> f64 {
        self.values[q * self.n_basis + i]
    }
    pub fn grad(&self, q: usize, i: usize) -> [f64; 2] {
        self.grads[q * self.n_basis + i]
    }
    pub fn hessian(&self, q: usize, i: usize) -> [f64; 3] {
        self.hessians[q * self.n_basis + i]
    }
}

impl LagrangeElement {
    pub fn new(p: usize) -> Self {
        assert!(p >= 1);
        let mut nodes = vec![[p, 0, 0], [0, p, 0], [0, 0, p]];
        for k in 0..3 {
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            for j in 1..p {
                let mut m = [0; 3];
                m[a] = p - j;
                m[b] = j;
                nodes.push(m);
            }
        }
        for i1 in 1..p {
            for i2 in 1..p - i1 {
                nodes.push([p - i1 - i2, i1, i2]);
            }
        }
        debug_assert_eq!(nodes.len(), (p + 1) * (p + 2) / 2);
        LagrangeElement { p, nodes }
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn num_basis(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_interior(&self) -> usize {
        if self.p < 3 {
            0
        } else {
            (self.p - 1) * (self.p - 2) / 2
        }
    }

    pub fn multi_indices(&self) -> &[[usize; 3]] {
        &self.nodes
    }

    /// Reference coordinates of the local nodes.
    pub fn reference_nodes(&self) -> Vec<Point> {
        let p = self.p as f64;
        self.nodes.iter().map(|m| [m[1] as f64 / p, m[2] as f64 / p]).collect()
    }

    /// `P_m(l)` and its first two derivatives, where
    /// `P_m(l) = prod_{k<m} (p l - k) / (k + 1)`.
    fn factor(&self, m: usize, l: f64) -> [f64; 3] {
        let p = self.p as f64;
        let (mut v, mut d1, mut d2) = (1.0, 0.0, 0.0);
        for k in 0..m {
            let a = (p * l - k as f64) / (k as f64 + 1.0);
            let s = p / (k as f64 + 1.0);
            d2 = d2 * a + 2.0 * d1 * s;
            d1 = d1 * a + v * s;
            v *= a;
        }
        [v, d1, d2]
    }

    fn eval_one(&self, m: &[usize; 3], lam: [f64; 3]) -> (f64, [f64; 2], [f64; 3]) {
        let f = [self.factor(m[0], lam[0]), self.factor(m[1], lam[1]), self.factor(m[2], lam[2])];
        let value = f[0][0] * f[1][0] * f[2][0];
        let mut grad = [0.0; 2];
        let mut hess = [0.0; 3];
        for k in 0..3 {
            let (o1, o2) = ((k + 1) % 3, (k + 2) % 3);
            let rest = f[o1][0] * f[o2][0];
            let g = GRAD_LAMBDA[k];
            grad[0] += f[k][1] * rest * g[0];
            grad[1] += f[k][1] * rest * g[1];
            let c = f[k][2] * rest;
            hess[0] += c * g[0] * g[0];
            hess[1] += c * g[0] * g[1];
            hess[2] += c * g[1] * g[1];
            for l in 0..3 {
                if l == k {
                    continue;
                }
                let other = 3 - k - l;
                let c = f[k][1] * f[l][1] * f[other][0];
                let h = GRAD_LAMBDA[l];
                hess[0] += c * g[0] * h[0];
                hess[1] += c * g[0] * h[1];
                hess[2] += c * g[1] * h[1];
            }
        }
        (value, grad, hess)
    }

    pub fn tabulate(&self, points: &[Point]) -> Tabulation {
        let nb = self.num_basis();
        let mut t = Tabulation {
            n_basis: nb,
            n_points: points.len(),
            values: Vec::with_capacity(nb * points.len()),
            grads: Vec::with_capacity(nb * points.len()),
            hessians: Vec::with_capacity(nb * points.len()),
        };
        for x in points {
            let lam = [1.0 - x[0] - x[1], x[0], x[1]];
            for m in &self.nodes {
                let (v, g, h) = self.eval_one(m, lam);
                t.values.push(v);
                t.grads.push(g);
                t.hessians.push(h);
            }
        }
        t
    }

    /// Basis values at a single reference point.
    pub fn values_at(&self, x: Point) -> Vec<f64> {
        let lam = [1.0 - x[0] - x[1], x[0], x[1]];
        self.nodes.iter().map(|m| self.eval_one(m, lam).0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_points() -> Vec<Point> {
        vec![[0.1, 0.2], [0.3, 0.3], [0.0, 0.5], [0.7, 0.1], [1.0 / 3.0, 1.0 / 3.0], [0.0, 0.0]]
    }

    #[test]
    fn nodal_property() {
        for p in 1..=10 {
            let el = LagrangeElement::new(p);
            let tab = el.tabulate(&el.reference_nodes());
            for q in 0..el.num_basis() {
                for i in 0..el.num_basis() {
                    let expect = if q == i { 1.0 } else { 0.0 };
                    assert!((tab.value(q, i) - expect).abs() < 1e-12, "p={p} q={q} i={i}");
                }
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        for p in 1..=8 {
            let el = LagrangeElement::new(p);
            let tab = el.tabulate(&sample_points());
            for q in 0..tab.n_points {
                let s: f64 = (0..tab.n_basis).map(|i| tab.value(q, i)).sum();
                let g = (0..tab.n_basis).fold([0.0; 2], |a, i| {
                    let gi = tab.grad(q, i);
                    [a[0] + gi[0], a[1] + gi[1]]
                });
                let h = (0..tab.n_basis).fold([0.0; 3], |a, i| {
                    let hi = tab.hessian(q, i);
                    [a[0] + hi[0], a[1] + hi[1], a[2] + hi[2]]
                });
                assert!((s - 1.0).abs() < 1e-12);
                assert!(g.iter().all(|v| v.abs() < 1e-10));
                assert!(h.iter().all(|v| v.abs() < 1e-8));
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let el = LagrangeElement::new(5);
        let x = [0.23, 0.41];
        let eps = 1e-5;
        let tab = el.tabulate(&[x]);
        let dx = |dx: f64, dy: f64| el.tabulate(&[[x[0] + dx, x[1] + dy]]);
        let (xp, xm, yp, ym) = (dx(eps, 0.0), dx(-eps, 0.0), dx(0.0, eps), dx(0.0, -eps));
        for i in 0..el.num_basis() {
            let gx = (xp.value(0, i) - xm.value(0, i)) / (2.0 * eps);
            let gy = (yp.value(0, i) - ym.value(0, i)) / (2.0 * eps);
            assert!((gx - tab.grad(0, i)[0]).abs() < 1e-6);
            assert!((gy - tab.grad(0, i)[1]).abs() < 1e-6);
            let hxx = (xp.grad(0, i)[0] - xm.grad(0, i)[0]) / (2.0 * eps);
            let hxy = (yp.grad(0, i)[0] - ym.grad(0, i)[0]) / (2.0 * eps);
            let hyy = (yp.grad(0, i)[1] - ym.grad(0, i)[1]) / (2.0 * eps);
            let h = tab.hessian(0, i);
            assert!((hxx - h[0]).abs() < 1e-5);
            assert!((hxy - h[1]).abs() < 1e-5);
            assert!((hyy - h[2]).abs() < 1e-5);
        }
    }

    #[test]
    fn reproduces_polynomials() {
        // x^2 y + 3 y^3 - x interpolated at degree 3 is exact.
        let f = |x: Point| x[0] * x[0] * x[1] + 3.0 * x[1].powi(3) - x[0];
        let el = LagrangeElement::new(3);
        let coeffs: Vec<f64> = el.reference_nodes().into_iter().map(f).collect();
        for x in sample_points() {
            let v: f64 = el.values_at(x).iter().zip(&coeffs).map(|(a, b)| a * b).sum();
            assert!((v - f(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn node_layout() {
        let el = LagrangeElement::new(4);
        assert_eq!(el.num_basis(), 15);
        assert_eq!(el.num_interior(), 3);
        // first node of edge 0 sits next to vertex 1
        assert_eq!(el.multi_indices()[3], [0, 3, 1]);
    }
}
