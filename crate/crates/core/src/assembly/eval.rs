//! Evaluation of finite element fields at points.

use super::AssemblyError;
use crate::mesh::{Point, PointLocator};
use crate::spaces::{ScalarSpace, VectorSpace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSample {
    pub value: f64,
    pub grad: [f64; 2],
    pub hessian: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorSample {
    pub value: [f64; 2],
    /// `grad[i][j] = d theta_i / d x_j`.
    pub grad: [[f64; 2]; 2],
}

/// Scalar field on triangle `t` at reference point `xi`.
pub fn scalar_on_element(space: &ScalarSpace, t: usize, coeffs: &[f64], xi: Point) -> ScalarSample {
    let map = space.mesh().affine(t);
    let tab = space.tabulate_basis(&[xi]);
    let local = space.local_coefficients(t, coeffs);
    let mut s = ScalarSample { value: 0.0, grad: [0.0; 2], hessian: [[0.0; 2]; 2] };
    let mut href = [[0.0; 2]; 2];
    let mut gref = [0.0; 2];
    for (i, c) in local.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        s.value += c * tab.value(0, i);
        let g = tab.grad(0, i);
        gref[0] += c * g[0];
        gref[1] += c * g[1];
        let h = tab.hessian(0, i);
        href[0][0] += c * h[0];
        href[0][1] += c * h[1];
        href[1][0] += c * h[1];
        href[1][1] += c * h[2];
    }
    s.grad = map.grad(gref);
    s.hessian = map.hessian(href);
    s
}

/// Vector field on triangle `t` at reference point `xi`.
pub fn vector_on_element(space: &VectorSpace, t: usize, coeffs: &[f64], xi: Point) -> VectorSample {
    let map = space.mesh().affine(t);
    let tab = space.tabulate_basis(&[xi]);
    let local = space.local_coefficients(t, coeffs);
    let mut s = VectorSample { value: [0.0; 2], grad: [[0.0; 2]; 2] };
    for c in 0..2 {
        let mut gref = [0.0; 2];
        for i in 0..tab.n_basis {
            let v = local[2 * i + c];
            if v == 0.0 {
                continue;
            }
            s.value[c] += v * tab.value(0, i);
            let g = tab.grad(0, i);
            gref[0] += v * g[0];
            gref[1] += v * g[1];
        }
        s.grad[c] = map.grad(gref);
    }
    s
}

/// Values, gradients and Hessians of a scalar field at physical points.
pub fn eval_field(space: &ScalarSpace, coeffs: &[f64], points: &[Point]) -> Result<Vec<ScalarSample>, AssemblyError> {
    let mesh = space.mesh();
    let loc = PointLocator::new(mesh);
    points
        .iter()
        .map(|&x| {
            let (t, r) = loc.locate(mesh, x).ok_or(AssemblyError::PointOutsideDomain(x[0], x[1]))?;
            Ok(scalar_on_element(space, t, coeffs, r))
        })
        .collect()
}

/// Values and gradients of a vector field at physical points.
pub fn eval_vector_field(
    space: &VectorSpace,
    coeffs: &[f64],
    points: &[Point],
) -> Result<Vec<VectorSample>, AssemblyError> {
    let mesh = space.mesh();
    let loc = PointLocator::new(mesh);
    points
        .iter()
        .map(|&x| {
            let (t, r) = loc.locate(mesh, x).ok_or(AssemblyError::PointOutsideDomain(x[0], x[1]))?;
            Ok(vector_on_element(space, t, coeffs, r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{classify_boundary, generate_unit_square, BoundaryClass};
    use crate::spaces::build_scalar_space;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    #[test]
    fn reproduces_polynomials() {
        let m = Arc::new(generate_unit_square(2));
        let rules: BTreeMap<i32, _> = [(1, BoundaryClass::Free), (2, BoundaryClass::Free), (3, BoundaryClass::Free), (4, BoundaryClass::SimplySupported)].into_iter().collect();
        let part = classify_boundary(&m, &rules).unwrap();
        let s = build_scalar_space(&m, 2, &part).unwrap();
        let c = s.interpolate(|p| p[0]);
        let v = eval_field(&s, &c, &[[0.3, 0.7]]).unwrap()[0];
        assert!((v.value - 0.3).abs() < 1e-14);
        let c = s.interpolate(|p| p[0] * p[0]);
        let v = eval_field(&s, &c, &[[0.5, 0.3]]).unwrap()[0];
        assert!((v.grad[0] - 1.0).abs() < 1e-13 && v.grad[1].abs() < 1e-13);
        assert!((v.hessian[0][0] - 2.0).abs() < 1e-12);
        // shared vertex seen from every abutting triangle
        let c = s.interpolate(|p| p[0] * (1.0 + p[1]));
        let center = (0..m.num_vertices()).find(|&v| m.vertices()[v] == [0.5, 0.5]).unwrap();
        for t in 0..m.num_triangles() {
            if let Some(i) = m.triangles()[t].iter().position(|&v| v == center) {
                let r = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]][i];
                assert!((scalar_on_element(&s, t, &c, r).value - 0.75).abs() < 1e-14);
            }
        }
        assert!(eval_field(&s, &c, &[[-0.1, 0.5]]).is_err());
    }
}
