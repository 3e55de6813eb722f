//! Quadrature and assembly of the bilinear and linear forms.
//!
//! Vector-valued local matrices use the index `2 * i + c` for basis function
//! `i` in Cartesian component `c`. Gradient matrices are stored as
//! `g[i][j] = d theta_i / d x_j`.

mod eval;
mod quadrature;

pub use eval::{
    eval_field, eval_vector_field, scalar_on_element, vector_on_element, ScalarSample, VectorSample,
};
pub use quadrature::{gauss_legendre, quadrature_rule, QuadratureRule, MAX_QUADRATURE_DEGREE};

use crate::mesh::{BoundaryPartition, Chain, Point, PointLocator, TriMesh};
use crate::solver::{CsrMatrix, TripletMatrix};
use crate::spaces::{ScalarSpace, Tabulation, VectorSpace};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("quadrature degree {0} not supported (1..=20)")]
    UnsupportedQuadratureDegree(usize),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("spaces live on different meshes")]
    MeshMismatch,
    #[error("point ({0}, {1}) lies outside the domain")]
    PointOutsideDomain(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub thickness: f64,
}

impl Material {
    /// Flexural rigidity `E t^3 / (12 (1 - nu^2))`.
    pub fn rigidity(&self) -> f64 {
        let nu = self.poisson_ratio;
        self.youngs_modulus * self.thickness.powi(3) / (12.0 * (1.0 - nu * nu))
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        let nu = self.poisson_ratio;
        if !(nu > 0.0 && nu <= 0.5) {
            return Err(AssemblyError::InvalidMaterial(format!("Poisson ratio {nu} not in (0, 1/2]")));
        }
        if !(self.youngs_modulus > 0.0) {
            return Err(AssemblyError::InvalidMaterial(format!(
                "Young's modulus {} must be positive",
                self.youngs_modulus
            )));
        }
        if !(self.thickness > 0.0) {
            return Err(AssemblyError::InvalidMaterial(format!(
                "thickness {} must be positive",
                self.thickness
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FormSpec {
    /// `a(theta, psi) = (div theta, div psi)`.
    Biharmonic,
    /// `a(theta, psi) = D [(1 - nu)(eps theta, eps psi) + nu (div theta, div psi)]`.
    Kirchhoff(Material),
}

impl FormSpec {
    pub fn validate(&self) -> Result<(), AssemblyError> {
        match self {
            FormSpec::Biharmonic => Ok(()),
            FormSpec::Kirchhoff(m) => m.validate(),
        }
    }

    /// Scale of the strong operator: `D` for Kirchhoff, 1 for the biharmonic.
    pub fn rigidity(&self) -> f64 {
        match self {
            FormSpec::Biharmonic => 1.0,
            FormSpec::Kirchhoff(m) => m.rigidity(),
        }
    }

    /// Pointwise integrand of `a` for gradient matrices `g` and `h`.
    pub fn energy_density(&self, g: &[[f64; 2]; 2], h: &[[f64; 2]; 2]) -> f64 {
        let div = (g[0][0] + g[1][1]) * (h[0][0] + h[1][1]);
        match self {
            FormSpec::Biharmonic => div,
            FormSpec::Kirchhoff(m) => {
                let nu = m.poisson_ratio;
                let off_g = 0.5 * (g[0][1] + g[1][0]);
                let off_h = 0.5 * (h[0][1] + h[1][0]);
                let eps = g[0][0] * h[0][0] + g[1][1] * h[1][1] + 2.0 * off_g * off_h;
                m.rigidity() * ((1.0 - nu) * eps + nu * div)
            }
        }
    }
}

/// Right-hand side functional.
#[derive(Clone)]
pub enum LoadSpec {
    Uniform(f64),
    Function(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
    PointLoad { at: Point, magnitude: f64 },
}

impl fmt::Debug for LoadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadSpec::Uniform(v) => write!(f, "Uniform({v})"),
            LoadSpec::Function(_) => write!(f, "Function(..)"),
            LoadSpec::PointLoad { at, magnitude } => write!(f, "PointLoad({at:?}, {magnitude})"),
        }
    }
}

/// A sparse matrix over the free DOFs plus dense rank-one update vectors.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub circulations: Vec<Vec<f64>>,
}

/// Physical gradients of all basis functions at all quadrature points of one triangle.
fn physical_grads(tab: &Tabulation, mesh: &TriMesh, t: usize) -> Vec<[f64; 2]> {
    let map = mesh.affine(t);
    tab.grads.iter().map(|&g| map.grad(g)).collect()
}

fn scatter(trip: &mut TripletMatrix, local: &[f64], rows: &[Option<(usize, f64)>], cols: &[Option<(usize, f64)>]) {
    let nc = cols.len();
    for (a, r) in rows.iter().enumerate() {
        let Some((i, wi)) = *r else { continue };
        for (b, c) in cols.iter().enumerate() {
            let Some((j, wj)) = *c else { continue };
            let v = local[a * nc + b];
            if v != 0.0 {
                trip.push(i, j, wi * wj * v);
            }
        }
    }
}

fn scalar_dofs(space: &ScalarSpace, t: usize) -> Vec<Option<(usize, f64)>> {
    space.local_dofs(t).into_iter().map(|d| d.map(|d| (d, 1.0))).collect()
}

fn rule_for(degree: usize) -> QuadratureRule {
    quadrature_rule(degree.clamp(1, MAX_QUADRATURE_DEGREE)).expect("clamped degree")
}

/// `K[i][j] = (grad phi_j, grad phi_i)` over the free scalar DOFs.
pub fn assemble_grad_grad(space: &ScalarSpace) -> AssembledSystem {
    let mesh = space.mesh();
    let p = space.degree();
    let rule = rule_for(2 * (p - 1));
    let tab = space.tabulate_basis(&rule.points);
    let nl = tab.n_basis;
    let mut trip = TripletMatrix::with_capacity(space.dim(), space.dim(), mesh.num_triangles() * nl * nl);
    let mut local = vec![0.0; nl * nl];
    for t in 0..mesh.num_triangles() {
        let grads = physical_grads(&tab, mesh, t);
        let area = mesh.area(t);
        local.fill(0.0);
        for (q, w) in rule.weights.iter().enumerate() {
            let g = &grads[q * nl..(q + 1) * nl];
            for i in 0..nl {
                for j in 0..nl {
                    local[i * nl + j] += area * w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
        }
        let dofs = scalar_dofs(space, t);
        scatter(&mut trip, &local, &dofs, &dofs);
    }
    AssembledSystem { matrix: trip.to_csr(), circulations: Vec::new() }
}

/// Gradient matrix of basis function `i` placed in component `c`.
fn unit_grad(g: [f64; 2], c: usize) -> [[f64; 2]; 2] {
    let mut m = [[0.0; 2]; 2];
    m[c] = g;
    m
}

/// Matrix of the fourth-order form `a` on the vector space.
pub fn assemble_a(space: &VectorSpace, form: &FormSpec) -> Result<AssembledSystem, AssemblyError> {
    let q = space.degree();
    assemble_a_with_quadrature(space, form, 2 * (q - 1))
}

pub fn assemble_a_with_quadrature(
    space: &VectorSpace,
    form: &FormSpec,
    quad_degree: usize,
) -> Result<AssembledSystem, AssemblyError> {
    form.validate()?;
    let mesh = space.mesh();
    let rule = quadrature_rule(quad_degree.max(1))?;
    let tab = space.tabulate_basis(&rule.points);
    let nl = tab.n_basis;
    let n = 2 * nl;
    let mut trip = TripletMatrix::with_capacity(space.dim(), space.dim(), mesh.num_triangles() * n * n);
    let mut local = vec![0.0; n * n];
    let mut gmats = vec![[[0.0; 2]; 2]; n];
    for t in 0..mesh.num_triangles() {
        let grads = physical_grads(&tab, mesh, t);
        let area = mesh.area(t);
        local.fill(0.0);
        for (qp, w) in rule.weights.iter().enumerate() {
            for i in 0..nl {
                for c in 0..2 {
                    gmats[2 * i + c] = unit_grad(grads[qp * nl + i], c);
                }
            }
            for a in 0..n {
                for b in a..n {
                    local[a * n + b] += area * w * form.energy_density(&gmats[a], &gmats[b]);
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                local[a * n + b] = local[b * n + a];
            }
        }
        let dofs = space.local_dofs(t);
        scatter(&mut trip, &local, &dofs, &dofs);
    }
    Ok(AssembledSystem { matrix: trip.to_csr(), circulations: Vec::new() })
}

/// Coefficient vector of `theta -> integral over the chain of t . theta ds`,
/// with `t` the counterclockwise unit tangent.
pub fn circulation_vector(space: &VectorSpace, chain: &Chain) -> Vec<f64> {
    let mesh = space.mesh();
    let q = space.degree();
    let (gx, gw) = gauss_legendre(q + 1);
    let mut c = vec![0.0; space.dim()];
    for ce in chain {
        let edge = mesh.edges()[ce.edge];
        let t = edge.tris[0];
        let map = mesh.affine(t);
        let (a, b) = (mesh.vertices()[ce.from], mesh.vertices()[ce.to]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let tangent = [d[0] / len, d[1] / len];
        let refs: Vec<Point> = gx.iter().map(|s| map.pullback([a[0] + s * d[0], a[1] + s * d[1]])).collect();
        let tab = space.tabulate_basis(&refs);
        let dofs = space.local_dofs(t);
        for (qp, w) in gw.iter().enumerate() {
            for i in 0..tab.n_basis {
                let phi = tab.value(qp, i);
                for comp in 0..2 {
                    if let Some((dof, coef)) = dofs[2 * i + comp] {
                        c[dof] += w * len * coef * phi * tangent[comp];
                    }
                }
            }
        }
    }
    c
}

/// Penalty form: the sparse rot-gram matrix `(rot theta, rot psi)` and the
/// circulation vectors of the free components `1..N-1`.
pub fn assemble_b(space: &VectorSpace, partition: &BoundaryPartition) -> AssembledSystem {
    let mesh = space.mesh();
    let q = space.degree();
    let rule = rule_for(2 * (q - 1));
    let tab = space.tabulate_basis(&rule.points);
    let nl = tab.n_basis;
    let n = 2 * nl;
    let mut trip = TripletMatrix::with_capacity(space.dim(), space.dim(), mesh.num_triangles() * n * n);
    let mut local = vec![0.0; n * n];
    let mut rot = vec![0.0; n];
    for t in 0..mesh.num_triangles() {
        let grads = physical_grads(&tab, mesh, t);
        let area = mesh.area(t);
        local.fill(0.0);
        for (qp, w) in rule.weights.iter().enumerate() {
            for i in 0..nl {
                let g = grads[qp * nl + i];
                // rot theta = d_x theta_2 - d_y theta_1
                rot[2 * i] = -g[1];
                rot[2 * i + 1] = g[0];
            }
            for a in 0..n {
                for b in 0..n {
                    local[a * n + b] += area * w * rot[a] * rot[b];
                }
            }
        }
        let dofs = space.local_dofs(t);
        scatter(&mut trip, &local, &dofs, &dofs);
    }
    let circulations = partition
        .constrained_free_components()
        .iter()
        .map(|chain| circulation_vector(space, chain))
        .collect();
    AssembledSystem { matrix: trip.to_csr(), circulations }
}

/// Weighted point samples of `rot theta`: row `(t, q)` holds
/// `sqrt(|T| w_q) rot theta(x_q)`, so `||E theta||^2 = ||rot theta||^2` and
/// `E^T E` equals the rot-gram matrix.
pub fn assemble_rot_sampler(space: &VectorSpace) -> CsrMatrix {
    let mesh = space.mesh();
    let q = space.degree();
    let rule = rule_for(2 * (q - 1));
    let tab = space.tabulate_basis(&rule.points);
    let nl = tab.n_basis;
    let nq = rule.len();
    let mut trip = TripletMatrix::with_capacity(mesh.num_triangles() * nq, space.dim(), mesh.num_triangles() * nq * 2 * nl);
    for t in 0..mesh.num_triangles() {
        let grads = physical_grads(&tab, mesh, t);
        let area = mesh.area(t);
        let dofs = space.local_dofs(t);
        for (qp, w) in rule.weights.iter().enumerate() {
            let row = t * nq + qp;
            let s = (area * w).sqrt();
            for i in 0..nl {
                let g = grads[qp * nl + i];
                for (c, r) in [(0, -g[1]), (1, g[0])] {
                    if let Some((dof, coef)) = dofs[2 * i + c] {
                        trip.push(row, dof, s * coef * r);
                    }
                }
            }
        }
    }
    trip.to_csr()
}

/// `C[i][j] = (grad phi_j, psi_i)`: rows are vector DOFs, columns scalar DOFs.
pub fn assemble_coupling(vspace: &VectorSpace, sspace: &ScalarSpace) -> Result<CsrMatrix, AssemblyError> {
    let mesh = sspace.mesh();
    if !Arc::ptr_eq(mesh, vspace.mesh()) && !same_mesh(mesh, vspace.mesh()) {
        return Err(AssemblyError::MeshMismatch);
    }
    let rule = rule_for(sspace.degree() - 1 + vspace.degree());
    let stab = sspace.tabulate_basis(&rule.points);
    let vtab = vspace.tabulate_basis(&rule.points);
    let (ns, nv) = (stab.n_basis, vtab.n_basis);
    let mut trip = TripletMatrix::with_capacity(vspace.dim(), sspace.dim(), mesh.num_triangles() * 2 * nv * ns);
    let mut local = vec![0.0; 2 * nv * ns];
    for t in 0..mesh.num_triangles() {
        let sg = physical_grads(&stab, mesh, t);
        let area = mesh.area(t);
        local.fill(0.0);
        for (qp, w) in rule.weights.iter().enumerate() {
            for i in 0..nv {
                let psi = vtab.value(qp, i);
                for c in 0..2 {
                    for j in 0..ns {
                        local[(2 * i + c) * ns + j] += area * w * psi * sg[qp * ns + j][c];
                    }
                }
            }
        }
        scatter(&mut trip, &local, &vspace.local_dofs(t), &scalar_dofs(sspace, t));
    }
    Ok(trip.to_csr())
}

fn same_mesh(a: &TriMesh, b: &TriMesh) -> bool {
    a.vertices() == b.vertices() && a.triangles() == b.triangles()
}

/// Load vector `F[i] = F(phi_i)` over the free scalar DOFs.
pub fn assemble_load(space: &ScalarSpace, load: &LoadSpec) -> Result<Vec<f64>, AssemblyError> {
    let mesh = space.mesh();
    let p = space.degree();
    let mut f = vec![0.0; space.dim()];
    match load {
        LoadSpec::PointLoad { at, magnitude } => {
            let loc = PointLocator::new(mesh);
            let (t, r) = loc.locate(mesh, *at).ok_or(AssemblyError::PointOutsideDomain(at[0], at[1]))?;
            let vals = space.element().values_at(r);
            for (i, d) in space.local_dofs(t).into_iter().enumerate() {
                if let Some(d) = d {
                    f[d] += magnitude * vals[i];
                }
            }
        }
        LoadSpec::Uniform(_) | LoadSpec::Function(_) => {
            let degree = match load {
                LoadSpec::Uniform(_) => p,
                _ => 2 * p + 2,
            };
            let rule = rule_for(degree);
            let tab = space.tabulate_basis(&rule.points);
            for t in 0..mesh.num_triangles() {
                let map = mesh.affine(t);
                let area = mesh.area(t);
                let dofs = space.local_dofs(t);
                for (qp, (x, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
                    let fv = match load {
                        LoadSpec::Uniform(c) => *c,
                        LoadSpec::Function(g) => g(map.map(*x)),
                        LoadSpec::PointLoad { .. } => unreachable!(),
                    };
                    for (i, d) in dofs.iter().enumerate() {
                        if let Some(d) = d {
                            f[*d] += area * w * fv * tab.value(qp, i);
                        }
                    }
                }
            }
        }
    }
    Ok(f)
}

/// Gram matrix of the full `H^1` inner product `(theta, psi) + (grad theta, grad psi)`.
pub fn assemble_vector_h1(space: &VectorSpace) -> CsrMatrix {
    let mesh = space.mesh();
    let rule = rule_for(2 * space.degree());
    let tab = space.tabulate_basis(&rule.points);
    let nl = tab.n_basis;
    let n = 2 * nl;
    let mut trip = TripletMatrix::with_capacity(space.dim(), space.dim(), mesh.num_triangles() * n * n);
    let mut local = vec![0.0; n * n];
    for t in 0..mesh.num_triangles() {
        let grads = physical_grads(&tab, mesh, t);
        let area = mesh.area(t);
        local.fill(0.0);
        for (qp, w) in rule.weights.iter().enumerate() {
            for i in 0..nl {
                for j in 0..nl {
                    let (gi, gj) = (grads[qp * nl + i], grads[qp * nl + j]);
                    let v = area
                        * w
                        * (tab.value(qp, i) * tab.value(qp, j) + gi[0] * gj[0] + gi[1] * gj[1]);
                    for c in 0..2 {
                        local[(2 * i + c) * n + 2 * j + c] += v;
                    }
                }
            }
        }
        let dofs = space.local_dofs(t);
        scatter(&mut trip, &local, &dofs, &dofs);
    }
    trip.to_csr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{
        build_mesh, classify_boundary, generate_unit_square, BoundaryClass, ChainEdge,
    };
    use crate::solver::factorize_spd;
    use crate::spaces::{build_scalar_space, build_vector_space};
    use std::collections::BTreeMap;

    /// Partition with every boundary edge free (no essential boundary).
    pub(crate) fn free_partition(mesh: &TriMesh) -> BoundaryPartition {
        let mut edge_class = vec![None; mesh.num_edges()];
        let chain: Chain = mesh
            .boundary_cycle()
            .iter()
            .map(|s| {
                edge_class[s.edge] = Some(BoundaryClass::Free);
                ChainEdge { edge: s.edge, from: s.from, to: s.to }
            })
            .collect();
        BoundaryPartition { edge_class, cs_components: vec![], f_components: vec![chain] }
    }

    fn square(n: usize, class: BoundaryClass) -> (Arc<TriMesh>, BoundaryPartition) {
        let m = generate_unit_square(n);
        let rules: BTreeMap<i32, BoundaryClass> = (1..=4).map(|l| (l, class)).collect();
        let part = classify_boundary(&m, &rules).unwrap();
        (Arc::new(m), part)
    }

    #[test]
    fn grad_grad_basics() {
        let m = Arc::new(generate_unit_square(1));
        let s = build_scalar_space(&m, 1, &free_partition(&m)).unwrap();
        let k = assemble_grad_grad(&s).matrix;
        for r in k.mul_vec(&[1.0; 4]) {
            assert!(r.abs() < 1e-14);
        }
        // five-point stencil on the structured mesh
        let (m, part) = square(3, BoundaryClass::Clamped);
        let s = build_scalar_space(&m, 1, &part).unwrap();
        let k = assemble_grad_grad(&s).matrix;
        let center = (0..m.num_vertices()).find(|&v| m.vertices()[v] == [0.5, 0.5]).unwrap();
        let dof = |p: Point| {
            let v = (0..m.num_vertices()).find(|&v| m.vertices()[v] == p).unwrap();
            s.node_dof(v).unwrap()
        };
        let c = s.node_dof(center).unwrap();
        assert!((k.get(c, c) - 4.0).abs() < 1e-14);
        for nb in [[0.25, 0.5], [0.75, 0.5], [0.5, 0.25], [0.5, 0.75]] {
            assert!((k.get(c, dof(nb)) + 1.0).abs() < 1e-14);
        }
        for nb in [[0.25, 0.25], [0.75, 0.75], [0.25, 0.75], [0.75, 0.25]] {
            assert!(k.get(c, dof(nb)).abs() < 1e-14);
        }
        assert!(factorize_spd(&k).is_ok());
    }

    #[test]
    fn reference_biharmonic_local_matrix() {
        let nodes = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let m = Arc::new(build_mesh(&nodes, &[[0, 1, 2]], &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap());
        let v = build_vector_space(&m, 1, &free_partition(&m)).unwrap();
        let a = assemble_a(&v, &FormSpec::Biharmonic).unwrap().matrix.to_dense();
        let d = [-1.0, -1.0, 1.0, 0.0, 0.0, 1.0];
        for i in 0..6 {
            for j in 0..6 {
                assert!((a[(i, j)] - 0.5 * d[i] * d[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn a_form_kernels() {
        let m = Arc::new(generate_unit_square(2));
        let v = build_vector_space(&m, 2, &free_partition(&m)).unwrap();
        let bih = assemble_a(&v, &FormSpec::Biharmonic).unwrap().matrix;
        let c = v.interpolate(|_| [1.0, 0.0]);
        assert!(bih.quad_form(&c).abs() < 1e-14);
        let mat = Material { youngs_modulus: 2.0, poisson_ratio: 0.3, thickness: 0.5 };
        let kir = assemble_a(&v, &FormSpec::Kirchhoff(mat)).unwrap().matrix;
        let rot = v.interpolate(|x| [-x[1], x[0]]);
        assert!(kir.quad_form(&rot).abs() < 1e-13);
        let bad = Material { poisson_ratio: 0.6, ..mat };
        assert!(matches!(
            assemble_a(&v, &FormSpec::Kirchhoff(bad)),
            Err(AssemblyError::InvalidMaterial(_))
        ));
    }

    #[test]
    fn rot_of_gradient_vanishes() {
        let (m, part) = square(2, BoundaryClass::SimplySupported);
        let v = build_vector_space(&m, 4, &part).unwrap();
        // w = x y (1 - x)(1 - y) vanishes on the boundary
        let th = v.interpolate(|p| {
            let (x, y) = (p[0], p[1]);
            [(1.0 - 2.0 * x) * y * (1.0 - y), (1.0 - 2.0 * y) * x * (1.0 - x)]
        });
        let b = assemble_b(&v, &part);
        assert!(b.circulations.is_empty());
        let rx = b.matrix.mul_vec(&th);
        assert!(rx.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-10);
        // b(theta, theta) as the integral of (rot theta)^2
        let rule = quadrature_rule(6).unwrap();
        let mut bb = 0.0;
        for t in 0..m.num_triangles() {
            for (x, w) in rule.points.iter().zip(&rule.weights) {
                let s = vector_on_element(&v, t, &th, *x);
                bb += m.area(t) * w * (s.grad[1][0] - s.grad[0][1]).powi(2);
            }
        }
        assert!(bb <= 1e-20, "{bb}");
    }

    #[test]
    fn stokes_theorem() {
        use rand::{Rng, SeedableRng};
        let m = Arc::new(generate_unit_square(2));
        let part = free_partition(&m);
        let v = build_vector_space(&m, 3, &part).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let th: Vec<f64> = (0..v.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let circ = circulation_vector(&v, &part.f_components[0]);
        let rhs: f64 = circ.iter().zip(&th).map(|(a, b)| a * b).sum();
        let rule = quadrature_rule(4).unwrap();
        let mut lhs = 0.0;
        for t in 0..m.num_triangles() {
            for (x, w) in rule.points.iter().zip(&rule.weights) {
                let s = vector_on_element(&v, t, &th, *x);
                lhs += m.area(t) * w * (s.grad[1][0] - s.grad[0][1]);
            }
        }
        assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn coupling_properties() {
        let (m, part) = square(2, BoundaryClass::Clamped);
        let s = build_scalar_space(&m, 3, &part).unwrap();
        let v = build_vector_space(&m, 2, &free_partition(&m)).unwrap();
        let c = assemble_coupling(&v, &s).unwrap();
        assert!(c.mul_vec(&vec![0.0; s.dim()]).iter().all(|&x| x == 0.0));
        // psi = (1, 0), z = x(1-x)... only the gradient's integral matters:
        // (grad z, (1,0)) = integral of dz/dx = 0 for z vanishing on the boundary.
        let z = s.interpolate(|p| p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]));
        let psi = v.interpolate(|_| [1.0, 0.0]);
        let val: f64 = c.mul_vec(&z).iter().zip(&psi).map(|(a, b)| a * b).sum();
        assert!(val.abs() < 1e-14);
        // linear z on an unconstrained space: (grad z, psi) = |Omega| * (2, 3) . (1, -1)
        let s_free = build_scalar_space(&m, 1, &free_partition(&m)).unwrap();
        let c = assemble_coupling(&v, &s_free).unwrap();
        let z = s_free.interpolate(|p| 2.0 * p[0] + 3.0 * p[1]);
        let psi = v.interpolate(|_| [1.0, -1.0]);
        let val: f64 = c.mul_vec(&z).iter().zip(&psi).map(|(a, b)| a * b).sum();
        assert!((val + 1.0).abs() < 1e-13);
        let other = Arc::new(generate_unit_square(1));
        let s_other = build_scalar_space(&other, 2, &free_partition(&other)).unwrap();
        assert_eq!(assemble_coupling(&v, &s_other).unwrap_err(), AssemblyError::MeshMismatch);
    }

    #[test]
    fn loads() {
        let m = Arc::new(generate_unit_square(2));
        let s = build_scalar_space(&m, 1, &free_partition(&m)).unwrap();
        let f = assemble_load(&s, &LoadSpec::Uniform(1.0)).unwrap();
        assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let f = assemble_load(&s, &LoadSpec::PointLoad { at: [0.5, 0.5], magnitude: 2.0 }).unwrap();
        let center = (0..m.num_vertices()).find(|&v| m.vertices()[v] == [0.5, 0.5]).unwrap();
        for (i, v) in f.iter().enumerate() {
            let expect = if Some(i) == s.node_dof(center) { 2.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-14);
        }
        assert_eq!(
            assemble_load(&s, &LoadSpec::PointLoad { at: [2.0, 0.5], magnitude: 1.0 }).unwrap_err(),
            AssemblyError::PointOutsideDomain(2.0, 0.5)
        );
    }
}
