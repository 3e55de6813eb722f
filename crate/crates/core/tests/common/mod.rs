//! Property checks shared by the acceptance report and the proptest suites.
//! Each check returns the measured error on success and a description on failure.

#![allow(dead_code)]

use c1free::assembly::{
    assemble_a, assemble_a_with_quadrature, assemble_b, assemble_coupling, assemble_grad_grad, circulation_vector,
    gauss_legendre, quadrature_rule, vector_on_element, FormSpec, MAX_QUADRATURE_DEGREE,
};
use c1free::mesh::{
    classify_boundary, mesh_xi, vertex_stars, BoundaryClass, BoundaryPartition, ChainEdge, TriMesh,
};
use c1free::postproc::{von_mises, Tensor};
use c1free::solver::{factorize_spd, woodbury_solve, CsrMatrix, TripletMatrix};
use c1free::spaces::{build_scalar_space, build_vector_space};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;
use std::sync::Arc;

pub type CheckResult = Result<f64, String>;

pub fn uniform_partition(mesh: &TriMesh, class: BoundaryClass) -> BoundaryPartition {
    let rules: BTreeMap<i32, BoundaryClass> = (1..=8).map(|l| (l, class)).collect();
    classify_boundary(mesh, &rules).expect("all labels mapped")
}

/// Every boundary edge free, as one chain. Only meaningful for vector spaces.
pub fn free_partition(mesh: &TriMesh) -> BoundaryPartition {
    let mut edge_class = vec![None; mesh.num_edges()];
    let chain = mesh
        .boundary_cycle()
        .iter()
        .map(|s| {
            edge_class[s.edge] = Some(BoundaryClass::Free);
            ChainEdge { edge: s.edge, from: s.from, to: s.to }
        })
        .collect();
    BoundaryPartition { edge_class, cs_components: vec![], f_components: vec![chain] }
}

fn random_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn ensure(err: f64, tol: f64, what: &str) -> CheckResult {
    if err <= tol {
        Ok(err)
    } else {
        Err(format!("{what}: {err:e} > {tol:e}"))
    }
}

/// Triangle rules against `a! b! / (a + b + 2)!`, Gauss-Legendre against `1 / (k + 1)`.
pub fn quadrature_exactness() -> CheckResult {
    let mut worst: f64 = 0.0;
    for d in 1..=MAX_QUADRATURE_DEGREE {
        let rule = quadrature_rule(d).map_err(|e| e.to_string())?;
        for a in 0..=d as u32 {
            for b in 0..=(d as u32 - a) {
                let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                let approx: f64 =
                    0.5 * rule.points.iter().zip(&rule.weights).map(|(x, w)| w * x[0].powi(a as i32) * x[1].powi(b as i32)).sum::<f64>();
                worst = worst.max((approx - exact).abs() / exact);
            }
        }
    }
    for n in 1..=12 {
        let (x, w) = gauss_legendre(n);
        for k in 0..2 * n as i32 {
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            worst = worst.max((approx - 1.0 / (k + 1) as f64).abs() * (k + 1) as f64);
        }
    }
    ensure(worst, 1e-13, "quadrature relative error")
}

fn symmetry(m: &CsrMatrix, what: &str) -> CheckResult {
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    ensure(m.symmetry_error() / scale, 1e-12, what)
}

/// Symmetry of `K`, `A` and the rot Gram matrix, positivity of `A` and `K`,
/// semi-definiteness of the rot Gram matrix and adjointness of the coupling.
pub fn matrix_invariants(mesh: &Arc<TriMesh>, p: usize, partition: &BoundaryPartition, form: &FormSpec, seed: u64) -> CheckResult {
    let mut rng = StdRng::seed_from_u64(seed);
    let s = build_scalar_space(mesh, p, partition).map_err(|e| e.to_string())?;
    let v = build_vector_space(mesh, p - 1, partition).map_err(|e| e.to_string())?;
    let k = assemble_grad_grad(&s).matrix;
    let a = assemble_a(&v, form).map_err(|e| e.to_string())?.matrix;
    let b = assemble_b(&v, partition);
    let r = &b.matrix;
    let mut worst: f64 = 0.0;
    worst = worst.max(symmetry(&k, "grad-grad symmetry")?);
    worst = worst.max(symmetry(&a, "a-form symmetry")?);
    worst = worst.max(symmetry(r, "rot Gram symmetry")?);
    let a_scale = a.frobenius_norm();
    for _ in 0..100 {
        let x = random_vec(&mut rng, v.dim());
        let nx = dot(&x, &x);
        let qa = a.quad_form(&x);
        if qa < -1e-10 * nx * a_scale.max(1.0) {
            return Err(format!("x^T A x = {qa:e} for |x|^2 = {nx:e}"));
        }
        let qr = r.quad_form(&x);
        if qr < -1e-10 * nx * r.frobenius_norm().max(1.0) {
            return Err(format!("x^T R x = {qr:e}"));
        }
    }
    if s.dim() > 0 {
        factorize_spd(&k).map_err(|e| format!("grad-grad not SPD: {e}"))?;
    }
    let c = assemble_coupling(&v, &s).map_err(|e| e.to_string())?;
    for _ in 0..5 {
        let z = random_vec(&mut rng, s.dim());
        let th = random_vec(&mut rng, v.dim());
        let lhs = dot(&c.mul_vec(&z), &th);
        let rhs = dot(&c.tr_mul_vec(&th), &z);
        worst = worst.max(ensure((lhs - rhs).abs() / (1.0 + lhs.abs()), 1e-12, "coupling adjointness")?);
    }
    Ok(worst)
}

/// Reassembling `A` with a rule four degrees higher changes nothing.
pub fn quadrature_degree_sufficient(mesh: &Arc<TriMesh>, q: usize, partition: &BoundaryPartition, form: &FormSpec) -> CheckResult {
    let v = build_vector_space(mesh, q, partition).map_err(|e| e.to_string())?;
    let a = assemble_a(&v, form).map_err(|e| e.to_string())?.matrix;
    let hi = assemble_a_with_quadrature(&v, form, 2 * (q - 1) + 4).map_err(|e| e.to_string())?.matrix;
    let diff = a.add_scaled(&hi, -1.0);
    ensure(diff.frobenius_norm() / a.frobenius_norm().max(f64::MIN_POSITIVE), 1e-12, "a-form quadrature +4")
}

/// `integral of rot theta = circulation of theta along the boundary` for random theta.
pub fn stokes_identity(mesh: &Arc<TriMesh>, q: usize, seed: u64) -> CheckResult {
    let part = free_partition(mesh);
    let v = build_vector_space(mesh, q, &part).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(seed);
    let th = random_vec(&mut rng, v.dim());
    let rhs = dot(&circulation_vector(&v, &part.f_components[0]), &th);
    let rule = quadrature_rule(q.max(1)).map_err(|e| e.to_string())?;
    let mut lhs = 0.0;
    for t in 0..mesh.num_triangles() {
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let s = vector_on_element(&v, t, &th, *x);
            lhs += mesh.area(t) * w * (s.grad[1][0] - s.grad[0][1]);
        }
    }
    ensure((lhs - rhs).abs(), 1e-10, "Stokes identity")
}

/// Random sparse SPD matrix: a banded, diagonally dominant pattern.
pub fn random_spd(n: usize, rng: &mut StdRng) -> CsrMatrix {
    let mut t = TripletMatrix::new(n, n);
    let mut diag = vec![1.0; n];
    for i in 0..n {
        for off in [1usize, 3, 17] {
            let j = i + off;
            if j < n && rng.gen_bool(0.7) {
                let v: f64 = rng.gen_range(-1.0..1.0);
                t.push(i, j, v);
                t.push(j, i, v);
                diag[i] += v.abs();
                diag[j] += v.abs();
            }
        }
    }
    for (i, d) in diag.into_iter().enumerate() {
        t.push(i, i, d);
    }
    t.to_csr()
}

/// Woodbury-corrected solve against the dense factorization of `A + lambda U U^T`.
pub fn woodbury_vs_dense(n: usize, k: usize, lambda: f64, seed: u64) -> CheckResult {
    let mut rng = StdRng::seed_from_u64(seed);
    let a = random_spd(n, &mut rng);
    let u: Vec<Vec<f64>> = (0..k).map(|_| random_vec(&mut rng, n)).collect();
    let b = random_vec(&mut rng, n);
    let f = factorize_spd(&a).map_err(|e| e.to_string())?;
    let x = woodbury_solve(&f, lambda, &u, &b).map_err(|e| e.to_string())?;
    let mut dense = a.to_dense();
    for ui in &u {
        let col = DVector::from_column_slice(ui);
        dense += lambda * &col * col.transpose();
    }
    let chol = nalgebra::Cholesky::new(dense).ok_or("dense matrix not SPD")?;
    let y = chol.solve(&DVector::from_column_slice(&b));
    let diff = (DVector::from_column_slice(&x) - &y).norm();
    ensure(diff / y.norm(), 1e-9, "Woodbury vs dense")
}

/// `xi(a) = 0` exactly on singular vertices and positive on the other
/// candidates; `mesh_xi` unchanged by a rigid rotation.
pub fn xi_consistency(mesh: &TriMesh, partition: &BoundaryPartition, angle: f64) -> CheckResult {
    for s in vertex_stars(mesh, partition) {
        if s.is_singular() && s.xi() != 0.0 {
            return Err(format!("singular vertex {} has xi = {:e}", s.vertex, s.xi()));
        }
        if s.is_candidate() && !s.is_singular() && s.xi() <= 0.0 {
            return Err(format!("non-singular vertex {} has xi = 0", s.vertex));
        }
    }
    let (c, sn) = (angle.cos(), angle.sin());
    let rotated = mesh.map_vertices(|p| [c * p[0] - sn * p[1], sn * p[0] + c * p[1]]);
    let (x0, x1) = (mesh_xi(mesh, partition), mesh_xi(&rotated, partition));
    if x0.is_infinite() && x1.is_infinite() {
        return Ok(0.0);
    }
    ensure((x0 - x1).abs(), 1e-12, "mesh_xi under rotation")
}

/// `sigma_v(R M R^T) = sigma_v(M)`, relative to the stress scale.
pub fn von_mises_rotation(m: Tensor, angle: f64, tau: f64, z: f64) -> CheckResult {
    let r = DMatrix::from_row_slice(2, 2, &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()]);
    let md = DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
    let rm = &r * md * r.transpose();
    let rotated = [[rm[(0, 0)], rm[(0, 1)]], [rm[(1, 0)], rm[(1, 1)]]];
    let (s0, s1) = (von_mises(&m, tau, z), von_mises(&rotated, tau, z));
    ensure((s0 - s1).abs() / s0.max(1.0), 1e-12, "von Mises under rotation")
}
