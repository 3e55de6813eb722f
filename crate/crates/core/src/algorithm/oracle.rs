//! Dense reference computations for small meshes: a direct `C^1` solve of
//! the plate problem, the inf-sup constant of the rot/circulation
//! constraint, and rank checks of the discrete exact sequence.

use super::AlgorithmError;
use crate::assembly::{
    assemble_b, assemble_load, assemble_vector_h1, gauss_legendre, quadrature_rule, FormSpec, LoadSpec,
};
use crate::mesh::{singular_vertices, BoundaryClass, BoundaryPartition, TriMesh};
use crate::solver::CsrMatrix;
use crate::spaces::{
    build_scalar_space_with_max, build_vector_space_with_max, ScalarSpace, VectorSpace, HARD_MAX_DEGREE,
};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::sync::Arc;

/// Dense computations refuse spaces larger than this.
pub const ORACLE_MAX_DOFS: usize = 2500;

/// Relative threshold separating zero from nonzero singular values.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub space: ScalarSpace,
    pub w: Vec<f64>,
    /// `a(grad w, grad w)`.
    pub energy: f64,
    /// `F(w)`.
    pub load_work: f64,
    /// Dimension of the `C^1` subspace.
    pub null_dim: usize,
    pub num_constraints: usize,
}

fn check_size(n: usize) -> Result<(), AlgorithmError> {
    if n > ORACLE_MAX_DOFS {
        return Err(AlgorithmError::TooLargeForOracle { dofs: n, limit: ORACLE_MAX_DOFS });
    }
    Ok(())
}

fn to_dense(m: &CsrMatrix) -> DMatrix<f64> {
    m.to_dense()
}

/// Rows of the linear conditions making a member of `space` continuously
/// differentiable with `d_n w = 0` on clamped edges.
fn c1_constraints(space: &ScalarSpace, partition: &BoundaryPartition) -> Vec<Vec<f64>> {
    let mesh = space.mesh();
    let p = space.degree();
    let (gx, _) = gauss_legendre(p);
    let mut rows = Vec::new();
    for (e, edge) in mesh.edges().iter().enumerate() {
        let sides: &[usize] = if edge.is_boundary() {
            if partition.class_of(e) != Some(BoundaryClass::Clamped) {
                continue;
            }
            &edge.tris[..1]
        } else {
            &edge.tris[..2]
        };
        let (a, b) = (mesh.vertices()[edge.v[0]], mesh.vertices()[edge.v[1]]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let normal = [d[1], -d[0]];
        for s in &gx {
            let x = [a[0] + s * d[0], a[1] + s * d[1]];
            let mut row = vec![0.0; space.dim()];
            for (k, &t) in sides.iter().enumerate() {
                let sign = if k == 0 { 1.0 } else { -1.0 };
                let map = mesh.affine(t);
                let tab = space.tabulate_basis(&[map.pullback(x)]);
                for (i, dof) in space.local_dofs(t).into_iter().enumerate() {
                    if let Some(dof) = dof {
                        let g = map.grad(tab.grad(0, i));
                        row[dof] += sign * (g[0] * normal[0] + g[1] * normal[1]);
                    }
                }
            }
            rows.push(row);
        }
    }
    rows
}

/// Orthonormal basis (as columns) of the null space of the stacked rows.
fn null_space(rows: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    let m = rows.len().max(n);
    let b = DMatrix::from_fn(m, n, |i, j| rows.get(i).map_or(0.0, |r| r[j]));
    let svd = b.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> =
        (0..n).filter(|&k| svd.singular_values[k] <= RANK_TOL * smax.max(f64::MIN_POSITIVE)).collect();
    DMatrix::from_fn(n, keep.len(), |i, j| vt[(keep[j], i)])
}

/// Dense matrix of `a(grad phi_i, grad phi_j)` on the scalar space.
fn hessian_energy(space: &ScalarSpace, form: &FormSpec) -> Result<DMatrix<f64>, AlgorithmError> {
    let mesh = space.mesh();
    let p = space.degree();
    let rule = quadrature_rule((2 * (p - 2)).max(1))?;
    let tab = space.tabulate_basis(&rule.points);
    let nl = tab.n_basis;
    let mut a = DMatrix::zeros(space.dim(), space.dim());
    let mut hs = vec![[[0.0; 2]; 2]; nl];
    for t in 0..mesh.num_triangles() {
        let map = mesh.affine(t);
        let area = mesh.area(t);
        let dofs = space.local_dofs(t);
        for (qp, w) in rule.weights.iter().enumerate() {
            for (i, h) in hs.iter_mut().enumerate() {
                let r = tab.hessian(qp, i);
                *h = map.hessian([[r[0], r[1]], [r[1], r[2]]]);
            }
            for (i, di) in dofs.iter().enumerate() {
                let Some(di) = *di else { continue };
                for (j, dj) in dofs.iter().enumerate() {
                    let Some(dj) = *dj else { continue };
                    a[(di, dj)] += area * w * form.energy_density(&hs[i], &hs[j]);
                }
            }
        }
    }
    Ok(a)
}

/// Direct Galerkin solve of `a(grad w, grad v) = F(v)` over the `C^1`
/// subspace of the degree-`p` Lagrange space, found as a dense null space.
pub fn oracle_c1_solve(
    mesh: &Arc<TriMesh>,
    p: usize,
    partition: &BoundaryPartition,
    form: &FormSpec,
    load: &LoadSpec,
) -> Result<OracleSolution, AlgorithmError> {
    form.validate()?;
    let space = build_scalar_space_with_max(mesh, p, partition, HARD_MAX_DEGREE)?;
    let n = space.dim();
    check_size(n)?;
    let rows = c1_constraints(&space, partition);
    let z = null_space(&rows, n);
    let a = hessian_energy(&space, form)?;
    let f = DVector::from_vec(assemble_load(&space, load)?);
    let reduced = z.transpose() * &a * &z;
    let rhs = z.transpose() * &f;
    let chol = reduced.clone().cholesky().ok_or(crate::solver::SolverError::NotPositiveDefinite {
        index: 0,
        pivot: 0.0,
    })?;
    let w = &z * chol.solve(&rhs);
    let energy = (w.transpose() * &a * &w)[(0, 0)];
    let load_work = f.dot(&w);
    Ok(OracleSolution {
        space,
        w: w.as_slice().to_vec(),
        energy,
        load_work,
        null_dim: z.ncols(),
        num_constraints: rows.len(),
    })
}

/// Dense `rot`-gram plus circulation outer products.
fn constraint_gram(vspace: &VectorSpace, partition: &BoundaryPartition) -> DMatrix<f64> {
    let b = assemble_b(vspace, partition);
    let mut m = to_dense(&b.matrix);
    for c in &b.circulations {
        let c = DVector::from_column_slice(c);
        m += &c * c.transpose();
    }
    m
}

fn rank_and_kernel(m: &DMatrix<f64>) -> (usize, usize) {
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let rank = eig.eigenvalues.iter().filter(|&&v| v.abs() > RANK_TOL * max).count();
    (rank, m.nrows() - rank)
}

/// Smallest nonzero singular value of `theta -> (rot theta, circulations)`
/// measured from the full `H^1` norm into `L^2`.
pub fn estimate_inf_sup(vspace: &VectorSpace, partition: &BoundaryPartition) -> Result<f64, AlgorithmError> {
    let n = vspace.dim();
    check_size(n)?;
    let m = constraint_gram(vspace, partition);
    let h = to_dense(&assemble_vector_h1(vspace));
    let l = h
        .cholesky()
        .ok_or(crate::solver::SolverError::NotPositiveDefinite { index: 0, pivot: 0.0 })?
        .l();
    // L^-1 M L^-T
    let linv_m = l.solve_lower_triangular(&m).expect("nonsingular factor");
    let s = l.solve_lower_triangular(&linv_m.transpose()).expect("nonsingular factor");
    let s = 0.5 * (&s + s.transpose());
    let eig = SymmetricEigen::new(s);
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let min = eig
        .eigenvalues
        .iter()
        .filter(|&&v| v > RANK_TOL * max)
        .fold(f64::INFINITY, |a, &b| a.min(b));
    Ok(min.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSequenceReport {
    pub vector_dim: usize,
    /// Dimension of rot-free fields with vanishing circulations.
    pub kernel_dim: usize,
    /// Dimension of the `C^1` scalar space.
    pub c1_dim: usize,
    /// Rank of the rot operator alone.
    pub rot_dim: usize,
    /// `T dim P_{p-2} - |singular vertices| - [no free boundary]`, for `p >= 5`.
    pub predicted_rot_dim: Option<usize>,
    /// `T dim P_{p-2}`.
    pub unconstrained_rot_dim: usize,
    pub num_singular: usize,
}

impl ExactSequenceReport {
    pub fn gradients_match(&self) -> bool {
        self.kernel_dim == self.c1_dim
    }

    pub fn rot_dim_matches(&self) -> Option<bool> {
        self.predicted_rot_dim.map(|d| d == self.rot_dim)
    }
}

/// Dense rank checks of the sequence `W -> G -> rot G`.
pub fn verify_exact_sequence(
    mesh: &Arc<TriMesh>,
    p: usize,
    partition: &BoundaryPartition,
) -> Result<ExactSequenceReport, AlgorithmError> {
    if p < 2 {
        return Err(AlgorithmError::InvalidConfig(format!("degree {p} below 2")));
    }
    let vspace = build_vector_space_with_max(mesh, p - 1, partition, HARD_MAX_DEGREE - 1)?;
    let sspace = build_scalar_space_with_max(mesh, p, partition, HARD_MAX_DEGREE)?;
    check_size(vspace.dim())?;
    check_size(sspace.dim())?;
    let (_, kernel_dim) = rank_and_kernel(&constraint_gram(&vspace, partition));
    let (rot_dim, _) = rank_and_kernel(&to_dense(&assemble_b(&vspace, partition).matrix));
    let c1_dim = null_space(&c1_constraints(&sspace, partition), sspace.dim()).ncols();
    let num_singular = singular_vertices(mesh, partition).len();
    let unconstrained_rot_dim = mesh.num_triangles() * (p - 1) * p / 2;
    let predicted_rot_dim = (p >= 5).then(|| {
        unconstrained_rot_dim - num_singular - usize::from(!partition.has_free())
    });
    Ok(ExactSequenceReport {
        vector_dim: vspace.dim(),
        kernel_dim,
        c1_dim,
        rot_dim,
        predicted_rot_dim,
        unconstrained_rot_dim,
        num_singular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{classify_boundary, criss_cross_square, generate_unit_square};
    use std::collections::BTreeMap;

    fn all(m: &TriMesh, class: BoundaryClass) -> BoundaryPartition {
        let rules: BTreeMap<i32, BoundaryClass> = (1..=8).map(|l| (l, class)).collect();
        classify_boundary(m, &rules).unwrap()
    }

    #[test]
    fn oracle_energy_identity() {
        let m = Arc::new(generate_unit_square(2));
        let part = all(&m, BoundaryClass::Clamped);
        let o = oracle_c1_solve(&m, 5, &part, &FormSpec::Biharmonic, &LoadSpec::Uniform(1.0)).unwrap();
        assert!(o.null_dim >= 1);
        assert!((o.energy - o.load_work).abs() <= 1e-10 * o.energy.abs());
    }

    #[test]
    fn oracle_size_guard() {
        let m = Arc::new(generate_unit_square(5));
        let part = all(&m, BoundaryClass::Clamped);
        assert!(matches!(
            oracle_c1_solve(&m, 5, &part, &FormSpec::Biharmonic, &LoadSpec::Uniform(1.0)),
            Err(AlgorithmError::TooLargeForOracle { .. })
        ));
    }

    #[test]
    fn exact_sequence_simply_supported_square() {
        let m = Arc::new(generate_unit_square(1));
        let part = all(&m, BoundaryClass::SimplySupported);
        let r = verify_exact_sequence(&m, 5, &part).unwrap();
        assert!(r.gradients_match(), "{r:?}");
        assert_eq!(r.rot_dim_matches(), Some(true), "{r:?}");
    }

    #[test]
    fn exact_sequence_criss_cross() {
        let m = Arc::new(criss_cross_square([0.5, 0.5]));
        let part = all(&m, BoundaryClass::SimplySupported);
        let r = verify_exact_sequence(&m, 5, &part).unwrap();
        assert_eq!(r.num_singular, 1);
        assert!(r.gradients_match(), "{r:?}");
        assert_eq!(r.rot_dim, r.unconstrained_rot_dim - 2, "{r:?}");
        assert_eq!(r.rot_dim_matches(), Some(true), "{r:?}");
    }

    #[test]
    fn inf_sup_is_positive() {
        let m = Arc::new(generate_unit_square(2));
        let part = all(&m, BoundaryClass::SimplySupported);
        let v = build_vector_space_with_max(&m, 2, &part, 7).unwrap();
        assert!(estimate_inf_sup(&v, &part).unwrap() > 0.0);
    }
}
