//! Error norms against exact solutions and convergence studies on the unit square.

use super::PostprocError;
use crate::algorithm::{run_algorithm1, PenaltyConfig, SolutionBundle};
use crate::assembly::{quadrature_rule, FormSpec, LoadSpec, MAX_QUADRATURE_DEGREE};
use crate::mesh::{classify_boundary, generate_unit_square, BoundaryClass, Point, TriMesh};
use crate::spaces::{ScalarSpace, VectorSpace};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

#[path = "manufactured_gen.rs"]
mod generated;

/// Exact displacement with derivatives up to second order.
pub trait ExactSolution: Send + Sync {
    fn value(&self, x: Point) -> f64;
    fn grad(&self, x: Point) -> [f64; 2];
    fn hessian(&self, x: Point) -> [[f64; 2]; 2];
    fn bilaplacian(&self, x: Point) -> f64;
}

/// `w = sin^2(pi x) sin^2(pi y)`, clamped on the unit square.
#[derive(Debug, Clone, Copy, Default)]
pub struct SinSquared;

impl ExactSolution for SinSquared {
    fn value(&self, x: Point) -> f64 {
        generated::value(x[0], x[1])
    }
    fn grad(&self, x: Point) -> [f64; 2] {
        [generated::dx(x[0], x[1]), generated::dy(x[0], x[1])]
    }
    fn hessian(&self, x: Point) -> [[f64; 2]; 2] {
        let xy = generated::dxy(x[0], x[1]);
        [[generated::dxx(x[0], x[1]), xy], [xy, generated::dyy(x[0], x[1])]]
    }
    fn bilaplacian(&self, x: Point) -> f64 {
        generated::bilaplacian(x[0], x[1])
    }
}

/// Load `D * bilaplacian(w)` for the strong form of a constant-coefficient plate.
pub fn manufactured_load(exact: Arc<dyn ExactSolution>, form: &FormSpec) -> LoadSpec {
    let d = form.rigidity();
    LoadSpec::Function(Arc::new(move |x| d * exact.bilaplacian(x)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
    pub h2_semi: f64,
}

impl ErrorNorms {
    pub fn h1(&self) -> f64 {
        (self.l2 * self.l2 + self.h1_semi * self.h1_semi).sqrt()
    }

    pub fn h2(&self) -> f64 {
        (self.l2 * self.l2 + self.h1_semi * self.h1_semi + self.h2_semi * self.h2_semi).sqrt()
    }
}

/// Errors of the displacement and of `theta`, whose elementwise gradient
/// stands in for the Hessian of the displacement.
pub fn error_norms(bundle: &SolutionBundle, exact: &dyn ExactSolution) -> ErrorNorms {
    field_errors(&bundle.sspace, &bundle.w, &bundle.vspace, &bundle.theta, exact)
}

pub fn field_errors(
    sspace: &ScalarSpace,
    w: &[f64],
    vspace: &VectorSpace,
    theta: &[f64],
    exact: &dyn ExactSolution,
) -> ErrorNorms {
    let mesh = sspace.mesh();
    let degree = (2 * sspace.degree() + 2).min(MAX_QUADRATURE_DEGREE);
    let rule = quadrature_rule(degree).expect("degree in range");
    let stab = sspace.tabulate_basis(&rule.points);
    let vtab = vspace.tabulate_basis(&rule.points);
    let (mut l2, mut h1, mut h2) = (0.0, 0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let map = mesh.affine(t);
        let area = mesh.area(t);
        let sl = sspace.local_coefficients(t, w);
        let vl = vspace.local_coefficients(t, theta);
        for (q, (xi, wq)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let x = map.map(*xi);
            let mut value = 0.0;
            let mut gref = [0.0; 2];
            for (i, c) in sl.iter().enumerate() {
                value += c * stab.value(q, i);
                let g = stab.grad(q, i);
                gref[0] += c * g[0];
                gref[1] += c * g[1];
            }
            let grad = map.grad(gref);
            let mut jac = [[0.0; 2]; 2];
            for (c, row) in jac.iter_mut().enumerate() {
                let mut r = [0.0; 2];
                for i in 0..vtab.n_basis {
                    let g = vtab.grad(q, i);
                    r[0] += vl[2 * i + c] * g[0];
                    r[1] += vl[2 * i + c] * g[1];
                }
                *row = map.grad(r);
            }
            let (ev, eg, eh) = (exact.value(x), exact.grad(x), exact.hessian(x));
            let s = area * wq;
            l2 += s * (value - ev).powi(2);
            h1 += s * ((grad[0] - eg[0]).powi(2) + (grad[1] - eg[1]).powi(2));
            for a in 0..2 {
                for b in 0..2 {
                    h2 += s * (jac[a][b] - eh[a][b]).powi(2);
                }
            }
        }
    }
    ErrorNorms { l2: l2.sqrt(), h1_semi: h1.sqrt(), h2_semi: h2.sqrt() }
}

/// `H^1` norm of a scalar field, or of the difference of two fields when
/// `other` is given (both in `space`).
pub fn scalar_h1_norm(space: &ScalarSpace, coeffs: &[f64], other: Option<&[f64]>) -> f64 {
    let diff: Vec<f64> = match other {
        Some(o) => coeffs.iter().zip(o).map(|(a, b)| a - b).collect(),
        None => coeffs.to_vec(),
    };
    let mesh = space.mesh();
    let rule = quadrature_rule((2 * space.degree()).min(MAX_QUADRATURE_DEGREE)).expect("degree in range");
    let tab = space.tabulate_basis(&rule.points);
    let mut sum = 0.0;
    for t in 0..mesh.num_triangles() {
        let map = mesh.affine(t);
        let area = mesh.area(t);
        let l = space.local_coefficients(t, &diff);
        for (q, wq) in rule.weights.iter().enumerate() {
            let mut v = 0.0;
            let mut g = [0.0; 2];
            for (i, c) in l.iter().enumerate() {
                v += c * tab.value(q, i);
                let gi = tab.grad(q, i);
                g[0] += c * gi[0];
                g[1] += c * gi[1];
            }
            let g = map.grad(g);
            sum += area * wq * (v * v + g[0] * g[0] + g[1] * g[1]);
        }
    }
    sum.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub level: usize,
    pub h: f64,
    pub dim: usize,
    pub vector_dim: usize,
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorReport {
    pub degree: usize,
    pub rows: Vec<ErrorRow>,
}

fn rate(a: f64, b: f64) -> f64 {
    (a / b).log2()
}

impl ErrorReport {
    /// Observed `(L2, H1, H2)` rates between consecutive rows.
    pub fn rates(&self) -> Vec<[f64; 3]> {
        self.rows
            .windows(2)
            .map(|w| [rate(w[0].l2, w[1].l2), rate(w[0].h1, w[1].h1), rate(w[0].h2, w[1].h2)])
            .collect()
    }

    pub fn final_h2_rate(&self) -> Option<f64> {
        self.rates().last().map(|r| r[2])
    }

    pub fn iterations(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.iterations).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("degree,level,h,dim,vector_dim,l2,h1,h2,rate_l2,rate_h1,rate_h2,iterations\n");
        let rates = self.rates();
        for (k, r) in self.rows.iter().enumerate() {
            let rt = if k == 0 { None } else { Some(rates[k - 1]) };
            let fmt_rate = |i: usize| rt.map_or(String::new(), |v| format!("{:.16e}", v[i]));
            writeln!(
                s,
                "{},{},{:.16e},{},{},{:.16e},{:.16e},{:.16e},{},{},{},{}",
                self.degree,
                r.level,
                r.h,
                r.dim,
                r.vector_dim,
                r.l2,
                r.h1,
                r.h2,
                fmt_rate(0),
                fmt_rate(1),
                fmt_rate(2),
                r.iterations
            )
            .expect("writing to a string");
        }
        s
    }
}

/// Study on a family of meshes with a manufactured exact solution.
#[derive(Clone)]
pub struct StudySpec {
    pub degree: usize,
    pub levels: Vec<usize>,
    pub form: FormSpec,
    pub penalty: PenaltyConfig,
    pub exact: Arc<dyn ExactSolution>,
    /// Mesh for each level.
    pub mesh_for_level: Arc<dyn Fn(usize) -> TriMesh + Send + Sync>,
    pub boundary: BTreeMap<i32, BoundaryClass>,
    pub parallel: bool,
}

impl StudySpec {
    /// Clamped unit square with `w = sin^2(pi x) sin^2(pi y)`.
    pub fn unit_square(degree: usize, levels: Vec<usize>, form: FormSpec, penalty: PenaltyConfig) -> Self {
        StudySpec {
            degree,
            levels,
            form,
            penalty,
            exact: Arc::new(SinSquared),
            mesh_for_level: Arc::new(generate_unit_square),
            boundary: (1..=4).map(|l| (l, BoundaryClass::Clamped)).collect(),
            parallel: false,
        }
    }
}

fn study_row(spec: &StudySpec, level: usize) -> Result<ErrorRow, PostprocError> {
    let mesh = Arc::new((spec.mesh_for_level)(level));
    let partition = classify_boundary(&mesh, &spec.boundary)?;
    let load = manufactured_load(spec.exact.clone(), &spec.form);
    let bundle = run_algorithm1(&mesh, spec.degree, &partition, &spec.form, &load, &spec.penalty)?;
    let e = error_norms(&bundle, spec.exact.as_ref());
    log::info!(
        "p={} level={} dim={} iterations={} h2 error={:e}",
        spec.degree,
        level,
        bundle.sspace.dim(),
        bundle.trace.iterations,
        e.h2()
    );
    Ok(ErrorRow {
        level,
        h: mesh.h(),
        dim: bundle.sspace.dim(),
        vector_dim: bundle.vspace.dim(),
        l2: e.l2,
        h1: e.h1(),
        h2: e.h2(),
        iterations: bundle.trace.iterations,
    })
}

pub fn convergence_study(spec: &StudySpec) -> Result<ErrorReport, PostprocError> {
    let rows: Result<Vec<ErrorRow>, PostprocError> = if spec.parallel {
        use rayon::prelude::*;
        spec.levels.par_iter().map(|&l| study_row(spec, l)).collect()
    } else {
        spec.levels.iter().map(|&l| study_row(spec, l)).collect()
    };
    Ok(ErrorReport { degree: spec.degree, rows: rows? })
}
